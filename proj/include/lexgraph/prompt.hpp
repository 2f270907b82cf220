#pragma once

#include <lexgraph/kg.hpp>
#include <lexgraph/relevance.hpp>
#include <lexgraph/retrieval.hpp>

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lexgraph::prompt {

/// One query feature axis (legal domain category, question nature, ...)
/// with its expert weight, document frequency, and the vocabulary the
/// query and templates are projected onto.
struct FeatureDimension {
    std::string name;
    double weight = 0.0;    ///< w_j; the set sums to 1
    int df = 1;             ///< documents containing the feature, 1..N
    std::vector<std::string> vocabulary;
};

struct ReasoningStep {
    std::string name;
    std::string instruction;
};

/// Ordered analysis steps; at least two, names unique.
struct ReasoningPathTemplate {
    std::vector<ReasoningStep> steps;
};

struct TaskTemplate {
    std::string id;
    std::string role_preamble;
    std::vector<std::vector<double>> dimension_vectors;    ///< one per dimension
    std::vector<int> spec_term_counts;                     ///< professional terms per dimension
    ReasoningPathTemplate reasoning_path;
};

/// Everything the ".templates.json" file carries.
struct TemplateSet {
    std::vector<FeatureDimension> dimensions;
    std::vector<TaskTemplate> templates;
    double alpha = 0.1;          ///< professional-term boost factor
    double score_floor = 0.0;    ///< below this the generic template wins
    std::string generic_template_id;

    void validate() const;    ///< throws std::invalid_argument
    const TaskTemplate* findTemplate(const std::string& id) const;
};

TemplateSet loadTemplates(std::istream& in);

/// Query-side projections: one count vector per dimension plus the number
/// of professional terms (positive ILT weight) the query contributes to
/// that dimension's vocabulary.
struct QueryFeatures {
    std::vector<std::vector<double>> vectors;
    std::vector<int> spec_terms;
};

QueryFeatures extractFeatures(const retrieval::Query& q, const TemplateSet& set,
                              const retrieval::TermStats* lexicon);

/// Sum over dimensions of w_j * cos(Q_j, T_ij) * ln(N / df_j) *
/// (1 + alpha * spec_terms_j). The cosine of a zero vector is 0.
double taskMatchScore(const QueryFeatures& features, const TaskTemplate& tmpl,
                      const TemplateSet& set, std::size_t doc_count);

struct Selection {
    const TaskTemplate* tmpl = nullptr;
    double score = 0.0;
};

/// Best-scoring template, ties broken by ascending id; when every score
/// falls below the floor the designated generic template is returned.
Selection selectTaskTemplate(const QueryFeatures& features, const TemplateSet& set,
                             std::size_t doc_count);

// --- prompt documents -------------------------------------------------------

enum class Mode { Baseline, Traditional, Complete };

const char* modeName(Mode mode);
std::optional<Mode> modeFromName(std::string_view name);

enum class Toggle { TD, KB, RG, DO, LCM, SVM };

const char* toggleName(Toggle t);
std::optional<Toggle> toggleFromName(std::string_view name);

using ToggleSet = std::set<Toggle>;

struct BackgroundEntry {
    kg::ConceptId concept_id;
    std::string code;
    std::string snippet;    ///< rendered line, carries the code for citability
    relevance::RelevanceBreakdown breakdown;
    bool from_search = false;    ///< snippet replaced by a higher-authority web hit
    double authority = 0.0;      ///< set when from_search
};

/// A web-sourced entry appended after the graph background.
struct SearchEntry {
    std::string code;
    std::string snippet;
    double authority = 0.0;
};

/// Text that displaced a concept's own snippet during knowledge merging.
struct WebOverride {
    std::string text;
    double authority = 0.0;
};

/// The assembled three-section prompt plus the provenance of everything
/// injected into it. render() is deterministic: identical documents give
/// byte-identical text.
struct PromptDocument {
    std::string query_text;
    Mode mode = Mode::Complete;
    ToggleSet toggles;
    bool has_task_definition = false;
    bool has_knowledge_background = false;
    bool has_reasoning_guidance = false;
    std::string task_definition;    ///< role preamble
    std::vector<BackgroundEntry> knowledge_background;
    std::vector<SearchEntry> search_background;
    std::vector<ReasoningStep> reasoning_guidance;
    std::vector<std::string> extra_guidance;          ///< appended instruction blocks
    std::set<std::string> applied_adjustments;        ///< idempotence guard
    /// Concept id -> replacement text; consulted whenever a background
    /// entry is (re)rendered, including later expansions.
    std::map<kg::ConceptId, WebOverride> web_overrides;

    std::string render() const;
    /// Swaps in the override text when one exists for the entry's concept.
    void applyWebOverride(BackgroundEntry& entry) const;
};

/// Renders a background entry line: "[CODE] Title: text" (code omitted
/// when the concept has none).
std::string renderSnippet(const kg::LegalConcept& c);

/// Builds the prompt for the given mode and toggles. The background must
/// already be relevance-ranked; the first `take` entries are injected in
/// that order. Baseline mode (or a complete mode with TD, KB, and RG all
/// disabled) renders to exactly the raw query text.
PromptDocument assemblePrompt(const retrieval::Query& q, const TaskTemplate& tmpl,
                              const std::vector<relevance::Ranked>& background, std::size_t take,
                              const kg::KnowledgeGraph& g, Mode mode, const ToggleSet& toggles);

} // namespace lexgraph::prompt
