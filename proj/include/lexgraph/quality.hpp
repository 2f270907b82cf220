#pragma once

#include <lexgraph/embedding.hpp>
#include <lexgraph/kg.hpp>
#include <lexgraph/prompt.hpp>
#include <lexgraph/retrieval.hpp>

#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace lexgraph::quality {

struct QualityWeights {
    double accuracy = 0.2;
    double comprehensiveness = 0.2;
    double citation = 0.2;
    double logic = 0.2;
    double expression = 0.2;

    void validate() const;    ///< non-negative, sum 1 within 1e-9
};

struct QualityReport {
    double accuracy = 0.0;
    double comprehensiveness = 0.0;
    double citation = 0.0;
    double logic = 0.0;
    double expression = 0.0;
    double total = 0.0;
    bool passed = false;
    std::vector<std::string> diagnostics;    ///< "low_*" tags plus named deficiencies
};

/// Deficiency tag -> prompt edit, applied in table order, each at most
/// once over a prompt's lifetime.
struct AdjustmentRule {
    std::string deficiency;
    std::string edit;
};

std::vector<AdjustmentRule> defaultAdjustmentRules();

struct OptimizationConfig {
    double threshold = 0.6;      ///< in (0, 1]
    int max_iterations = 3;      ///< provider-call budget
    int expand_step = 2;         ///< background entries added per expansion
    std::vector<AdjustmentRule> rules = defaultAdjustmentRules();

    void validate() const;
};

/// Prompt text in, response text out. Implementations either tolerate
/// concurrent calls or document serialized access.
class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

/// Replays a fixed list of canned responses in order; after the script is
/// exhausted the last response repeats. Thread-safe.
class ScriptedProvider final : public CompletionProvider {
public:
    explicit ScriptedProvider(std::vector<std::string> responses);

    /// Parses the ".mock.json" format: a JSON array of response strings.
    static std::vector<std::string> parseScript(std::istream& in);

    std::string complete(const std::string& prompt) override;
    int calls() const;

private:
    std::vector<std::string> responses_;
    mutable std::mutex mutex_;
    std::size_t next_ = 0;
    int calls_ = 0;
};

// --- citation handling ------------------------------------------------------

struct CitationFragment {
    std::string text;
    bool well_formed = false;    ///< matches the "[CODE]" grammar
    std::string code;            ///< canonical code when well formed
};

/// Every citation-like fragment in the response: each '[' opens one,
/// closed by the next ']' (well-formed candidate) or running to the end
/// of the line (malformed).
std::vector<CitationFragment> scanCitations(const std::string& response);

/// True iff the fragment is exactly "[CODE]" with CODE a canonical
/// normalized code carried by some concept in the graph.
bool validateCitation(const std::string& fragment, const kg::KnowledgeGraph& g);

// --- assessment -------------------------------------------------------------

struct QualityContext {
    const kg::KnowledgeGraph& graph;
    QualityWeights weights;
    double threshold = 0.6;
    const TextEmbedder* embedder = nullptr;              ///< optional, for step coherence
    const retrieval::TermStats* lexicon = nullptr;       ///< optional, for expression scoring
    double expression_ref = 0.2;    ///< lexicon token ratio that saturates the score
};

/// Scores the five dimensions:
///   accuracy          valid citations of background concepts / all fragments
///   comprehensiveness background concepts cited / background size
///   citation          well-formed fragments / all fragments
///   logic             mean adjacent-paragraph similarity, rescaled to [0, 1]
///   expression        legal-lexicon token ratio against expression_ref
/// Ratios with nothing to judge score 1 (documented vacuous convention);
/// an absent denominator with evidence expected scores 0.
QualityReport assessQuality(const std::string& response, const prompt::PromptDocument& doc,
                            const QualityContext& ctx);

struct Adjusted {
    prompt::PromptDocument doc;
    std::vector<std::string> applied;    ///< edits performed this round
    std::string note;                    ///< set when no rule was applicable
};

/// Applies the first matching rule per outstanding deficiency, in table
/// order. Each edit runs once per prompt lifetime; reapplying the same
/// diagnostic leaves the document unchanged.
Adjusted adjustPrompt(const prompt::PromptDocument& doc, const QualityReport& report,
                      const std::vector<relevance::Ranked>& pool, const kg::KnowledgeGraph& g,
                      const OptimizationConfig& cfg);

struct Iteration {
    std::string prompt_text;
    std::string response;
    QualityReport report;
};

struct OptimizeOutcome {
    std::string response;
    QualityReport report;
    std::vector<Iteration> trace;
    int provider_calls = 0;
    std::optional<std::string> provider_error;    ///< abort reason, trace is partial
};

/// Generate -> assess -> adjust -> regenerate until the threshold is met,
/// the call budget is spent, or the provider fails. On exhaustion the
/// best-scoring iteration is returned. With dynamic_optimization off this
/// is a single generate + assess pass.
OptimizeOutcome optimize(prompt::PromptDocument doc, const std::vector<relevance::Ranked>& pool,
                         CompletionProvider& provider, const QualityContext& ctx,
                         const OptimizationConfig& cfg, bool dynamic_optimization);

} // namespace lexgraph::quality
