#pragma once

#include <lexgraph/config.hpp>
#include <lexgraph/embedding.hpp>
#include <lexgraph/freshness.hpp>
#include <lexgraph/kg.hpp>
#include <lexgraph/prompt.hpp>
#include <lexgraph/quality.hpp>
#include <lexgraph/relevance.hpp>
#include <lexgraph/retrieval.hpp>

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lexgraph::pipeline {

/// Everything a query run needs, resolved from the config file plus the
/// command line. Baseline mode clears every toggle; complete mode starts
/// from all-on minus the explicitly disabled set; traditional mode keeps
/// the knowledge background only and collapses retrieval to the lexical
/// strategy. Disabling LCM or SVM zeroes the matching fusion weight and
/// renormalizes the rest.
struct RunConfig {
    prompt::Mode mode = prompt::Mode::Complete;
    prompt::ToggleSet toggles;

    std::filesystem::path graph_path;
    std::filesystem::path terms_path;
    std::filesystem::path templates_path;
    std::optional<std::filesystem::path> embeddings_path;
    std::optional<std::filesystem::path> mock_script_path;
    std::optional<std::filesystem::path> search_fixture_path;

    retrieval::MatchParams match;    ///< fusion weights already renormalized per toggles
    double sigma = 1.0;
    std::size_t retrieve_k = 6;

    relevance::Bm25Params bm25;
    relevance::RelevanceWeights rel_weights;
    double lambda_kg = 0.5;
    std::size_t background_m = 3;

    quality::QualityWeights quality_weights;
    quality::OptimizationConfig optimization;
    double expression_ref = 0.2;

    std::string search_as_of;
    std::string search_jurisdiction;
    freshness::MergeParams merge;

    std::string provider_kind = "mock";    ///< "mock" or "http"
    std::string provider_endpoint;
    std::string provider_model;

    std::set<std::string> query_jurisdictions;
};

/// Reads the config file and applies mode/toggle semantics.
RunConfig resolveRunConfig(const ConfigFile& file, prompt::Mode mode,
                           const prompt::ToggleSet& disabled);

/// Immutable corpus shared by every query session.
struct Runtime {
    kg::KnowledgeGraph graph;
    retrieval::TermStats stats;
    prompt::TemplateSet templates;
    std::optional<EmbeddingTable> embeddings;
    std::vector<freshness::SearchResult> search_fixtures;
    bool search_enabled = false;
};

/// Loads and validates every corpus file named by the config. Load errors
/// carry the offending file (and line where known).
Runtime ingestCorpus(const RunConfig& cfg);

/// One-line per corpus component: counts, avgdl, vocabulary sizes.
std::string ingestSummary(const Runtime& rt);

/// Builds the analyzed query: tokens, extracted legal code, concepts
/// identified by code or title occurrence, embedding, and jurisdictions.
retrieval::Query buildQuery(const std::string& text, const Runtime& rt, const RunConfig& cfg);

/// First legal code mentioned in free text: a designator phrase such as
/// "art. 1382 CC" or an already-canonical token such as "CC-1382"; empty
/// when none is found.
std::string extractQueryCode(const std::string& text);

struct QueryReport {
    std::string query_text;
    retrieval::Query query;
    prompt::Mode mode;
    prompt::ToggleSet toggles;
    std::string template_id;
    double template_score = 0.0;
    std::array<double, 4> fusion_weights{};
    std::vector<retrieval::RetrievalResult> retrieval;
    std::vector<prompt::BackgroundEntry> background;
    std::vector<prompt::SearchEntry> web_extras;
    std::string prompt_text;
    std::string response;
    quality::QualityReport quality;
    std::vector<quality::Iteration> iterations;
    int provider_calls = 0;
    std::optional<std::string> provider_error;
    double elapsed_ms = 0.0;

    /// Versioned, deterministically ordered document; timing is emitted
    /// only when include_timing is set so byte-stable reports stay possible.
    nlohmann::json toJson(bool include_timing) const;
};

/// Runs the full pipeline for one query against a loaded runtime.
QueryReport runQuery(const std::string& text, const Runtime& rt, const RunConfig& cfg,
                     quality::CompletionProvider& provider);

/// Builds the provider the config names: the scripted mock or the HTTP
/// adapter. `trace` receives request/response bodies for HTTP providers.
std::unique_ptr<quality::CompletionProvider> makeProvider(
    const RunConfig& cfg, std::function<void(const std::string&, const std::string&)> trace);

} // namespace lexgraph::pipeline
