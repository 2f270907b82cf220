#include <lexgraph/pipeline.hpp>

#include <lexgraph/http_provider.hpp>
#include <lexgraph/scoring_kernels.hpp>
#include <lexgraph/text.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>

namespace lexgraph::pipeline {

using nlohmann::json;

namespace {

std::ifstream openOrThrow(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(std::string(what) + " file not found: " + path.string());
    }
    return in;
}

prompt::ToggleSet allToggles() {
    return {prompt::Toggle::TD, prompt::Toggle::KB, prompt::Toggle::RG,
            prompt::Toggle::DO, prompt::Toggle::LCM, prompt::Toggle::SVM};
}

// Zero the fusion weights of disabled strategies and renormalize the rest.
void applyFusionToggles(retrieval::MatchParams& match, const prompt::ToggleSet& toggles,
                        bool traditional) {
    auto& w = match.fusion_weights;
    if (!toggles.count(prompt::Toggle::LCM)) {
        w[0] = 0.0;
    }
    if (!toggles.count(prompt::Toggle::SVM)) {
        w[1] = 0.0;
    }
    if (traditional) {
        w[0] = 0.0;    // single-dimension lexical retrieval
        w[1] = 0.0;
        w[2] = 0.0;
    }
    const double sum = w[0] + w[1] + w[2] + w[3];
    if (sum <= 0.0) {
        throw ConfigError("every fusion weight is zero after applying toggles");
    }
    for (auto& x : w) {
        x /= sum;
    }
}

} // namespace

RunConfig resolveRunConfig(const ConfigFile& file, prompt::Mode mode,
                           const prompt::ToggleSet& disabled) {
    RunConfig cfg;
    cfg.mode = mode;

    switch (mode) {
        case prompt::Mode::Baseline:
            cfg.toggles = {};    // raw query only
            break;
        case prompt::Mode::Traditional:
            cfg.toggles = {prompt::Toggle::KB};
            break;
        case prompt::Mode::Complete:
            cfg.toggles = allToggles();
            break;
    }
    for (auto t : disabled) {
        cfg.toggles.erase(t);
    }

    auto requirePath = [&file](const std::string& key) {
        auto p = file.getPath(key);
        if (!p) {
            throw ConfigError("config is missing required key '" + key + "'");
        }
        return *p;
    };
    cfg.graph_path = requirePath("corpus.graph");
    cfg.terms_path = requirePath("corpus.terms");
    cfg.templates_path = requirePath("corpus.templates");
    cfg.embeddings_path = file.getPath("corpus.embeddings");

    cfg.sigma = file.getDouble("retrieval.sigma", 1.0);
    cfg.match.gamma = file.getDouble("retrieval.gamma", cfg.match.gamma);
    cfg.match.lambda_decay = file.getDouble("retrieval.lambda", cfg.match.lambda_decay);
    auto alphas = file.getDoubleList("retrieval.term_alphas");
    if (!alphas.empty()) {
        if (alphas.size() != 3) {
            throw ConfigError("retrieval.term_alphas needs exactly 3 values");
        }
        cfg.match.alpha1 = alphas[0];
        cfg.match.alpha2 = alphas[1];
        cfg.match.alpha3 = alphas[2];
    }
    auto fusion = file.getDoubleList("retrieval.fusion");
    if (!fusion.empty()) {
        if (fusion.size() != 4) {
            throw ConfigError("retrieval.fusion needs exactly 4 values (cm, vs, pi, tm)");
        }
        std::copy(fusion.begin(), fusion.end(), cfg.match.fusion_weights.begin());
    }
    cfg.match.ilt_cap = file.getDouble("retrieval.ilt_cap", cfg.match.ilt_cap);
    cfg.match.diversity_lambda =
        file.getDouble("retrieval.diversity_lambda", cfg.match.diversity_lambda);
    cfg.retrieve_k = static_cast<std::size_t>(file.getInt("retrieval.k", 6));

    applyFusionToggles(cfg.match, cfg.toggles, mode == prompt::Mode::Traditional);
    cfg.match.validate();

    cfg.bm25.k1 = file.getDouble("relevance.k1", cfg.bm25.k1);
    cfg.bm25.b = file.getDouble("relevance.b", cfg.bm25.b);
    cfg.bm25.delta = file.getDouble("relevance.delta", cfg.bm25.delta);
    cfg.bm25.validate();
    cfg.lambda_kg = file.getDouble("relevance.lambda_kg", cfg.lambda_kg);
    auto rel = file.getDoubleList("relevance.weights");
    if (!rel.empty()) {
        if (rel.size() != 4) {
            throw ConfigError("relevance.weights needs exactly 4 values (text, kg, case, jur)");
        }
        cfg.rel_weights = {rel[0], rel[1], rel[2], rel[3]};
    }
    cfg.rel_weights.validate();
    cfg.background_m = static_cast<std::size_t>(file.getInt("relevance.m", 3));

    auto qw = file.getDoubleList("quality.weights");
    if (!qw.empty()) {
        if (qw.size() != 5) {
            throw ConfigError("quality.weights needs exactly 5 values");
        }
        cfg.quality_weights = {qw[0], qw[1], qw[2], qw[3], qw[4]};
    }
    cfg.quality_weights.validate();
    cfg.optimization.threshold = file.getDouble("quality.threshold", cfg.optimization.threshold);
    cfg.optimization.max_iterations =
        file.getInt("optimize.max_iterations", cfg.optimization.max_iterations);
    cfg.optimization.expand_step = file.getInt("optimize.expand_step", cfg.optimization.expand_step);
    cfg.optimization.validate();
    cfg.expression_ref = file.getDouble("quality.expression_ref", cfg.expression_ref);

    cfg.search_fixture_path = file.getPath("search.fixture");
    cfg.search_as_of = file.getOr("search.as_of", "");
    cfg.search_jurisdiction = file.getOr("search.jurisdiction", "");
    cfg.merge.graph_authority_default =
        file.getDouble("search.graph_authority", cfg.merge.graph_authority_default);
    auto aw = file.getDoubleList("search.authority_weights");
    if (!aw.empty()) {
        if (aw.size() != 3) {
            throw ConfigError("search.authority_weights needs exactly 3 values");
        }
        cfg.merge.weights = {aw[0], aw[1], aw[2]};
    }
    cfg.merge.weights.validate();

    cfg.provider_kind = file.getOr("provider.kind", "mock");
    cfg.mock_script_path = file.getPath("provider.script");
    cfg.provider_endpoint = file.getOr("provider.endpoint", "");
    cfg.provider_model = file.getOr("provider.model", "");

    for (const auto& j : file.getStringList("query.jurisdictions")) {
        cfg.query_jurisdictions.insert(j);
    }
    return cfg;
}

Runtime ingestCorpus(const RunConfig& cfg) {
    Runtime rt;
    {
        auto in = openOrThrow(cfg.graph_path, "graph");
        try {
            rt.graph = kg::loadGraph(in);
        } catch (const kg::GraphError& e) {
            throw kg::GraphError(cfg.graph_path.string() + ": " + e.what());
        }
    }
    {
        auto in = openOrThrow(cfg.terms_path, "terms");
        try {
            rt.stats = retrieval::TermStats::fromStream(in, cfg.sigma);
        } catch (const std::exception& e) {
            throw std::runtime_error(cfg.terms_path.string() + ": " + e.what());
        }
    }
    {
        auto in = openOrThrow(cfg.templates_path, "templates");
        try {
            rt.templates = prompt::loadTemplates(in);
        } catch (const std::exception& e) {
            throw std::runtime_error(cfg.templates_path.string() + ": " + e.what());
        }
    }
    if (cfg.embeddings_path) {
        auto in = openOrThrow(*cfg.embeddings_path, "embeddings");
        try {
            rt.embeddings = EmbeddingTable::fromStream(in);
        } catch (const std::exception& e) {
            throw std::runtime_error(cfg.embeddings_path->string() + ": " + e.what());
        }
        if (rt.graph.embeddingDim() != 0 && rt.embeddings->dimension() != rt.graph.embeddingDim()) {
            throw std::runtime_error(cfg.embeddings_path->string() +
                                     ": embedding dimension does not match the graph");
        }
    }
    if (cfg.search_fixture_path) {
        auto in = openOrThrow(*cfg.search_fixture_path, "search fixtures");
        try {
            rt.search_fixtures = freshness::loadSearchFixtures(in);
        } catch (const std::exception& e) {
            throw std::runtime_error(cfg.search_fixture_path->string() + ": " + e.what());
        }
        rt.search_enabled = true;
    }
    return rt;
}

std::string ingestSummary(const Runtime& rt) {
    std::set<std::string> vocabulary;
    for (std::size_t i = 0; i < rt.graph.docCount(); ++i) {
        for (const auto& [term, n] : rt.graph.termFrequency(i)) {
            vocabulary.insert(term);
        }
    }
    std::ostringstream out;
    out << "graph: N=" << rt.graph.docCount() << " concepts, " << rt.graph.relations().size()
        << " relations, avgdl=" << rt.graph.avgdl() << ", vocabulary=" << vocabulary.size()
        << "\n";
    out << "terms: " << rt.stats.size() << " lexicon entries (sigma=" << rt.stats.sigma << ")\n";
    out << "templates: " << rt.templates.templates.size() << " templates, "
        << rt.templates.dimensions.size() << " feature dimensions\n";
    if (rt.embeddings) {
        out << "embeddings: " << rt.embeddings->size() << " tokens, dim "
            << rt.embeddings->dimension() << "\n";
    }
    if (rt.search_enabled) {
        out << "search fixtures: " << rt.search_fixtures.size() << " results\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Query analysis
// ---------------------------------------------------------------------------

std::string extractQueryCode(const std::string& text) {
    // Uppercased alphanumeric segments with designators kept, so patterns
    // like "art. 1382 CC" survive segmentation.
    std::vector<std::string> segments;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c) != 0) {
            current.push_back(static_cast<char>(std::toupper(c)));
        } else if (!current.empty()) {
            segments.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        segments.push_back(std::move(current));
    }

    static const std::set<std::string> designators = {"ART", "ARTICLE", "ARTIKEL", "SEC",
                                                      "SECT", "SECTION", "PARA", "PARAGRAPH"};
    // Connectors never name a legal corpus.
    static const std::set<std::string> connectors = {"OF",  "THE", "IN",  "ON",    "AT", "TO",
                                                     "FOR", "AND", "OR",  "A",     "AN", "UNDER",
                                                     "SEE", "PER", "WITH"};
    auto isNumber = [](const std::string& s) {
        return std::isdigit(static_cast<unsigned char>(s.front())) != 0;
    };
    auto isAlpha = [&](const std::string& s) {
        return std::isalpha(static_cast<unsigned char>(s.front())) != 0 &&
               !designators.count(s) && !connectors.count(s);
    };

    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!designators.count(segments[i]) || i + 1 >= segments.size() ||
            !isNumber(segments[i + 1])) {
            continue;
        }
        std::size_t j = i + 1;
        std::string numbers;
        while (j < segments.size() && isNumber(segments[j])) {
            numbers += " " + segments[j];
            ++j;
        }
        // The corpus token sits right after the numbers (connectors skipped)
        // or right before the designator.
        while (j < segments.size() && connectors.count(segments[j])) {
            ++j;
        }
        std::string corpus;
        if (j < segments.size() && isAlpha(segments[j])) {
            corpus = segments[j];
        } else if (i > 0 && isAlpha(segments[i - 1])) {
            corpus = segments[i - 1];
        }
        return normalizeCode(corpus + numbers);
    }

    // Fall back to an already-canonical mention such as "CC-1382".
    std::string upper;
    upper.reserve(text.size());
    for (unsigned char c : text) {
        upper.push_back(static_cast<char>(std::toupper(c)));
    }
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        if (!isAlpha(segments[i]) || !isNumber(segments[i + 1])) {
            continue;
        }
        std::string candidate = segments[i] + "-" + segments[i + 1];
        if (upper.find(candidate) == std::string::npos) {
            continue;    // the raw text must join the segments with hyphens
        }
        std::size_t j = i + 2;
        while (j < segments.size() && isNumber(segments[j]) &&
               upper.find(candidate + "-" + segments[j]) != std::string::npos) {
            candidate += "-" + segments[j];
            ++j;
        }
        return candidate;
    }
    return {};
}

namespace {

// A concept is "identified" in the query when its code is the query code
// or its full title appears as a contiguous token run.
bool titleOccurs(const std::vector<std::string>& title_tokens,
                 const std::vector<std::string>& query_tokens) {
    if (title_tokens.empty() || title_tokens.size() > query_tokens.size()) {
        return false;
    }
    for (std::size_t i = 0; i + title_tokens.size() <= query_tokens.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < title_tokens.size(); ++j) {
            if (query_tokens[i + j] != title_tokens[j]) {
                match = false;
                break;
            }
        }
        if (match) {
            return true;
        }
    }
    return false;
}

} // namespace

retrieval::Query buildQuery(const std::string& text, const Runtime& rt, const RunConfig& cfg) {
    if (text.empty()) {
        throw std::invalid_argument("empty query");
    }
    auto q = retrieval::Query::fromText(text);
    q.code = extractQueryCode(text);
    q.jurisdictions = cfg.query_jurisdictions;
    if (rt.embeddings) {
        q.embedding = rt.embeddings->embed(text);
    }
    for (const auto& c : rt.graph.concepts()) {
        if (!c.code.empty() && c.code == q.code) {
            q.concept_ids.insert(c.id);
            continue;
        }
        if (titleOccurs(tokenize(c.title), q.tokens)) {
            q.concept_ids.insert(c.id);
        }
    }
    return q;
}

// ---------------------------------------------------------------------------
// Query execution
// ---------------------------------------------------------------------------

QueryReport runQuery(const std::string& text, const Runtime& rt, const RunConfig& cfg,
                     quality::CompletionProvider& provider) {
    const auto start = std::chrono::steady_clock::now();

    QueryReport report;
    report.query_text = text;
    report.mode = cfg.mode;
    report.toggles = cfg.toggles;
    report.fusion_weights = cfg.match.fusion_weights;
    report.query = buildQuery(text, rt, cfg);

    retrieval::NullSemanticProvider null_sem;
    std::optional<retrieval::EmbeddingSemanticProvider> table_sem;
    const retrieval::SemanticSimilarityProvider* sem = &null_sem;
    if (rt.embeddings) {
        table_sem.emplace(*rt.embeddings);
        sem = &*table_sem;
    }

    auto features = prompt::extractFeatures(report.query, rt.templates, &rt.stats);
    auto selection = prompt::selectTaskTemplate(features, rt.templates, rt.graph.docCount());
    report.template_id = selection.tmpl->id;
    report.template_score = selection.score;

    std::vector<relevance::Ranked> pool;
    std::vector<prompt::SearchEntry> web_extras;
    std::map<kg::ConceptId, prompt::WebOverride> replacements;

    if (cfg.mode != prompt::Mode::Baseline) {
        report.retrieval =
            retrieval::retrieve(rt.graph, report.query, rt.stats, cfg.match, *sem, cfg.retrieve_k);

        std::vector<kg::ConceptId> candidates;
        candidates.reserve(report.retrieval.size());
        for (const auto& r : report.retrieval) {
            candidates.push_back(r.concept_id);
        }
        // Rank the whole retrieved set; the prompt shows the first block
        // and the optimization loop may reveal more.
        pool = relevance::rankBackground(rt.graph, report.query, candidates, cfg.rel_weights,
                                         cfg.bm25, cfg.lambda_kg, candidates.size());

        if (rt.search_enabled) {
            freshness::FixtureSearchClient client(rt.search_fixtures);
            auto hits = client.search(report.query.text, cfg.search_jurisdiction);
            auto timely =
                freshness::filterTimely(hits, cfg.search_as_of, cfg.search_jurisdiction);

            std::vector<retrieval::RetrievalResult> graph_hits;
            std::unordered_map<std::string, retrieval::StrategyScores> scores_by_id;
            for (const auto& r : report.retrieval) {
                scores_by_id[r.concept_id] = r.scores;
            }
            int rank = 0;
            for (const auto& r : pool) {
                graph_hits.push_back({r.concept_id, scores_by_id[r.concept_id], ++rank});
            }
            auto merged = freshness::mergeKnowledge(graph_hits, timely, rt.graph, cfg.merge);

            // Fold replacements back into the pool order; collect extras.
            for (const auto& e : merged) {
                if (e.provenance != freshness::Provenance::Search) {
                    continue;
                }
                if (!e.concept_id.empty()) {
                    replacements[e.concept_id] = {e.text, e.authority};
                } else {
                    web_extras.push_back({e.code, e.text, e.authority});
                }
            }
        }
    }

    auto doc = prompt::assemblePrompt(report.query, *selection.tmpl, pool,
                                      std::min(cfg.background_m, pool.size()), rt.graph, cfg.mode,
                                      cfg.toggles);
    // Fold merged web knowledge into the background.
    doc.web_overrides = std::move(replacements);
    for (auto& entry : doc.knowledge_background) {
        doc.applyWebOverride(entry);
    }
    doc.search_background = web_extras;

    quality::QualityContext ctx{rt.graph,
                                cfg.quality_weights,
                                cfg.optimization.threshold,
                                rt.embeddings ? &*rt.embeddings : nullptr,
                                &rt.stats,
                                cfg.expression_ref};
    auto outcome = quality::optimize(doc, pool, provider, ctx, cfg.optimization,
                                     cfg.toggles.count(prompt::Toggle::DO) != 0);

    report.background = doc.knowledge_background;
    report.web_extras = web_extras;
    report.prompt_text = outcome.trace.empty() ? doc.render() : outcome.trace.front().prompt_text;
    report.response = outcome.response;
    report.quality = outcome.report;
    report.iterations = outcome.trace;
    report.provider_calls = outcome.provider_calls;
    report.provider_error = outcome.provider_error;

    const auto end = std::chrono::steady_clock::now();
    report.elapsed_ms = std::chrono::duration<double, std::milli>(end - start).count();
    return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

json QueryReport::toJson(bool include_timing) const {
    json doc;
    doc["schema_version"] = 1;
    doc["mode"] = prompt::modeName(mode);
    json toggle_list = json::array();
    for (auto t : toggles) {
        toggle_list.push_back(prompt::toggleName(t));
    }
    doc["toggles"] = toggle_list;

    doc["query"] = {{"text", query.text},
                    {"code", query.code},
                    {"concepts", query.concept_ids},
                    {"jurisdictions", query.jurisdictions}};
    doc["template"] = {{"id", template_id}, {"score", template_score}};
    doc["fusion_weights"] = {{"cm", fusion_weights[0]},
                             {"vs", fusion_weights[1]},
                             {"pi", fusion_weights[2]},
                             {"tm", fusion_weights[3]}};

    json retrieved = json::array();
    for (const auto& r : retrieval) {
        retrieved.push_back({{"concept", r.concept_id},
                             {"rank", r.rank},
                             {"cm", r.scores.cm},
                             {"vs", r.scores.vs},
                             {"pi", r.scores.pi},
                             {"tm", r.scores.tm},
                             {"fused", r.scores.fused}});
    }
    doc["retrieval"] = retrieved;

    json bg = json::array();
    for (const auto& e : background) {
        json entry{{"concept", e.concept_id},
                   {"code", e.code},
                   {"source", e.from_search ? "search" : "graph"},
                   {"r_text_raw", e.breakdown.r_text_raw},
                   {"r_text", e.breakdown.r_text},
                   {"r_kg", e.breakdown.r_kg},
                   {"r_case", e.breakdown.r_case},
                   {"r_jur", e.breakdown.r_jur},
                   {"total", e.breakdown.total}};
        if (e.from_search) {
            entry["authority"] = e.authority;
        }
        bg.push_back(std::move(entry));
    }
    doc["background"] = bg;

    json extras = json::array();
    for (const auto& e : web_extras) {
        extras.push_back({{"code", e.code}, {"authority", e.authority}, {"text", e.snippet}});
    }
    doc["web_extras"] = extras;

    doc["prompt"] = prompt_text;
    doc["response"] = response;
    doc["quality"] = {{"accuracy", quality.accuracy},
                      {"comprehensiveness", quality.comprehensiveness},
                      {"citation", quality.citation},
                      {"logic", quality.logic},
                      {"expression", quality.expression},
                      {"total", quality.total},
                      {"verdict", quality.passed ? "pass" : "fail"},
                      {"diagnostics", quality.diagnostics}};

    json iters = json::array();
    for (const auto& it : iterations) {
        iters.push_back({{"prompt", it.prompt_text},
                         {"response", it.response},
                         {"total", it.report.total},
                         {"verdict", it.report.passed ? "pass" : "fail"}});
    }
    doc["iterations"] = iters;
    doc["provider_calls"] = provider_calls;
    if (provider_error) {
        doc["provider_error"] = *provider_error;
    }
    if (include_timing) {
        doc["timing_ms"] = elapsed_ms;
    }
    return doc;
}

std::unique_ptr<quality::CompletionProvider> makeProvider(
    const RunConfig& cfg, std::function<void(const std::string&, const std::string&)> trace) {
    if (cfg.provider_kind == "mock") {
        if (!cfg.mock_script_path) {
            throw ConfigError("provider.kind is 'mock' but provider.script is not set");
        }
        auto in = openOrThrow(*cfg.mock_script_path, "mock script");
        return std::make_unique<quality::ScriptedProvider>(
            quality::ScriptedProvider::parseScript(in));
    }
    if (cfg.provider_kind == "http") {
        if (cfg.provider_endpoint.empty()) {
            throw ConfigError("provider.kind is 'http' but provider.endpoint is not set");
        }
        return std::make_unique<quality::HttpCompletionProvider>(cfg.provider_endpoint,
                                                                 cfg.provider_model,
                                                                 std::move(trace));
    }
    throw ConfigError("unknown provider.kind '" + cfg.provider_kind + "'");
}

} // namespace lexgraph::pipeline
