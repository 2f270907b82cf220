#include <lexgraph/quality.hpp>

#include <lexgraph/similarity.hpp>
#include <lexgraph/text.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace lexgraph::quality {

using nlohmann::json;

namespace {

constexpr const char* kCitationInstruction =
    "Citation format: cite every provision or case you rely on by its bracketed code, "
    "for example [CC-1382], copied exactly from the knowledge background.";

constexpr const char* kStepEnumeration =
    "Structure the answer as one numbered paragraph per step above, labelled with the "
    "step name.";

std::string trimmed(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> paragraphs(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    std::istringstream in(text);
    std::string line;
    auto flush = [&] {
        auto p = trimmed(current);
        if (!p.empty()) {
            out.push_back(std::move(p));
        }
        current.clear();
    };
    while (std::getline(in, line)) {
        if (trimmed(line).empty()) {
            flush();
        } else {
            if (!current.empty()) {
                current += "\n";
            }
            current += line;
        }
    }
    flush();
    return out;
}

// Similarity of two paragraphs: rescaled embedding cosine when both embed,
// token Jaccard otherwise.
double stepSimilarity(const std::string& a, const std::string& b, const TextEmbedder* embedder) {
    if (embedder) {
        auto va = embedder->embed(a);
        auto vb = embedder->embed(b);
        if (va && vb) {
            return (cosineOrZero(*va, *vb) + 1.0) / 2.0;
        }
    }
    auto ta = tokenize(a);
    auto tb = tokenize(b);
    return jaccardKeys(termFrequencies(ta), termFrequencies(tb));
}

} // namespace

void QualityWeights::validate() const {
    double sum = 0.0;
    for (double w : {accuracy, comprehensiveness, citation, logic, expression}) {
        if (w < 0.0) {
            throw std::invalid_argument("quality weights must be non-negative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("quality weights must sum to 1");
    }
}

std::vector<AdjustmentRule> defaultAdjustmentRules() {
    return {
        {"low_comprehensiveness", "expand_background"},
        {"low_citation", "citation_instruction"},
        {"low_logic", "reasoning_enumeration"},
    };
}

void OptimizationConfig::validate() const {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("threshold must lie in (0, 1]");
    }
    if (max_iterations < 1) {
        throw std::invalid_argument("max_iterations must be >= 1");
    }
    if (expand_step < 1) {
        throw std::invalid_argument("expand_step must be >= 1");
    }
}

ScriptedProvider::ScriptedProvider(std::vector<std::string> responses)
    : responses_(std::move(responses)) {
    if (responses_.empty()) {
        throw std::invalid_argument("mock script has no responses");
    }
}

std::vector<std::string> ScriptedProvider::parseScript(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("mock script: invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) {
        throw std::runtime_error("mock script must be a JSON array of responses");
    }
    std::vector<std::string> responses;
    for (const auto& r : doc) {
        responses.push_back(r.get<std::string>());
    }
    return responses;
}

std::string ScriptedProvider::complete(const std::string&) {
    std::lock_guard<std::mutex> lock(mutex_);
    ++calls_;
    const auto index = std::min(next_, responses_.size() - 1);
    ++next_;
    return responses_[index];
}

int ScriptedProvider::calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return calls_;
}

// ---------------------------------------------------------------------------
// Citations
// ---------------------------------------------------------------------------

namespace {

bool isCanonicalCode(const std::string& code) {
    return !code.empty() && normalizeCode(code) == code;
}

} // namespace

std::vector<CitationFragment> scanCitations(const std::string& response) {
    std::vector<CitationFragment> fragments;
    for (std::size_t i = 0; i < response.size(); ++i) {
        if (response[i] != '[') {
            continue;
        }
        std::size_t end = i + 1;
        while (end < response.size() && response[end] != ']' && response[end] != '[' &&
               response[end] != '\n') {
            ++end;
        }
        CitationFragment frag;
        if (end < response.size() && response[end] == ']') {
            frag.text = response.substr(i, end - i + 1);
            const std::string inner = response.substr(i + 1, end - i - 1);
            if (isCanonicalCode(inner)) {
                frag.well_formed = true;
                frag.code = inner;
            }
            i = end;
        } else {
            frag.text = response.substr(i, end - i);    // unclosed
        }
        fragments.push_back(std::move(frag));
    }
    return fragments;
}

bool validateCitation(const std::string& fragment, const kg::KnowledgeGraph& g) {
    if (fragment.size() < 3 || fragment.front() != '[' || fragment.back() != ']') {
        return false;
    }
    const std::string inner = fragment.substr(1, fragment.size() - 2);
    return isCanonicalCode(inner) && g.findByCode(inner) != nullptr;
}

// ---------------------------------------------------------------------------
// Assessment
// ---------------------------------------------------------------------------

QualityReport assessQuality(const std::string& response, const prompt::PromptDocument& doc,
                            const QualityContext& ctx) {
    ctx.weights.validate();
    QualityReport report;

    const auto fragments = scanCitations(response);
    std::size_t well_formed = 0;
    std::set<std::string> cited_codes;
    std::size_t valid_background_refs = 0;

    std::set<std::string> background_codes;
    for (const auto& e : doc.knowledge_background) {
        if (!e.code.empty()) {
            background_codes.insert(e.code);
        }
    }

    for (const auto& frag : fragments) {
        if (!frag.well_formed) {
            report.diagnostics.push_back("malformed citation: " + frag.text);
            continue;
        }
        ++well_formed;
        if (ctx.graph.findByCode(frag.code) != nullptr) {
            cited_codes.insert(frag.code);
            if (background_codes.count(frag.code)) {
                ++valid_background_refs;
            }
        }
    }

    // accuracy: citations must be valid and drawn from the injected background.
    if (fragments.empty()) {
        report.accuracy = doc.knowledge_background.empty() ? 1.0 : 0.0;
    } else {
        report.accuracy =
            static_cast<double>(valid_background_refs) / static_cast<double>(fragments.size());
    }

    // comprehensiveness: share of background concepts the response cites.
    if (doc.knowledge_background.empty()) {
        report.comprehensiveness = 1.0;
    } else {
        std::size_t covered = 0;
        for (const auto& e : doc.knowledge_background) {
            if (!e.code.empty() && cited_codes.count(e.code)) {
                ++covered;
            } else {
                report.diagnostics.push_back("uncited background concept: " + e.concept_id);
            }
        }
        report.comprehensiveness =
            static_cast<double>(covered) / static_cast<double>(doc.knowledge_background.size());
    }

    // citation: format correctness over all citation-like fragments.
    report.citation = fragments.empty()
                          ? 1.0
                          : static_cast<double>(well_formed) / static_cast<double>(fragments.size());

    // logic: coherence between adjacent reasoning steps (paragraphs).
    const auto paras = paragraphs(response);
    if (paras.size() >= 2) {
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < paras.size(); ++i) {
            sum += stepSimilarity(paras[i], paras[i + 1], ctx.embedder);
        }
        report.logic = sum / static_cast<double>(paras.size() - 1);
    }

    // expression: density of professional vocabulary, saturating at the
    // reference ratio.
    const auto tokens = tokenize(response);
    if (!tokens.empty() && ctx.lexicon && ctx.expression_ref > 0.0) {
        std::size_t hits = 0;
        for (const auto& t : tokens) {
            if (retrieval::iltWeight(t, *ctx.lexicon) > 0.0) {
                ++hits;
            }
        }
        const double ratio = static_cast<double>(hits) / static_cast<double>(tokens.size());
        report.expression = std::min(1.0, ratio / ctx.expression_ref);
    }

    report.total = ctx.weights.accuracy * report.accuracy +
                   ctx.weights.comprehensiveness * report.comprehensiveness +
                   ctx.weights.citation * report.citation + ctx.weights.logic * report.logic +
                   ctx.weights.expression * report.expression;
    report.passed = report.total >= ctx.threshold;

    // Deficiency tags drive the adjustment rules; details were added above.
    std::vector<std::string> tags;
    if (report.accuracy < ctx.threshold) tags.push_back("low_accuracy");
    if (report.comprehensiveness < ctx.threshold) tags.push_back("low_comprehensiveness");
    if (report.citation < ctx.threshold) tags.push_back("low_citation");
    if (report.logic < ctx.threshold) tags.push_back("low_logic");
    if (report.expression < ctx.threshold) tags.push_back("low_expression");
    report.diagnostics.insert(report.diagnostics.begin(), tags.begin(), tags.end());
    return report;
}

// ---------------------------------------------------------------------------
// Adjustment and the optimization loop
// ---------------------------------------------------------------------------

Adjusted adjustPrompt(const prompt::PromptDocument& doc, const QualityReport& report,
                      const std::vector<relevance::Ranked>& pool, const kg::KnowledgeGraph& g,
                      const OptimizationConfig& cfg) {
    Adjusted out{doc, {}, {}};
    std::unordered_set<std::string> deficiencies(report.diagnostics.begin(),
                                                 report.diagnostics.end());

    for (const auto& rule : cfg.rules) {
        if (!deficiencies.count(rule.deficiency) || out.doc.applied_adjustments.count(rule.edit)) {
            continue;
        }
        if (rule.edit == "expand_background") {
            if (!out.doc.has_knowledge_background ||
                out.doc.knowledge_background.size() >= pool.size()) {
                continue;    // nothing left to reveal
            }
            const std::size_t target = std::min(
                pool.size(), out.doc.knowledge_background.size() + static_cast<std::size_t>(
                                                                       cfg.expand_step));
            for (std::size_t i = out.doc.knowledge_background.size(); i < target; ++i) {
                const auto* entry = g.find(pool[i].concept_id);
                if (!entry) {
                    continue;
                }
                prompt::BackgroundEntry revealed{entry->id, entry->code,
                                                 prompt::renderSnippet(*entry),
                                                 pool[i].breakdown, false, 0.0};
                out.doc.applyWebOverride(revealed);
                out.doc.knowledge_background.push_back(std::move(revealed));
            }
        } else if (rule.edit == "citation_instruction") {
            if (!out.doc.has_reasoning_guidance) {
                continue;
            }
            out.doc.extra_guidance.push_back(kCitationInstruction);
        } else if (rule.edit == "reasoning_enumeration") {
            if (!out.doc.has_reasoning_guidance) {
                continue;
            }
            out.doc.extra_guidance.push_back(kStepEnumeration);
        } else {
            continue;
        }
        out.doc.applied_adjustments.insert(rule.edit);
        out.applied.push_back(rule.edit);
    }

    if (out.applied.empty()) {
        out.note = "no applicable adjustment rule";
    }
    return out;
}

OptimizeOutcome optimize(prompt::PromptDocument doc, const std::vector<relevance::Ranked>& pool,
                         CompletionProvider& provider, const QualityContext& ctx,
                         const OptimizationConfig& cfg, bool dynamic_optimization) {
    cfg.validate();
    OptimizeOutcome outcome;
    const int budget = dynamic_optimization ? cfg.max_iterations : 1;

    for (int iteration = 0; iteration < budget; ++iteration) {
        const std::string prompt_text = doc.render();
        std::string response;
        try {
            response = provider.complete(prompt_text);
        } catch (const std::exception& e) {
            outcome.provider_error = e.what();
            break;
        }
        ++outcome.provider_calls;

        auto report = assessQuality(response, doc, ctx);
        outcome.trace.push_back({prompt_text, response, report});
        if (report.passed) {
            break;
        }
        if (iteration + 1 < budget) {
            doc = adjustPrompt(doc, report, pool, ctx.graph, cfg).doc;
        }
    }

    // Best iteration wins; on a pass that is the last one by construction.
    std::size_t best = 0;
    for (std::size_t i = 1; i < outcome.trace.size(); ++i) {
        if (outcome.trace[i].report.total > outcome.trace[best].report.total) {
            best = i;
        }
    }
    if (!outcome.trace.empty()) {
        outcome.response = outcome.trace[best].response;
        outcome.report = outcome.trace[best].report;
    }
    return outcome;
}

} // namespace lexgraph::quality
