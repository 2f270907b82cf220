#include <lexgraph/prompt.hpp>

#include <lexgraph/similarity.hpp>
#include <lexgraph/text.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace lexgraph::prompt {

using nlohmann::json;

void TemplateSet::validate() const {
    if (templates.empty()) {
        throw std::invalid_argument("template set is empty");
    }
    if (dimensions.empty()) {
        throw std::invalid_argument("template set declares no feature dimensions");
    }
    double weight_sum = 0.0;
    for (const auto& d : dimensions) {
        if (d.weight < 0.0) {
            throw std::invalid_argument("dimension '" + d.name + "' has a negative weight");
        }
        if (d.df < 1) {
            throw std::invalid_argument("dimension '" + d.name + "' has df < 1");
        }
        weight_sum += d.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("dimension weights must sum to 1");
    }
    std::unordered_set<std::string> ids;
    for (const auto& t : templates) {
        if (!ids.insert(t.id).second) {
            throw std::invalid_argument("duplicate template id '" + t.id + "'");
        }
        if (t.dimension_vectors.size() != dimensions.size() ||
            t.spec_term_counts.size() != dimensions.size()) {
            throw std::invalid_argument("template '" + t.id +
                                        "' does not cover every feature dimension");
        }
        for (std::size_t j = 0; j < dimensions.size(); ++j) {
            if (t.dimension_vectors[j].size() != dimensions[j].vocabulary.size()) {
                throw std::invalid_argument("template '" + t.id + "' vector for dimension '" +
                                            dimensions[j].name +
                                            "' does not match the vocabulary size");
            }
        }
        if (t.reasoning_path.steps.size() < 2) {
            throw std::invalid_argument("template '" + t.id +
                                        "' needs at least two reasoning steps");
        }
        std::unordered_set<std::string> names;
        for (const auto& s : t.reasoning_path.steps) {
            if (!names.insert(s.name).second) {
                throw std::invalid_argument("template '" + t.id + "' repeats step '" + s.name +
                                            "'");
            }
        }
    }
    if (!generic_template_id.empty() && !findTemplate(generic_template_id)) {
        throw std::invalid_argument("generic template '" + generic_template_id + "' not found");
    }
}

const TaskTemplate* TemplateSet::findTemplate(const std::string& id) const {
    for (const auto& t : templates) {
        if (t.id == id) {
            return &t;
        }
    }
    return nullptr;
}

TemplateSet loadTemplates(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("templates: invalid JSON: ") + e.what());
    }
    TemplateSet set;
    try {
        for (const auto& d : doc.at("dimensions")) {
            FeatureDimension dim;
            dim.name = d.at("name").get<std::string>();
            dim.weight = d.at("weight").get<double>();
            dim.df = d.at("df").get<int>();
            for (const auto& v : d.at("vocabulary")) {
                dim.vocabulary.push_back(asciiLower(v.get<std::string>()));
            }
            set.dimensions.push_back(std::move(dim));
        }
        for (const auto& t : doc.at("templates")) {
            TaskTemplate tmpl;
            tmpl.id = t.at("id").get<std::string>();
            tmpl.role_preamble = t.at("role_preamble").get<std::string>();
            for (const auto& v : t.at("dimension_vectors")) {
                tmpl.dimension_vectors.push_back(v.get<std::vector<double>>());
            }
            tmpl.spec_term_counts = t.at("spec_term_counts").get<std::vector<int>>();
            for (const auto& s : t.at("reasoning_path")) {
                tmpl.reasoning_path.steps.push_back(
                    {s.at("name").get<std::string>(), s.at("instruction").get<std::string>()});
            }
            set.templates.push_back(std::move(tmpl));
        }
        set.alpha = doc.value("alpha", 0.1);
        set.score_floor = doc.value("score_floor", 0.0);
        set.generic_template_id = doc.value("generic_template", std::string{});
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("templates: bad structure: ") + e.what());
    }
    set.validate();
    return set;
}

QueryFeatures extractFeatures(const retrieval::Query& q, const TemplateSet& set,
                              const retrieval::TermStats* lexicon) {
    QueryFeatures features;
    std::unordered_map<std::string, int> counts;
    for (const auto& t : q.tokens) {
        ++counts[t];
    }
    for (const auto& dim : set.dimensions) {
        std::vector<double> vec(dim.vocabulary.size(), 0.0);
        int spec = 0;
        for (std::size_t i = 0; i < dim.vocabulary.size(); ++i) {
            auto it = counts.find(dim.vocabulary[i]);
            if (it == counts.end()) {
                continue;
            }
            vec[i] = static_cast<double>(it->second);
            if (lexicon && retrieval::iltWeight(dim.vocabulary[i], *lexicon) > 0.0) {
                ++spec;
            }
        }
        features.vectors.push_back(std::move(vec));
        features.spec_terms.push_back(spec);
    }
    return features;
}

double taskMatchScore(const QueryFeatures& features, const TaskTemplate& tmpl,
                      const TemplateSet& set, std::size_t doc_count) {
    if (features.vectors.size() != set.dimensions.size() ||
        tmpl.dimension_vectors.size() != set.dimensions.size()) {
        throw std::invalid_argument("feature dimension count mismatch");
    }
    double score = 0.0;
    for (std::size_t j = 0; j < set.dimensions.size(); ++j) {
        if (features.vectors[j].size() != tmpl.dimension_vectors[j].size()) {
            throw std::invalid_argument("feature vector size mismatch in dimension '" +
                                        set.dimensions[j].name + "'");
        }
        const double cos = cosineOrZero(features.vectors[j], tmpl.dimension_vectors[j]);
        const double idf =
            std::log(static_cast<double>(doc_count) / static_cast<double>(set.dimensions[j].df));
        score += set.dimensions[j].weight * cos * idf *
                 (1.0 + set.alpha * static_cast<double>(features.spec_terms[j]));
    }
    return score;
}

Selection selectTaskTemplate(const QueryFeatures& features, const TemplateSet& set,
                             std::size_t doc_count) {
    if (set.templates.empty()) {
        throw std::invalid_argument("template set is empty");
    }
    Selection best;
    for (const auto& t : set.templates) {
        const double score = taskMatchScore(features, t, set, doc_count);
        if (!best.tmpl || score > best.score ||
            (score == best.score && t.id < best.tmpl->id)) {
            best = {&t, score};
        }
    }
    if (best.score < set.score_floor && !set.generic_template_id.empty()) {
        const auto* generic = set.findTemplate(set.generic_template_id);
        return {generic, best.score};
    }
    return best;
}

// ---------------------------------------------------------------------------
// Prompt documents
// ---------------------------------------------------------------------------

const char* modeName(Mode mode) {
    switch (mode) {
        case Mode::Baseline: return "baseline";
        case Mode::Traditional: return "traditional";
        case Mode::Complete: return "complete";
    }
    return "complete";
}

std::optional<Mode> modeFromName(std::string_view name) {
    if (name == "baseline") return Mode::Baseline;
    if (name == "traditional") return Mode::Traditional;
    if (name == "complete") return Mode::Complete;
    return std::nullopt;
}

const char* toggleName(Toggle t) {
    switch (t) {
        case Toggle::TD: return "TD";
        case Toggle::KB: return "KB";
        case Toggle::RG: return "RG";
        case Toggle::DO: return "DO";
        case Toggle::LCM: return "LCM";
        case Toggle::SVM: return "SVM";
    }
    return "TD";
}

std::optional<Toggle> toggleFromName(std::string_view name) {
    if (name == "TD") return Toggle::TD;
    if (name == "KB") return Toggle::KB;
    if (name == "RG") return Toggle::RG;
    if (name == "DO") return Toggle::DO;
    if (name == "LCM") return Toggle::LCM;
    if (name == "SVM") return Toggle::SVM;
    return std::nullopt;
}

std::string renderSnippet(const kg::LegalConcept& c) {
    std::string out;
    if (!c.code.empty()) {
        out += "[" + c.code + "] ";
    }
    out += c.title + ": " + c.text;
    return out;
}

void PromptDocument::applyWebOverride(BackgroundEntry& entry) const {
    auto it = web_overrides.find(entry.concept_id);
    if (it == web_overrides.end()) {
        return;
    }
    entry.from_search = true;
    entry.snippet = (entry.code.empty() ? "" : "[" + entry.code + "] ") + it->second.text;
    entry.authority = it->second.authority;
}

std::string PromptDocument::render() const {
    std::vector<std::string> blocks;

    if (has_task_definition) {
        std::string block = "## TASK DEFINITION\n";
        block += task_definition;
        block += "\n\nQuery: " + query_text;
        blocks.push_back(std::move(block));
    }
    if (has_knowledge_background) {
        std::string block = "## KNOWLEDGE BACKGROUND";
        int n = 0;
        for (const auto& e : knowledge_background) {
            block += "\n[" + std::to_string(++n) + "] ";
            if (e.from_search) {
                block += "(web) ";
            }
            block += e.snippet;
        }
        for (const auto& e : search_background) {
            block += "\n[" + std::to_string(++n) + "] (web) ";
            if (!e.code.empty()) {
                block += "[" + e.code + "] ";
            }
            block += e.snippet;
        }
        blocks.push_back(std::move(block));
    }
    if (has_reasoning_guidance) {
        std::string block = "## REASONING GUIDANCE\nWork through the following steps in order.";
        int n = 0;
        for (const auto& s : reasoning_guidance) {
            block += "\n" + std::to_string(++n) + ". " + s.name + ": " + s.instruction;
        }
        for (const auto& extra : extra_guidance) {
            block += "\n" + extra;
        }
        blocks.push_back(std::move(block));
    }
    if (!has_task_definition) {
        blocks.push_back(query_text);    // the model still has to see the question
    }

    std::string text;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) {
            text += "\n\n";
        }
        text += blocks[i];
    }
    return text;
}

PromptDocument assemblePrompt(const retrieval::Query& q, const TaskTemplate& tmpl,
                              const std::vector<relevance::Ranked>& background, std::size_t take,
                              const kg::KnowledgeGraph& g, Mode mode, const ToggleSet& toggles) {
    PromptDocument doc;
    doc.query_text = q.text;
    doc.mode = mode;
    doc.toggles = toggles;
    doc.has_task_definition = toggles.count(Toggle::TD) != 0;
    doc.has_knowledge_background = toggles.count(Toggle::KB) != 0;
    doc.has_reasoning_guidance = toggles.count(Toggle::RG) != 0;

    if (doc.has_task_definition) {
        doc.task_definition = tmpl.role_preamble;
    }
    if (doc.has_knowledge_background) {
        const std::size_t limit = std::min(take, background.size());
        for (std::size_t i = 0; i < limit; ++i) {
            const auto* entry = g.find(background[i].concept_id);
            if (!entry) {
                throw std::invalid_argument("background concept '" + background[i].concept_id +
                                            "' not in graph");
            }
            doc.knowledge_background.push_back(
                {entry->id, entry->code, renderSnippet(*entry), background[i].breakdown,
                 false, 0.0});
        }
    }
    if (doc.has_reasoning_guidance) {
        doc.reasoning_guidance = tmpl.reasoning_path.steps;
    }
    return doc;
}

} // namespace lexgraph::prompt
