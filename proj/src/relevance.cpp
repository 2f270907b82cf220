#include <lexgraph/relevance.hpp>

#include <lexgraph/similarity.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace lexgraph::relevance {

void Bm25Params::validate() const {
    if (!(k1 > 0.0)) {
        throw std::invalid_argument("k1 must be > 0");
    }
    if (b < 0.0 || b > 1.0) {
        throw std::invalid_argument("b must lie in [0, 1]");
    }
    if (delta < 0.0) {
        throw std::invalid_argument("delta must be >= 0");
    }
}

void RelevanceWeights::validate() const {
    for (double w : {w_text, w_kg, w_case, w_jur}) {
        if (w < 0.0) {
            throw std::invalid_argument("relevance weights must be non-negative");
        }
    }
    if (std::abs(w_text + w_kg + w_case + w_jur - 1.0) > 1e-9) {
        throw std::invalid_argument("relevance weights must sum to 1");
    }
}

double inverseDocFreq(const kg::KnowledgeGraph& g, const std::string& term) {
    const double n = static_cast<double>(g.docCount());
    const double df = static_cast<double>(g.docFreq(term));
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

double bm25TermGain(double idf, double term_freq, double doc_len, double avgdl,
                    const Bm25Params& p) {
    const double saturation =
        term_freq * (p.k1 + 1.0) /
        (term_freq + p.k1 * (1.0 - p.b + p.b * doc_len / avgdl));
    return idf * (saturation + p.delta);
}

double bm25Plus(const retrieval::Query& q, std::size_t concept_index,
                const kg::KnowledgeGraph& g, const Bm25Params& p) {
    const auto& tf = g.termFrequency(concept_index);
    const double doc_len = static_cast<double>(g.docLength(concept_index));
    double score = 0.0;
    std::unordered_set<std::string> seen;
    for (const auto& token : q.tokens) {
        if (!seen.insert(token).second) {
            continue;
        }
        auto it = tf.find(token);
        if (it == tf.end()) {
            continue;
        }
        score += bm25TermGain(inverseDocFreq(g, token), it->second, doc_len, g.avgdl(), p);
    }
    return score;
}

double kgRelevance(const kg::KnowledgeGraph& g, const kg::ConceptId& c,
                   const retrieval::Query& q, double lambda_kg) {
    auto ci = g.indexOf(c);
    if (!ci) {
        throw std::invalid_argument("unknown concept id '" + c + "'");
    }
    if (q.concept_ids.empty()) {
        return 0.0;
    }
    if (q.concept_ids.count(c)) {
        return 1.0;
    }
    auto field = kg::singleSourcePaths(g, *ci);
    int best = -1;
    for (const auto& id : q.concept_ids) {
        auto qi = g.indexOf(id);
        if (!qi) {
            throw std::invalid_argument("unknown concept id '" + id + "'");
        }
        const int d = field.dist[*qi];
        if (d >= 0 && (best < 0 || d < best)) {
            best = d;
        }
    }
    return best < 0 ? 0.0 : std::pow(lambda_kg, best);
}

double caseRelevance(const kg::LegalConcept& c, const kg::KnowledgeGraph& g) {
    if (g.maxCitationCount() <= 0) {
        return 0.0;
    }
    return static_cast<double>(c.citation_count) / static_cast<double>(g.maxCitationCount());
}

double jurRelevance(const kg::LegalConcept& c, const retrieval::Query& q) {
    return jaccard(c.jurisdictions, q.jurisdictions);
}

double weightedTotal(const RelevanceBreakdown& b, const RelevanceWeights& w) {
    return w.w_text * b.r_text + w.w_kg * b.r_kg + w.w_case * b.r_case + w.w_jur * b.r_jur;
}

RelevanceBreakdown rawComponents(const kg::KnowledgeGraph& g, const kg::ConceptId& c,
                                 const retrieval::Query& q, const Bm25Params& bm25,
                                 double lambda_kg) {
    auto ci = g.indexOf(c);
    if (!ci) {
        throw std::invalid_argument("unknown concept id '" + c + "'");
    }
    RelevanceBreakdown b;
    b.r_text_raw = bm25Plus(q, *ci, g, bm25);
    b.r_kg = kgRelevance(g, c, q, lambda_kg);
    b.r_case = caseRelevance(g.at(*ci), g);
    b.r_jur = jurRelevance(g.at(*ci), q);
    return b;
}

void finishBreakdown(RelevanceBreakdown& b, double text_min, double text_max,
                     const RelevanceWeights& w) {
    b.r_text = text_max > text_min ? (b.r_text_raw - text_min) / (text_max - text_min) : 1.0;
    b.total = weightedTotal(b, w);
}

RelevanceBreakdown conceptRelevance(const kg::KnowledgeGraph& g, const kg::ConceptId& c,
                                    const retrieval::Query& q, const RelevanceWeights& w,
                                    const Bm25Params& bm25, double lambda_kg) {
    w.validate();
    bm25.validate();
    auto b = rawComponents(g, c, q, bm25, lambda_kg);
    finishBreakdown(b, b.r_text_raw, b.r_text_raw, w);
    return b;
}

std::vector<Ranked> rankBackground(const kg::KnowledgeGraph& g, const retrieval::Query& q,
                                   const std::vector<kg::ConceptId>& candidates,
                                   const RelevanceWeights& w, const Bm25Params& bm25,
                                   double lambda_kg, std::size_t m) {
    if (m == 0) {
        throw std::invalid_argument("m must be >= 1");
    }
    w.validate();
    bm25.validate();
    if (candidates.empty()) {
        return {};
    }

    std::vector<Ranked> ranked;
    ranked.reserve(candidates.size());
    double text_min = std::numeric_limits<double>::infinity();
    double text_max = -std::numeric_limits<double>::infinity();
    for (const auto& id : candidates) {
        Ranked r{id, rawComponents(g, id, q, bm25, lambda_kg)};
        text_min = std::min(text_min, r.breakdown.r_text_raw);
        text_max = std::max(text_max, r.breakdown.r_text_raw);
        ranked.push_back(std::move(r));
    }
    for (auto& r : ranked) {
        finishBreakdown(r.breakdown, text_min, text_max, w);
    }

    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.breakdown.total != b.breakdown.total) {
            return a.breakdown.total > b.breakdown.total;
        }
        return a.concept_id < b.concept_id;
    });
    if (ranked.size() > m) {
        ranked.resize(m);
    }
    return ranked;
}

} // namespace lexgraph::relevance
