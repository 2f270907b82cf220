#include <lexgraph/scoring_kernels.hpp>

#include <lexgraph/similarity.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lexgraph::retrieval {

QueryPathFields buildQueryPathFields(const kg::KnowledgeGraph& g, const Query& q) {
    QueryPathFields out;
    for (const auto& id : q.concept_ids) {    // std::set iterates in id order
        auto idx = g.indexOf(id);
        if (!idx) {
            throw std::invalid_argument("unknown concept id '" + id + "'");
        }
        out.query_concepts.push_back(*idx);
        out.fields.push_back(kg::singleSourcePaths(g, *idx));
    }
    return out;
}

double pathInferenceFromFields(const QueryPathFields& fields, std::size_t concept_index,
                               double lambda_decay) {
    if (fields.query_concepts.empty()) {
        return 0.0;
    }
    for (auto qc : fields.query_concepts) {
        if (qc == concept_index) {
            return 1.0;
        }
    }
    double best = 0.0;
    for (const auto& field : fields.fields) {
        const int d = field.dist[concept_index];
        if (d < 0) {
            continue;
        }
        best = std::max(best, std::pow(lambda_decay, d) * field.weight[concept_index]);
    }
    return std::clamp(best, 0.0, 1.0);
}

namespace {

StrategyScores scoreOne(const kg::KnowledgeGraph& g, std::size_t i, const Query& q,
                        const TermStats& stats, const MatchParams& p,
                        const SemanticSimilarityProvider& sem, const QueryPathFields& fields) {
    const auto& c = g.at(i);

    // A zero fusion weight means the strategy is switched off entirely; it
    // neither runs nor appears in the breakdown.
    double cm = 0.0;
    if (p.fusion_weights[0] > 0.0 && !c.code.empty() && !q.code.empty()) {
        cm = codeMatch(c.code, q.code, p);
    }

    double vs = 0.0;
    if (p.fusion_weights[1] > 0.0 && c.embedding && q.embedding) {
        vs = std::max(0.0, cosineOrZero(*c.embedding, *q.embedding));
    }

    double pi = 0.0;
    if (p.fusion_weights[2] > 0.0) {
        pi = pathInferenceFromFields(fields, i, p.lambda_decay);
    }

    double tm = 0.0;
    if (p.fusion_weights[3] > 0.0) {
        tm = termMatchScore(c, q, stats, p, sem);
    }

    return fuseScores(cm, vs, pi, tm, p);
}

} // namespace

std::vector<StrategyScores> scoreAllSerial(const kg::KnowledgeGraph& g, const Query& q,
                                           const TermStats& stats, const MatchParams& p,
                                           const SemanticSimilarityProvider& sem) {
    auto fields = buildQueryPathFields(g, q);
    std::vector<StrategyScores> scores(g.docCount());
    for (std::size_t i = 0; i < g.docCount(); ++i) {
        scores[i] = scoreOne(g, i, q, stats, p, sem, fields);
    }
    return scores;
}

std::vector<StrategyScores> scoreAllParallel(const kg::KnowledgeGraph& g, const Query& q,
                                             const TermStats& stats, const MatchParams& p,
                                             const SemanticSimilarityProvider& sem) {
    auto fields = buildQueryPathFields(g, q);
    std::vector<StrategyScores> scores(g.docCount());
    const auto n = static_cast<std::int64_t>(g.docCount());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        scores[static_cast<std::size_t>(i)] =
            scoreOne(g, static_cast<std::size_t>(i), q, stats, p, sem, fields);
    }
    return scores;
}

std::vector<StrategyScores> scoreAll(const kg::KnowledgeGraph& g, const Query& q,
                                     const TermStats& stats, const MatchParams& p,
                                     const SemanticSimilarityProvider& sem) {
#ifdef _OPENMP
    return scoreAllParallel(g, q, stats, p, sem);
#else
    return scoreAllSerial(g, q, stats, p, sem);
#endif
}

} // namespace lexgraph::retrieval
