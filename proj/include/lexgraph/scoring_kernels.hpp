#pragma once

#include <lexgraph/retrieval.hpp>

#include <vector>

namespace lexgraph::retrieval {

/// Hop distances and best path weights from every concept named in the
/// query, precomputed once so batch scoring does not rerun graph searches
/// per concept.
struct QueryPathFields {
    std::vector<kg::PathField> fields;
    std::vector<std::size_t> query_concepts;    ///< concept indices, id order
};

QueryPathFields buildQueryPathFields(const kg::KnowledgeGraph& g, const Query& q);

/// Path-inference score for one concept out of precomputed fields.
/// Matches pathInference() exactly.
double pathInferenceFromFields(const QueryPathFields& fields, std::size_t concept_index,
                               double lambda_decay);

/// Scores every concept in id order. The serial variant is the reference
/// implementation; the parallel variant distributes concepts across OpenMP
/// threads and must produce identical output (each slot is written by
/// exactly one thread from the same inputs).
std::vector<StrategyScores> scoreAllSerial(const kg::KnowledgeGraph& g, const Query& q,
                                           const TermStats& stats, const MatchParams& p,
                                           const SemanticSimilarityProvider& sem);

std::vector<StrategyScores> scoreAllParallel(const kg::KnowledgeGraph& g, const Query& q,
                                             const TermStats& stats, const MatchParams& p,
                                             const SemanticSimilarityProvider& sem);

/// Parallel when built with OpenMP, serial otherwise.
std::vector<StrategyScores> scoreAll(const kg::KnowledgeGraph& g, const Query& q,
                                     const TermStats& stats, const MatchParams& p,
                                     const SemanticSimilarityProvider& sem);

} // namespace lexgraph::retrieval
