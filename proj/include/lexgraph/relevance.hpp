#pragma once

#include <lexgraph/kg.hpp>
#include <lexgraph/retrieval.hpp>

#include <string>
#include <vector>

namespace lexgraph::relevance {

struct Bm25Params {
    double k1 = 1.2;      ///< term-frequency saturation, > 0
    double b = 0.75;      ///< length normalization, in [0, 1]
    double delta = 1.0;   ///< long-document compensation, >= 0

    void validate() const;
};

/// Weights over the four relevance components (text, graph, case, and
/// jurisdiction); non-negative, summing to 1.
struct RelevanceWeights {
    double w_text = 0.4;
    double w_kg = 0.2;
    double w_case = 0.2;
    double w_jur = 0.2;

    void validate() const;
};

struct RelevanceBreakdown {
    double r_text_raw = 0.0;    ///< unnormalized lexical score, >= 0
    double r_text = 0.0;        ///< min-max normalized over the candidate set
    double r_kg = 0.0;
    double r_case = 0.0;
    double r_jur = 0.0;
    double total = 0.0;         ///< weighted sum of the normalized components
};

/// ln((N - df + 0.5) / (df + 0.5) + 1), always >= 0.
double inverseDocFreq(const kg::KnowledgeGraph& g, const std::string& term);

/// One term's contribution: idf * (saturated tf + delta). Exposed so the
/// formula can be checked with a pinned idf independent of corpus counts.
double bm25TermGain(double idf, double term_freq, double doc_len, double avgdl,
                    const Bm25Params& p);

/// Lexical relevance of a concept to the query: the summed gain of every
/// query term occurring in the concept text. No shared terms scores 0.
double bm25Plus(const retrieval::Query& q, std::size_t concept_index,
                const kg::KnowledgeGraph& g, const Bm25Params& p);

/// Graph proximity: lambda_kg to the power of the least hop distance from
/// the concept to any concept the query names. Named concepts score 1;
/// unreachable ones (or a query naming none) score 0.
double kgRelevance(const kg::KnowledgeGraph& g, const kg::ConceptId& c,
                   const retrieval::Query& q, double lambda_kg);

/// Citation share: the concept's citation count over the graph maximum,
/// 0 when no concept has citations.
double caseRelevance(const kg::LegalConcept& c, const kg::KnowledgeGraph& g);

/// Jaccard similarity of the jurisdiction sets; two empty sets mean no
/// jurisdictional constraint and score 1.
double jurRelevance(const kg::LegalConcept& c, const retrieval::Query& q);

/// Weighted sum of the normalized components.
double weightedTotal(const RelevanceBreakdown& b, const RelevanceWeights& w);

/// Components before text-score normalization.
RelevanceBreakdown rawComponents(const kg::KnowledgeGraph& g, const kg::ConceptId& c,
                                 const retrieval::Query& q, const Bm25Params& bm25,
                                 double lambda_kg);

/// Applies min-max normalization of the raw text score against the
/// candidate-set bounds (an all-equal set maps to 1) and fills the total.
void finishBreakdown(RelevanceBreakdown& b, double text_min, double text_max,
                     const RelevanceWeights& w);

/// Full relevance of a single concept considered on its own (a one-element
/// candidate set, so r_text is 1 whenever any term matches).
RelevanceBreakdown conceptRelevance(const kg::KnowledgeGraph& g, const kg::ConceptId& c,
                                    const retrieval::Query& q, const RelevanceWeights& w,
                                    const Bm25Params& bm25, double lambda_kg);

struct Ranked {
    kg::ConceptId concept_id;
    RelevanceBreakdown breakdown;
};

/// Scores the candidates, normalizes text relevance across them, and
/// returns the best min(m, |candidates|) in descending total order with
/// ties broken by concept id.
std::vector<Ranked> rankBackground(const kg::KnowledgeGraph& g, const retrieval::Query& q,
                                   const std::vector<kg::ConceptId>& candidates,
                                   const RelevanceWeights& w, const Bm25Params& bm25,
                                   double lambda_kg, std::size_t m);

} // namespace lexgraph::relevance
