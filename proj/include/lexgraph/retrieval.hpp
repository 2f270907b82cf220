#pragma once

#include <lexgraph/kg.hpp>

#include <array>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lexgraph {
class TextEmbedder;
}

namespace lexgraph::retrieval {

/// A legal query after analysis: raw text plus the structured handles the
/// matching strategies work from.
struct Query {
    std::string text;
    std::string code;    ///< normalized legal code extracted from the query, "" = none
    std::set<kg::ConceptId> concept_ids;
    std::optional<std::vector<double>> embedding;
    std::vector<std::string> tokens;
    std::set<std::string> jurisdictions;

    /// Tokenizes the text; all other handles stay empty.
    static Query fromText(std::string text);
};

/// Legal-vs-general corpus statistics per term, for the professional
/// term weight. Terms absent from the table count as (0, 0) occurrences.
class TermStats {
public:
    struct Entry {
        double freq_legal = 0.0;
        double freq_general = 0.0;
        double jur_scope = 1.0;    ///< judicial application scope, in [0, 1]
    };

    double sigma = 1.0;    ///< smoothing, > 0

    void add(std::string term, Entry entry) { entries_[std::move(term)] = entry; }
    Entry lookup(const std::string& term) const;
    bool contains(const std::string& term) const { return entries_.count(term) != 0; }
    std::size_t size() const { return entries_.size(); }
    const std::unordered_map<std::string, Entry>& entries() const { return entries_; }

    /// Parses the ".terms.tsv" format: term, freq_legal, freq_general,
    /// jur_scope, tab-separated, '#' comments and an optional header allowed.
    static TermStats fromStream(std::istream& in, double sigma);

private:
    std::unordered_map<std::string, Entry> entries_;
};

struct MatchParams {
    double gamma = 0.7;           ///< exact-vs-partial balance for code matching
    double lambda_decay = 0.8;    ///< per-hop decay for path inference, in (0, 1)
    double alpha1 = 0.5;          ///< exact term match weight
    double alpha2 = 0.3;          ///< stem match weight
    double alpha3 = 0.2;          ///< semantic similarity weight
    /// Fusion weights over {code, vector, path, term} scores; sum to 1.
    std::array<double, 4> fusion_weights{0.25, 0.25, 0.25, 0.25};
    double ilt_cap = 6.907755278982137;    ///< ln(1000); normalization cap for ILT
    double diversity_lambda = 0.7;         ///< relevance-vs-novelty trade-off, in [0, 1]

    /// Throws std::invalid_argument when any range or sum constraint fails.
    void validate() const;
};

struct StrategyScores {
    double cm = 0.0;
    double vs = 0.0;
    double pi = 0.0;
    double tm = 0.0;
    double fused = 0.0;
};

struct RetrievalResult {
    kg::ConceptId concept_id;
    StrategyScores scores;
    int rank = 0;    ///< 1-based
};

/// Term-to-query semantic similarity in [0, 1]. Implementations must be
/// safe to call from multiple threads (batch scoring fans out).
class SemanticSimilarityProvider {
public:
    virtual ~SemanticSimilarityProvider() = default;
    virtual double similarity(const std::string& term, const Query& q) const = 0;
};

class NullSemanticProvider final : public SemanticSimilarityProvider {
public:
    double similarity(const std::string&, const Query&) const override { return 0.0; }
};

/// Cosine between a term's embedded tokens and the query embedding,
/// clamped to [0, 1]; 0 when either side has no vector.
class EmbeddingSemanticProvider final : public SemanticSimilarityProvider {
public:
    explicit EmbeddingSemanticProvider(const lexgraph::TextEmbedder& embedder)
        : embedder_(embedder) {}
    double similarity(const std::string& term, const Query& q) const override;

private:
    const lexgraph::TextEmbedder& embedder_;
};

// --- matching strategies ----------------------------------------------------

/// Code-match score: gamma * exact + (1 - gamma) * partial, where partial is
/// the shared leading-segment count over the larger segment count. Both
/// codes must already be normalized; either one empty scores 0.
double codeMatch(const std::string& concept_code, const std::string& query_code,
                 const MatchParams& p);

/// Raw cosine similarity in [-1, 1]. Throws on dimension mismatch or a
/// zero vector; strategy scoring clamps at 0.
double vectorSimilarity(const std::vector<double>& a, const std::vector<double>& b);

/// Path-inference score: the best decayed path weight from the concept to
/// any concept named in the query, clamped to [0, 1]. A concept named in
/// the query scores 1; no named or reachable concepts score 0.
double pathInference(const kg::KnowledgeGraph& g, const kg::ConceptId& c, const Query& q,
                     const MatchParams& p);

/// Professional weight of a term: the legal-vs-general log frequency ratio
/// (smoothed, clamped at 0) scaled by the term's jurisdictional scope.
double iltWeight(const std::string& term, const TermStats& stats);

/// Per-term match degree against the query: exact, stem, and semantic
/// components combined by the alpha weights.
double matchTerm(const std::string& term, const Query& q, const MatchParams& p,
                 const SemanticSimilarityProvider& sem);

/// Weighted mean of term matches scaled by capped professional weights.
/// A concept without terms scores 0; all-zero term weights score 0 and
/// append a note to `diagnostics` when provided.
double termMatchScore(const kg::LegalConcept& c, const Query& q, const TermStats& stats,
                      const MatchParams& p, const SemanticSimilarityProvider& sem,
                      std::vector<std::string>* diagnostics = nullptr);

/// Convex combination of the four strategy scores under the fusion weights.
StrategyScores fuseScores(double cm, double vs, double pi, double tm, const MatchParams& p);

/// Scores every concept and selects k by greedy maximal marginal relevance:
/// the first pick is the best fused score; each following pick maximizes
/// diversity_lambda * fused - (1 - diversity_lambda) * max similarity to the
/// picks so far (embedding cosine when both sides have vectors, otherwise
/// token Jaccard of the texts). Ties always fall to the smaller concept id.
std::vector<RetrievalResult> retrieve(const kg::KnowledgeGraph& g, const Query& q,
                                      const TermStats& stats, const MatchParams& p,
                                      const SemanticSimilarityProvider& sem, std::size_t k);

} // namespace lexgraph::retrieval
