#pragma once

#include <lexgraph/kg.hpp>
#include <lexgraph/retrieval.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lexgraph::freshness {

using kg::SourceType;

struct SearchResult {
    SourceType source_type = SourceType::Commentary;
    int institution_level = 1;    ///< 1 = highest tier
    std::int64_t citation_frequency = 0;
    std::string jurisdiction;
    std::string effective_date;    ///< ISO-8601
    bool superseded = false;
    std::string code;    ///< normalized, may be empty
    std::string text;
};

/// External legal search behind one interface. Implementations must be
/// safe for concurrent calls or declare serialized access.
class SearchClient {
public:
    virtual ~SearchClient() = default;
    virtual std::vector<SearchResult> search(const std::string& query_text,
                                             const std::string& jurisdiction) = 0;
};

/// Replays a ".search.json" fixture verbatim, ignoring the query.
class FixtureSearchClient final : public SearchClient {
public:
    explicit FixtureSearchClient(std::vector<SearchResult> fixtures)
        : fixtures_(std::move(fixtures)) {}

    static FixtureSearchClient fromStream(std::istream& in);

    std::vector<SearchResult> search(const std::string&, const std::string&) override {
        return fixtures_;
    }

private:
    std::vector<SearchResult> fixtures_;
};

std::vector<SearchResult> loadSearchFixtures(std::istream& in);

struct AuthorityWeights {
    double type = 1.0 / 3.0;
    double institution = 1.0 / 3.0;
    double citations = 1.0 / 3.0;

    void validate() const;
};

/// Statute 4, Regulation 3, CaseLaw 2, Commentary 1.
int typeRank(SourceType type);

/// Convex combination of source-type rank (over 4), inverse institution
/// level, and citation share; always in [0, 1].
double authorityScore(const SearchResult& r, const AuthorityWeights& w,
                      std::int64_t max_citations);

/// Drops superseded results, results effective after `as_of`, and results
/// from a different jurisdiction. Empty dates or an empty jurisdiction on
/// either side impose no constraint. Input order is preserved.
std::vector<SearchResult> filterTimely(const std::vector<SearchResult>& results,
                                       std::string_view as_of, std::string_view jurisdiction);

enum class Provenance { Graph, Search };

const char* provenanceName(Provenance p);

/// One entry of the unified knowledge list.
struct KnowledgeEntry {
    Provenance provenance = Provenance::Graph;
    kg::ConceptId concept_id;    ///< set for graph-derived entries
    retrieval::StrategyScores scores;
    std::string code;
    std::string text;          ///< search text (also kept when it replaces a graph slot)
    double authority = 0.0;
};

struct MergeParams {
    double graph_authority_default = 0.5;
    AuthorityWeights weights;
};

/// Unifies graph retrieval output with already-filtered search hits.
/// Entries sharing a normalized code are deduplicated: the graph entry
/// keeps its slot unless the search hit scores strictly higher authority,
/// in which case the search text replaces it in place. Search hits without
/// a graph counterpart are appended in descending authority order. The
/// result never repeats a non-empty code.
std::vector<KnowledgeEntry> mergeKnowledge(const std::vector<retrieval::RetrievalResult>& graph_hits,
                                           const std::vector<SearchResult>& search_hits,
                                           const kg::KnowledgeGraph& g, const MergeParams& params);

} // namespace lexgraph::freshness
