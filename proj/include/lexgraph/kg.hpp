#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexgraph::kg {

using ConceptId = std::string;

/// The three graph layers: abstract legal categories, norms and doctrines,
/// and concrete cases.
enum class LayerTag { Ontology, Representation, Instance };

const char* layerTagName(LayerTag tag);
std::optional<LayerTag> layerTagFromName(std::string_view name);

enum class SourceType { Statute, Regulation, CaseLaw, Commentary };

const char* sourceTypeName(SourceType type);
std::optional<SourceType> sourceTypeFromName(std::string_view name);

/// Publishing-institution metadata; level 1 is the highest tier.
struct AuthorityRecord {
    SourceType source_type = SourceType::Commentary;
    int institution_level = 1;

    bool operator==(const AuthorityRecord&) const = default;
};

struct TermWeight {
    std::string term;
    double weight = 0.0;

    bool operator==(const TermWeight&) const = default;
};

struct LegalConcept {
    ConceptId id;
    LayerTag layer = LayerTag::Representation;
    std::string code;    ///< normalized legal code, empty when the concept has none
    std::string title;
    std::string text;
    std::vector<TermWeight> terms;
    std::optional<std::vector<double>> embedding;
    std::set<std::string> jurisdictions;
    std::string effective_date;    ///< ISO-8601 (YYYY-MM-DD) or empty
    ConceptId superseded_by;       ///< empty while the concept is current
    std::int64_t citation_count = 0;
    std::optional<AuthorityRecord> authority;

    bool operator==(const LegalConcept&) const = default;
};

struct Relation {
    ConceptId from;
    ConceptId to;
    std::string rel_type;
    double weight = 0.0;    ///< in (0, 1]

    bool operator==(const Relation&) const = default;
};

struct Violation {
    std::string record;    ///< offending concept id or "from -> to" edge
    std::string message;
};

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Immutable store of concepts and typed weighted relations. Corpus
/// statistics (avgdl, document frequencies, citation maximum) are derived
/// when the graph is built and never persisted, so they cannot go stale.
/// Safe for concurrent read-only use from any number of threads.
class KnowledgeGraph {
public:
    struct Edge {
        std::size_t neighbor;    ///< concept index at the other end
        std::size_t relation;    ///< index into relations()
    };

    const std::vector<LegalConcept>& concepts() const { return concepts_; }
    const std::vector<Relation>& relations() const { return relations_; }
    std::size_t docCount() const { return concepts_.size(); }
    double avgdl() const { return avgdl_; }
    std::size_t embeddingDim() const { return embedding_dim_; }
    std::int64_t maxCitationCount() const { return max_citations_; }

    std::optional<std::size_t> indexOf(const ConceptId& id) const;
    const LegalConcept* find(const ConceptId& id) const;
    const LegalConcept& at(std::size_t index) const { return concepts_[index]; }

    /// First concept (in id order) carrying the given normalized code.
    const LegalConcept* findByCode(const std::string& code) const;

    std::size_t docFreq(const std::string& token) const;
    const std::unordered_map<std::string, int>& termFrequency(std::size_t index) const {
        return tf_[index];
    }
    std::size_t docLength(std::size_t index) const { return doc_len_[index]; }

    /// Undirected adjacency; parallel edges appear individually.
    const std::vector<Edge>& neighbors(std::size_t index) const { return adjacency_[index]; }

private:
    friend class GraphBuilder;

    std::vector<LegalConcept> concepts_;    // sorted by id
    std::vector<Relation> relations_;
    std::vector<std::vector<Edge>> adjacency_;
    std::unordered_map<ConceptId, std::size_t> index_;
    std::unordered_map<std::string, std::size_t> code_index_;
    std::unordered_map<std::string, int> df_;
    std::vector<std::unordered_map<std::string, int>> tf_;
    std::vector<std::size_t> doc_len_;
    double avgdl_ = 0.0;
    std::size_t embedding_dim_ = 0;
    std::int64_t max_citations_ = 0;
};

/// Assembles a KnowledgeGraph. finalize() enforces every structural and
/// value invariant; finalizeLenient() keeps whatever it was given so that
/// validateGraph can inspect deliberately broken data.
class GraphBuilder {
public:
    GraphBuilder& addConcept(LegalConcept c);
    GraphBuilder& addRelation(Relation relation);

    KnowledgeGraph finalize() &&;
    KnowledgeGraph finalizeLenient() &&;

private:
    KnowledgeGraph build(bool strict);

    std::vector<LegalConcept> concepts_;
    std::vector<Relation> relations_;
};

/// All invariant violations present in the graph, one entry per offence,
/// in deterministic order (concepts by id, then relations in storage order).
/// An empty result means every invariant holds.
std::vector<Violation> validateGraph(const KnowledgeGraph& g);

/// Reads the ".kg.jsonl" line format: one self-describing JSON object per
/// line with "kind" of "concept" or "relation". Throws GraphError naming
/// the offending line on malformed records, duplicate ids, dangling
/// relation endpoints, embedding dimension mismatches, or an empty stream.
KnowledgeGraph loadGraph(std::istream& in);

/// Writes the same line format, concepts (id order) before relations.
/// Returns the number of records written. Refuses to serialize a graph
/// that fails validation.
std::size_t saveGraph(const KnowledgeGraph& g, std::ostream& out);

bool graphsEqual(const KnowledgeGraph& a, const KnowledgeGraph& b);

struct PathResult {
    int hops = 0;
    double weight_sum = 0.0;
    std::vector<Relation> path;    ///< traversed edges; empty when endpoints coincide
};

/// Hop-minimal undirected path between two concepts. Among hop-minimal
/// paths the one maximizing the summed relation weight wins; remaining
/// ties fall to the lexicographically smallest node-id sequence. Returns
/// nullopt when the endpoints are disconnected.
std::optional<PathResult> shortestPath(const KnowledgeGraph& g, const ConceptId& a,
                                       const ConceptId& b);

/// Per-node hop distance (-1 when unreachable) and best hop-minimal path
/// weight from one source, for batch scoring.
struct PathField {
    std::vector<int> dist;
    std::vector<double> weight;
};

PathField singleSourcePaths(const KnowledgeGraph& g, std::size_t source);

} // namespace lexgraph::kg
