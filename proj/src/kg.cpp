#include <lexgraph/kg.hpp>

#include <lexgraph/text.hpp>

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace lexgraph::kg {

using nlohmann::json;

namespace {

bool isBlank(std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

bool isIsoDate(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        return false;
    }
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (std::isdigit(static_cast<unsigned char>(s[i])) == 0) {
            return false;
        }
    }
    return true;
}

std::string edgeLabel(const Relation& r) {
    return r.from + " -> " + r.to + " (" + r.rel_type + ")";
}

} // namespace

const char* layerTagName(LayerTag tag) {
    switch (tag) {
        case LayerTag::Ontology: return "ontology";
        case LayerTag::Representation: return "representation";
        case LayerTag::Instance: return "instance";
    }
    return "representation";
}

std::optional<LayerTag> layerTagFromName(std::string_view name) {
    if (name == "ontology") return LayerTag::Ontology;
    if (name == "representation") return LayerTag::Representation;
    if (name == "instance") return LayerTag::Instance;
    return std::nullopt;
}

const char* sourceTypeName(SourceType type) {
    switch (type) {
        case SourceType::Statute: return "statute";
        case SourceType::Regulation: return "regulation";
        case SourceType::CaseLaw: return "caselaw";
        case SourceType::Commentary: return "commentary";
    }
    return "commentary";
}

std::optional<SourceType> sourceTypeFromName(std::string_view name) {
    if (name == "statute") return SourceType::Statute;
    if (name == "regulation") return SourceType::Regulation;
    if (name == "caselaw") return SourceType::CaseLaw;
    if (name == "commentary") return SourceType::Commentary;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// KnowledgeGraph accessors
// ---------------------------------------------------------------------------

std::optional<std::size_t> KnowledgeGraph::indexOf(const ConceptId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

const LegalConcept* KnowledgeGraph::find(const ConceptId& id) const {
    auto idx = indexOf(id);
    return idx ? &concepts_[*idx] : nullptr;
}

const LegalConcept* KnowledgeGraph::findByCode(const std::string& code) const {
    auto it = code_index_.find(code);
    return it == code_index_.end() ? nullptr : &concepts_[it->second];
}

std::size_t KnowledgeGraph::docFreq(const std::string& token) const {
    auto it = df_.find(token);
    return it == df_.end() ? 0 : static_cast<std::size_t>(it->second);
}

// ---------------------------------------------------------------------------
// GraphBuilder
// ---------------------------------------------------------------------------

GraphBuilder& GraphBuilder::addConcept(LegalConcept c) {
    concepts_.push_back(std::move(c));
    return *this;
}

GraphBuilder& GraphBuilder::addRelation(Relation relation) {
    relations_.push_back(std::move(relation));
    return *this;
}

KnowledgeGraph GraphBuilder::build(bool strict) {
    KnowledgeGraph g;
    g.concepts_ = std::move(concepts_);
    g.relations_ = std::move(relations_);

    std::stable_sort(g.concepts_.begin(), g.concepts_.end(),
                     [](const LegalConcept& a, const LegalConcept& b) { return a.id < b.id; });

    for (std::size_t i = 0; i < g.concepts_.size(); ++i) {
        const auto& c = g.concepts_[i];
        if (!g.index_.emplace(c.id, i).second && strict) {
            throw GraphError("duplicate concept id '" + c.id + "'");
        }
        if (!c.code.empty()) {
            g.code_index_.emplace(c.code, i);
        }
        if (c.embedding && g.embedding_dim_ == 0) {
            g.embedding_dim_ = c.embedding->size();
        }
    }

    if (strict) {
        if (g.concepts_.empty()) {
            throw GraphError("empty graph");
        }
        for (const auto& r : g.relations_) {
            for (const auto* end : {&r.from, &r.to}) {
                if (!g.index_.count(*end)) {
                    throw GraphError("relation endpoint '" + *end + "' not found");
                }
            }
        }
    }

    // Derived corpus statistics.
    g.tf_.resize(g.concepts_.size());
    g.doc_len_.resize(g.concepts_.size());
    std::size_t total_len = 0;
    for (std::size_t i = 0; i < g.concepts_.size(); ++i) {
        auto tokens = tokenize(g.concepts_[i].text);
        g.doc_len_[i] = tokens.size();
        total_len += tokens.size();
        g.tf_[i] = termFrequencies(tokens);
        for (const auto& [term, count] : g.tf_[i]) {
            ++g.df_[term];
        }
        g.max_citations_ = std::max(g.max_citations_, g.concepts_[i].citation_count);
    }
    g.avgdl_ = g.concepts_.empty()
                   ? 0.0
                   : static_cast<double>(total_len) / static_cast<double>(g.concepts_.size());

    g.adjacency_.resize(g.concepts_.size());
    for (std::size_t r = 0; r < g.relations_.size(); ++r) {
        auto from = g.indexOf(g.relations_[r].from);
        auto to = g.indexOf(g.relations_[r].to);
        if (!from || !to || *from == *to) {
            continue;    // lenient builds keep the record for validateGraph to report
        }
        g.adjacency_[*from].push_back({*to, r});
        g.adjacency_[*to].push_back({*from, r});
    }

    if (strict) {
        auto violations = validateGraph(g);
        if (!violations.empty()) {
            throw GraphError(violations.front().record + ": " + violations.front().message);
        }
    }
    return g;
}

KnowledgeGraph GraphBuilder::finalize() && {
    return build(true);
}

KnowledgeGraph GraphBuilder::finalizeLenient() && {
    return build(false);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::vector<Violation> validateGraph(const KnowledgeGraph& g) {
    std::vector<Violation> out;
    auto flag = [&out](std::string record, std::string message) {
        out.push_back({std::move(record), std::move(message)});
    };

    const auto& concepts = g.concepts();
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        const auto& c = concepts[i];
        if (c.id.empty() || isBlank(c.id)) {
            flag(c.id, "concept id must not be empty or whitespace-only");
        }
        if (i + 1 < concepts.size() && concepts[i + 1].id == c.id) {
            flag(c.id, "duplicate concept id");
        }
        for (const auto& tw : c.terms) {
            if (!std::isfinite(tw.weight) || tw.weight < 0.0) {
                flag(c.id, "term '" + tw.term + "' has a negative or non-finite weight");
            }
        }
        if (c.citation_count < 0) {
            flag(c.id, "citation_count must be non-negative");
        }
        if (c.embedding && c.embedding->size() != g.embeddingDim()) {
            std::ostringstream msg;
            msg << "embedding dimension " << c.embedding->size() << " != graph dimension "
                << g.embeddingDim();
            flag(c.id, msg.str());
        }
        if (!c.superseded_by.empty() && !g.indexOf(c.superseded_by)) {
            flag(c.id, "superseded_by refers to unknown concept '" + c.superseded_by + "'");
        }
        if (!c.effective_date.empty() && !isIsoDate(c.effective_date)) {
            flag(c.id, "effective_date '" + c.effective_date + "' is not YYYY-MM-DD");
        }
    }

    for (const auto& r : g.relations()) {
        if (!g.indexOf(r.from)) {
            flag(edgeLabel(r), "relation endpoint '" + r.from + "' not found");
        }
        if (!g.indexOf(r.to)) {
            flag(edgeLabel(r), "relation endpoint '" + r.to + "' not found");
        }
        if (!(r.weight > 0.0 && r.weight <= 1.0)) {
            flag(edgeLabel(r), "relation weight must lie in (0, 1]");
        }
        if (r.from == r.to) {
            flag(edgeLabel(r), "self-loop relations are not allowed");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Line format
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void lineError(std::size_t line, const std::string& message) {
    throw GraphError("line " + std::to_string(line) + ": " + message);
}

LegalConcept parseConcept(const json& rec, std::size_t line) {
    LegalConcept c;
    try {
        c.id = rec.at("id").get<std::string>();
        auto layer = layerTagFromName(rec.at("layer").get<std::string>());
        if (!layer) {
            lineError(line, "unknown layer '" + rec.at("layer").get<std::string>() + "'");
        }
        c.layer = *layer;
        c.title = rec.value("title", std::string{});
        c.text = rec.value("text", std::string{});
        c.code = rec.value("code", std::string{});
        if (rec.contains("terms")) {
            for (const auto& t : rec.at("terms")) {
                c.terms.push_back({t.at(0).get<std::string>(), t.at(1).get<double>()});
            }
        }
        if (rec.contains("embedding")) {
            c.embedding = rec.at("embedding").get<std::vector<double>>();
        }
        if (rec.contains("jurisdictions")) {
            for (const auto& j : rec.at("jurisdictions")) {
                c.jurisdictions.insert(j.get<std::string>());
            }
        }
        c.effective_date = rec.value("effective_date", std::string{});
        c.superseded_by = rec.value("superseded_by", std::string{});
        c.citation_count = rec.value("citation_count", std::int64_t{0});
        if (rec.contains("authority")) {
            const auto& a = rec.at("authority");
            auto type = sourceTypeFromName(a.at("source_type").get<std::string>());
            if (!type) {
                lineError(line, "unknown source_type in authority record");
            }
            c.authority = AuthorityRecord{*type, a.at("institution_level").get<int>()};
        }
    } catch (const json::exception& e) {
        lineError(line, std::string("bad concept record: ") + e.what());
    }
    if (c.id.empty() || isBlank(c.id)) {
        lineError(line, "concept id must not be empty");
    }
    if (!c.effective_date.empty() && !isIsoDate(c.effective_date)) {
        lineError(line, "effective_date '" + c.effective_date + "' is not YYYY-MM-DD");
    }
    return c;
}

Relation parseRelation(const json& rec, std::size_t line) {
    Relation r;
    try {
        r.from = rec.at("from").get<std::string>();
        r.to = rec.at("to").get<std::string>();
        r.rel_type = rec.at("rel_type").get<std::string>();
        r.weight = rec.at("weight").get<double>();
    } catch (const json::exception& e) {
        lineError(line, std::string("bad relation record: ") + e.what());
    }
    return r;
}

} // namespace

KnowledgeGraph loadGraph(std::istream& in) {
    GraphBuilder builder;
    std::unordered_map<std::string, std::size_t> concept_lines;
    std::vector<std::pair<Relation, std::size_t>> relation_lines;
    std::string line;
    std::size_t line_no = 0;
    std::size_t records = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (isBlank(line)) {
            continue;
        }
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            lineError(line_no, std::string("invalid JSON: ") + e.what());
        }
        const std::string kind = rec.value("kind", std::string{});
        if (kind == "concept") {
            auto c = parseConcept(rec, line_no);
            if (!concept_lines.emplace(c.id, line_no).second) {
                lineError(line_no, "duplicate concept id '" + c.id + "'");
            }
            builder.addConcept(std::move(c));
        } else if (kind == "relation") {
            auto r = parseRelation(rec, line_no);
            relation_lines.emplace_back(r, line_no);
            builder.addRelation(std::move(r));
        } else {
            lineError(line_no, "record kind must be 'concept' or 'relation'");
        }
        ++records;
    }
    if (records == 0) {
        throw GraphError("empty graph");
    }

    auto g = std::move(builder).finalizeLenient();
    auto violations = validateGraph(g);
    if (!violations.empty()) {
        const auto& v = violations.front();
        // Attribute the first violation to its source line where possible.
        for (const auto& [rel, ln] : relation_lines) {
            if (edgeLabel(rel) == v.record) {
                lineError(ln, v.message);
            }
        }
        auto it = concept_lines.find(v.record);
        if (it != concept_lines.end()) {
            lineError(it->second, v.message);
        }
        throw GraphError(v.record + ": " + v.message);
    }
    return g;
}

std::size_t saveGraph(const KnowledgeGraph& g, std::ostream& out) {
    if (g.docCount() == 0) {
        throw GraphError("cannot save an empty graph");
    }
    auto violations = validateGraph(g);
    if (!violations.empty()) {
        throw GraphError("cannot save invalid graph: " + violations.front().record + ": " +
                         violations.front().message);
    }

    std::size_t records = 0;
    for (const auto& c : g.concepts()) {
        json rec;
        rec["kind"] = "concept";
        rec["id"] = c.id;
        rec["layer"] = layerTagName(c.layer);
        rec["title"] = c.title;
        rec["text"] = c.text;
        if (!c.code.empty()) {
            rec["code"] = c.code;
        }
        if (!c.terms.empty()) {
            auto terms = json::array();
            for (const auto& tw : c.terms) {
                terms.push_back(json::array({tw.term, tw.weight}));
            }
            rec["terms"] = std::move(terms);
        }
        if (c.embedding) {
            rec["embedding"] = *c.embedding;
        }
        if (!c.jurisdictions.empty()) {
            rec["jurisdictions"] = c.jurisdictions;
        }
        if (!c.effective_date.empty()) {
            rec["effective_date"] = c.effective_date;
        }
        if (!c.superseded_by.empty()) {
            rec["superseded_by"] = c.superseded_by;
        }
        if (c.citation_count != 0) {
            rec["citation_count"] = c.citation_count;
        }
        if (c.authority) {
            rec["authority"] = {{"source_type", sourceTypeName(c.authority->source_type)},
                                {"institution_level", c.authority->institution_level}};
        }
        out << rec.dump() << '\n';
        ++records;
    }
    for (const auto& r : g.relations()) {
        json rec{{"kind", "relation"},
                 {"from", r.from},
                 {"to", r.to},
                 {"rel_type", r.rel_type},
                 {"weight", r.weight}};
        out << rec.dump() << '\n';
        ++records;
    }
    if (!out) {
        throw GraphError("write failure while saving graph");
    }
    return records;
}

bool graphsEqual(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    return a.concepts() == b.concepts() && a.relations() == b.relations();
}

// ---------------------------------------------------------------------------
// Path queries
// ---------------------------------------------------------------------------

namespace {

// Breadth-first hop distances over the undirected adjacency.
std::vector<int> bfsDistances(const KnowledgeGraph& g, std::size_t source) {
    std::vector<int> dist(g.docCount(), -1);
    std::vector<std::size_t> frontier{source};
    dist[source] = 0;
    while (!frontier.empty()) {
        std::vector<std::size_t> next;
        for (auto v : frontier) {
            for (const auto& e : g.neighbors(v)) {
                if (dist[e.neighbor] < 0) {
                    dist[e.neighbor] = dist[v] + 1;
                    next.push_back(e.neighbor);
                }
            }
        }
        frontier = std::move(next);
    }
    return dist;
}

} // namespace

PathField singleSourcePaths(const KnowledgeGraph& g, std::size_t source) {
    PathField field;
    field.dist = bfsDistances(g, source);
    field.weight.assign(g.docCount(), 0.0);

    // Nodes grouped by BFS level; the best weight at level d+1 extends the
    // best weight of some level-d predecessor by one edge.
    int max_level = 0;
    for (int d : field.dist) {
        max_level = std::max(max_level, d);
    }
    std::vector<std::vector<std::size_t>> levels(static_cast<std::size_t>(max_level) + 1);
    for (std::size_t v = 0; v < field.dist.size(); ++v) {
        if (field.dist[v] >= 0) {
            levels[static_cast<std::size_t>(field.dist[v])].push_back(v);
        }
    }
    for (int d = 1; d <= max_level; ++d) {
        for (auto v : levels[static_cast<std::size_t>(d)]) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& e : g.neighbors(v)) {
                if (field.dist[e.neighbor] == d - 1) {
                    best = std::max(best,
                                    field.weight[e.neighbor] + g.relations()[e.relation].weight);
                }
            }
            field.weight[v] = best;
        }
    }
    return field;
}

std::optional<PathResult> shortestPath(const KnowledgeGraph& g, const ConceptId& a,
                                       const ConceptId& b) {
    auto ia = g.indexOf(a);
    auto ib = g.indexOf(b);
    if (!ia || !ib) {
        throw std::invalid_argument("unknown concept id '" + (!ia ? a : b) + "'");
    }
    if (*ia == *ib) {
        return PathResult{};
    }

    auto dist = bfsDistances(g, *ia);
    if (dist[*ib] < 0) {
        return std::nullopt;
    }
    const int target_level = dist[*ib];

    struct Label {
        double weight = 0.0;
        std::vector<std::size_t> seq;     // node indices, starting at the source
        std::vector<std::size_t> rels;    // relation indices along the path
    };
    std::vector<std::optional<Label>> labels(g.docCount());
    labels[*ia] = Label{0.0, {*ia}, {}};

    auto seqLess = [&g](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
        return std::lexicographical_compare(
            x.begin(), x.end(), y.begin(), y.end(),
            [&g](std::size_t p, std::size_t q) { return g.at(p).id < g.at(q).id; });
    };

    std::vector<std::vector<std::size_t>> levels(static_cast<std::size_t>(target_level) + 1);
    for (std::size_t v = 0; v < dist.size(); ++v) {
        if (dist[v] >= 0 && dist[v] <= target_level) {
            levels[static_cast<std::size_t>(dist[v])].push_back(v);
        }
    }

    for (int d = 1; d <= target_level; ++d) {
        for (auto v : levels[static_cast<std::size_t>(d)]) {
            std::optional<Label> best;
            for (const auto& e : g.neighbors(v)) {
                if (dist[e.neighbor] != d - 1 || !labels[e.neighbor]) {
                    continue;
                }
                const auto& prev = *labels[e.neighbor];
                Label cand;
                cand.weight = prev.weight + g.relations()[e.relation].weight;
                cand.seq = prev.seq;
                cand.seq.push_back(v);
                cand.rels = prev.rels;
                cand.rels.push_back(e.relation);
                if (!best || cand.weight > best->weight ||
                    (cand.weight == best->weight &&
                     (seqLess(cand.seq, best->seq) ||
                      (cand.seq == best->seq && cand.rels.back() < best->rels.back())))) {
                    best = std::move(cand);
                }
            }
            labels[v] = std::move(best);
        }
    }

    const auto& final_label = *labels[*ib];
    PathResult result;
    result.hops = target_level;
    result.weight_sum = final_label.weight;
    for (auto r : final_label.rels) {
        result.path.push_back(g.relations()[r]);
    }
    return result;
}

} // namespace lexgraph::kg
