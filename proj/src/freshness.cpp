#include <lexgraph/freshness.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <stdexcept>
#include <unordered_map>

namespace lexgraph::freshness {

using nlohmann::json;

std::vector<SearchResult> loadSearchFixtures(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("search fixtures: invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) {
        throw std::runtime_error("search fixtures must be a JSON array");
    }
    std::vector<SearchResult> out;
    for (const auto& rec : doc) {
        SearchResult r;
        auto type = kg::sourceTypeFromName(rec.at("source_type").get<std::string>());
        if (!type) {
            throw std::runtime_error("search fixtures: unknown source_type '" +
                                     rec.at("source_type").get<std::string>() + "'");
        }
        r.source_type = *type;
        r.institution_level = rec.value("institution_level", 1);
        r.citation_frequency = rec.value("citation_frequency", std::int64_t{0});
        r.jurisdiction = rec.value("jurisdiction", std::string{});
        r.effective_date = rec.value("effective_date", std::string{});
        r.superseded = rec.value("superseded", false);
        r.code = rec.value("code", std::string{});
        r.text = rec.value("text", std::string{});
        if (r.institution_level < 1) {
            throw std::runtime_error("search fixtures: institution_level must be >= 1");
        }
        if (r.citation_frequency < 0) {
            throw std::runtime_error("search fixtures: citation_frequency must be >= 0");
        }
        out.push_back(std::move(r));
    }
    return out;
}

FixtureSearchClient FixtureSearchClient::fromStream(std::istream& in) {
    return FixtureSearchClient(loadSearchFixtures(in));
}

void AuthorityWeights::validate() const {
    for (double w : {type, institution, citations}) {
        if (w < 0.0) {
            throw std::invalid_argument("authority weights must be non-negative");
        }
    }
    if (std::abs(type + institution + citations - 1.0) > 1e-9) {
        throw std::invalid_argument("authority weights must sum to 1");
    }
}

int typeRank(SourceType type) {
    switch (type) {
        case SourceType::Statute: return 4;
        case SourceType::Regulation: return 3;
        case SourceType::CaseLaw: return 2;
        case SourceType::Commentary: return 1;
    }
    return 1;
}

double authorityScore(const SearchResult& r, const AuthorityWeights& w,
                      std::int64_t max_citations) {
    w.validate();
    if (max_citations < r.citation_frequency) {
        throw std::invalid_argument("max_citations below the result's citation frequency");
    }
    const double type_part = static_cast<double>(typeRank(r.source_type)) / 4.0;
    const double inst_part = 1.0 / static_cast<double>(r.institution_level);
    const double cite_part = static_cast<double>(r.citation_frequency) /
                             static_cast<double>(std::max<std::int64_t>(1, max_citations));
    return w.type * type_part + w.institution * inst_part + w.citations * cite_part;
}

std::vector<SearchResult> filterTimely(const std::vector<SearchResult>& results,
                                       std::string_view as_of, std::string_view jurisdiction) {
    std::vector<SearchResult> out;
    for (const auto& r : results) {
        if (r.superseded) {
            continue;
        }
        // ISO dates compare lexicographically.
        if (!as_of.empty() && !r.effective_date.empty() && r.effective_date > as_of) {
            continue;
        }
        if (!jurisdiction.empty() && !r.jurisdiction.empty() && r.jurisdiction != jurisdiction) {
            continue;
        }
        out.push_back(r);
    }
    return out;
}

const char* provenanceName(Provenance p) {
    return p == Provenance::Graph ? "graph" : "search";
}

std::vector<KnowledgeEntry> mergeKnowledge(const std::vector<retrieval::RetrievalResult>& graph_hits,
                                           const std::vector<SearchResult>& search_hits,
                                           const kg::KnowledgeGraph& g, const MergeParams& params) {
    params.weights.validate();
    std::int64_t max_citations = 0;
    for (const auto& hit : search_hits) {
        max_citations = std::max(max_citations, hit.citation_frequency);
    }

    std::vector<KnowledgeEntry> entries;
    std::unordered_map<std::string, std::size_t> slot_by_code;

    for (const auto& hit : graph_hits) {
        const auto* source = g.find(hit.concept_id);
        if (!source) {
            throw std::invalid_argument("graph hit '" + hit.concept_id + "' not in graph");
        }
        if (!source->code.empty() && slot_by_code.count(source->code)) {
            continue;    // two concepts sharing a code: the better-ranked one stays
        }
        KnowledgeEntry entry;
        entry.provenance = Provenance::Graph;
        entry.concept_id = source->id;
        entry.scores = hit.scores;
        entry.code = source->code;
        entry.text = source->text;
        entry.authority = params.graph_authority_default;
        if (source->authority) {
            SearchResult as_source;
            as_source.source_type = source->authority->source_type;
            as_source.institution_level = source->authority->institution_level;
            as_source.citation_frequency = source->citation_count;
            entry.authority = authorityScore(as_source, params.weights,
                                             std::max(g.maxCitationCount(), source->citation_count));
        }
        if (!entry.code.empty()) {
            slot_by_code[entry.code] = entries.size();
        }
        entries.push_back(std::move(entry));
    }

    std::vector<KnowledgeEntry> extras;
    std::unordered_map<std::string, std::size_t> extra_by_code;
    for (const auto& hit : search_hits) {
        const double authority = authorityScore(hit, params.weights, max_citations);
        if (!hit.code.empty()) {
            auto slot = slot_by_code.find(hit.code);
            if (slot != slot_by_code.end()) {
                auto& entry = entries[slot->second];
                if (authority > entry.authority) {
                    entry.provenance = Provenance::Search;
                    entry.text = hit.text;
                    entry.authority = authority;
                }
                continue;
            }
            auto extra = extra_by_code.find(hit.code);
            if (extra != extra_by_code.end()) {
                if (authority > extras[extra->second].authority) {
                    extras[extra->second].text = hit.text;
                    extras[extra->second].authority = authority;
                }
                continue;
            }
        }
        KnowledgeEntry entry;
        entry.provenance = Provenance::Search;
        entry.code = hit.code;
        entry.text = hit.text;
        entry.authority = authority;
        if (!hit.code.empty()) {
            extra_by_code[hit.code] = extras.size();
        }
        extras.push_back(std::move(entry));
    }

    std::stable_sort(extras.begin(), extras.end(),
                     [](const KnowledgeEntry& a, const KnowledgeEntry& b) {
                         if (a.authority != b.authority) {
                             return a.authority > b.authority;
                         }
                         return a.code < b.code;
                     });
    entries.insert(entries.end(), extras.begin(), extras.end());
    return entries;
}

} // namespace lexgraph::freshness
