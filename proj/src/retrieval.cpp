#include <lexgraph/retrieval.hpp>

#include <lexgraph/embedding.hpp>
#include <lexgraph/scoring_kernels.hpp>
#include <lexgraph/similarity.hpp>
#include <lexgraph/text.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace lexgraph::retrieval {

Query Query::fromText(std::string text) {
    Query q;
    q.tokens = tokenize(text);
    q.text = std::move(text);
    return q;
}

TermStats::Entry TermStats::lookup(const std::string& term) const {
    auto it = entries_.find(term);
    return it == entries_.end() ? Entry{} : it->second;
}

TermStats TermStats::fromStream(std::istream& in, double sigma) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("term stats sigma must be > 0");
    }
    TermStats stats;
    stats.sigma = sigma;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream row(line);
        std::string col;
        while (std::getline(row, col, '\t')) {
            cols.push_back(col);
        }
        if (line_no == 1 && !cols.empty() && cols[0] == "term") {
            continue;    // header
        }
        if (cols.size() != 4) {
            throw std::runtime_error("terms line " + std::to_string(line_no) +
                                     ": expected 4 tab-separated columns");
        }
        Entry e;
        try {
            e.freq_legal = std::stod(cols[1]);
            e.freq_general = std::stod(cols[2]);
            e.jur_scope = std::stod(cols[3]);
        } catch (const std::exception&) {
            throw std::runtime_error("terms line " + std::to_string(line_no) +
                                     ": non-numeric frequency column");
        }
        if (e.freq_legal < 0 || e.freq_general < 0 || e.jur_scope < 0 || e.jur_scope > 1) {
            throw std::runtime_error("terms line " + std::to_string(line_no) +
                                     ": counts must be >= 0 and jur_scope in [0, 1]");
        }
        stats.add(asciiLower(cols[0]), e);
    }
    return stats;
}

void MatchParams::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (gamma < 0.0 || gamma > 1.0) fail("gamma must lie in [0, 1]");
    if (!(lambda_decay > 0.0 && lambda_decay < 1.0)) fail("lambda_decay must lie in (0, 1)");
    if (alpha1 < 0.0 || alpha2 < 0.0 || alpha3 < 0.0 ||
        std::abs(alpha1 + alpha2 + alpha3 - 1.0) > 1e-9) {
        fail("term match alphas must be non-negative and sum to 1");
    }
    double sum = 0.0;
    for (double w : fusion_weights) {
        if (w < 0.0) fail("fusion weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("fusion weights must sum to 1");
    if (!(ilt_cap > 0.0)) fail("ilt_cap must be > 0");
    if (diversity_lambda < 0.0 || diversity_lambda > 1.0) {
        fail("diversity_lambda must lie in [0, 1]");
    }
}

double EmbeddingSemanticProvider::similarity(const std::string& term, const Query& q) const {
    if (!q.embedding) {
        return 0.0;
    }
    auto term_vec = embedder_.embed(term);
    if (!term_vec) {
        return 0.0;
    }
    return std::max(0.0, cosineOrZero(*term_vec, *q.embedding));
}

// ---------------------------------------------------------------------------
// Strategy scores
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> splitSegments(const std::string& code) {
    std::vector<std::string> segments;
    std::stringstream in(code);
    std::string seg;
    while (std::getline(in, seg, '-')) {
        segments.push_back(seg);
    }
    return segments;
}

} // namespace

double codeMatch(const std::string& concept_code, const std::string& query_code,
                 const MatchParams& p) {
    if (concept_code.empty() || query_code.empty()) {
        return 0.0;
    }
    const double exact = concept_code == query_code ? 1.0 : 0.0;

    auto cs = splitSegments(concept_code);
    auto qs = splitSegments(query_code);
    std::size_t shared = 0;
    while (shared < cs.size() && shared < qs.size() && cs[shared] == qs[shared]) {
        ++shared;
    }
    const double partial =
        static_cast<double>(shared) / static_cast<double>(std::max(cs.size(), qs.size()));

    return p.gamma * exact + (1.0 - p.gamma) * partial;
}

double vectorSimilarity(const std::vector<double>& a, const std::vector<double>& b) {
    return cosine(a, b);
}

double pathInference(const kg::KnowledgeGraph& g, const kg::ConceptId& c, const Query& q,
                     const MatchParams& p) {
    auto ci = g.indexOf(c);
    if (!ci) {
        throw std::invalid_argument("unknown concept id '" + c + "'");
    }
    for (const auto& id : q.concept_ids) {
        if (!g.indexOf(id)) {
            throw std::invalid_argument("unknown concept id '" + id + "'");
        }
    }
    if (q.concept_ids.count(c)) {
        return 1.0;    // a concept the query names is maximally relevant
    }
    double best = 0.0;
    for (const auto& id : q.concept_ids) {
        auto sp = kg::shortestPath(g, c, id);
        if (!sp) {
            continue;
        }
        best = std::max(best, std::pow(p.lambda_decay, sp->hops) * sp->weight_sum);
    }
    return std::clamp(best, 0.0, 1.0);
}

double iltWeight(const std::string& term, const TermStats& stats) {
    auto e = stats.lookup(term);
    double raw = std::log((e.freq_legal + stats.sigma) / (e.freq_general + stats.sigma));
    return std::max(0.0, raw) * e.jur_scope;
}

double matchTerm(const std::string& term, const Query& q, const MatchParams& p,
                 const SemanticSimilarityProvider& sem) {
    auto term_tokens = tokenize(term);
    std::unordered_set<std::string> query_tokens(q.tokens.begin(), q.tokens.end());
    std::unordered_set<std::string> query_stems;
    for (const auto& t : q.tokens) {
        query_stems.insert(stem(t));
    }

    bool exact = !term_tokens.empty();
    bool stems = !term_tokens.empty();
    for (const auto& t : term_tokens) {
        exact = exact && query_tokens.count(t) != 0;
        stems = stems && query_stems.count(stem(t)) != 0;
    }

    const double sem_sim = std::clamp(sem.similarity(term, q), 0.0, 1.0);
    return p.alpha1 * (exact ? 1.0 : 0.0) + p.alpha2 * (stems ? 1.0 : 0.0) + p.alpha3 * sem_sim;
}

double termMatchScore(const kg::LegalConcept& c, const Query& q, const TermStats& stats,
                      const MatchParams& p, const SemanticSimilarityProvider& sem,
                      std::vector<std::string>* diagnostics) {
    if (c.terms.empty()) {
        return 0.0;
    }
    double total_weight = 0.0;
    double score = 0.0;
    for (const auto& tw : c.terms) {
        total_weight += tw.weight;
        if (tw.weight == 0.0) {
            continue;
        }
        const double ilt_norm = std::min(1.0, iltWeight(asciiLower(tw.term), stats) / p.ilt_cap);
        score += tw.weight * matchTerm(tw.term, q, p, sem) * ilt_norm;
    }
    if (total_weight == 0.0) {
        if (diagnostics) {
            diagnostics->push_back("concept '" + c.id + "' has all-zero term weights");
        }
        return 0.0;
    }
    return score / total_weight;
}

StrategyScores fuseScores(double cm, double vs, double pi, double tm, const MatchParams& p) {
    double sum = 0.0;
    for (double w : p.fusion_weights) {
        if (w < 0.0) {
            throw std::invalid_argument("fusion weights must be non-negative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("fusion weights must sum to 1");
    }
    StrategyScores s;
    s.cm = cm;
    s.vs = vs;
    s.pi = pi;
    s.tm = tm;
    s.fused = p.fusion_weights[0] * cm + p.fusion_weights[1] * vs + p.fusion_weights[2] * pi +
              p.fusion_weights[3] * tm;
    return s;
}

// ---------------------------------------------------------------------------
// Top-k selection
// ---------------------------------------------------------------------------

namespace {

// Redundancy between two concepts: embedding cosine when both carry
// vectors, token Jaccard of the texts otherwise.
double conceptSimilarity(const kg::KnowledgeGraph& g, std::size_t a, std::size_t b) {
    const auto& ca = g.at(a);
    const auto& cb = g.at(b);
    if (ca.embedding && cb.embedding) {
        return std::max(0.0, cosineOrZero(*ca.embedding, *cb.embedding));
    }
    return jaccardKeys(g.termFrequency(a), g.termFrequency(b));
}

} // namespace

std::vector<RetrievalResult> retrieve(const kg::KnowledgeGraph& g, const Query& q,
                                      const TermStats& stats, const MatchParams& p,
                                      const SemanticSimilarityProvider& sem, std::size_t k) {
    p.validate();
    if (k == 0) {
        throw std::invalid_argument("k must be >= 1");
    }
    if (g.docCount() == 0) {
        throw std::invalid_argument("empty graph");
    }
    if (q.embedding && g.embeddingDim() != 0 && q.embedding->size() != g.embeddingDim()) {
        throw std::invalid_argument("query embedding dimension does not match the graph");
    }

    auto scores = scoreAll(g, q, stats, p, sem);
    const std::size_t n = std::min(k, g.docCount());
    const double lambda = p.diversity_lambda;

    std::vector<bool> picked(g.docCount(), false);
    std::vector<RetrievalResult> out;
    out.reserve(n);
    std::vector<std::size_t> chosen;

    while (out.size() < n) {
        std::size_t best = g.docCount();
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < g.docCount(); ++i) {
            if (picked[i]) {
                continue;
            }
            double value = scores[i].fused;
            if (!chosen.empty() && lambda < 1.0) {
                double redundancy = 0.0;
                for (auto c : chosen) {
                    redundancy = std::max(redundancy, conceptSimilarity(g, i, c));
                }
                value = lambda * scores[i].fused - (1.0 - lambda) * redundancy;
            }
            if (value > best_value) {    // strict: ties keep the smaller id
                best_value = value;
                best = i;
            }
        }
        picked[best] = true;
        chosen.push_back(best);
        out.push_back({g.at(best).id, scores[best], static_cast<int>(out.size() + 1)});
    }
    return out;
}

} // namespace lexgraph::retrieval
