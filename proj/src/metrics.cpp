#include <lexgraph/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lexgraph::metrics {

namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

using Ngram = std::vector<std::string>;

std::map<Ngram, int> ngramCounts(const std::vector<std::string>& tokens, int n) {
    std::map<Ngram, int> counts;
    if (static_cast<int>(tokens.size()) < n) {
        return counts;
    }
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        ++counts[Ngram(tokens.begin() + i, tokens.begin() + i + n)];
    }
    return counts;
}

// Clipped n-gram matches and total candidate n-grams.
std::pair<std::int64_t, std::int64_t> clippedMatches(const std::vector<std::string>& candidate,
                                                     const std::vector<std::string>& reference,
                                                     int n) {
    auto cand = ngramCounts(candidate, n);
    auto ref = ngramCounts(reference, n);
    std::int64_t matched = 0;
    std::int64_t total = 0;
    for (const auto& [gram, count] : cand) {
        total += count;
        auto it = ref.find(gram);
        if (it != ref.end()) {
            matched += std::min(count, it->second);
        }
    }
    return {matched, total};
}

} // namespace

ConfusionMetricsResult confusionMetrics(const ConfusionCounts& c) {
    ConfusionMetricsResult r;
    r.sensitivity = ratio(c.tp, c.tp + c.fn);
    r.specificity = ratio(c.tn, c.tn + c.fp);
    r.precision = ratio(c.tp, c.tp + c.fp);
    return r;
}

double bleuN(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
             int n) {
    if (n != 1 && n != 2) {
        throw std::invalid_argument("bleuN supports n = 1 or 2");
    }
    if (candidate.empty()) {
        return 0.0;
    }
    auto [matched, total] = clippedMatches(candidate, reference, n);
    if (total == 0) {
        return 0.0;
    }
    const double precision = static_cast<double>(matched) / static_cast<double>(total);
    const double bp = std::exp(std::min(
        0.0, 1.0 - static_cast<double>(reference.size()) / static_cast<double>(candidate.size())));
    return precision * bp;
}

double rougeN(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
              int n) {
    auto ref = ngramCounts(reference, n);
    std::int64_t ref_total = 0;
    for (const auto& [gram, count] : ref) {
        ref_total += count;
    }
    if (ref_total == 0) {
        return 0.0;
    }
    auto [matched, cand_total] = clippedMatches(candidate, reference, n);
    (void)cand_total;
    return static_cast<double>(matched) / static_cast<double>(ref_total);
}

double rougeL(const std::vector<std::string>& candidate,
              const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty()) {
        return 0.0;
    }
    // Classic LCS table, rolling rows.
    std::vector<std::int64_t> prev(reference.size() + 1, 0);
    std::vector<std::int64_t> curr(reference.size() + 1, 0);
    for (std::size_t i = 1; i <= candidate.size(); ++i) {
        for (std::size_t j = 1; j <= reference.size(); ++j) {
            if (candidate[i - 1] == reference[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    const auto lcs = static_cast<double>(prev[reference.size()]);
    if (lcs == 0.0) {
        return 0.0;
    }
    const double recall = lcs / static_cast<double>(reference.size());
    const double precision = lcs / static_cast<double>(candidate.size());
    return 2.0 * recall * precision / (recall + precision);
}

} // namespace lexgraph::metrics
