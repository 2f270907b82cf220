#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lexgraph::metrics {

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;
};

/// Ratios with zero denominators come back unset and must be rendered as
/// "n/a", never as 0.
struct ConfusionMetricsResult {
    std::optional<double> sensitivity;    ///< tp / (tp + fn)
    std::optional<double> specificity;    ///< tn / (tn + fp)
    std::optional<double> precision;      ///< tp / (tp + fp)
};

ConfusionMetricsResult confusionMetrics(const ConfusionCounts& c);

/// Modified n-gram precision with clipping times the brevity penalty
/// exp(min(0, 1 - |ref| / |cand|)). n must be 1 or 2; an empty candidate
/// scores 0.
double bleuN(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
             int n);

/// Recall-oriented n-gram overlap: clipped matches over reference n-grams.
double rougeN(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
              int n);

/// LCS F-measure: R = LCS/|ref|, P = LCS/|cand|, F = 2RP/(R+P); 0 when the
/// LCS is empty.
double rougeL(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

struct EvalReport {
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> precision;
    double bleu_1 = 0.0;
    double bleu_2 = 0.0;
    double bleu_l = 0.0;    ///< reported as the LCS F-measure of the candidate
    double rouge_1 = 0.0;
    double rouge_2 = 0.0;
    double rouge_l = 0.0;
};

} // namespace lexgraph::metrics
