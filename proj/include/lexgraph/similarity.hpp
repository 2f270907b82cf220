#pragma once

#include <cmath>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace lexgraph {

/// Cosine of the angle between two vectors, in [-1, 1].
/// Throws std::invalid_argument on dimension mismatch or a zero vector.
inline double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("cosine: dimension mismatch");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("cosine: zero vector");
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Cosine that treats degenerate input (mismatch, zero vector) as no
/// similarity instead of an error. Used where similarity is advisory.
inline double cosineOrZero(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        return 0.0;
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Jaccard coefficient |a ∩ b| / |a ∪ b|. Two empty sets count as identical.
inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    std::size_t inter = 0;
    for (const auto& x : a) {
        inter += b.count(x);
    }
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

/// Jaccard over the key sets of two frequency maps.
inline double jaccardKeys(const std::unordered_map<std::string, int>& a,
                          const std::unordered_map<std::string, int>& b) {
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    std::size_t inter = 0;
    for (const auto& [k, v] : small) {
        inter += large.count(k);
    }
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

} // namespace lexgraph
