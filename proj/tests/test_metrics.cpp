#include <doctest.h>

#include <lexgraph/metrics.hpp>
#include <lexgraph/text.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

using namespace lexgraph;
using namespace lexgraph::metrics;

namespace {

std::vector<std::string> toks(const char* text) {
    return tokenize(text);
}

} // namespace

TEST_CASE("confusionMetrics: spec examples") {
    CHECK(*confusionMetrics({7, 0, 0, 3}).sensitivity == doctest::Approx(0.7));
    CHECK(*confusionMetrics({0, 2, 8, 0}).specificity == doctest::Approx(0.8));
    CHECK(*confusionMetrics({7, 7, 0, 0}).precision == doctest::Approx(0.5));
}

TEST_CASE("confusionMetrics: zero denominators are undefined, not zero") {
    auto all_negative = confusionMetrics({0, 0, 10, 0});
    CHECK_FALSE(all_negative.sensitivity.has_value());
    CHECK(all_negative.specificity.has_value());
    CHECK_FALSE(all_negative.precision.has_value());
}

TEST_CASE("confusionMetrics: matches a brute-force oracle on random label vectors") {
    std::mt19937 rng(83);
    std::uniform_int_distribution<int> bit(0, 1);
    std::uniform_int_distribution<int> len(1, 64);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = len(rng);
        std::vector<int> gold(n), pred(n);
        for (int i = 0; i < n; ++i) {
            gold[i] = bit(rng);
            pred[i] = bit(rng);
        }
        ConfusionCounts c;
        std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (int i = 0; i < n; ++i) {
            tp += gold[i] == 1 && pred[i] == 1;
            fp += gold[i] == 0 && pred[i] == 1;
            tn += gold[i] == 0 && pred[i] == 0;
            fn += gold[i] == 1 && pred[i] == 0;
        }
        c = {tp, fp, tn, fn};
        auto m = confusionMetrics(c);
        if (tp + fn > 0) {
            CHECK(*m.sensitivity == doctest::Approx(double(tp) / double(tp + fn)));
        } else {
            CHECK_FALSE(m.sensitivity.has_value());
        }
        if (tn + fp > 0) {
            CHECK(*m.specificity == doctest::Approx(double(tn) / double(tn + fp)));
        } else {
            CHECK_FALSE(m.specificity.has_value());
        }
        if (tp + fp > 0) {
            CHECK(*m.precision == doctest::Approx(double(tp) / double(tp + fp)));
        } else {
            CHECK_FALSE(m.precision.has_value());
        }
    }
}

TEST_CASE("bleuN: spec examples") {
    CHECK(bleuN(toks("the cat sat"), toks("the cat sat"), 1) == doctest::Approx(1.0));
    CHECK(bleuN(toks("aa bb"), toks("cc dd"), 1) == doctest::Approx(0.0));
    CHECK(bleuN(toks("a b"), toks("a c"), 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(bleuN({}, toks("a"), 1) == 0.0);
    CHECK_THROWS_AS(bleuN(toks("a"), toks("a"), 3), std::invalid_argument);
}

TEST_CASE("bleuN: brevity penalty punishes short candidates") {
    // Perfect unigram precision but half the reference length.
    const double bp = std::exp(1.0 - 2.0);
    CHECK(bleuN(toks("a b"), toks("a b c d"), 1) == doctest::Approx(bp).epsilon(1e-9));
}

TEST_CASE("rougeL: spec examples") {
    CHECK(rougeL(toks("same thing"), toks("same thing")) == doctest::Approx(1.0));
    CHECK(rougeL(toks("a b c"), toks("a c")) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(rougeL(toks("x y"), toks("p q")) == 0.0);
    CHECK(rougeL({}, toks("a")) == 0.0);
}

TEST_CASE("rougeN: recall-oriented n-gram overlap") {
    CHECK(rougeN(toks("a b c"), toks("a b c"), 2) == doctest::Approx(1.0));
    CHECK(rougeN(toks("a b"), toks("a b c"), 1) == doctest::Approx(2.0 / 3.0));
    CHECK(rougeN(toks("a"), toks("a"), 2) == 0.0);    // no reference bigrams
}

TEST_CASE("bleu and rouge: bounds and equality conditions") {
    std::mt19937 rng(89);
    std::uniform_int_distribution<int> len(1, 10);
    std::uniform_int_distribution<int> word(0, 5);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::string> cand, ref;
        const int cn = len(rng), rn = len(rng);
        for (int i = 0; i < cn; ++i) cand.push_back("w" + std::to_string(word(rng)));
        for (int i = 0; i < rn; ++i) ref.push_back("w" + std::to_string(word(rng)));

        for (int n : {1, 2}) {
            const double b = bleuN(cand, ref, n);
            CHECK(b >= 0.0);
            CHECK(b <= 1.0 + 1e-12);
        }
        const double r = rougeL(cand, ref);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0 + 1e-12);

        // Equality scores 1 on both metrics; rougeL hits 1 only on equality.
        CHECK(bleuN(cand, cand, 1) == doctest::Approx(1.0));
        CHECK(rougeL(cand, cand) == doctest::Approx(1.0));
        if (cand != ref) {
            CHECK(rougeL(cand, ref) < 1.0 - 1e-12);
        }
        // bleu-1 reaches 1 exactly when the token multisets coincide.
        auto sorted_cand = cand;
        auto sorted_ref = ref;
        std::sort(sorted_cand.begin(), sorted_cand.end());
        std::sort(sorted_ref.begin(), sorted_ref.end());
        if (sorted_cand != sorted_ref) {
            CHECK(bleuN(cand, ref, 1) < 1.0 - 1e-12);
        } else {
            CHECK(bleuN(cand, ref, 1) == doctest::Approx(1.0));
        }
    }
}
