// Acceptance suite: every release gate in one binary, one line per
// criterion. Each check either reproduces a pinned hand value, matches an
// independent brute-force oracle, or exercises an end-to-end contract.

#include "test_util.hpp"

#include <lexgraph/metrics.hpp>
#include <lexgraph/pipeline.hpp>
#include <lexgraph/prompt.hpp>
#include <lexgraph/quality.hpp>
#include <lexgraph/relevance.hpp>
#include <lexgraph/retrieval.hpp>
#include <lexgraph/scoring_kernels.hpp>
#include <lexgraph/text.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

using namespace lexgraph;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void note(const std::string& message) {
    g_notes.push_back(message);
}

void criterion(int number, const std::string& name, const std::function<bool()>& check) {
    g_notes.clear();
    bool ok = false;
    try {
        ok = check();
    } catch (const std::exception& e) {
        note(std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", number, name.c_str());
    if (!ok) {
        ++g_failures;
        for (const auto& n : g_notes) {
            std::printf("      %s\n", n.c_str());
        }
    }
}

bool near(double a, double b, double tol) {
    return std::abs(a - b) <= tol;
}

// --- criterion 1 ------------------------------------------------------------

bool pathInferenceOracle() {
    const auto start = Clock::now();
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> lambda_dist(0.05, 0.95);
    for (int trial = 0; trial < 200; ++trial) {
        auto g = testutil::randomGraph(rng, 8);
        retrieval::MatchParams p;
        p.lambda_decay = lambda_dist(rng);

        std::uniform_int_distribution<std::size_t> pick(0, g.docCount() - 1);
        retrieval::Query q;
        const std::size_t picks = 1 + pick(rng) % 3;
        for (std::size_t i = 0; i < picks; ++i) {
            q.concept_ids.insert(g.at(pick(rng)).id);
        }

        for (std::size_t c = 0; c < g.docCount(); ++c) {
            const double got = retrieval::pathInference(g, g.at(c).id, q, p);
            const double want =
                testutil::oraclePathInference(g, g.at(c).id, q.concept_ids, p.lambda_decay);
            if (!near(got, want, 1e-9)) {
                note("trial " + std::to_string(trial) + " concept " + g.at(c).id + ": got " +
                     std::to_string(got) + " want " + std::to_string(want));
                return false;
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (secs >= 10.0) {
        note("runtime " + std::to_string(secs) + "s exceeds the 10s budget");
        return false;
    }
    return true;
}

// --- criterion 2 ------------------------------------------------------------

bool fusionConvexity() {
    std::mt19937 rng(103);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        retrieval::MatchParams p;
        double w[4];
        double sum = 0.0;
        for (auto& x : w) {
            x = u(rng) + 1e-9;
            sum += x;
        }
        for (int i = 0; i < 4; ++i) {
            p.fusion_weights[i] = w[i] / sum;
        }
        double s[4] = {u(rng), u(rng), u(rng), u(rng)};
        const double fused = retrieval::fuseScores(s[0], s[1], s[2], s[3], p).fused;
        const double lo = *std::min_element(s, s + 4);
        const double hi = *std::max_element(s, s + 4);
        if (fused < lo - 1e-12 || fused > hi + 1e-12) {
            note("fused escaped [min, max] on trial " + std::to_string(trial));
            return false;
        }
        for (int i = 0; i < 4; ++i) {
            double bumped[4] = {s[0], s[1], s[2], s[3]};
            bumped[i] = std::min(1.0, bumped[i] + u(rng));
            const double fused2 =
                retrieval::fuseScores(bumped[0], bumped[1], bumped[2], bumped[3], p).fused;
            if (fused2 < fused - 1e-12) {
                note("raising coordinate " + std::to_string(i) + " lowered the fusion");
                return false;
            }
        }
    }
    return true;
}

// --- criterion 3 ------------------------------------------------------------

bool bm25Properties() {
    relevance::Bm25Params p;    // k1 = 1.2, b = 0.75, delta = 1
    if (!near(relevance::bm25TermGain(1.0, 1.0, 12.0, 12.0, p), 2.0, 1e-9)) {
        note("hand example (idf = 1, f = 1, |C| = avgdl) did not return 2.0");
        return false;
    }

    std::mt19937 rng(107);
    std::uniform_real_distribution<double> len(5.0, 50.0);
    std::uniform_real_distribution<double> tf(1.0, 20.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double dl = len(rng), avgdl = len(rng);
        const double f = tf(rng);
        const double lower = relevance::bm25TermGain(1.0, f, dl, avgdl, p);
        const double higher = relevance::bm25TermGain(1.0, f + tf(rng), dl, avgdl, p);
        if (higher <= lower) {
            note("gain not monotone in term frequency");
            return false;
        }
        relevance::Bm25Params no_len = p;
        no_len.b = 0.0;
        const double a = relevance::bm25TermGain(1.0, f, dl, avgdl, no_len);
        const double b = relevance::bm25TermGain(1.0, f, dl * 3.0, avgdl, no_len);
        if (!near(a, b, 1e-12)) {
            note("b = 0 still depends on document length");
            return false;
        }
    }
    return true;
}

// --- criterion 4 ------------------------------------------------------------

bool handComputedValues() {
    bool ok = true;

    // Task-template match: w = 1, cos = 1, N = 100, df = 10 -> ln(10); and
    // the 5-professional-term variant at alpha = 0.1 -> ln(10) * 1.5.
    prompt::TemplateSet set;
    prompt::FeatureDimension dim;
    dim.name = "d";
    dim.weight = 1.0;
    dim.df = 10;
    dim.vocabulary = {"x", "y"};
    set.dimensions.push_back(dim);
    prompt::TaskTemplate tmpl;
    tmpl.id = "t";
    tmpl.dimension_vectors = {{1.0, 1.0}};
    tmpl.spec_term_counts = {0};
    tmpl.reasoning_path.steps = {{"a", "i"}, {"b", "i"}};
    set.templates.push_back(tmpl);
    set.alpha = 0.1;

    prompt::QueryFeatures f;
    f.vectors = {{2.0, 2.0}};
    f.spec_terms = {0};
    if (!near(prompt::taskMatchScore(f, set.templates[0], set, 100), std::log(10.0), 1e-6)) {
        note("task match hand value ln(10) failed");
        ok = false;
    }
    f.spec_terms = {5};
    if (!near(prompt::taskMatchScore(f, set.templates[0], set, 100), std::log(10.0) * 1.5,
              1e-6)) {
        note("task match hand value ln(10) * 1.5 failed");
        ok = false;
    }

    // Path inference on the A-B(0.5), B-C(0.4) chain at lambda = 0.8.
    auto g = testutil::lineGraphABC();
    retrieval::MatchParams mp;
    mp.lambda_decay = 0.8;
    retrieval::Query q;
    q.concept_ids = {"C"};
    if (!near(retrieval::pathInference(g, "A", q, mp), 0.576, 1e-6)) {
        note("path inference hand value 0.576 failed");
        ok = false;
    }

    // Term match: stem-only hit with SemSim = 0.5 at alphas (0.5, 0.3, 0.2).
    class HalfSem final : public retrieval::SemanticSimilarityProvider {
    public:
        double similarity(const std::string&, const retrieval::Query&) const override {
            return 0.5;
        }
    };
    auto q2 = retrieval::Query::fromText("the damaged goods");
    if (!near(retrieval::matchTerm("damages", q2, mp, HalfSem{}), 0.4, 1e-6)) {
        note("term match hand value 0.4 failed");
        ok = false;
    }

    // Professional term weight: ln(10) case and both clamp-to-zero cases.
    retrieval::TermStats stats;
    stats.sigma = 1.0;
    stats.add("legalish", {9, 0, 1.0});
    stats.add("generalish", {0, 9, 1.0});
    stats.add("even", {10, 10, 1.0});
    if (!near(retrieval::iltWeight("legalish", stats), std::log(10.0), 1e-6)) {
        note("ILT hand value ln(10) failed");
        ok = false;
    }
    if (retrieval::iltWeight("generalish", stats) != 0.0 ||
        retrieval::iltWeight("even", stats) != 0.0) {
        note("ILT clamp-to-zero cases failed");
        ok = false;
    }
    return ok;
}

// --- criterion 5 ------------------------------------------------------------

bool rankingInvariances() {
    std::mt19937 rng(109);

    // retrieve: ordering unchanged under positive scaling of fused scores.
    for (int trial = 0; trial < 100; ++trial) {
        auto g = testutil::randomGraph(rng, 7, true);
        retrieval::TermStats stats;
        retrieval::NullSemanticProvider sem;
        retrieval::MatchParams p;
        p.diversity_lambda = 1.0;
        retrieval::Query q = retrieval::Query::fromText("w1 w4 w9 w12");
        q.concept_ids = {g.at(0).id};

        auto results = retrieval::retrieve(g, q, stats, p, sem, g.docCount());
        auto scores = retrieval::scoreAllSerial(g, q, stats, p, sem);
        std::uniform_real_distribution<double> scale_dist(0.1, 50.0);
        const double scale = scale_dist(rng);
        std::vector<std::pair<double, std::string>> scaled;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            scaled.push_back({scores[i].fused * scale, g.at(i).id});
        }
        std::stable_sort(scaled.begin(), scaled.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (results[i].concept_id != scaled[i].second) {
                note("retrieve ordering changed under scaling on trial " +
                     std::to_string(trial));
                return false;
            }
        }
    }

    // select_task_template: winner matches the argmax of any strictly
    // increasing transform of the template scores.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        prompt::TemplateSet set;
        prompt::FeatureDimension dim;
        dim.name = "d";
        dim.weight = 1.0;
        dim.df = 2 + trial % 7;
        dim.vocabulary = {"a", "b", "c"};
        set.dimensions.push_back(dim);
        for (int t = 0; t < 4; ++t) {
            prompt::TaskTemplate tmpl;
            tmpl.id = "t" + std::to_string(t);
            tmpl.dimension_vectors = {{u(rng), u(rng), u(rng)}};
            tmpl.spec_term_counts = {static_cast<int>(trial % 3)};
            tmpl.reasoning_path.steps = {{"a", "i"}, {"b", "i"}};
            set.templates.push_back(tmpl);
        }
        prompt::QueryFeatures f;
        f.vectors = {{u(rng), u(rng), u(rng)}};
        f.spec_terms = {trial % 4};

        auto picked = prompt::selectTaskTemplate(f, set, 64);
        const double a = u(rng) * 9.0 + 0.1;
        const double b = u(rng) * 10.0 - 5.0;
        std::string best_id;
        double best_score = -1e300;
        for (const auto& t : set.templates) {
            const double transformed = a * prompt::taskMatchScore(f, t, set, 64) + b;
            if (transformed > best_score) {
                best_score = transformed;
                best_id = t.id;
            }
        }
        if (picked.tmpl->id != best_id) {
            note("template selection changed under a monotone transform on trial " +
                 std::to_string(trial));
            return false;
        }
    }
    return true;
}

// --- criterion 6 ------------------------------------------------------------

bool optimizationContract() {
    kg::GraphBuilder b;
    b.addConcept(testutil::makeConcept("negligence", "negligence text", "CC-1382"));
    auto g = std::move(b).finalize();

    prompt::PromptDocument doc;
    doc.query_text = "q";
    doc.has_knowledge_background = true;
    doc.has_reasoning_guidance = true;
    doc.reasoning_guidance = {{"issue", "i"}, {"conclusion", "c"}};
    doc.knowledge_background.push_back(
        {"negligence", "CC-1382", "[CC-1382] Negligence: text", {}, false, 0.0});

    quality::QualityContext ctx{g, quality::QualityWeights{}, 0.5, nullptr, nullptr, 0.2};
    const std::string passing = "All covered [CC-1382].\n\nAgain [CC-1382].";
    const std::string failing = "nothing useful";

    struct Scenario {
        std::vector<std::string> script;
        double threshold;
        int expected_calls;
    };
    const Scenario scenarios[] = {
        {{passing}, 0.5, 1},
        {{failing, failing, failing}, 0.99, 3},
        {{failing, passing}, 0.5, 2},
    };
    int index = 0;
    for (const auto& s : scenarios) {
        quality::ScriptedProvider provider(s.script);
        quality::OptimizationConfig cfg;
        cfg.threshold = s.threshold;
        ctx.threshold = s.threshold;
        auto outcome = quality::optimize(doc, {}, provider, ctx, cfg, true);
        if (outcome.provider_calls != s.expected_calls ||
            provider.calls() != s.expected_calls) {
            note("scenario " + std::to_string(index) + ": expected " +
                 std::to_string(s.expected_calls) + " calls, made " +
                 std::to_string(provider.calls()));
            return false;
        }
        ++index;
    }

    std::mt19937 rng(113);
    std::uniform_int_distribution<int> script_len(1, 6);
    std::uniform_int_distribution<int> budget(1, 5);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> script;
        const int len = script_len(rng);
        for (int i = 0; i < len; ++i) {
            script.push_back(coin(rng) ? passing : failing);
        }
        quality::ScriptedProvider provider(script);
        quality::OptimizationConfig cfg;
        cfg.max_iterations = budget(rng);
        cfg.threshold = 0.5;
        ctx.threshold = 0.5;
        auto outcome = quality::optimize(doc, {}, provider, ctx, cfg, true);
        if (provider.calls() > cfg.max_iterations) {
            note("provider called " + std::to_string(provider.calls()) + " times with budget " +
                 std::to_string(cfg.max_iterations));
            return false;
        }
        (void)outcome;
    }
    return true;
}

// --- criterion 7 ------------------------------------------------------------

const char* kDemoQuery =
    "Is a cafe liable in negligence for damages when a customer is scalded by hot coffee?";

bool modeEquivalences() {
    auto file = ConfigFile::load(std::string(LEXGRAPH_FIXTURE_DIR) + "/demo.conf");

    auto baseline_cfg = pipeline::resolveRunConfig(file, prompt::Mode::Baseline, {});
    auto rt = pipeline::ingestCorpus(baseline_cfg);
    quality::ScriptedProvider p1({"x"});
    auto baseline = pipeline::runQuery(kDemoQuery, rt, baseline_cfg, p1);
    if (baseline.prompt_text != kDemoQuery) {
        note("baseline prompt is not byte-equal to the raw query");
        return false;
    }

    auto stripped_cfg = pipeline::resolveRunConfig(
        file, prompt::Mode::Complete,
        {prompt::Toggle::TD, prompt::Toggle::KB, prompt::Toggle::RG});
    quality::ScriptedProvider p2({"x"});
    auto stripped = pipeline::runQuery(kDemoQuery, rt, stripped_cfg, p2);
    if (stripped.prompt_text != baseline.prompt_text) {
        note("complete mode with TD, KB, and RG disabled is not byte-identical to baseline");
        return false;
    }

    auto no_lcm = pipeline::resolveRunConfig(file, prompt::Mode::Complete,
                                             {prompt::Toggle::LCM});
    if (no_lcm.match.fusion_weights[0] != 0.0) {
        note("LCM toggle did not zero the code-match weight");
        return false;
    }
    auto no_svm = pipeline::resolveRunConfig(file, prompt::Mode::Complete,
                                             {prompt::Toggle::SVM});
    if (no_svm.match.fusion_weights[1] != 0.0) {
        note("SVM toggle did not zero the vector weight");
        return false;
    }
    for (const auto& cfg : {no_lcm, no_svm}) {
        double sum = 0.0;
        for (double w : cfg.match.fusion_weights) {
            sum += w;
        }
        if (!near(sum, 1.0, 1e-9)) {
            note("fusion weights no longer sum to 1 after a toggle");
            return false;
        }
    }

    quality::ScriptedProvider p3({"x [CC-1382]"});
    auto report = pipeline::runQuery(kDemoQuery, rt, no_lcm, p3);
    for (const auto& r : report.retrieval) {
        if (r.scores.cm != 0.0) {
            note("retrieval breakdown still carries code-match mass with LCM off");
            return false;
        }
    }
    return true;
}

// --- criterion 8 ------------------------------------------------------------

bool metricOracles() {
    std::mt19937 rng(127);
    std::uniform_int_distribution<int> bit(0, 1);
    std::uniform_int_distribution<int> len(1, 40);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = len(rng);
        std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (int i = 0; i < n; ++i) {
            const int gold = bit(rng), pred = bit(rng);
            tp += gold && pred;
            fp += !gold && pred;
            tn += !gold && !pred;
            fn += gold && !pred;
        }
        auto m = metrics::confusionMetrics({tp, fp, tn, fn});
        const bool sens_ok = (tp + fn == 0) ? !m.sensitivity
                                            : *m.sensitivity == double(tp) / double(tp + fn);
        const bool spec_ok = (tn + fp == 0) ? !m.specificity
                                            : *m.specificity == double(tn) / double(tn + fp);
        const bool prec_ok =
            (tp + fp == 0) ? !m.precision : *m.precision == double(tp) / double(tp + fp);
        if (!sens_ok || !spec_ok || !prec_ok) {
            note("confusion metrics diverged from the oracle on trial " + std::to_string(trial));
            return false;
        }
    }

    if (!near(metrics::bleuN({"a", "b"}, {"a", "c"}, 1), 0.5, 1e-9)) {
        note("BLEU-1 spec example 0.5 failed");
        return false;
    }
    if (!near(metrics::rougeL({"a", "b", "c"}, {"a", "c"}), 0.8, 1e-9)) {
        note("ROUGE-L spec example 0.8 failed");
        return false;
    }
    return true;
}

// --- criterion 9 ------------------------------------------------------------

bool roundTrip() {
    std::mt19937 rng(131);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = testutil::randomGraph(rng, 8, trial % 2 == 0);
        std::ostringstream out;
        kg::saveGraph(g, out);
        std::istringstream in(out.str());
        auto g2 = kg::loadGraph(in);
        if (!kg::graphsEqual(g, g2)) {
            note("round trip diverged on trial " + std::to_string(trial));
            return false;
        }
    }
    return true;
}

// --- criterion 10 -----------------------------------------------------------

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool goldenRun() {
    const std::string fixtures = LEXGRAPH_FIXTURE_DIR;
    const std::string out_path = "acceptance_golden.report.json";
    std::remove(out_path.c_str());

    std::ostringstream cmd;
    cmd << LEXGRAPH_CLI_PATH << " query --config " << fixtures
        << "/demo.conf --mode complete --no-timing --out " << out_path << " '" << kDemoQuery
        << "'";
    const int status = std::system(cmd.str().c_str());
    if (status != 0) {
        note("CLI exited with status " + std::to_string(status));
        return false;
    }
    const std::string got = readFile(out_path);
    const std::string want = readFile(fixtures + "/golden/complete_demo.report.json");
    if (got != want) {
        note("report is not byte-identical to the committed golden file");
        note("regenerate with: lexgraph query --config fixtures/demo.conf --mode complete "
             "--no-timing --out fixtures/golden/complete_demo.report.json '<demo query>'");
        return false;
    }
    std::remove(out_path.c_str());
    return true;
}

} // namespace

int main() {
    const auto start = Clock::now();

    criterion(1, "path inference matches exhaustive enumeration", pathInferenceOracle);
    criterion(2, "score fusion is convex and monotone", fusionConvexity);
    criterion(3, "BM25+ saturation, length handling, and hand value", bm25Properties);
    criterion(4, "hand-computed matching values reproduce", handComputedValues);
    criterion(5, "ranking invariances under score transforms", rankingInvariances);
    criterion(6, "optimization loop call-count contract", optimizationContract);
    criterion(7, "mode and toggle equivalences", modeEquivalences);
    criterion(8, "evaluation metrics match oracles", metricOracles);
    criterion(9, "graph save/load round trip", roundTrip);
    criterion(10, "end-to-end golden report is byte-identical", goldenRun);

    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("acceptance suite finished in %.2fs with %d failure(s)\n", secs, g_failures);
    return g_failures == 0 ? 0 : 1;
}
