#include <doctest.h>

#include "test_util.hpp"

#include <lexgraph/prompt.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace lexgraph;
using namespace lexgraph::prompt;
using testutil::makeConcept;

namespace {

TemplateSet tinySet() {
    TemplateSet set;
    FeatureDimension dim;
    dim.name = "domain";
    dim.weight = 1.0;
    dim.df = 10;
    dim.vocabulary = {"tort", "contract", "negligence"};
    set.dimensions.push_back(dim);

    TaskTemplate a;
    a.id = "a-template";
    a.role_preamble = "Analyse as A.";
    a.dimension_vectors = {{1.0, 0.0, 1.0}};
    a.spec_term_counts = {0};
    a.reasoning_path.steps = {{"issue", "find it"}, {"conclusion", "answer it"}};

    TaskTemplate b = a;
    b.id = "b-template";
    b.dimension_vectors = {{0.0, 1.0, 0.0}};

    set.templates = {a, b};
    set.alpha = 0.1;
    set.generic_template_id = "a-template";
    return set;
}

QueryFeatures featuresFor(const TemplateSet& set, std::vector<double> vec, int spec) {
    QueryFeatures f;
    f.vectors = {std::move(vec)};
    f.spec_terms = {spec};
    (void)set;
    return f;
}

} // namespace

TEST_CASE("taskMatchScore: hand-computed spec values") {
    auto set = tinySet();
    // Single dimension: w = 1, cos = 1, N = 100, df = 10 -> ln(10).
    auto f = featuresFor(set, {2.0, 0.0, 2.0}, 0);    // parallel to template a
    const double got = taskMatchScore(f, set.templates[0], set, 100);
    CHECK(got == doctest::Approx(std::log(10.0)).epsilon(1e-9));

    // Orthogonal query vector scores 0 against template a.
    auto ortho = featuresFor(set, {0.0, 1.0, 0.0}, 0);
    CHECK(taskMatchScore(ortho, set.templates[0], set, 100) == doctest::Approx(0.0));

    // Five professional terms with alpha = 0.1 boost by 1.5.
    auto boosted = featuresFor(set, {2.0, 0.0, 2.0}, 5);
    CHECK(taskMatchScore(boosted, set.templates[0], set, 100) ==
          doctest::Approx(std::log(10.0) * 1.5).epsilon(1e-9));

    // A zero query vector contributes nothing.
    auto zero = featuresFor(set, {0.0, 0.0, 0.0}, 0);
    CHECK(taskMatchScore(zero, set.templates[0], set, 100) == 0.0);
}

TEST_CASE("selectTaskTemplate: argmax with deterministic ties") {
    auto set = tinySet();
    auto f = featuresFor(set, {1.0, 0.0, 1.0}, 0);
    auto picked = selectTaskTemplate(f, set, 100);
    CHECK(picked.tmpl->id == "a-template");

    auto toward_b = featuresFor(set, {0.0, 3.0, 0.0}, 0);
    CHECK(selectTaskTemplate(toward_b, set, 100).tmpl->id == "b-template");

    // Below the floor the generic template wins.
    set.score_floor = 100.0;
    set.generic_template_id = "b-template";
    CHECK(selectTaskTemplate(f, set, 100).tmpl->id == "b-template");

    TemplateSet empty;
    CHECK_THROWS_AS(selectTaskTemplate(f, empty, 100), std::invalid_argument);
}

TEST_CASE("selectTaskTemplate: invariant under monotone score transforms") {
    // Scaling every dimension vector by the same positive factor scales all
    // scores uniformly and must not change the winner.
    auto set = tinySet();
    auto f = featuresFor(set, {1.0, 0.4, 0.2}, 2);
    auto baseline = selectTaskTemplate(f, set, 100).tmpl->id;

    for (double scale : {0.2, 3.0, 17.0}) {
        auto scaled = set;
        for (auto& t : scaled.templates) {
            for (auto& vec : t.dimension_vectors)
                for (auto& x : vec) {
                    x *= scale;    // cosine is scale-free; score order preserved
                }
        }
        CHECK(selectTaskTemplate(f, scaled, 100).tmpl->id == baseline);
    }
}

TEST_CASE("loadTemplates: fixture file parses and validates") {
    std::ifstream in(std::string(LEXGRAPH_FIXTURE_DIR) + "/demo.templates.json");
    REQUIRE(in.good());
    auto set = loadTemplates(in);
    CHECK(set.templates.size() == 3);
    CHECK(set.dimensions.size() == 2);
    CHECK(set.generic_template_id == "generic-analysis");
    CHECK(set.findTemplate("tort-analysis") != nullptr);
}

TEST_CASE("loadTemplates: structural errors are rejected") {
    std::istringstream bad_json("not json");
    CHECK_THROWS(loadTemplates(bad_json));

    // Weights that do not sum to 1.
    std::istringstream bad_weights(R"({
      "dimensions": [{"name": "d", "weight": 0.5, "df": 2, "vocabulary": ["a"]}],
      "templates": [{"id": "t", "role_preamble": "x",
        "dimension_vectors": [[1.0]], "spec_term_counts": [0],
        "reasoning_path": [{"name": "s1", "instruction": "i"},
                            {"name": "s2", "instruction": "i"}]}]
    })");
    CHECK_THROWS(loadTemplates(bad_weights));

    // A single reasoning step violates the template contract.
    std::istringstream one_step(R"({
      "dimensions": [{"name": "d", "weight": 1.0, "df": 2, "vocabulary": ["a"]}],
      "templates": [{"id": "t", "role_preamble": "x",
        "dimension_vectors": [[1.0]], "spec_term_counts": [0],
        "reasoning_path": [{"name": "s1", "instruction": "i"}]}]
    })");
    CHECK_THROWS(loadTemplates(one_step));
}

TEST_CASE("assemblePrompt: complete mode carries all three sections in rank order") {
    auto g = testutil::lineGraphABC();
    auto set = tinySet();
    retrieval::Query q = retrieval::Query::fromText("does negligence apply here");

    std::vector<relevance::Ranked> background = {
        {"B", {}},
        {"A", {}},
        {"C", {}},
    };
    ToggleSet all = {Toggle::TD, Toggle::KB, Toggle::RG, Toggle::DO, Toggle::LCM, Toggle::SVM};
    auto doc = assemblePrompt(q, set.templates[0], background, 3, g, Mode::Complete, all);

    CHECK(doc.has_task_definition);
    CHECK(doc.has_knowledge_background);
    CHECK(doc.has_reasoning_guidance);
    REQUIRE(doc.knowledge_background.size() == 3);
    CHECK(doc.knowledge_background[0].concept_id == "B");
    CHECK(doc.knowledge_background[1].concept_id == "A");
    CHECK(doc.knowledge_background[2].concept_id == "C");

    auto text = doc.render();
    CHECK(text.find("## TASK DEFINITION") != std::string::npos);
    CHECK(text.find("## KNOWLEDGE BACKGROUND") != std::string::npos);
    CHECK(text.find("## REASONING GUIDANCE") != std::string::npos);
    CHECK(text.find(q.text) != std::string::npos);
    // Background order is preserved in the rendering.
    CHECK(text.find("[1] B:") < text.find("[2] A:"));
    CHECK(text.find("[2] A:") < text.find("[3] C:"));
}

TEST_CASE("assemblePrompt: baseline renders to exactly the raw query") {
    auto g = testutil::lineGraphABC();
    auto set = tinySet();
    retrieval::Query q = retrieval::Query::fromText("what is the liability here");

    auto doc = assemblePrompt(q, set.templates[0], {}, 0, g, Mode::Baseline, {});
    CHECK(doc.render() == q.text);

    // Complete mode with TD, KB, and RG all disabled is byte-identical.
    ToggleSet rest = {Toggle::DO, Toggle::LCM, Toggle::SVM};
    auto stripped = assemblePrompt(q, set.templates[0], {}, 0, g, Mode::Complete, rest);
    CHECK(stripped.render() == doc.render());
}

TEST_CASE("assemblePrompt: disabled KB leaves other sections intact") {
    auto g = testutil::lineGraphABC();
    auto set = tinySet();
    retrieval::Query q = retrieval::Query::fromText("question");
    std::vector<relevance::Ranked> background = {{"A", {}}};

    ToggleSet no_kb = {Toggle::TD, Toggle::RG};
    auto doc = assemblePrompt(q, set.templates[0], background, 1, g, Mode::Complete, no_kb);
    CHECK(doc.knowledge_background.empty());
    auto text = doc.render();
    CHECK(text.find("## KNOWLEDGE BACKGROUND") == std::string::npos);
    CHECK(text.find("## TASK DEFINITION") != std::string::npos);
    CHECK(text.find("## REASONING GUIDANCE") != std::string::npos);
}

TEST_CASE("assemblePrompt: rendering is deterministic") {
    auto g = testutil::lineGraphABC();
    auto set = tinySet();
    retrieval::Query q = retrieval::Query::fromText("repeatable");
    std::vector<relevance::Ranked> background = {{"A", {}}, {"C", {}}};
    ToggleSet all = {Toggle::TD, Toggle::KB, Toggle::RG};

    auto once = assemblePrompt(q, set.templates[0], background, 2, g, Mode::Complete, all).render();
    auto twice = assemblePrompt(q, set.templates[0], background, 2, g, Mode::Complete, all).render();
    CHECK(once == twice);
}

TEST_CASE("extractFeatures: bag-of-tokens projection with professional-term counts") {
    auto set = tinySet();
    retrieval::TermStats stats;
    stats.sigma = 1.0;
    stats.add("tort", {100, 2, 1.0});          // professional
    stats.add("contract", {50, 50, 1.0});      // ILT = 0, not professional

    auto q = retrieval::Query::fromText("tort tort contract claim");
    auto f = extractFeatures(q, set, &stats);
    REQUIRE(f.vectors.size() == 1);
    CHECK(f.vectors[0] == std::vector<double>{2.0, 1.0, 0.0});
    CHECK(f.spec_terms[0] == 1);    // only "tort" clears the ILT bar
}
