#include "kgc/baselines.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace kgc;

TEST_CASE("rule-based rejects when every candidate has zero overlap", "[baselines]") {
    // star graph: no two entities share a neighbor except through the hub
    const KnowledgeGraph g = build_graph({{"hub", "r", "a"}, {"hub", "r", "b"}, {"hub", "r", "c"}});
    const CompressedContext ctx{{{"a", "r", "hub"}, {"b", "r", "hub"}}, 0, AmbiguityKind::MaskedTail};
    // candidates touch the hub, which has no co-neighbors with leaves
    CHECK(rule_based_choose(g, ctx) == 2);
}

TEST_CASE("rule-based picks the unique best overlap", "[baselines]") {
    const KnowledgeGraph g = build_graph({
        {"a", "r", "x"}, {"b", "r", "x"}, {"a", "r", "y"}, {"b", "r", "y"}, {"a", "r", "z"},
        {"b", "r", "z"}, {"c", "r", "q"},
    });
    // overlap(a,b) = 3 (x, y, z); overlap(c,a) = 0
    const CompressedContext ctx{{{"c", "s", "a"}, {"a", "s", "b"}, {"c", "s", "q"}}, 1,
                                AmbiguityKind::MaskedRelation};
    CHECK(rule_based_choose(g, ctx) == 1);
}

TEST_CASE("rule-based breaks ties toward the lowest index", "[baselines]") {
    const KnowledgeGraph g = build_graph({
        {"a", "r", "x"}, {"b", "r", "x"}, {"a", "r", "y"}, {"b", "r", "y"},
        {"c", "r", "x"}, {"d", "r", "x"}, {"c", "r", "y"}, {"d", "r", "y"},
    });
    // overlap(a,b) == overlap(c,d) == 2; slots 1 and 3 tie
    const CompressedContext ctx{
        {{"a", "s", "q"}, {"a", "s", "b"}, {"q", "s", "q"}, {"c", "s", "d"}},
        std::nullopt,
        AmbiguityKind::MaskedTail};
    CHECK(rule_based_choose(g, ctx) == 1);
}

TEST_CASE("rule-based never selects a zero-overlap candidate", "[baselines]") {
    const KnowledgeGraph g =
        build_graph(testsupport::synthetic_triples(60, 8, 250, 906, 6));
    const HoldoutSplit split = split_holdout(g, 0.25, 3);
    const auto contexts = sample_contexts(split.holdout, 300, 5, 0.3, split.train_graph, 17);
    for (const auto& ctx : contexts) {
        const int choice = rule_based_choose(split.train_graph, ctx);
        if (choice < static_cast<int>(ctx.candidates.size())) {
            const auto& c = ctx.candidates[static_cast<std::size_t>(choice)];
            CHECK(split.train_graph.neighbor_overlap(c.head, c.tail) >= 1);
        }
    }
}

TEST_CASE("zero-epoch fit yields the zero model and uniform scores", "[baselines]") {
    const std::vector<std::pair<std::vector<double>, int>> examples{{{1.0, 2.0}, 0}};
    const LinearModel m = fit_supervised(examples, 3, 0, 0.1, 1);
    for (double w : m.weights) CHECK(w == 0.0);
    for (double b : m.bias) CHECK(b == 0.0);
    CHECK(supervised_choose(m, {5.0, -3.0}) == 0); // all scores equal, tie-break
}

TEST_CASE("supervised memorizes a single example", "[baselines]") {
    const std::vector<std::pair<std::vector<double>, int>> examples{{{0.5, -1.0, 2.0}, 2}};
    const LinearModel m = fit_supervised(examples, 4, 200, 0.5, 1);
    CHECK(supervised_choose(m, {0.5, -1.0, 2.0}) == 2);
}

TEST_CASE("supervised separates a linearly separable toy set", "[baselines]") {
    // 20 points in 2-D, classes split by x0 sign with margin
    std::vector<std::pair<std::vector<double>, int>> examples;
    SplitMix64 rng(10);
    for (int i = 0; i < 10; ++i) {
        examples.push_back({{1.0 + rng.next_double(), 2.0 * rng.next_double() - 1.0}, 0});
        examples.push_back({{-1.0 - rng.next_double(), 2.0 * rng.next_double() - 1.0}, 1});
    }
    const LinearModel m = fit_supervised(examples, 2, 500, 0.1, 7);
    int correct = 0;
    for (const auto& [x, label] : examples) {
        if (supervised_choose(m, x) == label) ++correct;
    }
    CHECK(correct == 20);
}

TEST_CASE("supervised_choose matches training predictions and dominant rows", "[baselines]") {
    LinearModel m;
    m.num_classes = 3;
    m.dim = 2;
    m.weights = {0.0, 0.0, 5.0, 5.0, 0.0, 0.0};
    m.bias = {0.0, 0.0, 0.0};
    CHECK(supervised_choose(m, {1.0, 1.0}) == 1);
    CHECK_THROWS_AS(supervised_choose(m, {1.0}), ArgumentError);
}

TEST_CASE("argmax is invariant to constant score shifts", "[baselines]") {
    SplitMix64 rng(44);
    for (int iter = 0; iter < 100; ++iter) {
        LinearModel m;
        m.num_classes = 4;
        m.dim = 3;
        for (int i = 0; i < 12; ++i) m.weights.push_back(2.0 * rng.next_double() - 1.0);
        for (int i = 0; i < 4; ++i) m.bias.push_back(2.0 * rng.next_double() - 1.0);
        const std::vector<double> s{rng.next_double(), rng.next_double(), rng.next_double()};
        const int before = supervised_choose(m, s);
        const double shift = 10.0 * rng.next_double() - 5.0;
        for (double& b : m.bias) b += shift;
        CHECK(supervised_choose(m, s) == before);
    }
}

TEST_CASE("fit_supervised validates inputs", "[baselines]") {
    CHECK_THROWS_AS(fit_supervised({}, 2, 10, 0.1, 1), ArgumentError);
    CHECK_THROWS_AS(fit_supervised({{{1.0}, 0}, {{1.0, 2.0}, 1}}, 2, 10, 0.1, 1), ArgumentError);
    CHECK_THROWS_AS(fit_supervised({{{1.0}, 5}}, 2, 10, 0.1, 1), ArgumentError);
}

TEST_CASE("linear model checkpoints round-trip through linmodel v1", "[baselines]") {
    const std::vector<std::pair<std::vector<double>, int>> examples{
        {{0.5, -1.0, 2.0}, 2}, {{1.0, 0.0, -1.0}, 0}};
    const LinearModel m = fit_supervised(examples, 3, 50, 0.3, 1);

    std::ostringstream out;
    save_linear_model(m, out);
    CHECK(out.str().rfind("linmodel v1\n3 3\n", 0) == 0);
    std::istringstream in(out.str());
    const LinearModel loaded = load_linear_model(in);
    CHECK(loaded == m);

    std::istringstream wrong_magic(std::string("qnet v1\n3 3\n0\n"));
    CHECK_THROWS_AS(load_linear_model(wrong_magic), CheckpointError);
}
