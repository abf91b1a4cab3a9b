#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sass/learning.hpp"

using namespace sass;

namespace {

GutNode constant_node(std::string id, int level, int rows, int cols, double value) {
    GutNode n;
    n.id = std::move(id);
    n.level = level;
    for (int i = 0; i < rows; ++i) n.row_strategies.push_back("r" + format_int(i));
    for (int j = 0; j < cols; ++j) n.col_strategies.push_back("c" + format_int(j));
    n.coeffs.assign(static_cast<size_t>(rows) * cols, PayoffCoeffs::constant(value));
    return n;
}

}  // namespace

TEST_SUITE("learning") {

TEST_CASE("beta counts update and mean") {
    OutcomePosterior post;
    PosteriorKey key{"root", 0, 0};
    CHECK(post.get(key).mean() == doctest::Approx(0.5));
    post.update(key, true);
    CHECK(post.get(key).alpha == 2.0);
    CHECK(post.get(key).beta == 1.0);
    CHECK(post.get(key).mean() == doctest::Approx(2.0 / 3.0));
    post.update(key, false);
    CHECK(post.get(key).mean() == doctest::Approx(0.5));

    OutcomePosterior heavy;
    for (int i = 0; i < 700; ++i) heavy.update(key, true);
    for (int i = 0; i < 300; ++i) heavy.update(key, false);
    CHECK(heavy.get(key).mean() == doctest::Approx(701.0 / 1002.0).epsilon(1e-12));
}

TEST_CASE("posterior_payoff rewrites entries from the posterior means") {
    GutNode root = constant_node("root", 0, 2, 2, 9.0);
    root.children[{0, 0}] = constant_node("kid", 1, 1, 1, 9.0);

    OutcomePosterior post;
    SUBCASE("uniform priors with symmetric payoffs zero everything") {
        GutNode out = posterior_payoff(root, post, 1.0, -1.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(out.payoff(StateFeatures{}).at(i, j) == doctest::Approx(0.0));
        CHECK(out.children.at({0, 0}).payoff(StateFeatures{}).at(0, 0) == doctest::Approx(0.0));
    }
    SUBCASE("a (3,1) posterior maps to 0.5 under win 1 loss -1") {
        post.update({"root", 0, 1}, true);
        post.update({"root", 0, 1}, true);
        GutNode out = posterior_payoff(root, post, 1.0, -1.0);
        CHECK(out.payoff(StateFeatures{}).at(0, 1) == doctest::Approx(0.5));
        CHECK(out.payoff(StateFeatures{}).at(0, 0) == doctest::Approx(0.0));
    }
    SUBCASE("win == loss collapses to a constant matrix") {
        GutNode out = posterior_payoff(root, post, 4.0, 4.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(out.payoff(StateFeatures{}).at(i, j) == doctest::Approx(4.0));
    }
}

TEST_CASE("prune with eps 0 is the identity on structure") {
    GutNode root = constant_node("root", 0, 2, 2, 0.0);
    root.children[{0, 0}] = constant_node("a", 1, 2, 2, 1.0);
    root.children[{1, 1}] = constant_node("b", 1, 1, 1, -1.0);
    GutNode out = prune(root, 0.0);
    CHECK(out.node_count() == root.node_count());
    CHECK(out.children.size() == 2);
}

TEST_CASE("pure equilibrium prune keeps only the played child") {
    // Saddle at (0,1): reach of every other child is 0.
    GutNode root = constant_node("root", 0, 2, 2, 0.0);
    root.coeff(0, 0) = PayoffCoeffs::constant(3);
    root.coeff(0, 1) = PayoffCoeffs::constant(1);
    root.coeff(1, 0) = PayoffCoeffs::constant(2);
    root.coeff(1, 1) = PayoffCoeffs::constant(0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) root.children[{i, j}] = constant_node("k" + format_int(i * 2 + j), 1, 1, 1, 0.0);
    GutNode out = prune(root, 0.01);
    REQUIRE(out.children.size() == 1);
    CHECK(out.children.begin()->first == std::make_pair(0, 1));
}

TEST_CASE("uniform 2x2 equilibrium with eps 0.3 drops all four children") {
    GutNode root = constant_node("root", 0, 2, 2, 0.0);
    root.coeff(0, 0) = PayoffCoeffs::constant(1);
    root.coeff(0, 1) = PayoffCoeffs::constant(-1);
    root.coeff(1, 0) = PayoffCoeffs::constant(-1);
    root.coeff(1, 1) = PayoffCoeffs::constant(1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) root.children[{i, j}] = constant_node("k" + format_int(i * 2 + j), 1, 1, 1, 0.0);
    GutNode out = prune(root, 0.3);  // each reach is 0.25
    CHECK(out.children.empty());
    CHECK(out.node_count() == 1);
}

TEST_CASE("prune never increases node count") {
    Rng rng(5);
    for (int iter = 0; iter < 20; ++iter) {
        GutNode root = constant_node("root", 0, 2, 2, 0.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                root.coeff(i, j) = PayoffCoeffs::constant(rng.uniform01() * 2.0 - 1.0);
                root.children[{i, j}] = constant_node("k" + format_int(i * 2 + j), 1, 1, 1, 0.0);
            }
        double eps = rng.uniform01() * 0.5;
        CHECK(prune(root, eps).node_count() <= root.node_count());
    }
}

TEST_CASE("posterior mean converges to the hidden probability") {
    for (double hidden : {0.1, 0.5, 0.9}) {
        Rng rng(static_cast<uint64_t>(hidden * 1000) + 17);
        OutcomePosterior post;
        PosteriorKey key{"root", 0, 0};
        for (int i = 0; i < 1000; ++i) post.update(key, rng.uniform01() < hidden);
        CHECK(std::abs(post.get(key).mean() - hidden) <= 0.05);
    }
}

TEST_CASE("self_upgrade score starts at zero and grows with evidence") {
    GutNode root = constant_node("root", 0, 2, 2, 0.0);
    OutcomePosterior post;
    CHECK(self_upgrade_score(root, post) == doctest::Approx(0.0));
    double prev = 0.0;
    for (int i = 0; i < 5; ++i) {
        post.update({"root", 0, 0}, true);
        double s = self_upgrade_score(root, post);
        CHECK(s > prev);
        prev = s;
    }
    CHECK(prev < 1.0);
}

TEST_CASE("thompson sampling is seeded and concentrates with counts") {
    GutNode root = constant_node("root", 0, 1, 1, 0.0);
    OutcomePosterior post;
    for (int i = 0; i < 2000; ++i) post.update({"root", 0, 0}, true);
    Rng r1(3), r2(3);
    GutNode a = thompson_sample(root, post, r1, 1.0, -1.0);
    GutNode b = thompson_sample(root, post, r2, 1.0, -1.0);
    CHECK(a.payoff(StateFeatures{}).at(0, 0) == b.payoff(StateFeatures{}).at(0, 0));
    // theta ~ Beta(2001, 1) is close to 1, so payoff is near win_value
    CHECK(a.payoff(StateFeatures{}).at(0, 0) > 0.9);
}

TEST_CASE("learning curve CSV has the documented columns") {
    LearningCurve curve;
    curve.episodes.push_back({0, true, 2.5, 0.25, 1.0 / 12.0, {}});
    std::ostringstream out;
    curve.write_csv(out);
    CHECK(out.str().find("episode,success,cost,value,mean_variance") == 0);
    CHECK(out.str().find("0,1,2.5,0.25,") != std::string::npos);
}

}  // TEST_SUITE
