#include <doctest.h>

#include <cmath>

#include "sass/gut.hpp"

using namespace sass;

namespace {

GutNode leaf_node(std::string id, int level, Matrix payoff) {
    GutNode n;
    n.id = std::move(id);
    n.level = level;
    for (int i = 0; i < payoff.rows; ++i) n.row_strategies.push_back("r" + format_int(i));
    for (int j = 0; j < payoff.cols; ++j) n.col_strategies.push_back("c" + format_int(j));
    n.coeffs.resize(static_cast<size_t>(payoff.rows) * payoff.cols);
    for (int i = 0; i < payoff.rows; ++i)
        for (int j = 0; j < payoff.cols; ++j) n.coeff(i, j) = PayoffCoeffs::constant(payoff.at(i, j));
    return n;
}

Matrix random_matrix(Rng& rng, int max_dim, bool integers) {
    int r = rng.uniform_int(1, max_dim), c = rng.uniform_int(1, max_dim);
    Matrix m(r, c);
    for (auto& v : m.a) v = integers ? rng.uniform_int(-9, 9) : (rng.uniform01() * 10.0 - 5.0);
    return m;
}

}  // namespace

TEST_SUITE("gut") {

TEST_CASE("matching pennies is uniform with value zero") {
    auto sol = solve_matrix_game(Matrix{{1, -1}, {-1, 1}});
    CHECK(std::abs(sol.value) <= 1e-9);
    for (double p : sol.row.p) CHECK(p == doctest::Approx(0.5).epsilon(1e-6));
    for (double p : sol.col.p) CHECK(p == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("dominance makes a pure saddle: [[3,1],[2,0]] -> (r0,c1) value 1") {
    auto sol = solve_matrix_game(Matrix{{3, 1}, {2, 0}});
    CHECK(sol.value == 1.0);  // exact: saddle path does no arithmetic
    CHECK(sol.row.p[0] == 1.0);
    CHECK(sol.col.p[1] == 1.0);
}

TEST_CASE("1x1 game is trivially pure") {
    auto sol = solve_matrix_game(Matrix{{7.5}});
    CHECK(sol.value == 7.5);
    CHECK(sol.row.p[0] == 1.0);
    CHECK(sol.col.p[0] == 1.0);
}

TEST_CASE("non-finite entries are rejected") {
    Matrix m(1, 2);
    m.at(0, 0) = 1.0;
    m.at(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(solve_matrix_game(m), ValidationError);
}

TEST_CASE("exploitability below 1e-6 on random matrices up to 4x4") {
    Rng rng(1234);
    for (int i = 0; i < 500; ++i) {
        Matrix m = random_matrix(rng, 4, i % 2 == 0);
        auto sol = solve_matrix_game(m);
        CHECK(exploitability(m, sol.row, sol.col) <= 1e-6);
    }
}

TEST_CASE("saddle-point 2x2 matrices return max-min value exactly") {
    Rng rng(77);
    int saddles = 0;
    for (int iter = 0; iter < 400; ++iter) {
        Matrix m(2, 2);
        for (auto& v : m.a) v = rng.uniform_int(-9, 9);
        // maximin / minimax by enumeration
        double maximin = std::max(std::min(m.at(0, 0), m.at(0, 1)), std::min(m.at(1, 0), m.at(1, 1)));
        double minimax = std::min(std::max(m.at(0, 0), m.at(1, 0)), std::max(m.at(0, 1), m.at(1, 1)));
        if (maximin != minimax) continue;  // no saddle
        ++saddles;
        auto sol = solve_matrix_game(m);
        CHECK(sol.value == maximin);
    }
    CHECK(saddles > 50);
}

TEST_CASE("scale covariance: solving c*A scales the value, keeps supports") {
    Rng rng(9);
    for (int iter = 0; iter < 100; ++iter) {
        Matrix m = random_matrix(rng, 4, false);
        auto base = solve_matrix_game(m);
        for (double c : {0.5, 2.0, 4.0}) {
            Matrix scaled = m;
            for (auto& v : scaled.a) v *= c;
            auto sol = solve_matrix_game(scaled);
            CHECK(sol.value == doctest::Approx(c * base.value).epsilon(1e-9));
            for (size_t i = 0; i < sol.row.p.size(); ++i)
                CHECK((sol.row.p[i] > 1e-9) == (base.row.p[i] > 1e-9));
            for (size_t j = 0; j < sol.col.p.size(); ++j)
                CHECK((sol.col.p[j] > 1e-9) == (base.col.p[j] > 1e-9));
        }
    }
}

TEST_CASE("iterative fallback handles a 5x5 game to tolerance") {
    // Rock-paper-scissors padded with two dominated strategies.
    Matrix m{{0, -1, 1, -2, -2},
             {1, 0, -1, -2, -2},
             {-1, 1, 0, -2, -2},
             {-3, -3, -3, -4, -4},
             {-3, -3, -3, -4, -4}};
    auto sol = solve_matrix_game(m);
    CHECK(exploitability(m, sol.row, sol.col) <= 1e-6);
    CHECK(sol.value == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("descend on a depth-1 tree yields a single combination entry") {
    GutNode root = leaf_node("root", 0, Matrix{{5, 1}, {0, 2}});
    auto r = descend(root, StateFeatures{}, SelectorKind::Argmax);
    CHECK(r.combo.size() == 1);
    CHECK(r.combo[0].node_id == "root");
}

TEST_CASE("descend is lazy: only the matching child is visited") {
    GutNode root = leaf_node("root", 0, Matrix{{3, 1}, {2, 0}});  // pure saddle at (0,1)
    root.children[{0, 1}] = leaf_node("hit", 1, Matrix{{3}});
    root.children[{1, 0}] = leaf_node("miss", 1, Matrix{{-3}});
    int solves = 0;
    std::vector<std::string> visited;
    auto r = descend(root, StateFeatures{}, SelectorKind::Argmax, 0,
                     [&](const GutNode& n, const GameSolution&) {
                         ++solves;
                         visited.push_back(n.id);
                     });
    CHECK(solves == 2);
    CHECK(visited == std::vector<std::string>{"root", "hit"});
    CHECK(r.combo.size() == 2);
    CHECK(r.combo[1].node_id == "hit");
}

TEST_CASE("sampled descent is deterministic for a fixed seed") {
    GutNode root = leaf_node("root", 0, Matrix{{1, -1}, {-1, 1}});
    root.children[{0, 0}] = leaf_node("a", 1, Matrix{{1, 0}, {0, 1}});
    root.children[{1, 1}] = leaf_node("b", 1, Matrix{{2}});
    auto r1 = descend(root, StateFeatures{}, SelectorKind::Sample, 99);
    auto r2 = descend(root, StateFeatures{}, SelectorKind::Sample, 99);
    REQUIRE(r1.combo.size() == r2.combo.size());
    for (size_t i = 0; i < r1.combo.size(); ++i) {
        CHECK(r1.combo[i].row == r2.combo[i].row);
        CHECK(r1.combo[i].col == r2.combo[i].col);
    }
}

TEST_CASE("expected_payoff discounts across levels") {
    GutNode root = leaf_node("root", 0, Matrix{{2, 0}, {0, 0}});
    root.children[{0, 0}] = leaf_node("kid", 1, Matrix{{3}});
    StrategyCombination combo{{"root", 0, 0, 0, "r0", "c0"}, {"kid", 1, 0, 0, "r0", "c0"}};
    CHECK(expected_payoff(root, StateFeatures{}, combo, 1.0) == doctest::Approx(5.0));
    CHECK(expected_payoff(root, StateFeatures{}, combo, 0.5) == doctest::Approx(3.5));
    StrategyCombination depth1{{"root", 0, 0, 0, "r0", "c0"}};
    CHECK(expected_payoff(root, StateFeatures{}, depth1, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("payoff_fn is affine in the state features") {
    GutNode n = leaf_node("root", 0, Matrix{{0}});
    n.coeff(0, 0) = PayoffCoeffs{1.0, 2.0, -1.0, 0.5};
    StateFeatures s{0.5, 1.0, 0.2};
    CHECK(n.payoff(s).at(0, 0) == doctest::Approx(1.0 + 2.0 * 0.5 - 1.0 + 0.5 * 0.2));
}

TEST_CASE("argmax descent is a pure function of tree and state") {
    Rng rng(404);
    for (int iter = 0; iter < 20; ++iter) {
        GutNode root = leaf_node("root", 0, random_matrix(rng, 3, false));
        StateFeatures s{rng.uniform01(), rng.uniform01(), rng.uniform01()};
        auto a = descend(root, s, SelectorKind::Argmax);
        auto b = descend(root, s, SelectorKind::Argmax);
        CHECK(a.combo[0].row == b.combo[0].row);
        CHECK(a.combo[0].col == b.combo[0].col);
        CHECK(a.root_value == b.root_value);
    }
}

}  // TEST_SUITE
