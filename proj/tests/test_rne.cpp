#include <doctest.h>

#include <cmath>

#include "sass/oracles.hpp"
#include "sass/rne.hpp"

using namespace sass;

namespace {

NeedsDistribution dist(double a, double b, double c = 0.0, double d = 0.0, double e = 0.0) {
    NeedsDistribution out;
    out.p = {a, b, c, d, e};
    return out;
}

NeedsDistribution random_dist(Rng& rng, bool allow_zero) {
    NeedsDistribution out;
    double total = 0.0;
    for (int i = 0; i < 5; ++i) {
        double v = rng.uniform01();
        if (allow_zero && rng.uniform01() < 0.2) v = 0.0;
        out.p[i] = v;
        total += v;
    }
    if (total <= 0.0) {
        out.p[0] = 1.0;
        total = 1.0;
    }
    for (auto& v : out.p) v /= total;
    return out;
}

}  // namespace

TEST_SUITE("rne") {

TEST_CASE("kl of identical distributions is zero") {
    auto p = dist(0.2, 0.2, 0.2, 0.2, 0.2);
    CHECK(kl_divergence(p, p) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("kl two-point values match direct summation") {
    // 0.5*ln2 + 0.5*ln(2/3)
    double expect = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    CHECK(expect == doctest::Approx(0.1438).epsilon(1e-3));
    CHECK(kl_divergence(dist(0.5, 0.5), dist(0.25, 0.75)) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(kl_divergence(dist(0.5, 0.5), dist(0.25, 0.75)) == doctest::Approx(0.1438).epsilon(1e-3));
}

TEST_CASE("kl with disjoint-ish support hits ln 2 via the floor") {
    CHECK(kl_divergence(dist(1.0, 0.0), dist(0.5, 0.5)) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("js is symmetric, bounded, and zero on equal inputs") {
    auto p = dist(0.7, 0.1, 0.1, 0.05, 0.05);
    auto q = dist(0.1, 0.3, 0.3, 0.2, 0.1);
    CHECK(js_divergence(p, p) == 0.0);
    CHECK(js_divergence(p, q) == js_divergence(q, p));  // exact, canonicalized internally
    CHECK(js_divergence(dist(1.0, 0.0), dist(0.0, 1.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(js_divergence(dist(0.5, 0.5), dist(0.25, 0.75)) == doctest::Approx(0.0349).epsilon(2e-3));
}

TEST_CASE("trust values from the divergence examples") {
    CHECK(trust(dist(0.3, 0.7), dist(0.3, 0.7)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trust(dist(1.0, 0.0), dist(0.0, 1.0)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(trust(dist(0.5, 0.5), dist(0.25, 0.75)) == doctest::Approx(0.9496).epsilon(1e-3));
}

TEST_CASE("gibbs inequality and js bound on random pairs") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        auto p = random_dist(rng, true);
        auto q = random_dist(rng, true);
        CHECK(kl_divergence(p, q) >= -1e-12);
        double js = js_divergence(p, q);
        CHECK(js >= -1e-12);
        CHECK(js <= std::log(2.0) + 1e-12);
    }
}

TEST_CASE("kl matches the independent closed-form sum on positive supports") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        auto p = random_dist(rng, false);
        auto q = random_dist(rng, false);
        std::vector<double> pv(p.p.begin(), p.p.end()), qv(q.p.begin(), q.p.end());
        CHECK(kl_divergence(p, q) == doctest::Approx(oracle::kl_direct(pv, qv)).epsilon(1e-9));
        CHECK(js_divergence(p, q) == doctest::Approx(oracle::js_direct(pv, qv)).epsilon(1e-9));
    }
}

TEST_CASE("trust matrix is symmetric with unit diagonal") {
    CHECK(trust_matrix({dist(1, 0)}).m[0][0] == 1.0);

    std::vector<NeedsDistribution> two{dist(0.4, 0.6), dist(0.4, 0.6)};
    auto tm2 = trust_matrix(two);
    CHECK(tm2.m[0][1] == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(11);
    std::vector<NeedsDistribution> dists;
    for (int i = 0; i < 6; ++i) dists.push_back(random_dist(rng, true));
    auto tm = trust_matrix(dists);
    for (int i = 0; i < tm.size(); ++i) {
        CHECK(tm.m[i][i] == 1.0);
        for (int j = 0; j < tm.size(); ++j) {
            CHECK(tm.m[i][j] == tm.m[j][i]);
            CHECK(tm.m[i][j] >= 0.0);
            CHECK(tm.m[i][j] <= 1.0);
        }
    }
}

TEST_CASE("block structure for identical vs disjoint agents") {
    std::vector<NeedsDistribution> dists{dist(1, 0), dist(1, 0), dist(0, 1)};
    auto tm = trust_matrix(dists);
    CHECK(tm.m[0][1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tm.m[0][2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(tm.m[1][2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("grouping: tau 0 merges everyone, tau above max splits everyone") {
    Rng rng(3);
    std::vector<NeedsDistribution> dists;
    for (int i = 0; i < 5; ++i) dists.push_back(random_dist(rng, true));
    auto tm = trust_matrix(dists);
    CHECK(group_by_trust(tm, 0.0).size() == 1);
    auto singletons = group_by_trust(tm, 1.0 + 1e-9);
    CHECK(singletons.size() == 5);
}

TEST_CASE("two trust cliques match the brute-force component oracle") {
    std::vector<NeedsDistribution> dists{dist(1, 0), dist(0.95, 0.05), dist(0, 1), dist(0.05, 0.95)};
    auto tm = trust_matrix(dists);
    auto groups = group_by_trust(tm, 0.8);
    auto expect = oracle::components_brute(tm.m, 0.8);
    REQUIRE(groups.size() == expect.size());
    for (size_t i = 0; i < groups.size(); ++i) CHECK(groups[i] == expect[i]);
    CHECK(groups.size() == 2);
}

TEST_CASE("grouping is monotone in tau") {
    Rng rng(17);
    for (int iter = 0; iter < 30; ++iter) {
        std::vector<NeedsDistribution> dists;
        int n = rng.uniform_int(2, 7);
        for (int i = 0; i < n; ++i) dists.push_back(random_dist(rng, true));
        auto tm = trust_matrix(dists);
        double tau1 = rng.uniform01();
        double tau2 = std::min(1.0, tau1 + rng.uniform01() * (1.0 - tau1));
        auto g1 = group_by_trust(tm, tau1);
        auto g2 = group_by_trust(tm, tau2);
        CHECK(g2.size() >= g1.size());  // raising tau never merges groups
    }
}

}  // TEST_SUITE
