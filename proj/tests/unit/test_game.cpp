#include "doctest.h"

#include "oracles.hpp"
#include "pdnet/game.hpp"

#include <random>

using namespace pdnet;

namespace {
const PayoffMatrix kExample{3, -7, 5, 2};
const oracle::Mat2 kExampleMat{{{3, -7}, {5, 2}}};

std::vector<std::vector<int>> dense(const Graph& g) {
    std::vector<std::vector<int>> adj(g.size(), std::vector<int>(g.size(), 0));
    for (auto [i, j] : g.edges()) adj[i][j] = adj[j][i] = 1;
    return adj;
}
}  // namespace

TEST_CASE("strict PD ordering") {
    CHECK(is_strict_pd(kExample));
    CHECK_FALSE(is_strict_pd({1, 0, 0, 1}));
    CHECK(is_strict_pd({0.1985, -0.6989, 0.4927, 0.0001}));
    CHECK_FALSE(is_strict_pd({3, -7, 5, 0}));
    CHECK_FALSE(is_strict_pd({3, -7, 3, 2}));
}

TEST_CASE("pairwise payoff") {
    CHECK(pairwise_payoff(kExample, 1, 1) == 3);
    CHECK(pairwise_payoff(kExample, 0, 1) == 5);
    CHECK(pairwise_payoff(kExample, 1, 0) == -7);
    CHECK(pairwise_payoff(kExample, 0, 0) == 2);
    // 0.8*(3*0.2 - 7*0.8) + 0.2*(5*0.2 + 2*0.8) = -4 + 0.52
    CHECK(oracle::bilinear(kExampleMat, 0.8, 0.2) == doctest::Approx(-3.48).epsilon(1e-15));
    CHECK(pairwise_payoff(kExample, 0.8, 0.2) == doctest::Approx(-3.48).epsilon(1e-14));
    CHECK_THROWS_AS(pairwise_payoff(kExample, 1.1, 0.5), std::domain_error);
    CHECK_THROWS_AS(pairwise_payoff(kExample, 0.5, -0.01), std::domain_error);
}

TEST_CASE("payoff vector") {
    auto k2 = complete_graph(2);
    std::vector<double> x{0.8, 0.2};
    auto p = payoffs(k2, kExample, x);
    // Node 2: 0.2*(3*0.8 - 7*0.2) + 0.8*(5*0.8 + 2*0.2) = 0.2 + 3.52
    CHECK(p[0] == doctest::Approx(-3.48).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(3.72).epsilon(1e-14));

    auto g = random_graph(15, 0.3, 9);
    std::vector<double> same(15, 0.37);
    auto ps = payoffs(g, kExample, same);
    for (NodeId i = 0; i < g.size(); ++i)
        CHECK(ps[i] == doctest::Approx(g.degree(i) * pairwise_payoff(kExample, 0.37, 0.37)));

    auto empty = payoffs(Graph(4), kExample, std::vector<double>(4, 0.5));
    for (double v : empty) CHECK(v == 0.0);

    CHECK_THROWS_AS(payoffs(k2, kExample, std::vector<double>{0.5}), std::domain_error);
}

TEST_CASE("payoffs agree with the dense oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = random_graph(12, 0.35, trial);
        std::vector<double> x(12);
        for (auto& v : x) v = u(rng);
        auto p = payoffs(g, kExample, x);
        auto q = oracle::payoffs(dense(g), kExampleMat, x);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-12));
    }
}

TEST_CASE("kappa rows") {
    auto k2 = complete_graph(2);
    std::vector<double> p{-3.48, 3.72};
    auto r0 = kappa_row(k2, p, 0);
    auto r1 = kappa_row(k2, p, 1);
    REQUIRE(r0.size() == 1);
    CHECK(r0[0].neighbor == 1);
    CHECK(r0[0].weight == 1.0);
    CHECK(r1[0].weight == 0.0);

    std::vector<double> flat{2.0, 2.0};
    CHECK(kappa_row(k2, flat, 0)[0].weight == 0.0);

    // star: center 0, leaves 1..3
    std::vector<std::pair<NodeId, NodeId>> e{{0, 1}, {0, 2}, {0, 3}};
    Graph star(4, e);
    std::vector<double> ps{0, 5, 3, 1};
    auto row = kappa_row(star, ps, 0);
    REQUIRE(row.size() == 3);
    CHECK(row[0].weight == doctest::Approx(5.0 / 9));
    CHECK(row[1].weight == doctest::Approx(3.0 / 9));
    CHECK(row[2].weight == doctest::Approx(1.0 / 9));
}

TEST_CASE("kappa matches the ratio oracle on random instances") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = random_graph(10, 0.4, 1000 + trial);
        std::vector<double> x(10);
        for (auto& v : x) v = u(rng);
        auto p = payoffs(g, kExample, x);
        auto adj = dense(g);
        for (NodeId i = 0; i < g.size(); ++i) {
            auto want = oracle::kappa(adj, p, i);
            for (const auto& e : kappa_row(g, p, i))
                CHECK(e.weight == doctest::Approx(want[e.neighbor]).epsilon(1e-12));
        }
    }
}

TEST_CASE("pairwise payoff properties under strict PD") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    const double h = 1e-6;
    for (int trial = 0; trial < 200; ++trial) {
        const double x = u(rng) * (1 - 2 * h) + h;
        const double y = u(rng);
        // strictly decreasing in own strategy (finite difference)
        const double slope = (pairwise_payoff(kExample, x + h, y) - pairwise_payoff(kExample, x - h, y)) / (2 * h);
        CHECK(slope < 0.0);
        CHECK(slope == doctest::Approx(y * (3 - 5) + (1 - y) * (-7 - 2)).epsilon(1e-6));
        // antisymmetric part is (b - c)(x - y)
        CHECK(pairwise_payoff(kExample, x, y) - pairwise_payoff(kExample, y, x) ==
              doctest::Approx((-7 - 5) * (x - y)).epsilon(1e-12));
    }
}
