#pragma once

#include "pdnet/graph.hpp"

#include <span>
#include <vector>

namespace pdnet {

/// 2x2 payoff matrix [[a, b], [c, d]]. Row is the player's own pure strategy
/// (first = cooperate, second = defect), column is the opponent's.
struct PayoffMatrix {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    friend bool operator==(const PayoffMatrix&, const PayoffMatrix&) = default;
};

/// True iff c > a > d > 0 > b.
bool is_strict_pd(const PayoffMatrix& m);

/// Per-node probability of cooperating, plus the time it was observed at.
struct StrategyState {
    std::vector<double> x;
    double t = 0.0;

    std::size_t size() const { return x.size(); }
};

/// Throws std::domain_error unless every component is in [0,1].
void require_unit_interval(std::span<const double> x);

/// [xi, 1-xi] * A * [xj, 1-xj]^T.
double pairwise_payoff(const PayoffMatrix& m, double xi, double xj);

/// P_i = sum over neighbors j of pairwise_payoff(m, x_i, x_j).
std::vector<double> payoffs(const Graph& g, const PayoffMatrix& m, std::span<const double> x);

struct KappaEntry {
    NodeId neighbor;
    double weight;
};

/// Imitation weights of node i over its neighbors, in neighbor order.
/// Weight is proportional to how much better the neighbor did; neighbors that
/// did no better than i get zero. If no neighbor did strictly better the whole
/// row is zero. Otherwise the row sums to one.
std::vector<KappaEntry> kappa_row(const Graph& g, std::span<const double> payoff, NodeId i);

}  // namespace pdnet
