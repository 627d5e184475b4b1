#include "pdnet/game.hpp"

#include <stdexcept>
#include <string>

namespace pdnet {

bool is_strict_pd(const PayoffMatrix& m) {
    return m.c > m.a && m.a > m.d && m.d > 0.0 && 0.0 > m.b;
}

void require_unit_interval(std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] >= 0.0 && x[i] <= 1.0))
            throw std::domain_error("strategy of node " + std::to_string(i) + " = " +
                                    std::to_string(x[i]) + " is outside [0,1]");
}

double pairwise_payoff(const PayoffMatrix& m, double xi, double xj) {
    if (!(xi >= 0.0 && xi <= 1.0 && xj >= 0.0 && xj <= 1.0))
        throw std::domain_error("pairwise_payoff: probabilities must lie in [0,1]");
    const double yi = 1.0 - xi;
    const double yj = 1.0 - xj;
    return xi * (m.a * xj + m.b * yj) + yi * (m.c * xj + m.d * yj);
}

std::vector<double> payoffs(const Graph& g, const PayoffMatrix& m, std::span<const double> x) {
    if (x.size() != g.size())
        throw std::domain_error("state has " + std::to_string(x.size()) + " entries, graph has " +
                                std::to_string(g.size()) + " nodes");
    std::vector<double> p(g.size(), 0.0);
    for (NodeId i = 0; i < g.size(); ++i)
        for (NodeId j : g.neighbors(i)) p[i] += pairwise_payoff(m, x[i], x[j]);
    return p;
}

std::vector<KappaEntry> kappa_row(const Graph& g, std::span<const double> payoff, NodeId i) {
    if (payoff.size() != g.size()) throw std::domain_error("payoff vector length mismatch");
    const auto nbrs = g.neighbors(i);
    std::vector<KappaEntry> row;
    row.reserve(nbrs.size());
    double total = 0.0;
    for (NodeId j : nbrs) {
        const double gain = payoff[j] - payoff[i];
        const double w = gain > 0.0 ? gain : 0.0;  // Heaviside with H(0) = 0
        row.push_back({j, w});
        total += w;
    }
    if (total > 0.0)
        for (auto& e : row) e.weight /= total;
    return row;
}

}  // namespace pdnet
