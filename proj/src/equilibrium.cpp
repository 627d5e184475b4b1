#include "pdnet/equilibrium.hpp"

#include "pdnet/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace pdnet {

std::string to_string(EquilibriumKind kind) {
    switch (kind) {
        case EquilibriumKind::Type1: return "type1";
        case EquilibriumKind::Type2: return "type2";
        case EquilibriumKind::Type3: return "type3";
        case EquilibriumKind::NotEquilibrium: return "not-equilibrium";
    }
    return "unknown";
}

std::string to_string(StabilityVerdict verdict) {
    return verdict == StabilityVerdict::NeutrallyStableAtWorst ? "neutrally-stable-at-worst"
                                                               : "indeterminate";
}

EquilibriumClass classify(const Graph& g, const PayoffMatrix& m, std::span<const double> x,
                          const Tolerances& tol) {
    if (!(tol.strategy > 0.0 && tol.payoff > 0.0))
        throw std::invalid_argument("classification tolerances must be > 0");
    EquilibriumClass out;
    const auto f = drift(g, m, x);
    const auto p = payoffs(g, m, x);
    if (x.empty()) {
        out.kind = EquilibriumKind::Type1;
        out.degenerate = true;
        return out;
    }

    auto most = std::max_element(f.begin(), f.end(),
                                 [](double l, double r) { return std::abs(l) < std::abs(r); });
    out.max_drift = std::abs(*most);
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    const auto [pmin, pmax] = std::minmax_element(p.begin(), p.end());
    out.strategy_spread = *xmax - *xmin;
    out.payoff_spread = *pmax - *pmin;

    if (out.max_drift > tol.strategy) {
        out.kind = EquilibriumKind::NotEquilibrium;
        out.most_active = static_cast<NodeId>(most - f.begin());
        return out;
    }
    const bool equal_strategies = out.strategy_spread <= tol.strategy;
    const bool equal_payoffs = out.payoff_spread <= tol.payoff;
    if (equal_strategies) {
        out.kind = EquilibriumKind::Type1;
        out.degenerate = equal_payoffs;
        return out;
    }
    out.kind = equal_payoffs ? EquilibriumKind::Type2 : EquilibriumKind::Type3;
    out.unequal_pair = std::pair{static_cast<NodeId>(xmin - x.begin()),
                                 static_cast<NodeId>(xmax - x.begin())};
    return out;
}

std::vector<double> ImitationGraph::out_weight() const {
    std::vector<double> w(n, 0.0);
    for (const auto& e : edges) w[e.from] += e.kappa;
    return w;
}

std::vector<std::size_t> ImitationGraph::out_degree() const {
    std::vector<std::size_t> d(n, 0);
    for (const auto& e : edges) ++d[e.from];
    return d;
}

std::vector<NodeId> ImitationGraph::sinks() const {
    const auto d = out_degree();
    std::vector<NodeId> out;
    for (NodeId i = 0; i < n; ++i)
        if (d[i] == 0) out.push_back(i);
    return out;
}

ImitationGraph imitation_graph(const Graph& g, const PayoffMatrix& m, std::span<const double> x) {
    const auto p = payoffs(g, m, x);
    ImitationGraph ig{g.size(), {}};
    for (NodeId i = 0; i < g.size(); ++i)
        for (const auto& [j, w] : kappa_row(g, p, i))
            if (w > 0.0) ig.edges.push_back({i, j, w});
    return ig;
}

DenseMatrix laplacian(const ImitationGraph& ig) {
    DenseMatrix l(ig.n);
    for (const auto& e : ig.edges) {
        l(e.from, e.from) += e.kappa;
        l(e.from, e.to) -= e.kappa;
    }
    return l;
}

std::vector<GershgorinDisk> gershgorin_disks(const DenseMatrix& a) {
    std::vector<GershgorinDisk> disks(a.n);
    for (std::size_t r = 0; r < a.n; ++r) {
        double radius = 0.0;
        for (std::size_t c = 0; c < a.n; ++c)
            if (c != r) radius += std::abs(a(r, c));
        disks[r] = {a(r, r), radius};
    }
    return disks;
}

StabilityReport jacobian_type1(const Graph& g, const PayoffMatrix& m, std::span<const double> x,
                               const Tolerances& tol) {
    const auto cls = classify(g, m, x, tol);
    if (cls.kind != EquilibriumKind::Type1)
        throw PreconditionError("jacobian_type1 requires a Type 1 equilibrium, got " +
                                to_string(cls.kind));

    // At a Type 1 point every x_j - x_i vanishes, so the kappa derivatives drop
    // out: J_ii = -sum_j kappa_ij (which is -1 or 0) and J_ij = kappa_ij.
    const auto p = payoffs(g, m, x);
    StabilityReport report{DenseMatrix(g.size()), {}, {}, StabilityVerdict::Indeterminate};
    auto& jac = report.jacobian;
    for (NodeId i = 0; i < g.size(); ++i) {
        const auto row = kappa_row(g, p, i);
        const bool active = std::any_of(row.begin(), row.end(),
                                        [](const KappaEntry& e) { return e.weight > 0.0; });
        if (!active) {
            report.zero_rows.push_back(i);
            continue;
        }
        jac(i, i) = -1.0;
        for (const auto& [j, w] : row) jac(i, j) = w;
    }
    report.disks = gershgorin_disks(jac);
    if (report.zero_rows.size() < g.size())
        report.verdict = StabilityVerdict::NeutrallyStableAtWorst;
    return report;
}

PerturbationOutcome perturb_and_run(const Graph& g, const PayoffMatrix& m,
                                    std::span<const double> s_star, std::span<const double> delta,
                                    const RunConfig& cfg) {
    if (s_star.size() != g.size() || delta.size() != g.size())
        throw std::domain_error("perturb_and_run: vector length mismatch");
    StrategyState start{std::vector<double>(s_star.begin(), s_star.end()), 0.0};
    for (std::size_t i = 0; i < delta.size(); ++i) start.x[i] += delta[i];
    require_unit_interval(start.x);

    PerturbationOutcome out;
    out.trajectory = integrate(g, m, start, cfg);
    const auto& xf = out.trajectory.final_state();
    out.final_class = classify(g, m, xf, tolerances_for_run(cfg));
    for (std::size_t i = 0; i < xf.size(); ++i)
        out.distance = std::max(out.distance, std::abs(xf[i] - s_star[i]));
    return out;
}

void write_imitation_csv(std::ostream& out, const ImitationGraph& ig,
                         std::span<const std::string> labels) {
    out << "from,to,kappa\n";
    for (const auto& e : ig.edges)
        out << labels[e.from] << ',' << labels[e.to] << ',' << fmt_real(e.kappa) << '\n';
}

}  // namespace pdnet
