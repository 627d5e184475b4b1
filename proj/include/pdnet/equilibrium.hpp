#pragma once

#include "pdnet/dynamics.hpp"
#include "pdnet/game.hpp"
#include "pdnet/graph.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdnet {

enum class EquilibriumKind { Type1, Type2, Type3, NotEquilibrium };

std::string to_string(EquilibriumKind kind);

struct Tolerances {
    double strategy = 1e-9;  // x_i == x_j; also the drift threshold
    double payoff = 1e-9;    // P_i == P_j
};

/// Tolerances matched to a run's stopping rule: a run that stops at
/// max|f| <= tol leaves strategies equal only to within a small multiple of tol.
inline Tolerances tolerances_for_run(const RunConfig& cfg) {
    return {100.0 * cfg.tol, 100.0 * cfg.tol};
}

struct EquilibriumClass {
    EquilibriumKind kind = EquilibriumKind::NotEquilibrium;
    /// Type 1 point where every payoff is also equal (Jacobian vanishes).
    bool degenerate = false;
    /// Type 2/3: a pair of nodes with different strategies (argmin, argmax).
    std::optional<std::pair<NodeId, NodeId>> unequal_pair;
    /// NotEquilibrium: the node with the largest |f_i|.
    std::optional<NodeId> most_active;
    double max_drift = 0.0;
    double strategy_spread = 0.0;
    double payoff_spread = 0.0;
};

EquilibriumClass classify(const Graph& g, const PayoffMatrix& m, std::span<const double> x,
                          const Tolerances& tol = {});

struct ImitationEdge {
    NodeId from;  // imitator
    NodeId to;    // imitated
    double kappa;
};

/// Directed graph of strictly positive imitation weights at a state.
struct ImitationGraph {
    std::size_t n = 0;
    std::vector<ImitationEdge> edges;

    std::vector<double> out_weight() const;
    std::vector<std::size_t> out_degree() const;
    /// Nodes with no out-edges (no strictly better neighbor).
    std::vector<NodeId> sinks() const;
};

ImitationGraph imitation_graph(const Graph& g, const PayoffMatrix& m, std::span<const double> x);

/// Dense row-major square matrix.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    explicit DenseMatrix(std::size_t size = 0) : n(size), data(size * size, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }
};

/// Weighted directed Laplacian L = D_out - W.
DenseMatrix laplacian(const ImitationGraph& ig);

struct GershgorinDisk {
    double center;
    double radius;
};

enum class StabilityVerdict { NeutrallyStableAtWorst, Indeterminate };

std::string to_string(StabilityVerdict verdict);

struct StabilityReport {
    DenseMatrix jacobian;
    std::vector<GershgorinDisk> disks;
    std::vector<NodeId> zero_rows;
    StabilityVerdict verdict = StabilityVerdict::Indeterminate;
};

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Jacobian of the continuous dynamics at a Type 1 point, with its Gershgorin
/// disks. Throws PreconditionError if `x` does not classify as Type 1.
StabilityReport jacobian_type1(const Graph& g, const PayoffMatrix& m, std::span<const double> x,
                               const Tolerances& tol = {});

std::vector<GershgorinDisk> gershgorin_disks(const DenseMatrix& a);

struct PerturbationOutcome {
    Trajectory trajectory;
    EquilibriumClass final_class;
    double distance = 0.0;  // max-norm distance of the final state to s_star
};

/// Integrates from s_star + delta and classifies where the run ends up, using
/// tolerances_for_run(cfg). Throws std::domain_error if the perturbed point
/// leaves [0,1].
PerturbationOutcome perturb_and_run(const Graph& g, const PayoffMatrix& m,
                                    std::span<const double> s_star, std::span<const double> delta,
                                    const RunConfig& cfg);

/// `from,to,kappa` CSV using the given node labels.
void write_imitation_csv(std::ostream& out, const ImitationGraph& ig,
                         std::span<const std::string> labels);

}  // namespace pdnet
