#pragma once

#include "pdnet/game.hpp"
#include "pdnet/graph.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdnet {

enum class Integrator { Euler, Rk4 };

std::string to_string(Integrator integrator);
std::optional<Integrator> parse_integrator(const std::string& name);

struct RunConfig {
    double epsilon = 0.01;
    std::size_t max_steps = 1'000'000;
    double tol = 1e-8;  // stop once max_i |f_i(x)| <= tol
    std::size_t record_every = 1;
    Integrator integrator = Integrator::Euler;

    /// Throws std::invalid_argument on epsilon <= 0, tol <= 0, max_steps == 0
    /// or record_every == 0.
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool converged = false;
    std::size_t steps_taken = 0;
    double final_residual = 0.0;  // max_i |f_i| at the final state
    /// Nonzero when the discrete map revisited an earlier state exactly; the
    /// run then stops without converging.
    std::size_t cycle_period = 0;

    const std::vector<double>& final_state() const { return states.back(); }
};

/// f_i(x) = sum_j kappa_ij (x_j - x_i).
std::vector<double> drift(const Graph& g, const PayoffMatrix& m, std::span<const double> x);

double max_abs(std::span<const double> v);

/// One synchronous imitation update: x' = x + epsilon f(x).
StrategyState step(const Graph& g, const PayoffMatrix& m, const StrategyState& s, double epsilon);

/// Imitation update on a complete graph written in terms of strategy order:
/// node i only looks at nodes with strictly smaller x, weighted by their
/// payoff advantage. Requires a complete graph and a strict PD matrix.
StrategyState complete_graph_step(const Graph& g, const PayoffMatrix& m, const StrategyState& s,
                                  double epsilon);

/// Advances until the drift falls below cfg.tol, cfg.max_steps updates were
/// made, or the state repeats bit-for-bit (a limit cycle of the update map,
/// which arises when neighbors keep trading the higher payoff). The initial and final states are always recorded. Throws
/// std::logic_error if a state ever leaves [0,1].
Trajectory integrate(const Graph& g, const PayoffMatrix& m, const StrategyState& s0,
                     const RunConfig& cfg);

/// Wide CSV: `t,node_0,...,node_{n-1}`, or `t,<label>...` when labels are given.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          std::span<const std::string> labels = {});
/// Long CSV: `t,node,x`; node is the index, or the label when labels are given.
void write_trajectory_long_csv(std::ostream& out, const Trajectory& traj,
                               std::span<const std::string> labels = {});

}  // namespace pdnet
