#include "pdnet/dynamics.hpp"

#include "pdnet/format.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <stdexcept>

namespace pdnet {

std::string to_string(Integrator integrator) {
    return integrator == Integrator::Euler ? "euler" : "rk4";
}

std::optional<Integrator> parse_integrator(const std::string& name) {
    if (name == "euler" || name == "discrete-euler") return Integrator::Euler;
    if (name == "rk4") return Integrator::Rk4;
    return std::nullopt;
}

void RunConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
}

std::vector<double> drift(const Graph& g, const PayoffMatrix& m, std::span<const double> x) {
    const auto p = payoffs(g, m, x);
    std::vector<double> f(g.size(), 0.0);
    for (NodeId i = 0; i < g.size(); ++i) {
        double fi = 0.0;
        for (const auto& [j, w] : kappa_row(g, p, i))
            if (w > 0.0) fi += w * (x[j] - x[i]);
        f[i] = fi;
    }
    return f;
}

double max_abs(std::span<const double> v) {
    double out = 0.0;
    for (double e : v) out = std::max(out, std::abs(e));
    return out;
}

StrategyState step(const Graph& g, const PayoffMatrix& m, const StrategyState& s, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    const auto f = drift(g, m, s.x);
    StrategyState next{s.x, s.t + epsilon};
    for (std::size_t i = 0; i < f.size(); ++i) next.x[i] += epsilon * f[i];
    return next;
}

StrategyState complete_graph_step(const Graph& g, const PayoffMatrix& m, const StrategyState& s,
                                  double epsilon) {
    if (!g.is_complete()) throw std::domain_error("complete_graph_step requires a complete graph");
    if (!is_strict_pd(m)) throw std::domain_error("complete_graph_step requires a strict PD matrix");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    const auto& x = s.x;
    const auto p = payoffs(g, m, x);
    const std::size_t n = x.size();
    StrategyState next{x, s.t + epsilon};
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (x[j] < x[i]) total += p[j] - p[i];
        if (total <= 0.0) continue;
        double fi = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (x[j] < x[i]) fi += (p[j] - p[i]) / total * (x[j] - x[i]);
        next.x[i] += epsilon * fi;
    }
    return next;
}

namespace {

void check_bounds(std::span<const double> x, std::size_t step_index) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] >= 0.0 && x[i] <= 1.0))
            throw std::logic_error("integrator left [0,1] at step " + std::to_string(step_index) +
                                   ", node " + std::to_string(i) + " = " + fmt_real(x[i]));
}

// Remembers the last few states to spot exact periodic orbits.
class RecurrenceWatch {
public:
    static constexpr std::size_t kDepth = 8;

    /// Returns the period if `x` equals one of the remembered states.
    std::size_t observe(const std::vector<double>& x) {
        const std::uint64_t h = hash(x);
        for (std::size_t back = 1; back <= std::min(count_, kDepth); ++back) {
            const std::size_t slot = (count_ - back) % kDepth;
            if (hashes_[slot] == h && states_[slot] == x) return back;
        }
        hashes_[count_ % kDepth] = h;
        states_[count_ % kDepth] = x;
        ++count_;
        return 0;
    }

private:
    static std::uint64_t hash(const std::vector<double>& x) {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        for (double v : x) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            h = (h ^ bits) * 1099511628211ull;
        }
        return h;
    }

    std::array<std::uint64_t, kDepth> hashes_{};
    std::array<std::vector<double>, kDepth> states_{};
    std::size_t count_ = 0;
};

std::vector<double> axpy(std::span<const double> x, double h, std::span<const double> k) {
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * k[i];
    return out;
}

}  // namespace

Trajectory integrate(const Graph& g, const PayoffMatrix& m, const StrategyState& s0,
                     const RunConfig& cfg) {
    cfg.validate();
    if (s0.size() != g.size()) throw std::domain_error("initial state length mismatch");
    require_unit_interval(s0.x);

    Trajectory traj;
    std::vector<double> x = s0.x;
    double t = s0.t;
    traj.times.push_back(t);
    traj.states.push_back(x);
    bool last_recorded = true;

    const double h = cfg.epsilon;
    std::size_t steps = 0;
    RecurrenceWatch watch;
    watch.observe(x);
    auto f = drift(g, m, x);
    while (true) {
        traj.final_residual = max_abs(f);
        if (traj.final_residual <= cfg.tol) {
            traj.converged = true;
            break;
        }
        if (steps == cfg.max_steps) break;

        if (cfg.integrator == Integrator::Euler) {
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += h * f[i];
        } else {
            const auto k2 = drift(g, m, axpy(x, h / 2, f));
            const auto k3 = drift(g, m, axpy(x, h / 2, k2));
            const auto k4 = drift(g, m, axpy(x, h, k3));
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] += h / 6 * (f[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        }
        ++steps;
        // t accumulates as s0.t + steps*h rather than by repeated addition.
        t = s0.t + static_cast<double>(steps) * h;
        check_bounds(x, steps);

        last_recorded = steps % cfg.record_every == 0;
        if (last_recorded) {
            traj.times.push_back(t);
            traj.states.push_back(x);
        }
        f = drift(g, m, x);
        if (const std::size_t period = watch.observe(x); period != 0) {
            traj.final_residual = max_abs(f);
            if (traj.final_residual > cfg.tol) {
                traj.cycle_period = period;
                break;
            }
        }
    }
    if (!last_recorded) {
        traj.times.push_back(t);
        traj.states.push_back(x);
    }
    traj.steps_taken = steps;
    return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          std::span<const std::string> labels) {
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    if (!labels.empty() && labels.size() != n) throw std::invalid_argument("one label per node");
    out << 't';
    for (std::size_t i = 0; i < n; ++i) {
        if (labels.empty()) out << ",node_" << i;
        else out << ',' << labels[i];
    }
    out << '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << fmt_real(traj.times[k]);
        for (double v : traj.states[k]) out << ',' << fmt_real(v);
        out << '\n';
    }
}

void write_trajectory_long_csv(std::ostream& out, const Trajectory& traj,
                               std::span<const std::string> labels) {
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    if (!labels.empty() && labels.size() != n) throw std::invalid_argument("one label per node");
    out << "t,node,x\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        for (std::size_t i = 0; i < traj.states[k].size(); ++i) {
            out << fmt_real(traj.times[k]) << ',';
            if (labels.empty()) out << i;
            else out << labels[i];
            out << ',' << fmt_real(traj.states[k][i]) << '\n';
        }
}

}  // namespace pdnet
