#pragma once

#include "pdnet/dynamics.hpp"
#include "pdnet/game.hpp"
#include "pdnet/graph.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pdnet {

/// Early (y0) and late (y1) deviance scores in [0,1]; entry k belongs to
/// node k of the graph the panel is used with.
struct ScorePanel {
    std::vector<std::string> ids;
    std::vector<double> y0;
    std::vector<double> y1;

    std::size_t size() const { return y0.size(); }
    /// Throws std::invalid_argument on length mismatch or scores outside [0,1].
    void validate() const;
};

/// Population standard deviation (divisor n).
double population_sd(std::span<const double> v);

constexpr int kMaxBin = 2;
constexpr int kBinCount = 2 * kMaxBin + 1;

/// Signed band of `y` around `y0` in units of `s`. Band 0 is the closed
/// interval y0 +- s; band k > 0 holds k*s < |y - y0| <= (k+1)*s. Bands beyond
/// +-2 are clamped. Throws std::domain_error if s <= 0.
int assign_bin(double y0, double y, double s);

using BinMatrix = std::array<std::array<double, kBinCount>, kBinCount>;

/// Rows are true bins, columns predicted bins, both indexed bin + 2.
struct Confusion {
    BinMatrix counts{};
    BinMatrix prob{};  // row-normalised counts; empty rows stay zero
};

Confusion confusion(std::span<const int> bins_true, std::span<const int> bins_pred);

struct BinReport {
    double s = 0.0;
    std::vector<int> bins_true;
    std::vector<int> bins_pred;
    Confusion table;
};

/// Deviance d maps to cooperation probability x = 1 - d.
inline double deviance_to_strategy(double d) { return 1.0 - d; }
inline double strategy_to_deviance(double x) { return 1.0 - x; }

struct Prediction {
    std::vector<double> yhat;
    bool converged = false;
    std::size_t steps = 0;
};

/// Runs the dynamics from x0 = 1 - y0 and maps the final state back.
Prediction predict_late(const Graph& g, const PayoffMatrix& m, std::span<const double> y0,
                        const RunConfig& cfg);

struct Evaluation {
    double objective = 0.0;
    BinReport report;
    Prediction prediction;
};

/// Squared bin error of the model's prediction against the observed late
/// scores, with full bin report.
Evaluation evaluate(const Graph& g, const PayoffMatrix& m, const ScorePanel& panel,
                    const RunConfig& cfg);

double objective(const Graph& g, const PayoffMatrix& m, const ScorePanel& panel,
                 const RunConfig& cfg);

struct FitOptions {
    std::size_t starts = 16;
    std::size_t max_evaluations = 6000;
    std::size_t restarts_per_start = 6;
    /// Simplex size in logit units of the per-coordinate search transform.
    double initial_step = 1.0;
    double min_simplex_size = 1e-4;
    /// Weight of the mean squared score mismatch added to the bin error while
    /// searching; must stay below 1 so it only breaks ties.
    double tie_break = 0.5;
    bool strict_pd = true;
    std::uint64_t sequence_skip = 0;  // offset into the Sobol sequence
    std::array<double, 4> lower{0.0, -1.0, 0.0, 0.0};  // a, b, c, d
    std::array<double, 4> upper{1.0, 0.0, 1.0, 1.0};
};

struct FitResult {
    PayoffMatrix matrix;
    Evaluation evaluation;
    std::size_t evaluations = 0;
    std::size_t starts_used = 0;
    bool budget_exhausted = false;
};

/// Derivative-free search for the payoff matrix minimising the squared bin
/// error: multi-start Nelder-Mead from Sobol points in the search box,
/// restarting each simplex at a halved scale when it collapses.
FitResult fit_payoff(const Graph& g, const ScorePanel& panel, const RunConfig& cfg,
                     const FitOptions& opt = {});

struct ScoreDistribution {
    enum class Kind { Uniform, TruncatedNormal } kind = Kind::Uniform;
    double p1 = 0.0;  // lo, or mean
    double p2 = 1.0;  // hi, or standard deviation
};

/// y0 from `dist`; y1 = predict_late(y0) plus N(0, noise) truncated to
/// +-2 noise, clamped to [0,1].
ScorePanel generate_synthetic_panel(const Graph& g, const PayoffMatrix& m,
                                    const ScoreDistribution& dist, double noise,
                                    std::uint64_t seed, const RunConfig& cfg);

/// `node,y0,y1` with header.
ScorePanel read_panel_csv(std::istream& in);
void write_panel_csv(std::ostream& out, const ScorePanel& panel);

}  // namespace pdnet
