#include "pdnet/fitting.hpp"

#include "pdnet/csv.hpp"
#include "pdnet/format.hpp"
#include "pdnet/random.hpp"

#include <gsl/gsl_multimin.h>
#include <gsl/gsl_qrng.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace pdnet {

void ScorePanel::validate() const {
    if (y0.size() != y1.size() || ids.size() != y0.size())
        throw std::invalid_argument("score panel columns differ in length");
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    for (std::size_t k = 0; k < y0.size(); ++k)
        if (!in_unit(y0[k]) || !in_unit(y1[k]))
            throw std::invalid_argument("score for node '" + ids[k] + "' outside [0,1]");
}

double population_sd(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double e : v) ss += (e - mean) * (e - mean);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

int assign_bin(double y0, double y, double s) {
    if (!(s > 0.0)) throw std::domain_error("bin width must be > 0");
    const double diff = y - y0;
    const double dist = std::abs(diff);
    const double q = dist / s;
    if (q > kMaxBin + 2) return diff > 0 ? kMaxBin : -kMaxBin;

    // ceil(q) - 1 is right up to rounding in the quotient; settle band edges
    // with the same comparison that defines them.
    int k = q <= 1.0 ? 0 : static_cast<int>(std::ceil(q)) - 1;
    while (k > 0 && dist <= k * s) --k;
    while (dist > (k + 1) * s) ++k;
    k = std::min(k, kMaxBin);
    return diff < 0 ? -k : k;
}

Confusion confusion(std::span<const int> bins_true, std::span<const int> bins_pred) {
    if (bins_true.size() != bins_pred.size())
        throw std::invalid_argument("confusion: bin vectors differ in length");
    Confusion out;
    for (std::size_t k = 0; k < bins_true.size(); ++k) {
        const int r = bins_true[k] + kMaxBin;
        const int c = bins_pred[k] + kMaxBin;
        if (r < 0 || r >= kBinCount || c < 0 || c >= kBinCount)
            throw std::invalid_argument("confusion: bin label outside -2..2");
        out.counts[r][c] += 1.0;
    }
    for (int r = 0; r < kBinCount; ++r) {
        const double total = std::accumulate(out.counts[r].begin(), out.counts[r].end(), 0.0);
        if (total > 0.0)
            for (int c = 0; c < kBinCount; ++c) out.prob[r][c] = out.counts[r][c] / total;
    }
    return out;
}

Prediction predict_late(const Graph& g, const PayoffMatrix& m, std::span<const double> y0,
                        const RunConfig& cfg) {
    if (y0.size() != g.size()) throw std::domain_error("panel does not align with graph nodes");
    StrategyState s0{{}, 0.0};
    s0.x.reserve(y0.size());
    for (double d : y0) s0.x.push_back(deviance_to_strategy(d));

    RunConfig quiet = cfg;
    quiet.record_every = cfg.max_steps;
    const auto traj = integrate(g, m, s0, quiet);

    Prediction out;
    out.converged = traj.converged;
    out.steps = traj.steps_taken;
    for (double x : traj.final_state()) out.yhat.push_back(strategy_to_deviance(x));
    return out;
}

Evaluation evaluate(const Graph& g, const PayoffMatrix& m, const ScorePanel& panel,
                    const RunConfig& cfg) {
    Evaluation ev;
    ev.prediction = predict_late(g, m, panel.y0, cfg);
    auto& rep = ev.report;
    rep.s = population_sd(panel.y0);
    for (std::size_t k = 0; k < panel.size(); ++k) {
        rep.bins_true.push_back(assign_bin(panel.y0[k], panel.y1[k], rep.s));
        rep.bins_pred.push_back(assign_bin(panel.y0[k], ev.prediction.yhat[k], rep.s));
        const double e = rep.bins_true.back() - rep.bins_pred.back();
        ev.objective += e * e;
    }
    rep.table = confusion(rep.bins_true, rep.bins_pred);
    return ev;
}

double objective(const Graph& g, const PayoffMatrix& m, const ScorePanel& panel,
                 const RunConfig& cfg) {
    return evaluate(g, m, panel, cfg).objective;
}

namespace {

using Params = std::array<double, 4>;

PayoffMatrix to_matrix(const Params& p) { return {p[0], p[1], p[2], p[3]}; }

struct QrngDeleter {
    void operator()(gsl_qrng* q) const { gsl_qrng_free(q); }
};
struct SimplexDeleter {
    void operator()(gsl_multimin_fminimizer* s) const { gsl_multimin_fminimizer_free(s); }
};
struct VectorDeleter {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
using VectorPtr = std::unique_ptr<gsl_vector, VectorDeleter>;

VectorPtr make_vector(const Params& p) {
    VectorPtr v(gsl_vector_alloc(p.size()));
    for (std::size_t k = 0; k < p.size(); ++k) gsl_vector_set(v.get(), k, p[k]);
    return v;
}

Params from_vector(const gsl_vector* v) {
    Params p{};
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = gsl_vector_get(v, k);
    return p;
}

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double logit(double f) {
    f = std::clamp(f, 1e-12, 1.0 - 1e-12);
    return std::log(f / (1.0 - f));
}

// The simplex moves in unconstrained coordinates; each one is pushed through a
// logistic map onto its admissible interval. Under strict PD the intervals are
// nested (d, then a above d, then c above a; b below zero), so every simplex
// vertex satisfies the ordering and the search can approach the d > 0 edge
// geometrically instead of bouncing off a penalty wall.
class Coordinates {
public:
    explicit Coordinates(const FitOptions& opt) : opt_(opt) {}

    Params to_params(const Params& u) const {
        Params p;
        if (!opt_.strict_pd) {
            for (std::size_t k = 0; k < 4; ++k) p[k] = clamp_place(u[k], opt_.lower[k], opt_.upper[k]);
            return p;
        }
        const auto [lo_d, hi_d] = range(kD, 0.0, opt_.upper[kD]);
        p[kD] = place(u[kD], lo_d, hi_d);
        const auto [lo_a, hi_a] = range(kA, p[kD], opt_.upper[kA]);
        p[kA] = place(u[kA], lo_a, hi_a);
        const auto [lo_c, hi_c] = range(kC, p[kA], opt_.upper[kC]);
        p[kC] = place(u[kC], lo_c, hi_c);
        const auto [lo_b, hi_b] = range(kB, opt_.lower[kB], 0.0);
        p[kB] = place(u[kB], lo_b, hi_b);
        return p;
    }

    Params to_search(const Params& p) const {
        Params u;
        if (!opt_.strict_pd) {
            for (std::size_t k = 0; k < 4; ++k)
                u[k] = clamp_unplace(p[k], opt_.lower[k], opt_.upper[k]);
            return u;
        }
        const auto [lo_d, hi_d] = range(kD, 0.0, opt_.upper[kD]);
        u[kD] = unplace(p[kD], lo_d, hi_d);
        const auto [lo_a, hi_a] = range(kA, p[kD], opt_.upper[kA]);
        u[kA] = unplace(p[kA], lo_a, hi_a);
        const auto [lo_c, hi_c] = range(kC, p[kA], opt_.upper[kC]);
        u[kC] = unplace(p[kC], lo_c, hi_c);
        const auto [lo_b, hi_b] = range(kB, opt_.lower[kB], 0.0);
        u[kB] = unplace(p[kB], lo_b, hi_b);
        return u;
    }

private:
    static constexpr std::size_t kA = 0, kB = 1, kC = 2, kD = 3;

    // Admissible interval for coordinate k: the box side intersected with
    // (floor, ceiling).
    std::pair<double, double> range(std::size_t k, double floor, double ceiling) const {
        return {std::max(opt_.lower[k], floor), std::min(opt_.upper[k], ceiling)};
    }
    static double place(double u, double lo, double hi) { return lo + (hi - lo) * logistic(u); }
    static double unplace(double v, double lo, double hi) {
        return hi > lo ? logit((v - lo) / (hi - lo)) : 0.0;
    }

    // Without the ordering constraint the box is closed, so its faces must be
    // reachable: a linear map clamped at the sides, with the logistic's slope
    // at the centre.
    static double clamp_place(double u, double lo, double hi) {
        return lo + (hi - lo) * std::clamp(0.5 + 0.25 * u, 0.0, 1.0);
    }
    static double clamp_unplace(double v, double lo, double hi) {
        return hi > lo ? 4.0 * ((v - lo) / (hi - lo) - 0.5) : 0.0;
    }

    const FitOptions& opt_;
};

class Search {
public:
    Search(const Graph& g, const ScorePanel& panel, const RunConfig& cfg, const FitOptions& opt)
        : g_(g), panel_(panel), cfg_(cfg), opt_(opt), coords_(opt),
          // Anything infeasible scores worse than the worst possible bin error.
          infeasible_(static_cast<double>(panel.size()) * 4.0 * kMaxBin * kMaxBin + 1.0) {}

    const Coordinates& coordinates() const { return coords_; }

    bool feasible(const Params& p) const {
        for (std::size_t k = 0; k < p.size(); ++k)
            if (p[k] < opt_.lower[k] || p[k] > opt_.upper[k]) return false;
        return !opt_.strict_pd || is_strict_pd(to_matrix(p));
    }

    /// Search value at unconstrained point u.
    double operator()(const Params& u) {
        // The simplex may ask for several points per iteration; past the
        // limit they are refused so the budget is a hard cap.
        if (evaluations_ >= start_limit_) return infeasible_;
        const Params p = coords_.to_params(u);
        ++evaluations_;
        // Only reachable when the logistic saturates onto an open edge.
        if (!feasible(p)) return infeasible_;
        const auto ev = evaluate(g_, to_matrix(p), panel_, cfg_);
        // Bin error is integer valued; a tie-break term below 1/2 ranks points
        // within a plateau by how close the raw predictions are without ever
        // reordering two different bin errors.
        double closeness = 0.0;
        for (std::size_t k = 0; k < panel_.size(); ++k) {
            const double e = ev.prediction.yhat[k] - panel_.y1[k];
            closeness += e * e;
        }
        const double f = ev.objective + opt_.tie_break * closeness / static_cast<double>(panel_.size());
        if (ev.objective == 0.0) solved_ = true;
        if (f < best_value_) {
            best_value_ = f;
            best_ = p;
        }
        return f;
    }

    bool out_of_budget() const { return evaluations_ >= opt_.max_evaluations; }
    void set_start_budget(std::size_t limit) { start_limit_ = std::min(limit, opt_.max_evaluations); }
    bool start_exhausted() const { return evaluations_ >= start_limit_; }
    bool solved() const { return solved_; }
    std::size_t evaluations() const { return evaluations_; }
    const Params& best() const { return best_; }

    static double trampoline(const gsl_vector* v, void* self) {
        return (*static_cast<Search*>(self))(from_vector(v));
    }

private:
    const Graph& g_;
    const ScorePanel& panel_;
    const RunConfig& cfg_;
    const FitOptions& opt_;
    Coordinates coords_;
    double infeasible_;
    std::size_t evaluations_ = 0;
    std::size_t start_limit_ = 0;
    bool solved_ = false;
    double best_value_ = std::numeric_limits<double>::infinity();
    Params best_{};
};

std::vector<Params> start_points(const FitOptions& opt, const Search& search) {
    std::unique_ptr<gsl_qrng, QrngDeleter> q(gsl_qrng_alloc(gsl_qrng_sobol, 4));
    double u[4];
    for (std::uint64_t k = 0; k < opt.sequence_skip; ++k) gsl_qrng_get(q.get(), u);
    std::vector<Params> out;
    // The strict-PD region is 1/6 of the default box; 1000 draws per point is ample.
    for (std::size_t draws = 0; out.size() < opt.starts && draws < 1000 * opt.starts; ++draws) {
        gsl_qrng_get(q.get(), u);
        Params p;
        for (std::size_t k = 0; k < 4; ++k)
            p[k] = opt.lower[k] + (opt.upper[k] - opt.lower[k]) * u[k];
        if (search.feasible(p)) out.push_back(p);
    }
    return out;
}

void run_simplex(Search& search, const Params& start, const FitOptions& opt) {
    gsl_multimin_function fn{&Search::trampoline, 4, &search};
    std::unique_ptr<gsl_multimin_fminimizer, SimplexDeleter> nm(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 4));
    Params centre = search.coordinates().to_search(start);
    double scale = opt.initial_step;
    for (std::size_t round = 0; round <= opt.restarts_per_start; ++round) {
        auto x = make_vector(centre);
        auto s = make_vector({scale, scale, scale, scale});
        gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), s.get());
        while (!search.solved() && !search.start_exhausted()) {
            if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
            const double size = gsl_multimin_fminimizer_size(nm.get());
            if (gsl_multimin_test_size(size, opt.min_simplex_size) == GSL_SUCCESS) break;
        }
        if (search.solved() || search.start_exhausted()) return;
        centre = from_vector(gsl_multimin_fminimizer_x(nm.get()));
        scale /= 2.0;
    }
}

}  // namespace

FitResult fit_payoff(const Graph& g, const ScorePanel& panel, const RunConfig& cfg,
                     const FitOptions& opt) {
    panel.validate();
    if (panel.size() == 0) throw std::invalid_argument("fit_payoff: empty panel");
    if (panel.size() != g.size()) throw std::domain_error("panel does not align with graph nodes");
    if (opt.starts == 0) throw std::invalid_argument("fit_payoff: need at least one start");
    cfg.validate();

    Search search(g, panel, cfg, opt);
    const auto starts = start_points(opt, search);
    if (starts.empty()) throw std::invalid_argument("fit_payoff: search box has no feasible point");

    FitResult result;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        if (search.solved() || search.out_of_budget()) break;
        const auto& p = starts[k];
        // Each start gets an equal share of whatever budget is left.
        const std::size_t left = opt.max_evaluations - search.evaluations();
        search.set_start_budget(search.evaluations() + left / (starts.size() - k));
        ++result.starts_used;
        search(search.coordinates().to_search(p));
        if (search.solved()) break;
        run_simplex(search, p, opt);
    }
    result.matrix = to_matrix(search.best());
    result.evaluation = evaluate(g, result.matrix, panel, cfg);
    result.evaluations = search.evaluations();
    result.budget_exhausted = search.out_of_budget() && !search.solved();
    return result;
}

ScorePanel generate_synthetic_panel(const Graph& g, const PayoffMatrix& m,
                                    const ScoreDistribution& dist, double noise,
                                    std::uint64_t seed, const RunConfig& cfg) {
    if (!(noise >= 0.0)) throw std::invalid_argument("noise must be >= 0");
    if (dist.kind == ScoreDistribution::Kind::Uniform && !(0.0 <= dist.p1 && dist.p1 <= dist.p2 && dist.p2 <= 1.0))
        throw std::invalid_argument("uniform score bounds must satisfy 0 <= lo <= hi <= 1");
    if (dist.kind == ScoreDistribution::Kind::TruncatedNormal &&
        !(dist.p1 >= 0.0 && dist.p1 <= 1.0 && dist.p2 > 0.0))
        throw std::invalid_argument("normal scores need a mean in [0,1] and sd > 0");
    Rng rng(seed);
    ScorePanel panel;
    for (std::size_t k = 0; k < g.size(); ++k) {
        panel.ids.push_back(std::to_string(k));
        double v = 0.0;
        if (dist.kind == ScoreDistribution::Kind::Uniform) {
            v = uniform(rng, dist.p1, dist.p2);
        } else {
            do v = dist.p1 + dist.p2 * standard_normal(rng);
            while (v < 0.0 || v > 1.0);
        }
        panel.y0.push_back(std::clamp(v, 0.0, 1.0));
    }
    const auto pred = predict_late(g, m, panel.y0, cfg);
    for (double y : pred.yhat) {
        double e = 0.0;
        if (noise > 0.0) {
            do e = noise * standard_normal(rng);
            while (std::abs(e) > 2.0 * noise);
        }
        panel.y1.push_back(std::clamp(y + e, 0.0, 1.0));
    }
    return panel;
}

ScorePanel read_panel_csv(std::istream& in) {
    ScorePanel panel;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto fields = csv::split(line);
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (!header) {
            if (fields != std::vector<std::string>{"node", "y0", "y1"})
                throw ParseError(lineno, "expected header 'node,y0,y1'");
            header = true;
            continue;
        }
        if (fields.size() != 3) throw ParseError(lineno, "expected 3 fields");
        try {
            panel.ids.push_back(fields[0]);
            panel.y0.push_back(csv::to_double(fields[1]));
            panel.y1.push_back(csv::to_double(fields[2]));
        } catch (const std::invalid_argument& e) {
            throw ParseError(lineno, e.what());
        }
        if (!(panel.y0.back() >= 0.0 && panel.y0.back() <= 1.0 && panel.y1.back() >= 0.0 &&
              panel.y1.back() <= 1.0))
            throw ParseError(lineno, "scores must lie in [0,1]");
    }
    if (!header) throw ParseError(lineno, "missing header 'node,y0,y1'");
    return panel;
}

void write_panel_csv(std::ostream& out, const ScorePanel& panel) {
    out << "node,y0,y1\n";
    for (std::size_t k = 0; k < panel.size(); ++k)
        out << panel.ids[k] << ',' << fmt_real(panel.y0[k]) << ',' << fmt_real(panel.y1[k]) << '\n';
}

}  // namespace pdnet
