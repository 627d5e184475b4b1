// Acceptance suite. One PASS/FAIL line per criterion; exit status is nonzero
// if any criterion fails.

#include "../unit/oracles.hpp"
#include "pdnet/dynamics.hpp"
#include "pdnet/equilibrium.hpp"
#include "pdnet/fitting.hpp"
#include "pdnet/random.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace pdnet;
namespace fs = std::filesystem;

namespace {

const PayoffMatrix kExample{3.0, -7.0, 5.0, 2.0};
int g_failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Bound audit shared by every trajectory this suite produces.
struct BoundAudit {
    std::size_t states = 0;
    std::size_t violations = 0;
    void check(std::span<const double> x) {
        ++states;
        for (double v : x)
            if (!(v >= 0.0 && v <= 1.0)) ++violations;
    }
    void check(const Trajectory& t) {
        for (const auto& s : t.states) check(s);
    }
} g_bounds;

std::vector<double> random_state(Rng& rng, std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) v = uniform01(rng);
    return x;
}

std::vector<std::vector<int>> dense(const Graph& g) {
    std::vector<std::vector<int>> adj(g.size(), std::vector<int>(g.size(), 0));
    for (auto [i, j] : g.edges()) adj[i][j] = adj[j][i] = 1;
    return adj;
}

oracle::Mat2 mat(const PayoffMatrix& m) { return {{{m.a, m.b}, {m.c, m.d}}}; }

bool connected(const Graph& g) {
    if (g.size() == 0) return true;
    std::vector<bool> seen(g.size(), false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const NodeId i = stack.back();
        stack.pop_back();
        for (NodeId j : g.neighbors(i))
            if (!seen[j]) {
                seen[j] = true;
                ++count;
                stack.push_back(j);
            }
    }
    return count == g.size();
}

double max_dist(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

void complete_graph_convergence() {
    RunConfig cfg;
    cfg.epsilon = 0.01;
    cfg.tol = 1e-8;
    cfg.record_every = 1;
    double worst = 0.0;
    std::size_t runs = 0, unconverged = 0;
    for (std::size_t n : {3u, 10u, 25u}) {
        const Graph g = complete_graph(n);
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            Rng rng(seed * 1000 + n);
            const auto x0 = random_state(rng, n);
            const double lo = *std::min_element(x0.begin(), x0.end());
            const auto t = integrate(g, kExample, StrategyState{x0, 0.0}, cfg);
            g_bounds.check(t);
            unconverged += !t.converged;
            for (double v : t.final_state()) worst = std::max(worst, std::abs(v - lo));
            ++runs;
        }
    }
    report(1, "complete-graph convergence to min(x0)", worst <= 1e-3 && unconverged == 0,
           std::to_string(runs) + " runs on K_3/K_10/K_25, worst max|x - min(x0)| = " + sci(worst) +
               " (limit 1e-3), unconverged " + std::to_string(unconverged));
}

void kappa_normalisation() {
    Rng rng(2024);
    std::size_t rows = 0, zero_rows = 0, bad = 0, oracle_mismatch = 0;
    double worst = 0.0;
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 29);
        const double p = uniform(rng, 0.05, 0.9);
        const Graph g = random_graph(n, p, 7000 + inst);
        auto x = random_state(rng, n);
        // every third instance uses a coarse grid so payoff ties occur
        if (inst % 3 == 0)
            for (auto& v : x) v = std::round(v * 4.0) / 4.0;
        const auto pay = payoffs(g, kExample, x);
        const auto adj = dense(g);
        const auto opay = oracle::payoffs(adj, mat(kExample), x);
        for (NodeId i = 0; i < n; ++i) {
            const auto row = kappa_row(g, pay, i);
            const auto orow = oracle::kappa(adj, opay, i);
            double sum = 0.0;
            for (const auto& e : row) {
                if (!(e.weight >= 0.0)) ++bad;
                sum += e.weight;
                if (std::abs(e.weight - orow[e.neighbor]) > 1e-12) ++oracle_mismatch;
            }
            ++rows;
            if (sum == 0.0) ++zero_rows;
            else {
                worst = std::max(worst, std::abs(sum - 1.0));
                if (std::abs(sum - 1.0) > 1e-12) ++bad;
            }
        }
    }
    report(2, "kappa rows sum to 1 or are exactly 0", bad == 0 && oracle_mismatch == 0,
           std::to_string(rows) + " rows over 1000 instances (" + std::to_string(zero_rows) +
               " zero rows), worst |sum - 1| = " + sci(worst) + " (limit 1e-12), violations " +
               std::to_string(bad) + ", oracle mismatches " + std::to_string(oracle_mismatch));
}

void jacobian_structure() {
    Rng rng(31);
    double worst_lap = 0.0, worst_rowsum = 0.0;
    std::size_t bad_disks = 0, no_zero_row = 0, checked = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t n = 5 + static_cast<std::size_t>(uniform01(rng) * 36);
        const Graph g = random_graph(n, uniform(rng, 0.1, 0.6), 9100 + inst);
        const std::vector<double> x(n, uniform01(rng));
        const auto rep = jacobian_type1(g, kExample, x, {});
        const auto lap = laplacian(imitation_graph(g, kExample, x));
        for (std::size_t k = 0; k < lap.data.size(); ++k)
            worst_lap = std::max(worst_lap, std::abs(rep.jacobian.data[k] + lap.data[k]));
        for (std::size_t r = 0; r < n; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += rep.jacobian(r, c);
            worst_rowsum = std::max(worst_rowsum, std::abs(s));
        }
        for (const auto& d : rep.disks) {
            const bool unit = d.center == -1.0 && d.radius <= 1.0 + 1e-12;
            const bool point = d.center == 0.0 && d.radius == 0.0;
            if (!unit && !point) ++bad_disks;
        }
        no_zero_row += rep.zero_rows.empty();
        ++checked;
    }
    const bool ok = worst_lap <= 1e-12 && worst_rowsum <= 1e-12 && bad_disks == 0 && no_zero_row == 0;
    report(3, "Type 1 Jacobian is the negative imitation Laplacian", ok,
           std::to_string(checked) + " graphs, max|J + L| = " + sci(worst_lap) + ", max|J 1| = " +
               sci(worst_rowsum) + " (limit 1e-12), bad disks " + std::to_string(bad_disks) +
               ", graphs without a zero row " + std::to_string(no_zero_row));
}

void perturbation_experiment() {
    const Graph g = random_graph(10, 0.4, 4);
    const std::vector<double> xs(10, 0.795);
    RunConfig cfg;
    const auto ig = imitation_graph(g, kExample, xs);
    const auto out = ig.out_degree();
    const auto sinks = ig.sinks();

    std::vector<double> delta(10, 0.0);
    const double pattern[] = {-0.005, 0.005, -0.003, 0.002, -0.004};
    std::size_t k = 0;
    for (NodeId i = 0; i < 10; ++i)
        if (out[i] > 0) delta[i] = pattern[k++ % 5];
    const auto back = perturb_and_run(g, kExample, xs, delta, cfg);
    g_bounds.check(back.trajectory);
    const bool returns = back.final_class.kind == EquilibriumKind::Type1 && back.distance <= 1e-3;

    std::string sink_detail;
    bool all_move = true, type3 = false;
    for (NodeId s : sinks) {
        std::vector<double> d(10, 0.0);
        d[s] = -0.005;
        const auto r = perturb_and_run(g, kExample, xs, d, cfg);
        g_bounds.check(r.trajectory);
        all_move = all_move && r.distance > 1e-3;
        if (s == 3) type3 = r.final_class.kind == EquilibriumKind::Type3;
        sink_detail += " sink " + std::to_string(s) + " -> " + to_string(r.final_class.kind) + " at " +
                       sci(r.distance) + ";";
    }
    const bool shape = connected(g) && sinks.size() >= 2 &&
                       std::find(sinks.begin(), sinks.end(), NodeId{3}) != sinks.end();
    report(4, "perturbation away from x* = 0.795", shape && returns && type3 && all_move,
           "G(10, 0.4, seed 4), " + std::to_string(sinks.size()) + " locally-best nodes; non-sink push -> " +
               to_string(back.final_class.kind) + " at distance " + sci(back.distance) + " (limit 1e-3);" +
               sink_detail);
}

void bound_sweep() {
    // extra dedicated runs on top of every trajectory the other criteria produced
    Rng rng(55);
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 40);
        const Graph g = random_graph(n, uniform(rng, 0.05, 0.8), 12000 + inst);
        RunConfig cfg;
        cfg.record_every = 1;
        cfg.max_steps = 5000;
        cfg.epsilon = inst % 4 == 0 ? 1.0 : uniform(rng, 0.001, 0.5);
        cfg.integrator = inst % 5 == 0 ? Integrator::Rk4 : Integrator::Euler;
        const PayoffMatrix m = inst % 2 ? kExample : PayoffMatrix{0.375, -0.875, 0.625, 0.25};
        try {
            g_bounds.check(integrate(g, m, StrategyState{random_state(rng, n), 0.0}, cfg));
        } catch (const std::logic_error&) {
            ++g_bounds.violations;  // integrate's own bound assertion fired
        }
    }
    report(5, "states never leave [0,1]", g_bounds.violations == 0,
           std::to_string(g_bounds.states) + " states audited across all runs, " +
               std::to_string(g_bounds.violations) + " violations");
}

void binning_oracle() {
    const double spreads[] = {1.0 / 64, 1.0 / 32, 3.0 / 64, 1.0 / 16, 5.0 / 64,
                              3.0 / 32, 1.0 / 8,  3.0 / 16, 1.0 / 4,  0.1};
    std::size_t points = 0, mismatches = 0, edges = 0;
    for (double s : spreads)
        for (int i = 4; i <= 28; ++i)
            for (int j = 12; j <= 51; ++j) {
                const double y0 = i / 32.0, y = j / 64.0;
                const double q = std::abs(y - y0) / s;
                if (q > 0.0 && q == std::floor(q) && q <= 3.0) ++edges;
                if (assign_bin(y0, y, s) != oracle::band(y0, y, s)) ++mismatches;
                ++points;
            }
    report(6, "assign_bin matches band-membership oracle", mismatches == 0 && points == 10000 && edges > 0,
           std::to_string(points) + " grid points, " + std::to_string(edges) + " on band edges, " +
               std::to_string(mismatches) + " mismatches");
}

void confusion_row() {
    std::vector<int> t, p;
    const int row[] = {7, 14, 319, 42, 0};
    for (int c = 0; c < kBinCount; ++c)
        for (int k = 0; k < row[c]; ++k) {
            t.push_back(0);
            p.push_back(c - kMaxBin);
        }
    const auto conf = confusion(t, p);
    const double expect[] = {0.018325, 0.036649, 0.83508, 0.10995, 0.0};
    double worst = 0.0;
    for (int c = 0; c < kBinCount; ++c) worst = std::max(worst, std::abs(conf.prob[kMaxBin][c] - expect[c]));
    report(7, "confusion row (7,14,319,42,0) normalisation", worst <= 5e-6,
           "max deviation " + sci(worst) + " (limit 5e-6)");
}

void fitting_self_consistency() {
    const PayoffMatrix truth{0.375, -0.875, 0.625, 0.25};
    RunConfig cfg;
    std::string detail;
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Graph g = random_graph(50, 0.1, seed);
        const auto panel = generate_synthetic_panel(g, truth, {}, 0.0, seed, cfg);
        const auto t0 = std::chrono::steady_clock::now();
        const auto fit = fit_payoff(g, panel, cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        g_bounds.check(fit.evaluation.prediction.yhat);
        const bool pass = fit.evaluation.objective == 0.0 && secs <= 300.0 && is_strict_pd(fit.matrix);
        ok = ok && pass;
        char buf[160];
        std::snprintf(buf, sizeof buf, " seed %llu: objective %g, %zu evals, %.1f s;",
                      static_cast<unsigned long long>(seed), fit.evaluation.objective, fit.evaluations, secs);
        detail += buf;
    }
    report(8, "fit recovers a noiseless synthetic panel", ok,
           "G(50, 0.1), truth (0.375,-0.875,0.625,0.25), limit objective 0 in 300 s;" + detail);
}

void specialised_step() {
    Rng rng(99);
    double worst = 0.0;
    std::size_t states = 0;
    while (states < 1000) {
        const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 29);
        const Graph g = complete_graph(n);
        const auto x = random_state(rng, n);
        auto pay = payoffs(g, kExample, x);
        std::sort(pay.begin(), pay.end());
        if (std::adjacent_find(pay.begin(), pay.end()) != pay.end()) continue;
        const double eps = uniform(rng, 0.001, 1.0);
        const auto a = step(g, kExample, StrategyState{x, 0.0}, eps);
        const auto b = complete_graph_step(g, kExample, StrategyState{x, 0.0}, eps);
        g_bounds.check(a.x);
        worst = std::max(worst, max_dist(a.x, b.x));
        ++states;
    }
    report(9, "general step equals the complete-graph rule", worst <= 1e-12,
           std::to_string(states) + " states, max difference " + sci(worst) + " (limit 1e-12)");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(PDNET_CLI) + " " + args + " >" + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Manifests may differ only in timestamps and the output directory.
nlohmann::json manifest_core(const fs::path& p) {
    auto j = nlohmann::json::parse(slurp(p));
    j.erase("started_utc");
    j.erase("finished_utc");
    j["config"].erase("out");
    return j;
}

void cli_determinism() {
    const fs::path dir = fs::temp_directory_path() / ("pdnet_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto d = [&](const char* name) { return (dir / name).string(); };
    const fs::path log = dir / "log.txt";
    bool ok = true;
    std::string detail;

    ok &= run("graph --kind random --nodes 30 --p 0.2 --seed 11 --out " + d("g"), log) == 0;
    const std::string graph = d("g") + "/graph.txt";
    ok &= run("generate --graph " + graph + " --payoff 0.375,-0.875,0.625,0.25 --seed 3 --out " + d("gen1"), log) == 0;
    ok &= run("simulate --graph " + graph + " --init uniform:5 --record-every 10 --out " + d("sim1"), log) == 0;
    ok &= run("analyze --graph " + graph + " --state " + d("sim1") + "/final_state.csv --out " + d("ana1"), log) == 0;
    ok &= run("fit --graph " + graph + " --panel " + d("gen1") + "/panel.csv --max-evaluations 300 --out " + d("fit1"),
              log) != 1;
    if (!ok) detail = "a first run failed: " + slurp(log) + "; ";

    struct Pair {
        const char* first;
        const char* second;
        const char* command;
        std::vector<const char*> files;
    };
    const std::vector<Pair> pairs{
        {"gen1", "gen2", "generate", {"panel.csv"}},
        {"sim1", "sim2", "simulate", {"trajectory.csv", "final_state.csv", "run.json", "id_map.csv"}},
        {"ana1", "ana2", "analyze", {"classification.json", "imitation_graph.csv", "id_map.csv"}},
        {"fit1", "fit2", "fit", {"fit.json", "bins.csv"}},
    };
    std::size_t compared = 0;
    for (const auto& p : pairs) {
        const int rc = run(std::string(p.command) + " --config " + d(p.first) + "/manifest.json --out " + d(p.second), log);
        if (rc == 1 || rc == 2 || rc == 3) {
            ok = false;
            detail += std::string(p.command) + " replay exited " + std::to_string(rc) + "; ";
            continue;
        }
        for (const char* f : p.files) {
            const auto a = slurp(fs::path(d(p.first)) / f);
            const auto b = slurp(fs::path(d(p.second)) / f);
            ++compared;
            if (a.empty() || a != b) {
                ok = false;
                detail += std::string(p.first) + "/" + f + " differs; ";
            }
        }
        if (manifest_core(fs::path(d(p.first)) / "manifest.json") !=
            manifest_core(fs::path(d(p.second)) / "manifest.json")) {
            ok = false;
            detail += std::string(p.command) + " manifests differ beyond timestamps; ";
        }
    }
    report(10, "CLI replay from manifest is byte-identical", ok,
           detail + std::to_string(compared) + " output files compared across simulate/analyze/fit/generate");
    if (ok) fs::remove_all(dir);
}

}  // namespace

int main() {
    complete_graph_convergence();
    kappa_normalisation();
    jacobian_structure();
    perturbation_experiment();
    binning_oracle();
    confusion_row();
    fitting_self_consistency();
    specialised_step();
    bound_sweep();
    cli_determinism();
    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
