#include "commands.hpp"

#include "manifest.hpp"
#include "pdnet/csv.hpp"
#include "pdnet/equilibrium.hpp"
#include "pdnet/format.hpp"
#include "pdnet/random.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;

namespace pdcli {

using pdnet::fmt_real;
using pdnet::LabeledGraph;
using pdnet::NodeId;
using ojson = nlohmann::ordered_json;

namespace {

std::string absolute(const std::string& path) {
    return path.empty() ? path : fs::absolute(path).lexically_normal().string();
}

bool is_file_source(const std::string& init) {
    return init.rfind("constant:", 0) != 0 && init != "uniform" && init.rfind("uniform:", 0) != 0;
}

// Input paths are pinned to absolute form so the manifest replays from anywhere.
void pin_paths(Settings& s) {
    s.graph = absolute(s.graph);
    s.state = absolute(s.state);
    s.panel = absolute(s.panel);
    if (is_file_source(s.init)) s.init = absolute(s.init);
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw ConfigError(std::string(flag) + " is required");
}

void require_file(const std::string& path) {
    if (!fs::is_regular_file(path)) throw ConfigError("no such file: '" + path + "'");
}

class OutDir {
public:
    OutDir(const std::string& dir, Manifest& man) : dir_(dir), man_(man) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw ConfigError("cannot create output directory '" + dir + "'");
    }
    std::ofstream open(const std::string& name) {
        std::ofstream out(dir_ / name);
        if (!out) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
        man_.add_output(name);
        return out;
    }
    std::string path() const { return dir_.string(); }

private:
    fs::path dir_;
    Manifest& man_;
};

LabeledGraph load_graph(const Settings& s) {
    require(s.graph, "--graph");
    require_file(s.graph);
    return pdnet::load_edge_list_file(s.graph);
}

std::string list_ids(const std::vector<std::string>& ids) {
    std::string out;
    const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
    for (std::size_t k = 0; k < shown; ++k) out += (k ? ", " : "") + ids[k];
    if (ids.size() > shown) out += ", ... (" + std::to_string(ids.size()) + " total)";
    return out;
}

/// `node,<column>` CSV giving one value per graph node.
std::vector<double> read_node_values(const std::string& path, const LabeledGraph& lg,
                                     const std::string& column) {
    require_file(path);
    std::ifstream in(path);
    std::vector<double> x(lg.graph.size(), 0.0);
    std::vector<bool> seen(lg.graph.size(), false);
    std::vector<std::string> unknown;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto f = pdnet::csv::split(line);
        if (f.size() == 1 && f[0].empty()) continue;
        if (!header) {
            if (f != std::vector<std::string>{"node", column})
                throw pdnet::ParseError(lineno, "expected header 'node," + column + "'");
            header = true;
            continue;
        }
        if (f.size() != 2) throw pdnet::ParseError(lineno, "expected 2 fields");
        double v = 0.0;
        try {
            v = pdnet::csv::to_double(f[1]);
        } catch (const std::invalid_argument& e) {
            throw pdnet::ParseError(lineno, e.what());
        }
        if (!(v >= 0.0 && v <= 1.0)) throw pdnet::ParseError(lineno, "value outside [0,1]");
        const NodeId i = lg.index_of(f[0]);
        if (i == lg.graph.size()) {
            unknown.push_back(f[0]);
            continue;
        }
        if (seen[i]) throw pdnet::ParseError(lineno, "duplicate node '" + f[0] + "'");
        seen[i] = true;
        x[i] = v;
    }
    if (!header) throw pdnet::ParseError(lineno, "missing header 'node," + column + "'");
    if (!unknown.empty()) throw InputError(path + ": nodes not in graph: " + list_ids(unknown));
    std::vector<std::string> missing;
    for (NodeId i = 0; i < lg.graph.size(); ++i)
        if (!seen[i]) missing.push_back(lg.ids[i]);
    if (!missing.empty()) throw InputError(path + ": graph nodes without a value: " + list_ids(missing));
    return x;
}

std::vector<double> initial_state(const Settings& s, const LabeledGraph& lg) {
    const std::size_t n = lg.graph.size();
    if (s.init.rfind("constant:", 0) == 0) {
        double v = 0.0;
        try {
            v = pdnet::csv::to_double(s.init.substr(9));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("--init: ") + e.what());
        }
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("--init constant must lie in [0,1]");
        return std::vector<double>(n, v);
    }
    if (s.init == "uniform" || s.init.rfind("uniform:", 0) == 0) {
        std::uint64_t seed = s.seed;
        if (s.init != "uniform") {
            try {
                std::size_t used = 0;
                seed = std::stoull(s.init.substr(8), &used);
                if (used != s.init.size() - 8) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw ConfigError("--init uniform:<seed> needs an integer seed");
            }
        }
        pdnet::Rng rng(seed);
        std::vector<double> x(n);
        for (auto& v : x) v = pdnet::uniform01(rng);
        return x;
    }
    return read_node_values(s.init, lg, "x");
}

void write_node_values(std::ostream& out, const LabeledGraph& lg, const std::vector<double>& x,
                       const std::string& column) {
    out << "node," << column << '\n';
    for (NodeId i = 0; i < x.size(); ++i) out << lg.ids[i] << ',' << fmt_real(x[i]) << '\n';
}

ojson matrix_json(const pdnet::PayoffMatrix& m) {
    return ojson{{"a", m.a}, {"b", m.b}, {"c", m.c}, {"d", m.d}, {"strict_pd", pdnet::is_strict_pd(m)}};
}

ojson bin_matrix_json(const pdnet::BinMatrix& b) {
    ojson rows = ojson::array();
    for (const auto& r : b) rows.push_back(r);
    return rows;
}

void dump(std::ostream& out, const ojson& j) { out << j.dump(2) << '\n'; }

}  // namespace

int cmd_simulate(Settings s) {
    pin_paths(s);
    const auto cfg = s.run_config();
    const auto lg = load_graph(s);
    Manifest man("simulate", s);
    man.add_input("graph", s.graph);
    if (is_file_source(s.init)) man.add_input("init", s.init);
    const auto x0 = initial_state(s, lg);
    const auto m = s.matrix();

    const auto traj = pdnet::integrate(lg.graph, m, pdnet::StrategyState{x0, 0.0}, cfg);
    const auto cls = pdnet::classify(lg.graph, m, traj.final_state(), pdnet::tolerances_for_run(cfg));

    OutDir out(s.out, man);
    {
        auto f = out.open("trajectory.csv");
        pdnet::write_trajectory_csv(f, traj, lg.ids);
    }
    {
        auto f = out.open("final_state.csv");
        write_node_values(f, lg, traj.final_state(), "x");
    }
    {
        auto f = out.open("id_map.csv");
        pdnet::write_id_map(f, lg);
    }
    const char* rule = traj.converged ? "max_abs_drift<=tol"
                       : traj.cycle_period > 0 ? "state-recurrence"
                                               : "max_steps";
    ojson run;
    run["converged"] = traj.converged;
    run["stopping_rule"] = rule;
    run["steps"] = traj.steps_taken;
    run["final_time"] = traj.times.back();
    run["final_residual"] = traj.final_residual;
    run["cycle_period"] = traj.cycle_period > 0 ? ojson(traj.cycle_period) : ojson(nullptr);
    run["records"] = traj.states.size();
    run["nodes"] = lg.graph.size();
    run["edges"] = lg.graph.edge_count();
    run["payoff"] = matrix_json(m);
    run["integrator"] = pdnet::to_string(cfg.integrator);
    run["epsilon"] = cfg.epsilon;
    run["tol"] = cfg.tol;
    run["max_steps"] = cfg.max_steps;
    run["record_every"] = cfg.record_every;
    run["final_class"] = pdnet::to_string(cls.kind);
    {
        auto f = out.open("run.json");
        dump(f, run);
    }

    const int code = traj.converged ? 0 : 4;
    if (code)
        std::cerr << "warning: not converged after " << traj.steps_taken << " steps (" << rule
                  << ", residual " << fmt_real(traj.final_residual) << ")\n";
    std::cout << (traj.converged ? "converged" : "not converged") << " after " << traj.steps_taken
              << " steps; final state " << pdnet::to_string(cls.kind) << '\n';
    man.write(out.path(), code);
    return code;
}

int cmd_analyze(Settings s) {
    pin_paths(s);
    const auto cfg = s.run_config();
    const auto lg = load_graph(s);
    require(s.state, "--state");
    Manifest man("analyze", s);
    man.add_input("graph", s.graph);
    man.add_input("state", s.state);
    const auto x = read_node_values(s.state, lg, "x");
    const auto m = s.matrix();
    const auto tol = pdnet::tolerances_for_run(cfg);

    const auto cls = pdnet::classify(lg.graph, m, x, tol);
    const auto ig = pdnet::imitation_graph(lg.graph, m, x);

    OutDir out(s.out, man);
    ojson c;
    c["kind"] = pdnet::to_string(cls.kind);
    c["degenerate"] = cls.degenerate;
    c["max_drift"] = cls.max_drift;
    c["most_active"] = cls.most_active ? ojson(lg.ids[*cls.most_active]) : ojson(nullptr);
    c["strategy_spread"] = cls.strategy_spread;
    c["payoff_spread"] = cls.payoff_spread;
    c["unequal_pair"] = cls.unequal_pair
                            ? ojson::array({lg.ids[cls.unequal_pair->first], lg.ids[cls.unequal_pair->second]})
                            : ojson(nullptr);
    c["tolerances"] = {{"strategy", tol.strategy}, {"payoff", tol.payoff}};
    c["payoff"] = matrix_json(m);
    c["imitation_edges"] = ig.edges.size();
    ojson sinks = ojson::array();
    for (NodeId i : ig.sinks()) sinks.push_back(lg.ids[i]);
    c["locally_best"] = sinks;
    {
        auto f = out.open("classification.json");
        dump(f, c);
    }
    {
        auto f = out.open("imitation_graph.csv");
        pdnet::write_imitation_csv(f, ig, lg.ids);
    }
    {
        auto f = out.open("id_map.csv");
        pdnet::write_id_map(f, lg);
    }
    if (cls.kind == pdnet::EquilibriumKind::Type1) {
        const auto rep = pdnet::jacobian_type1(lg.graph, m, x, tol);
        ojson st;
        st["verdict"] = pdnet::to_string(rep.verdict);
        ojson zero = ojson::array();
        for (NodeId i : rep.zero_rows) zero.push_back(lg.ids[i]);
        st["zero_rows"] = zero;
        ojson disks = ojson::array();
        for (NodeId i = 0; i < rep.disks.size(); ++i)
            disks.push_back({{"node", lg.ids[i]}, {"center", rep.disks[i].center}, {"radius", rep.disks[i].radius}});
        st["disks"] = disks;
        ojson rows = ojson::array();
        for (std::size_t r = 0; r < rep.jacobian.n; ++r) {
            ojson row = ojson::array();
            for (std::size_t q = 0; q < rep.jacobian.n; ++q) row.push_back(rep.jacobian(r, q));
            rows.push_back(row);
        }
        st["jacobian"] = rows;
        auto f = out.open("stability.json");
        dump(f, st);
    }
    std::cout << pdnet::to_string(cls.kind) << (cls.degenerate ? " (degenerate)" : "") << "; "
              << ig.edges.size() << " imitation edges\n";
    man.write(out.path(), 0);
    return 0;
}

int cmd_fit(Settings s) {
    pin_paths(s);
    const auto cfg = s.run_config();
    const auto opt = s.fit_options();
    const auto lg = load_graph(s);
    require(s.panel, "--panel");
    require_file(s.panel);
    Manifest man("fit", s);
    man.add_input("graph", s.graph);
    man.add_input("panel", s.panel);

    pdnet::ScorePanel panel;
    {
        std::ifstream in(s.panel);
        panel = pdnet::read_panel_csv(in);
    }
    if (panel.size() == 0) throw InputError(s.panel + ": panel has no nodes");

    // Panel nodes must be graph nodes; a proper subset fits on the induced subgraph.
    std::vector<NodeId> keep;
    std::vector<std::string> unknown;
    std::map<std::string, int> count;
    for (const auto& id : panel.ids) {
        if (++count[id] == 2) throw InputError(s.panel + ": duplicate node '" + id + "'");
        const NodeId i = lg.index_of(id);
        if (i == lg.graph.size()) unknown.push_back(id);
        else keep.push_back(i);
    }
    if (!unknown.empty()) throw InputError(s.panel + ": panel nodes not in graph: " + list_ids(unknown));
    const pdnet::Graph g = lg.graph.induced(keep);
    if (keep.size() < lg.graph.size())
        std::cerr << "note: panel covers " << keep.size() << " of " << lg.graph.size()
                  << " graph nodes; fitting on the induced subgraph\n";

    pdnet::FitResult fit;
    if (s.freeze_matrix) {
        fit.matrix = s.matrix();
        fit.evaluation = pdnet::evaluate(g, fit.matrix, panel, cfg);
        fit.evaluations = 1;
    } else {
        fit = pdnet::fit_payoff(g, panel, cfg, opt);
    }
    const auto& ev = fit.evaluation;
    const auto& rep = ev.report;

    OutDir out(s.out, man);
    ojson j;
    j["mode"] = s.freeze_matrix ? "frozen" : "fit";
    j["matrix"] = matrix_json(fit.matrix);
    j["objective"] = ev.objective;
    j["s"] = rep.s;
    j["sd_convention"] = "population";
    j["deviance_mapping"] = "x = 1 - d";
    j["bins"] = {-2, -1, 0, 1, 2};
    j["confusion"] = {{"counts", bin_matrix_json(rep.table.counts)}, {"prob", bin_matrix_json(rep.table.prob)}};
    j["prediction_converged"] = ev.prediction.converged;
    j["evaluations"] = fit.evaluations;
    j["starts_used"] = fit.starts_used;
    j["budget_exhausted"] = fit.budget_exhausted;
    j["panel_nodes"] = panel.size();
    j["graph_nodes"] = lg.graph.size();
    j["seed"] = s.seed;
    {
        auto f = out.open("fit.json");
        dump(f, j);
    }
    {
        auto f = out.open("bins.csv");
        f << "node,y0,y1,yhat,bin_true,bin_pred\n";
        for (std::size_t k = 0; k < panel.size(); ++k)
            f << panel.ids[k] << ',' << fmt_real(panel.y0[k]) << ',' << fmt_real(panel.y1[k]) << ','
              << fmt_real(ev.prediction.yhat[k]) << ',' << rep.bins_true[k] << ',' << rep.bins_pred[k] << '\n';
    }

    std::cout << "objective " << fmt_real(ev.objective) << "  (a,b,c,d) = (" << fmt_real(fit.matrix.a) << ", "
              << fmt_real(fit.matrix.b) << ", " << fmt_real(fit.matrix.c) << ", " << fmt_real(fit.matrix.d)
              << ")\n";
    std::cout << "true\\pred      -2      -1       0      +1      +2\n";
    static const char* const kRowLabel[] = {"-2", "-1", " 0", "+1", "+2"};
    for (int r = 0; r < pdnet::kBinCount; ++r) {
        char line[128];
        std::cout << ' ' << kRowLabel[r] << "      ";
        for (int q = 0; q < pdnet::kBinCount; ++q) {
            std::snprintf(line, sizeof line, " %7.0f", rep.table.counts[r][q]);
            std::cout << line;
        }
        std::cout << "   |";
        for (int q = 0; q < pdnet::kBinCount; ++q) {
            std::snprintf(line, sizeof line, " %.5f", rep.table.prob[r][q]);
            std::cout << line;
        }
        std::cout << '\n';
    }

    int code = 0;
    if (fit.budget_exhausted) {
        std::cerr << "warning: evaluation budget exhausted; reporting the best matrix found\n";
        code = 4;
    }
    if (!ev.prediction.converged) {
        std::cerr << "warning: dynamics did not converge for the reported matrix\n";
        code = 4;
    }
    man.write(out.path(), code);
    return code;
}

int cmd_generate(Settings s) {
    pin_paths(s);
    const auto cfg = s.run_config();
    const auto dist = s.distribution();
    const auto lg = load_graph(s);
    Manifest man("generate", s);
    man.add_input("graph", s.graph);
    auto panel = pdnet::generate_synthetic_panel(lg.graph, s.matrix(), dist, s.noise, s.seed, cfg);
    panel.ids = lg.ids;
    OutDir out(s.out, man);
    {
        auto f = out.open("panel.csv");
        pdnet::write_panel_csv(f, panel);
    }
    std::cout << "wrote " << panel.size() << " nodes\n";
    man.write(out.path(), 0);
    return 0;
}

int cmd_graph(Settings s) {
    pdnet::Graph g;
    try {
        if (s.kind == "complete") g = pdnet::complete_graph(s.nodes);
        else if (s.kind == "random") g = pdnet::random_graph(s.nodes, s.p, s.seed);
        else throw ConfigError("unknown graph kind '" + s.kind + "' (complete or random)");
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    Manifest man("graph", s);
    OutDir out(s.out, man);
    const auto lg = pdnet::with_index_labels(g);
    {
        auto f = out.open("graph.txt");
        pdnet::write_edge_list(f, lg);
    }
    std::size_t isolated = 0;
    for (NodeId i = 0; i < g.size(); ++i) isolated += g.degree(i) == 0;
    if (isolated)
        std::cerr << "warning: " << isolated << " isolated node(s) cannot be expressed in an edge list and are dropped\n";
    std::cout << g.size() << " nodes, " << g.edge_count() << " edges\n";
    man.write(out.path(), 0);
    return 0;
}

}  // namespace pdcli
