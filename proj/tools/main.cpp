// pdnet: imitation dynamics of the prisoner's dilemma on graphs.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 malformed or inconsistent input
// files, 3 bad configuration (flags, config file, missing inputs),
// 4 finished without converging (outputs written, warning on stderr).

#include "commands.hpp"
#include "manifest.hpp"
#include "pdnet/graph.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>

using namespace pdcli;

namespace {

// Flag values land in a scratch Settings; only flags actually given are
// copied over the config-file values afterwards.
class Flags {
public:
    explicit Flags(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_, "JSON config or a manifest.json to replay")
            ->check(CLI::ExistingFile);
    }

    template <class T>
    void add(const std::string& name, T Settings::*field, const std::string& help) {
        auto* opt = app_->add_option(name, scratch_.*field, help);
        copies_.emplace_back(opt, [this, field](Settings& s) { s.*field = scratch_.*field; });
    }

    void payoff() {
        auto* opt = app_->add_option("--payoff", payoff_, "payoff entries a,b,c,d of [[a,b],[c,d]]");
        copies_.emplace_back(opt, [this](Settings& s) { s.payoff = parse_payoff(payoff_); });
    }

    void run() {
        add("--epsilon", &Settings::epsilon, "step size");
        add("--tol", &Settings::tol, "stop once max |f_i| <= tol");
        add("--max-steps", &Settings::max_steps, "step limit");
        add("--integrator", &Settings::integrator, "euler or rk4");
    }

    void fit_mode() {
        auto* frz = app_->add_flag("--freeze-matrix", freeze_, "evaluate --payoff only, no search");
        copies_.emplace_back(frz, [this](Settings& s) { s.freeze_matrix = freeze_; });
        auto* spd = app_->add_option("--strict-pd", strict_, "enforce c > a > d > 0 > b while searching")
                        ->check(CLI::IsMember({"on", "off"}));
        copies_.emplace_back(spd, [this](Settings& s) { s.strict_pd = strict_ == "on"; });
    }

    Settings resolve(const std::string& command) const {
        Settings s;
        if (!config_.empty()) {
            nlohmann::json j;
            std::ifstream in(config_);
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(config_ + ": " + e.what());
            }
            check_manifest_inputs(j, command);
            apply_json(s, j);
        }
        for (const auto& [opt, copy] : copies_)
            if (opt->count() > 0) copy(s);
        return s;
    }

private:
    CLI::App* app_;
    std::string config_;
    Settings scratch_;
    std::string payoff_;
    bool freeze_ = false;
    std::string strict_ = "on";
    std::vector<std::pair<CLI::Option*, std::function<void(Settings&)>>> copies_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Imitation dynamics of the prisoner's dilemma on graphs"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::map<std::string, std::unique_ptr<Flags>> flags;
    std::map<std::string, std::function<int(Settings)>> run;

    auto* sim = app.add_subcommand("simulate", "integrate the dynamics from an initial state");
    flags["simulate"] = std::make_unique<Flags>(sim);
    {
        auto& f = *flags["simulate"];
        f.add("--graph", &Settings::graph, "edge list file");
        f.payoff();
        f.add("--init", &Settings::init, "CSV file (node,x), constant:<v>, uniform or uniform:<seed>");
        f.run();
        f.add("--record-every", &Settings::record_every, "keep every k-th state in trajectory.csv");
        f.add("--seed", &Settings::seed, "seed for --init uniform");
        f.add("--out", &Settings::out, "output directory");
    }
    run["simulate"] = cmd_simulate;

    auto* ana = app.add_subcommand("analyze", "classify a state and report stability");
    flags["analyze"] = std::make_unique<Flags>(ana);
    {
        auto& f = *flags["analyze"];
        f.add("--graph", &Settings::graph, "edge list file");
        f.payoff();
        f.add("--state", &Settings::state, "CSV file (node,x)");
        f.add("--tol", &Settings::tol, "classification uses 100 * tol");
        f.add("--out", &Settings::out, "output directory");
    }
    run["analyze"] = cmd_analyze;

    auto* fit = app.add_subcommand("fit", "fit the payoff matrix to early/late scores");
    flags["fit"] = std::make_unique<Flags>(fit);
    {
        auto& f = *flags["fit"];
        f.add("--graph", &Settings::graph, "edge list file");
        f.add("--panel", &Settings::panel, "CSV file (node,y0,y1)");
        f.payoff();
        f.fit_mode();
        f.run();
        f.add("--starts", &Settings::starts, "multi-start points");
        f.add("--max-evaluations", &Settings::max_evaluations, "objective evaluation budget");
        f.add("--seed", &Settings::seed, "offset into the start sequence");
        f.add("--out", &Settings::out, "output directory");
    }
    run["fit"] = cmd_fit;

    auto* gen = app.add_subcommand("generate", "synthetic early/late score panel");
    flags["generate"] = std::make_unique<Flags>(gen);
    {
        auto& f = *flags["generate"];
        f.add("--graph", &Settings::graph, "edge list file");
        f.payoff();
        f.add("--dist", &Settings::dist, "uniform:lo,hi or normal:mean,sd");
        f.add("--noise", &Settings::noise, "sd of observation noise on late scores");
        f.run();
        f.add("--seed", &Settings::seed, "random seed");
        f.add("--out", &Settings::out, "output directory");
    }
    run["generate"] = cmd_generate;

    auto* gr = app.add_subcommand("graph", "write a complete or random graph as an edge list");
    flags["graph"] = std::make_unique<Flags>(gr);
    {
        auto& f = *flags["graph"];
        f.add("--kind", &Settings::kind, "complete or random");
        f.add("--nodes", &Settings::nodes, "node count");
        f.add("--p", &Settings::p, "edge probability");
        f.add("--seed", &Settings::seed, "random seed");
        f.add("--out", &Settings::out, "output directory");
    }
    run["graph"] = cmd_graph;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return run[name](flags[name]->resolve(name));
    } catch (const pdnet::ParseError& e) {
        std::cerr << "error: parse error, " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
