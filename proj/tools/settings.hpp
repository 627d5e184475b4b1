#pragma once

#include "pdnet/dynamics.hpp"
#include "pdnet/fitting.hpp"
#include "pdnet/game.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace pdcli {

/// Bad flag values, unreadable config files, missing inputs. Exit code 3.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input files that parse but do not fit together (unknown node ids and the
/// like). Exit code 2, same as a parse error.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a run can be configured with. The JSON form is what goes into
/// the manifest, so a manifest replays the run.
struct Settings {
    std::string graph;
    std::string init = "uniform";
    std::string state;
    std::string panel;
    std::string out = ".";
    std::array<double, 4> payoff{3.0, -7.0, 5.0, 2.0};
    double epsilon = 0.01;
    double tol = 1e-8;
    std::size_t max_steps = 1000000;
    std::size_t record_every = 100;
    std::string integrator = "euler";
    std::uint64_t seed = 0;
    bool freeze_matrix = false;
    bool strict_pd = true;
    std::size_t starts = 16;
    std::size_t max_evaluations = 6000;
    // graph generation
    std::string kind = "random";
    std::size_t nodes = 10;
    double p = 0.4;
    // synthetic panels
    std::string dist = "uniform:0,1";
    double noise = 0.0;

    pdnet::PayoffMatrix matrix() const { return {payoff[0], payoff[1], payoff[2], payoff[3]}; }
    pdnet::RunConfig run_config() const;
    pdnet::FitOptions fit_options() const;
    pdnet::ScoreDistribution distribution() const;
};

nlohmann::ordered_json to_json(const Settings& s);

/// Overlays the keys present in `j` onto `s`. A manifest is accepted as well:
/// its "config" object is used. Unknown keys are a ConfigError.
void apply_json(Settings& s, const nlohmann::json& j);

std::array<double, 4> parse_payoff(const std::string& text);

}  // namespace pdcli
