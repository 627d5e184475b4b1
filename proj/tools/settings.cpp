#include "settings.hpp"

#include "pdnet/csv.hpp"

namespace pdcli {

using nlohmann::json;

pdnet::RunConfig Settings::run_config() const {
    pdnet::RunConfig cfg;
    cfg.epsilon = epsilon;
    cfg.tol = tol;
    cfg.max_steps = max_steps;
    cfg.record_every = record_every;
    auto kind = pdnet::parse_integrator(integrator);
    if (!kind) throw ConfigError("unknown integrator '" + integrator + "'");
    cfg.integrator = *kind;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

pdnet::FitOptions Settings::fit_options() const {
    pdnet::FitOptions opt;
    if (starts == 0) throw ConfigError("starts must be at least 1");
    if (max_evaluations == 0) throw ConfigError("max_evaluations must be at least 1");
    opt.starts = starts;
    opt.max_evaluations = max_evaluations;
    opt.strict_pd = strict_pd;
    opt.sequence_skip = seed;
    return opt;
}

pdnet::ScoreDistribution Settings::distribution() const {
    const auto colon = dist.find(':');
    const std::string name = dist.substr(0, colon);
    pdnet::ScoreDistribution d;
    if (name == "uniform") {
        d.kind = pdnet::ScoreDistribution::Kind::Uniform;
    } else if (name == "normal") {
        d.kind = pdnet::ScoreDistribution::Kind::TruncatedNormal;
        d.p1 = 0.5;
        d.p2 = 0.2;
    } else {
        throw ConfigError("unknown distribution '" + dist + "' (uniform:lo,hi or normal:mean,sd)");
    }
    if (colon != std::string::npos) {
        const auto parts = pdnet::csv::split(dist.substr(colon + 1));
        if (parts.size() != 2) throw ConfigError("distribution needs two parameters: " + dist);
        try {
            d.p1 = pdnet::csv::to_double(parts[0]);
            d.p2 = pdnet::csv::to_double(parts[1]);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("distribution: ") + e.what());
        }
    }
    if (d.kind == pdnet::ScoreDistribution::Kind::Uniform && !(0.0 <= d.p1 && d.p1 <= d.p2 && d.p2 <= 1.0))
        throw ConfigError("uniform bounds must satisfy 0 <= lo <= hi <= 1");
    if (d.kind == pdnet::ScoreDistribution::Kind::TruncatedNormal && !(d.p2 > 0.0 && d.p1 >= 0.0 && d.p1 <= 1.0))
        throw ConfigError("normal needs a mean in [0,1] and a positive sd");
    if (!(noise >= 0.0)) throw ConfigError("noise must be non-negative");
    return d;
}

std::array<double, 4> parse_payoff(const std::string& text) {
    const auto parts = pdnet::csv::split(text);
    if (parts.size() != 4) throw ConfigError("payoff needs four values a,b,c,d: '" + text + "'");
    std::array<double, 4> v{};
    try {
        for (std::size_t k = 0; k < 4; ++k) v[k] = pdnet::csv::to_double(parts[k]);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("payoff: ") + e.what());
    }
    return v;
}

nlohmann::ordered_json to_json(const Settings& s) {
    nlohmann::ordered_json j;
    j["graph"] = s.graph;
    j["init"] = s.init;
    j["state"] = s.state;
    j["panel"] = s.panel;
    j["out"] = s.out;
    j["payoff"] = s.payoff;
    j["epsilon"] = s.epsilon;
    j["tol"] = s.tol;
    j["max_steps"] = s.max_steps;
    j["record_every"] = s.record_every;
    j["integrator"] = s.integrator;
    j["seed"] = s.seed;
    j["freeze_matrix"] = s.freeze_matrix;
    j["strict_pd"] = s.strict_pd;
    j["starts"] = s.starts;
    j["max_evaluations"] = s.max_evaluations;
    j["kind"] = s.kind;
    j["nodes"] = s.nodes;
    j["p"] = s.p;
    j["dist"] = s.dist;
    j["noise"] = s.noise;
    return j;
}

namespace {

template <class T>
void take(const json& j, const char* key, T& into) {
    try {
        into = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

void apply_json(Settings& s, const json& in) {
    if (!in.is_object()) throw ConfigError("config must be a JSON object");
    const json& j = in.contains("config") && in.at("config").is_object() ? in.at("config") : in;
    for (const auto& [key, value] : j.items()) {
        if (key == "graph") take(j, "graph", s.graph);
        else if (key == "init") take(j, "init", s.init);
        else if (key == "state") take(j, "state", s.state);
        else if (key == "panel") take(j, "panel", s.panel);
        else if (key == "out") take(j, "out", s.out);
        else if (key == "payoff") {
            if (value.is_string()) s.payoff = parse_payoff(value.get<std::string>());
            else take(j, "payoff", s.payoff);
        }
        else if (key == "epsilon") take(j, "epsilon", s.epsilon);
        else if (key == "tol") take(j, "tol", s.tol);
        else if (key == "max_steps") take(j, "max_steps", s.max_steps);
        else if (key == "record_every") take(j, "record_every", s.record_every);
        else if (key == "integrator") take(j, "integrator", s.integrator);
        else if (key == "seed") take(j, "seed", s.seed);
        else if (key == "freeze_matrix") take(j, "freeze_matrix", s.freeze_matrix);
        else if (key == "strict_pd") take(j, "strict_pd", s.strict_pd);
        else if (key == "starts") take(j, "starts", s.starts);
        else if (key == "max_evaluations") take(j, "max_evaluations", s.max_evaluations);
        else if (key == "kind") take(j, "kind", s.kind);
        else if (key == "nodes") take(j, "nodes", s.nodes);
        else if (key == "p") take(j, "p", s.p);
        else if (key == "dist") take(j, "dist", s.dist);
        else if (key == "noise") take(j, "noise", s.noise);
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

}  // namespace pdcli
