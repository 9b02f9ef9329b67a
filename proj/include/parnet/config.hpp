#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "parnet/experiments.hpp"
#include "parnet/hyperparams.hpp"
#include "parnet/topology.hpp"

namespace parnet {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Slack constants and tolerances of the verification suites.
struct CheckConstants {
    double tolerance = 1e-9; // relative slack allowed on exact inequalities
    double C_check = 10.0;   // slack factor on the grid approximation bound
    double c5 = 1.0;         // gradient-norm bound constant
    double c7 = 1.0;         // gradient-smoothness bound constant
    double c11 = 1.0, c12 = 1.0, c13 = 1.0; // covering bound constants
};

struct Config {
    Topology topo;
    ScheduleConstants constants;
    std::optional<double> L_n_override;
    DataSpec data;
    std::vector<int> n_grid{50, 100, 200, 400};
    int replicates = 10;
    int mc_points = 100000;
    std::uint64_t master_seed = 1;
    int threads = 0;
    CheckConstants checks;

    ConsistencyConfig consistency() const {
        ConsistencyConfig cfg;
        cfg.topo = topo;
        cfg.constants = constants;
        // the experiment always runs at desk scale; without an explicit
        // override it uses the desk-mode default inverse step size
        cfg.L_n_override = L_n_override.has_value() ? L_n_override : std::optional<double>(1e3);
        cfg.data = data;
        cfg.n_grid = n_grid;
        cfg.replicates = replicates;
        cfg.mc_points = mc_points;
        cfg.master_seed = master_seed;
        cfg.threads = threads;
        return cfg;
    }
};

namespace detail {

// nlohmann keeps the last duplicate silently; a parser callback tracking the
// key set per object turns duplicates into hard errors.
inline nlohmann::json parse_rejecting_duplicates(std::istream& in) {
    std::vector<std::set<std::string>> scopes;
    auto cb = [&scopes](int, nlohmann::json::parse_event_t event, nlohmann::json& parsed) {
        if (event == nlohmann::json::parse_event_t::object_start) {
            scopes.emplace_back();
        } else if (event == nlohmann::json::parse_event_t::object_end) {
            scopes.pop_back();
        } else if (event == nlohmann::json::parse_event_t::key) {
            if (!scopes.back().insert(parsed.get<std::string>()).second)
                throw ConfigError("config: duplicate key '" + parsed.get<std::string>() + "'");
        }
        return true;
    };
    return nlohmann::json::parse(in, cb);
}

inline void require_object(const nlohmann::json& j, const std::string& name) {
    if (!j.is_object()) throw ConfigError("config: block '" + name + "' must be an object");
}

inline void reject_unknown(const nlohmann::json& j, const std::string& block,
                           const std::set<std::string>& known) {
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw ConfigError("config: unknown key '" + block + "." + key + "'");
}

template <typename T>
T get_field(const nlohmann::json& j, const std::string& block, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: key '" + block + "." + key + "' has the wrong type");
    }
}

template <typename T>
T require_field(const nlohmann::json& j, const std::string& block, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("config: missing key '" + block + "." + key + "'");
    return get_field<T>(j, block, key, T{});
}

} // namespace detail

// Parses and fully validates a config document.  Topology and data blocks
// are required; everything else has defaults.  Unknown and duplicate keys
// are rejected, and every range violation names the offending key.
inline Config config_from_json(const nlohmann::json& j) {
    using detail::get_field;
    using detail::require_field;

    detail::require_object(j, "<root>");
    detail::reject_unknown(j, "<root>", {"topology", "constants", "data", "experiment", "checks"});
    if (!j.contains("topology")) throw ConfigError("config: missing block 'topology'");
    if (!j.contains("data")) throw ConfigError("config: missing block 'data'");

    Config cfg;

    const auto& jt = j.at("topology");
    detail::require_object(jt, "topology");
    detail::reject_unknown(jt, "topology", {"d", "L", "r", "K_n"});
    cfg.topo.d = require_field<int>(jt, "topology", "d");
    cfg.topo.L = get_field<int>(jt, "topology", "L", 2);
    cfg.topo.r = get_field<int>(jt, "topology", "r", 2 * cfg.topo.d);
    cfg.topo.K = get_field<int>(jt, "topology", "K_n", 512);
    if (cfg.topo.d < 1) throw ConfigError("config: topology.d must be >= 1");
    if (cfg.topo.L < 2) throw ConfigError("config: topology.L must be >= 2");
    if (cfg.topo.r < 2 * cfg.topo.d) throw ConfigError("config: topology.r must be >= 2*d");
    if (cfg.topo.K < 1) throw ConfigError("config: topology.K_n must be >= 1");

    if (j.contains("constants")) {
        const auto& jc = j.at("constants");
        detail::require_object(jc, "constants");
        detail::reject_unknown(jc, "constants", {"tau", "c1", "c2", "c3", "c4", "L_n", "kappa"});
        cfg.constants.tau = get_field<double>(jc, "constants", "tau", -1.0);
        cfg.constants.c1 = get_field<double>(jc, "constants", "c1", 1.0);
        cfg.constants.c2 = get_field<double>(jc, "constants", "c2", 0.1);
        cfg.constants.c3 = get_field<double>(jc, "constants", "c3", 1.0);
        cfg.constants.c4 = get_field<double>(jc, "constants", "c4", 1.0);
        if (jc.contains("L_n")) cfg.L_n_override = require_field<double>(jc, "constants", "L_n");
        if (jc.contains("kappa")) cfg.constants.kappa = require_field<double>(jc, "constants", "kappa");
    }
    if (cfg.constants.tau >= 0.0 &&
        !(cfg.constants.tau > 0.0 && cfg.constants.tau < 1.0 / (cfg.topo.d + 1)))
        throw ConfigError("config: constants.tau must lie in (0, 1/(d+1))");
    for (auto [value, key] : {std::pair{cfg.constants.c1, "c1"}, {cfg.constants.c2, "c2"},
                              {cfg.constants.c3, "c3"}, {cfg.constants.c4, "c4"}})
        if (!(value > 0.0))
            throw ConfigError(std::string("config: constants.") + key + " must be positive");
    if (cfg.L_n_override && !(*cfg.L_n_override > 0.0))
        throw ConfigError("config: constants.L_n must be positive");

    const auto& jd = j.at("data");
    detail::require_object(jd, "data");
    detail::reject_unknown(jd, "data", {"target", "x_dist", "x_scale", "noise_sigma"});
    cfg.data.d = cfg.topo.d;
    cfg.data.target = get_field<std::string>(jd, "data", "target", "sin");
    cfg.data.x_dist = get_field<std::string>(jd, "data", "x_dist", "uniform");
    cfg.data.x_scale = get_field<double>(jd, "data", "x_scale", 1.0);
    cfg.data.noise_sigma = get_field<double>(jd, "data", "noise_sigma", 0.0);
    try {
        cfg.data.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (j.contains("experiment")) {
        const auto& je = j.at("experiment");
        detail::require_object(je, "experiment");
        detail::reject_unknown(je, "experiment",
                               {"n_grid", "replicates", "mc_points", "master_seed", "threads"});
        cfg.n_grid = get_field<std::vector<int>>(je, "experiment", "n_grid", cfg.n_grid);
        cfg.replicates = get_field<int>(je, "experiment", "replicates", 10);
        cfg.mc_points = get_field<int>(je, "experiment", "mc_points", 100000);
        cfg.master_seed = get_field<std::uint64_t>(je, "experiment", "master_seed", 1);
        cfg.threads = get_field<int>(je, "experiment", "threads", 0);
    }
    if (cfg.n_grid.empty()) throw ConfigError("config: experiment.n_grid must be nonempty");
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        if (cfg.n_grid[i] < 2) throw ConfigError("config: experiment.n_grid entries must be >= 2");
        if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw ConfigError("config: experiment.n_grid must be strictly increasing");
    }
    if (cfg.replicates < 1) throw ConfigError("config: experiment.replicates must be >= 1");
    if (cfg.mc_points < 1) throw ConfigError("config: experiment.mc_points must be >= 1");
    if (cfg.threads < 0) throw ConfigError("config: experiment.threads must be >= 0");

    if (j.contains("checks")) {
        const auto& jk = j.at("checks");
        detail::require_object(jk, "checks");
        detail::reject_unknown(jk, "checks",
                               {"tolerance", "C_check", "c5", "c7", "c11", "c12", "c13"});
        cfg.checks.tolerance = get_field<double>(jk, "checks", "tolerance", 1e-9);
        cfg.checks.C_check = get_field<double>(jk, "checks", "C_check", 10.0);
        cfg.checks.c5 = get_field<double>(jk, "checks", "c5", 1.0);
        cfg.checks.c7 = get_field<double>(jk, "checks", "c7", 1.0);
        cfg.checks.c11 = get_field<double>(jk, "checks", "c11", 1.0);
        cfg.checks.c12 = get_field<double>(jk, "checks", "c12", 1.0);
        cfg.checks.c13 = get_field<double>(jk, "checks", "c13", 1.0);
    }
    if (!(cfg.checks.tolerance > 0.0)) throw ConfigError("config: checks.tolerance must be positive");
    if (!(cfg.checks.C_check > 0.0)) throw ConfigError("config: checks.C_check must be positive");
    for (auto [value, key] : {std::pair{cfg.checks.c5, "c5"}, {cfg.checks.c7, "c7"},
                              {cfg.checks.c11, "c11"}, {cfg.checks.c12, "c12"},
                              {cfg.checks.c13, "c13"}})
        if (!(value > 0.0))
            throw ConfigError(std::string("config: checks.") + key + " must be positive");

    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    nlohmann::json j;
    try {
        j = detail::parse_rejecting_duplicates(in);
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config_from_json(j);
}

} // namespace parnet
