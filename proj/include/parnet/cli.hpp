#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parnet/config.hpp"
#include "parnet/estimator.hpp"
#include "parnet/experiments.hpp"
#include "parnet/serialize.hpp"
#include "parnet/verify.hpp"

namespace parnet {

namespace cli_detail {

inline std::uint64_t default_seed() {
    if (const char* env = std::getenv("PARNET_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return static_cast<std::uint64_t>(v);
    }
    return 1;
}

inline void print_condition_report(const ConditionReport& report, std::ostream& out) {
    out << "theorem conditions at this scale:\n";
    for (const auto& c : report.conditions) {
        out << "  [" << (c.satisfied ? " ok " : "FAIL") << "] " << c.name << ": " << c.description
            << "  (lhs=" << c.lhs << ", rhs=" << c.rhs << ")\n";
    }
}

inline void print_suite(const SuiteReport& report, std::ostream& out) {
    for (const auto& line : report.lines)
        out << "  [" << (line.pass ? "PASS" : "FAIL") << "] " << line.name << "  " << line.detail
            << "\n";
    out << "suite " << report.suite << ": " << (report.pass() ? "PASS" : "FAIL") << "\n";
}

inline nlohmann::json suite_to_json(const SuiteReport& report) {
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& line : report.lines)
        lines.push_back({{"name", line.name}, {"pass", line.pass}, {"detail", line.detail}});
    return {{"suite", report.suite}, {"pass", report.pass()}, {"lines", std::move(lines)}};
}

inline std::vector<double> parse_point(const std::string& text, int d) {
    std::vector<double> x;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        x.push_back(std::stod(item));
    if (static_cast<int>(x.size()) != d)
        throw std::invalid_argument("point '" + text + "' does not have dimension " +
                                    std::to_string(d));
    return x;
}

} // namespace cli_detail

// Entry point behind the binary: returns the process exit code.
// 0 = success and all invoked checks passed, 1 = a check or run failed,
// 2 = usage or configuration error.
inline int run_command(int argc, const char* const* argv) {
    using namespace cli_detail;

    CLI::App app{"over-parametrized parallel-network regression: training, "
                 "constructions and verification suites"};
    app.require_subcommand(1);

    std::string config_path, out_path, weights_path, trace_path, format = "csv";
    std::uint64_t seed = default_seed();
    int n_points = 100;
    int instances = 1000;
    int mc_points = 100000;
    std::vector<std::string> point_args;

    auto* train_cmd = app.add_subcommand("train", "train the estimator on a generated dataset");
    train_cmd->add_option("--config", config_path, "config file")->required();
    train_cmd->add_option("--n", n_points, "sample size");
    train_cmd->add_option("--seed", seed, "seed (default from PARNET_SEED)");
    train_cmd->add_option("--out", out_path, "weight output path (JSON)");
    train_cmd->add_option("--trace", trace_path, "per-step trace output path (JSON)");

    auto* predict_cmd = app.add_subcommand("predict", "evaluate saved weights");
    predict_cmd->add_option("--config", config_path, "config file")->required();
    predict_cmd->add_option("--weights", weights_path, "weights JSON")->required();
    predict_cmd->add_option("--n", n_points, "sample size used for the schedule");
    predict_cmd->add_option("--x", point_args, "comma-separated point, repeatable")->required();

    auto* conditions_cmd = app.add_subcommand("conditions", "report the theorem conditions");
    conditions_cmd->add_option("--config", config_path, "config file")->required();
    conditions_cmd->add_option("--n", n_points, "sample size to evaluate at (default: first grid entry)");

    auto* consistency_cmd = app.add_subcommand("consistency", "run the consistency-curve experiment");
    consistency_cmd->add_option("--config", config_path, "config file")->required();
    consistency_cmd->add_option("--out", out_path, "output path")->required();
    consistency_cmd->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    verify_cmd->require_subcommand(1);
    std::vector<std::string> suite_names{"grad", "lemma1", "lemma5", "lemma6", "lemma7", "lemma8",
                                         "covering"};
    for (const auto& name : suite_names) verify_cmd->add_subcommand(name)->fallthrough();
    verify_cmd->add_option("--config", config_path, "config file (supplies the check constants)");
    verify_cmd->add_option("--seed", seed, "seed (default from PARNET_SEED)");
    verify_cmd->add_option("--instances", instances, "randomized instance count");
    verify_cmd->add_option("--mc-points", mc_points, "Monte-Carlo points");
    verify_cmd->add_option("--out", out_path, "machine-readable report path (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*train_cmd) {
            Config cfg = load_config(config_path);
            if (n_points < 2) throw ConfigError("train: --n must be >= 2");
            Rng data_rng(derive_seed(seed, static_cast<std::uint64_t>(n_points), 0, 0));
            Rng init_rng(derive_seed(seed, static_cast<std::uint64_t>(n_points), 0, 1));
            Dataset data = generate_dataset(cfg.data, n_points, data_rng);
            Hyperparams hp;
            try {
                hp = schedule(n_points, cfg.constants, cfg.L_n_override, cfg.topo);
                hp.steps(); // reject inexecutable schedules before training
            } catch (const std::exception& e) {
                throw ConfigError(std::string("train: ") + e.what());
            }
            TrainResult run = train(data, cfg.topo, hp, init_rng);
            std::cout << "trained n=" << n_points << " steps=" << run.trace.step_len.size()
                      << " initial_risk=" << run.trace.risk.front()
                      << " final_risk=" << run.trace.risk.back()
                      << " drift=" << run.trace.drift.back() << "\n";
            print_condition_report(validate_theorem_conditions(cfg.topo, hp), std::cout);
            if (!out_path.empty()) {
                save_weights(run.final_weights, out_path);
                std::cout << "weights written to " << out_path << "\n";
            }
            if (!trace_path.empty()) {
                std::ofstream trace_out(trace_path);
                if (!trace_out) throw std::runtime_error("cannot write " + trace_path);
                trace_out << trace_to_json(run.trace).dump(1) << "\n";
                std::cout << "trace written to " << trace_path << "\n";
            }
            return 0;
        }

        if (*predict_cmd) {
            Config cfg = load_config(config_path);
            WeightVector w = load_weights(weights_path);
            Hyperparams hp = schedule(std::max(n_points, 2), cfg.constants, cfg.L_n_override,
                                      w.topology());
            for (const auto& text : point_args) {
                std::vector<double> x = parse_point(text, w.topology().d);
                std::cout << format_double(predict(w, hp, x)) << "\n";
            }
            return 0;
        }

        if (*conditions_cmd) {
            Config cfg = load_config(config_path);
            int n = conditions_cmd->count("--n") ? n_points : cfg.n_grid.front();
            Hyperparams hp = schedule(n, cfg.constants, cfg.L_n_override, cfg.topo);
            std::cout << "n=" << n << " L_n=" << hp.L_n << " t_n=" << hp.t_n
                      << " alpha_n=" << hp.alpha_n << " beta_n=" << hp.beta_n << "\n";
            print_condition_report(validate_theorem_conditions(cfg.topo, hp), std::cout);
            return 0;
        }

        if (*consistency_cmd) {
            Config cfg = load_config(config_path);
            CurveResult curve = consistency_curve(cfg.consistency());
            for (const auto& row : curve.rows) {
                std::cout << "n=" << row.n << " replicates=" << row.replicates
                          << " median_l2=" << row.median_l2 << " q25=" << row.q25
                          << " q75=" << row.q75 << " mean_final_risk=" << row.mean_final_risk
                          << " conditions_ok=" << (row.conditions_ok ? 1 : 0) << "\n";
            }
            if (!curve.rows.empty()) print_condition_report(curve.rows.back().report, std::cout);
            write_results(curve.rows, out_path, format);
            std::cout << "results written to " << out_path << "\n";
            return 0;
        }

        if (*verify_cmd) {
            CheckConstants checks;
            if (!config_path.empty()) checks = load_config(config_path).checks;
            SuiteReport report;
            if (verify_cmd->got_subcommand("grad"))
                report = verify_grad(seed, verify_cmd->count("--instances") ? instances : 100);
            else if (verify_cmd->got_subcommand("lemma1"))
                report = verify_lemma1(seed);
            else if (verify_cmd->got_subcommand("lemma5"))
                report = verify_lemma5(seed);
            else if (verify_cmd->got_subcommand("lemma6"))
                report = verify_lemma6(seed, checks.C_check);
            else if (verify_cmd->got_subcommand("lemma7"))
                report = verify_lemma7(seed, mc_points);
            else if (verify_cmd->got_subcommand("lemma8"))
                report = verify_lemma8(seed, instances);
            else
                report = verify_covering(seed, checks.c11, checks.c12, checks.c13);
            print_suite(report, std::cout);
            if (!out_path.empty()) {
                std::ofstream out(out_path);
                if (!out) throw std::runtime_error("cannot write " + out_path);
                out << suite_to_json(report).dump(1) << "\n";
            }
            return report.pass() ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace parnet
