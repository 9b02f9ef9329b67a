#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "parnet/constructions.hpp"
#include "parnet/dataset.hpp"
#include "parnet/estimator.hpp"
#include "parnet/hyperparams.hpp"
#include "parnet/rng.hpp"
#include "parnet/topology.hpp"

namespace parnet {

// Synthetic regression setup: a target from the built-in catalog, an input
// distribution and an additive gaussian noise level.
struct DataSpec {
    int d = 1;
    std::string target = "sin";    // zero | affine | sin | quad
    std::string x_dist = "uniform"; // uniform | gaussian | mixture
    double x_scale = 1.0;
    double noise_sigma = 0.0;

    void validate() const {
        if (d < 1) throw std::invalid_argument("data: d must be >= 1");
        if (!(x_scale > 0.0)) throw std::invalid_argument("data: x_scale must be positive");
        if (noise_sigma < 0.0) throw std::invalid_argument("data: noise_sigma must be >= 0");
        if (target != "zero" && target != "affine" && target != "sin" && target != "quad")
            throw std::invalid_argument("data: unknown target '" + target + "'");
        if (x_dist != "uniform" && x_dist != "gaussian" && x_dist != "mixture")
            throw std::invalid_argument("data: unknown x_dist '" + x_dist + "'");
    }
};

// Catalog of bounded Lipschitz targets.  "sin" is the clamp-extended
// sine product, constant beyond [-2, 2] per coordinate; "quad" is the
// squared norm clipped at 4.
inline TargetFn target_function(const DataSpec& spec) {
    spec.validate();
    if (spec.target == "zero")
        return [](std::span<const double>) { return 0.0; };
    if (spec.target == "affine")
        return [](std::span<const double> x) {
            double s = 1.0;
            for (double v : x) s += 0.5 * v;
            return s;
        };
    if (spec.target == "sin")
        return [](std::span<const double> x) {
            double s = 1.0;
            for (double v : x) s *= std::sin(2.0 * std::clamp(v, -2.0, 2.0));
            return s;
        };
    return [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::min(s, 4.0);
    };
}

// One draw from the input distribution, written into x.
inline void sample_x(const DataSpec& spec, Rng& rng, std::span<double> x) {
    if (spec.x_dist == "uniform") {
        for (double& v : x) v = rng.uniform(-spec.x_scale, spec.x_scale);
    } else if (spec.x_dist == "gaussian") {
        for (double& v : x) v = spec.x_scale * rng.gaussian();
    } else {
        for (double& v : x) {
            double center = rng.uniform01() < 0.5 ? -spec.x_scale : spec.x_scale;
            v = center + 0.5 * spec.x_scale * rng.gaussian();
        }
    }
}

using XSampler = std::function<void(Rng&, std::span<double>)>;

inline XSampler x_sampler(const DataSpec& spec) {
    spec.validate();
    return [spec](Rng& rng, std::span<double> x) { sample_x(spec, rng, x); };
}

// n i.i.d. pairs with Y_i = m(X_i) + noise_i.
inline Dataset generate_dataset(const DataSpec& spec, int n, Rng& rng) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("generate_dataset: n must be >= 1");
    TargetFn m = target_function(spec);
    Dataset data;
    data.d = spec.d;
    data.xs.resize(static_cast<std::size_t>(n) * spec.d);
    data.ys.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::span<double> xi{data.xs.data() + static_cast<std::size_t>(i) * spec.d,
                             static_cast<std::size_t>(spec.d)};
        sample_x(spec, rng, xi);
        double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.gaussian() : 0.0;
        data.ys[static_cast<std::size_t>(i)] = m(xi) + noise;
    }
    return data;
}

// Monte-Carlo estimate of the squared L2 error int |pred - m|^2 dP_X.
inline double l2_error_mc(const std::function<double(std::span<const double>)>& predictor,
                          const TargetFn& m_true, const XSampler& sampler, int mc_points,
                          Rng& rng, int d) {
    if (mc_points < 1) throw std::invalid_argument("l2_error_mc: mc_points must be >= 1");
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    double sum = 0.0;
    for (int i = 0; i < mc_points; ++i) {
        sampler(rng, x);
        double diff = predictor(x) - m_true(x);
        sum += diff * diff;
    }
    return sum / mc_points;
}

struct ConsistencyConfig {
    Topology topo{1, 2, 2, 512};
    ScheduleConstants constants;
    std::optional<double> L_n_override = 1e3; // desk-mode default
    DataSpec data;
    std::vector<int> n_grid{50, 100, 200, 400};
    int replicates = 10;
    int mc_points = 100000;
    std::uint64_t master_seed = 1;
    int threads = 0; // 0 = use hardware concurrency

    void validate() const {
        topo.validate();
        data.validate();
        if (data.d != topo.d)
            throw std::invalid_argument("consistency: data dimension must match topology");
        if (n_grid.empty()) throw std::invalid_argument("consistency: empty n grid");
        for (std::size_t i = 0; i < n_grid.size(); ++i) {
            if (n_grid[i] < 2) throw std::invalid_argument("consistency: n values must be >= 2");
            if (i > 0 && n_grid[i] <= n_grid[i - 1])
                throw std::invalid_argument("consistency: n grid must be strictly increasing");
        }
        if (replicates < 1) throw std::invalid_argument("consistency: replicates must be >= 1");
        if (mc_points < 1) throw std::invalid_argument("consistency: mc_points must be >= 1");
    }
};

struct CurveRow {
    int n = 0;
    int replicates = 0;
    double median_l2 = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double mean_final_risk = 0.0;
    bool conditions_ok = false;
    ConditionReport report;
    std::vector<double> errors; // per-replicate L2 errors, replicate order
};

struct CurveResult {
    std::vector<CurveRow> rows;
};

namespace detail {

// Linear-interpolation quantile of a sorted vector.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile: empty");
    if (sorted.size() == 1) return sorted.front();
    double h = q * (static_cast<double>(sorted.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace detail

// Runs one (n, replicate) cell of the experiment grid: fresh dataset, fresh
// initialization, full training, Monte-Carlo error of the truncated
// predictor.  Seeds are derived from the master seed by the fixed counter
// hash, so any sub-grid reproduces bit-identically.
inline std::pair<double, double> consistency_job(const ConsistencyConfig& cfg, int n, int rep) {
    Rng data_rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(rep), 0));
    Rng init_rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(rep), 1));
    Rng mc_rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(n),
                           static_cast<std::uint64_t>(rep), 2));

    Dataset data = generate_dataset(cfg.data, n, data_rng);
    Hyperparams hp = schedule(n, cfg.constants, cfg.L_n_override, cfg.topo);
    TrainResult run = train(data, cfg.topo, hp, init_rng);

    TargetFn m = target_function(cfg.data);
    const WeightVector& w = run.final_weights;
    auto predictor = [&](std::span<const double> x) { return predict(w, hp, x); };
    double err = l2_error_mc(predictor, m, x_sampler(cfg.data), cfg.mc_points, mc_rng, cfg.data.d);
    return {err, run.trace.risk.back()};
}

// The full curve: for each n, `replicates` independent runs executed as a
// job pool.  Jobs are independent and results land in preassigned slots, so
// the outcome does not depend on scheduling.
inline CurveResult consistency_curve(const ConsistencyConfig& cfg) {
    cfg.validate();

    struct Job {
        int n_index;
        int rep;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i)
        for (int rep = 0; rep < cfg.replicates; ++rep)
            jobs.push_back({static_cast<int>(i), rep});

    std::vector<double> errors(jobs.size(), 0.0);
    std::vector<double> risks(jobs.size(), 0.0);
    std::vector<std::exception_ptr> failures(jobs.size());

    unsigned hw = std::thread::hardware_concurrency();
    unsigned thread_count = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : (hw > 0 ? hw : 1);
    thread_count = std::min<unsigned>(thread_count, static_cast<unsigned>(jobs.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) break;
            const Job& job = jobs[j];
            int n = cfg.n_grid[static_cast<std::size_t>(job.n_index)];
            try {
                auto [err, risk] = consistency_job(cfg, n, job.rep);
                errors[j] = err;
                risks[j] = risk;
            } catch (const std::exception& e) {
                failures[j] = std::make_exception_ptr(std::runtime_error(
                    "consistency run n=" + std::to_string(n) + " replicate=" +
                    std::to_string(job.rep) + ": " + e.what()));
            }
        }
    };

    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    CurveResult result;
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        CurveRow row;
        row.n = cfg.n_grid[i];
        row.replicates = cfg.replicates;
        double risk_sum = 0.0;
        for (int rep = 0; rep < cfg.replicates; ++rep) {
            std::size_t j = i * static_cast<std::size_t>(cfg.replicates) + static_cast<std::size_t>(rep);
            row.errors.push_back(errors[j]);
            risk_sum += risks[j];
        }
        std::vector<double> sorted = row.errors;
        std::sort(sorted.begin(), sorted.end());
        row.median_l2 = detail::quantile_sorted(sorted, 0.5);
        row.q25 = detail::quantile_sorted(sorted, 0.25);
        row.q75 = detail::quantile_sorted(sorted, 0.75);
        row.mean_final_risk = risk_sum / cfg.replicates;
        Hyperparams hp = schedule(row.n, cfg.constants, cfg.L_n_override, cfg.topo);
        row.report = validate_theorem_conditions(cfg.topo, hp);
        row.conditions_ok = row.report.all_satisfied();
        result.rows.push_back(std::move(row));
    }
    std::sort(result.rows.begin(), result.rows.end(),
              [](const CurveRow& a, const CurveRow& b) { return a.n < b.n; });
    return result;
}

} // namespace parnet
