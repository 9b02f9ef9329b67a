#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "parnet/constructions.hpp"
#include "parnet/estimator.hpp"
#include "parnet/experiments.hpp"
#include "parnet/network.hpp"
#include "parnet/ridge.hpp"
#include "parnet/rng.hpp"
#include "parnet/theory_checks.hpp"

namespace parnet {

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckLine> lines;

    void add(const std::string& name, bool pass, const std::string& detail) {
        lines.push_back({name, pass, detail});
    }
    bool pass() const {
        for (const auto& line : lines)
            if (!line.pass) return false;
        return !lines.empty();
    }
};

namespace verify_detail {

inline std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

inline bool close_enough(double a, double b, double rel = 1e-6, double abs_floor = 1e-8) {
    double diff = std::abs(a - b);
    return diff <= abs_floor || diff <= rel * std::max(std::abs(a), std::abs(b));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

inline RidgeProblem random_ridge_problem(Rng& rng, int max_K = 10, int max_n = 50) {
    int K = 1 + static_cast<int>(rng.uniform01() * max_K);
    int n = 1 + static_cast<int>(rng.uniform01() * max_n);
    K = std::min(K, max_K);
    n = std::min(n, max_n);
    RidgeProblem prob;
    prob.B.resize(n, K);
    prob.y.resize(n);
    double scale = rng.uniform(0.5, 3.0);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < K; ++k) prob.B(i, k) = scale * rng.gaussian();
        prob.y(i) = 2.0 * rng.gaussian();
    }
    prob.c2 = std::exp(rng.uniform(std::log(0.01), std::log(10.0)));
    return prob;
}

inline WeightVector random_weights(const Topology& topo, Rng& rng, double range) {
    WeightVector w(topo);
    for (double& v : w.flat()) v = rng.uniform(-range, range);
    return w;
}

} // namespace verify_detail

// Analytic gradients against central finite differences (step 1e-5) on
// random small instances, for both the network partials and the full
// regularized risk gradient.
inline SuiteReport verify_grad(std::uint64_t seed, int instances = 100) {
    using namespace verify_detail;
    SuiteReport report;
    report.suite = "grad";
    const double h = 1e-5;

    // excess = |analytic - fd| minus the allowed tolerance; <= 0 passes
    auto excess = [](double a, double fd) {
        return std::abs(a - fd) - std::max(1e-8, 1e-6 * std::max(std::abs(a), std::abs(fd)));
    };
    int net_bad = 0, risk_bad = 0;
    double net_worst = -1.0, risk_worst = -1.0;
    for (int inst = 0; inst < instances; ++inst) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(inst)));
        int d = 1 + static_cast<int>(rng.uniform01() * 2.0);
        if (d > 2) d = 2;
        int r = 2 * d + static_cast<int>(rng.uniform01() * (5 - 2 * d));
        r = std::min(r, 4);
        int L = 2 + (rng.uniform01() < 0.5 ? 0 : 1);
        int K = 1 + static_cast<int>(rng.uniform01() * 8.0);
        K = std::min(K, 8);
        Topology topo{d, L, r, K};

        WeightVector w = random_weights(topo, rng, 3.0);
        std::vector<double> x(static_cast<std::size_t>(d));
        for (double& v : x) v = rng.uniform(-3.0, 3.0);

        std::vector<double> analytic = network_gradient(w, x);
        WeightVector probe = w;
        for (std::size_t p = 0; p < w.size(); ++p) {
            double keep = probe.flat()[p];
            probe.flat()[p] = keep + h;
            double up = eval(probe, x);
            probe.flat()[p] = keep - h;
            double down = eval(probe, x);
            probe.flat()[p] = keep;
            double fd = (up - down) / (2.0 * h);
            net_worst = std::max(net_worst, excess(analytic[p], fd));
            if (!close_enough(analytic[p], fd)) ++net_bad;
        }

        int npts = 2 + static_cast<int>(rng.uniform01() * 5.0);
        Dataset data;
        data.d = d;
        for (int i = 0; i < npts; ++i) {
            std::vector<double> xi(static_cast<std::size_t>(d));
            for (double& v : xi) v = rng.uniform(-3.0, 3.0);
            data.push_back(xi, rng.uniform(-3.0, 3.0));
        }
        Hyperparams hp;
        hp.n = npts;
        hp.alpha_n = 2.0; // leaves some points outside the cube
        hp.c2 = 0.1;

        std::vector<double> rg = risk_gradient(w, data, hp);
        for (std::size_t p = 0; p < w.size(); ++p) {
            double keep = probe.flat()[p];
            probe.flat()[p] = keep + h;
            double up = empirical_risk(probe, data, hp);
            probe.flat()[p] = keep - h;
            double down = empirical_risk(probe, data, hp);
            probe.flat()[p] = keep;
            double fd = (up - down) / (2.0 * h);
            risk_worst = std::max(risk_worst, excess(rg[p], fd));
            if (!close_enough(rg[p], fd)) ++risk_bad;
        }
    }
    report.add("network_gradient_fd", net_bad == 0,
               "instances=" + std::to_string(instances) + " bad_coords=" + std::to_string(net_bad) +
                   " worst_excess=" + fmt(net_worst));
    report.add("risk_gradient_fd", risk_bad == 0,
               "instances=" + std::to_string(instances) + " bad_coords=" + std::to_string(risk_bad) +
                   " worst_excess=" + fmt(risk_worst));
    return report;
}

// Gradient-dominance slack on randomized ridge problems plus the per-step
// geometric contraction of outer-weight gradient descent.
inline SuiteReport verify_lemma8(std::uint64_t seed, int pl_instances = 1000,
                                 int decay_problems = 100, int decay_steps = 200) {
    using namespace verify_detail;
    SuiteReport report;
    report.suite = "lemma8";

    double worst_norm_slack = std::numeric_limits<double>::infinity();
    int pl_bad = 0;
    for (int inst = 0; inst < pl_instances; ++inst) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(inst), 0));
        RidgeProblem prob = random_ridge_problem(rng);
        Eigen::VectorXd a(prob.K());
        for (int k = 0; k < prob.K(); ++k) a(k) = 2.0 * rng.gaussian();
        double slack = pl_slack(a, prob);
        double scale = std::max(1.0, ridge_objective(a, prob));
        worst_norm_slack = std::min(worst_norm_slack, slack / scale);
        if (slack < -1e-9 * scale) ++pl_bad;
    }
    report.add("pl_inequality", pl_bad == 0,
               "instances=" + std::to_string(pl_instances) + " violations=" + std::to_string(pl_bad) +
                   " min_slack/scale=" + fmt(worst_norm_slack));

    int decay_bad = 0;
    for (int inst = 0; inst < decay_problems; ++inst) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(inst), 1));
        RidgeProblem prob = random_ridge_problem(rng, 5, 30);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(prob.system_matrix());
        double lam_max = 2.0 * eig.eigenvalues().maxCoeff();
        double L_n = lam_max * rng.uniform(1.0, 3.0);
        Eigen::VectorXd a0(prob.K());
        for (int k = 0; k < prob.K(); ++k) a0(k) = 2.0 * rng.gaussian();
        GeometricDecayResult res = outer_gd_convergence(prob, a0, L_n, decay_steps);
        if (!res.pass()) ++decay_bad;
    }
    report.add("geometric_decay", decay_bad == 0,
               "problems=" + std::to_string(decay_problems) + " steps=" +
                   std::to_string(decay_steps) + " violations=" + std::to_string(decay_bad));
    return report;
}

// The three descent inequalities on recorded trajectories: always asserted
// for outer-only (ridge) runs where the step-size condition is known to
// hold, and for full-network desk runs only when the configured inverse step
// size exceeds the measured gradient Lipschitz ratio; otherwise the slacks
// are reported without being asserted.
inline SuiteReport verify_lemma1(std::uint64_t seed) {
    using namespace verify_detail;
    SuiteReport report;
    report.suite = "lemma1";

    int ridge_bad = 0;
    double ridge_worst = std::numeric_limits<double>::infinity();
    for (int inst = 0; inst < 20; ++inst) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(inst), 10));
        RidgeProblem prob = random_ridge_problem(rng, 6, 30);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(prob.system_matrix());
        double L_n = 2.0 * eig.eigenvalues().maxCoeff() * rng.uniform(1.0, 2.0);
        Eigen::VectorXd a0(prob.K());
        for (int k = 0; k < prob.K(); ++k) a0(k) = 2.0 * rng.gaussian();
        GeometricDecayResult res = outer_gd_convergence(prob, a0, L_n, 100);

        std::vector<std::vector<double>> iterates;
        iterates.reserve(res.iterates.size());
        for (const auto& it : res.iterates) iterates.push_back(to_std(it));
        auto risk = [&](const std::vector<double>& flat) {
            return ridge_objective(to_eigen(flat), prob);
        };
        auto grad = [&](const std::vector<double>& flat) {
            return to_std(ridge_gradient(to_eigen(flat), prob));
        };
        DescentReport dr = descent_report(iterates, L_n, risk, grad);
        ridge_worst = std::min(ridge_worst, dr.worst_slack());
        if (!dr.pass) ++ridge_bad;
    }
    report.add("outer_only_descent", ridge_bad == 0,
               "runs=20 violations=" + std::to_string(ridge_bad) + " worst_slack=" + fmt(ridge_worst));

    const char* targets[2] = {"sin", "quad"};
    for (int which = 0; which < 2; ++which) {
        DataSpec spec;
        spec.d = 1;
        spec.target = targets[which];
        spec.x_dist = "uniform";
        spec.x_scale = 1.0;
        spec.noise_sigma = 0.2;
        Rng data_rng(derive_seed(seed, 100, static_cast<std::uint64_t>(which)));
        Dataset data = generate_dataset(spec, 20, data_rng);

        Topology topo{1, 2, 2, 16};
        ScheduleConstants constants;
        Hyperparams hp = schedule(20, constants, 1000.0, topo);
        Rng init_rng(derive_seed(seed, 101, static_cast<std::uint64_t>(which)));
        TrainOptions opts;
        opts.store_iterates = true;
        TrainResult run = train(data, topo, hp, init_rng, opts);

        // Empirical Lipschitz ratio along the trajectory.
        std::vector<std::pair<WeightVector, WeightVector>> pairs;
        std::size_t stride = std::max<std::size_t>(1, run.iterates.size() / 100);
        for (std::size_t i = 0; i + stride < run.iterates.size(); i += stride) {
            WeightVector a(topo), b(topo);
            a.flat() = run.iterates[i];
            b.flat() = run.iterates[i + stride];
            pairs.emplace_back(std::move(a), std::move(b));
        }
        LipschitzEstimate est = lipschitz_estimate(pairs, data, hp);

        // the closed-form smoothness bound next to the measured ratio
        BoundParams bp;
        bp.alpha_n = std::max(hp.alpha_n, 1.0);
        bp.t_n = std::max(hp.t_n, hp.L_n);
        bp.L_n = hp.L_n;
        bp.K_n = topo.K;
        bp.L = topo.L;
        for (const auto& flat : run.iterates) {
            WeightVector wv(topo);
            wv.flat() = flat;
            for (int k = 0; k < topo.K; ++k) {
                bp.gamma_star = std::max(bp.gamma_star, std::abs(wv.outer(k)));
                for (int i = 1; i <= topo.r; ++i)
                    for (int j = 0; j <= topo.r; ++j)
                        bp.B_n = std::max(bp.B_n, std::abs(wv.hidden_w(k, 1, i, j)));
            }
        }
        double formula = gradient_lipschitz_bound(bp, 1.0, run.trace.risk.front());

        DescentReport dr = descent_report_for_training(run, data, hp);
        bool gated = hp.L_n > est.max_ratio;
        std::string detail = std::string("target=") + targets[which] +
                             " L_n=" + fmt(hp.L_n) + " measured_lipschitz=" + fmt(est.max_ratio) +
                             " formula_bound(c7=1)=" + fmt(formula) +
                             " worst_slack=" + fmt(dr.worst_slack()) +
                             (gated ? "" : " (L_n below measured ratio; reported only)");
        report.add(std::string("full_net_descent_") + targets[which], gated ? dr.pass : true, detail);
    }
    return report;
}

// Indicator subnetworks: output >= 1 - 1/n on the shrunk cube and <= 1/n off
// the enlarged cube, on dense point grids, for the exact construction and
// for 50 random inner-weight perturbations of magnitude up to log n.
inline SuiteReport verify_lemma5(std::uint64_t seed) {
    using namespace verify_detail;
    SuiteReport report;
    report.suite = "lemma5";

    int combo = 0;
    for (int d : {1, 2}) {
        for (int L : {2, 3}) {
            for (double n : {100.0, 1000.0}) {
                for (double delta : {0.05, 0.1}) {
                    ++combo;
                    Topology topo{d, L, 2 * d, 1};
                    double ln = std::log(n);
                    double alpha = ln;
                    CubeSpec cube;
                    cube.u.assign(static_cast<std::size_t>(d), -1.0);
                    cube.v.assign(static_cast<std::size_t>(d), 1.0);
                    cube.delta = delta;
                    bool preconds = n >= 8.0 * d && n >= std::exp(topo.r + 1.0);
                    SubnetWeights sw = indicator_subnetwork(topo, cube, n, preconds);
                    WeightVector base(topo);
                    sw.install(base, 0);
                    base.outer(0) = 1.0;

                    // >= 1000 lattice points in [-alpha, alpha]^d
                    std::vector<std::vector<double>> points;
                    if (d == 1) {
                        for (int i = 0; i < 1501; ++i)
                            points.push_back({-alpha + 2.0 * alpha * i / 1500.0});
                    } else {
                        for (int i = 0; i < 39; ++i)
                            for (int j = 0; j < 39; ++j)
                                points.push_back({-alpha + 2.0 * alpha * i / 38.0,
                                                  -alpha + 2.0 * alpha * j / 38.0});
                    }

                    double min_inside = 1.0, max_outside = 0.0;
                    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(combo)));
                    for (int variant = 0; variant <= 50; ++variant) {
                        WeightVector w = variant == 0 ? base : perturb(base, ln, rng);
                        for (const auto& x : points) {
                            bool inside = true, outside = false;
                            for (int axis = 0; axis < d; ++axis) {
                                double xi = x[static_cast<std::size_t>(axis)];
                                if (!(xi >= -1.0 + delta && xi <= 1.0 - delta)) inside = false;
                                if (xi < -1.0 - delta || xi > 1.0 + delta) outside = true;
                            }
                            if (!inside && !outside) continue;
                            double out = subnet_output(w, 0, x);
                            if (inside) min_inside = std::min(min_inside, out);
                            if (outside) max_outside = std::max(max_outside, out);
                        }
                    }
                    bool ok = min_inside >= 1.0 - 1.0 / n && max_outside <= 1.0 / n;
                    std::ostringstream name;
                    name << "sandwich_d" << d << "_L" << L << "_n" << n << "_delta" << delta;
                    report.add(name.str(), ok,
                               "min_inside=" + fmt(min_inside) + " max_outside=" + fmt(max_outside) +
                                   " bound=" + fmt(1.0 / n) +
                                   (preconds ? "" : " (sharpness preconditions relaxed)"));
                }
            }
        }
    }
    return report;
}

// Cube-grid approximants: global boundedness, the off-strip approximation
// bound with the configured slack factor, and its decrease when grid
// resolution and sharpness double together.
inline SuiteReport verify_lemma6(std::uint64_t seed, double C_check = 10.0) {
    using namespace verify_detail;
    SuiteReport report;
    report.suite = "lemma6";
    (void)seed;

    for (int d : {1, 2}) {
        DataSpec spec;
        spec.d = d;
        spec.target = "sin";
        TargetFn m = target_function(spec);
        const double sup_m = 1.0; // sine product attains 1 on the sampled range
        for (int K = 1; K <= 4; ++K) {
            double n = 1000.0;
            Topology topo{d, 2, 2 * d, static_cast<int>(std::pow(K, d))};
            GridSpec grid;
            grid.a.assign(static_cast<std::size_t>(d), -1.0);
            grid.b.assign(static_cast<std::size_t>(d), 1.0);
            grid.K = K;
            grid.delta = 2.0 / (4.0 * K); // quarter of the cell side
            std::vector<int> slots(static_cast<std::size_t>(grid.cell_count()));
            for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = static_cast<int>(i);
            WeightVector w = piecewise_constant_network(m, grid, n, slots, topo);

            double sup_f = 0.0;
            std::vector<double> x(static_cast<std::size_t>(d));
            int per_axis = d == 1 ? 2001 : 45;
            std::uint64_t total = 1;
            for (int i = 0; i < d; ++i) total *= static_cast<std::uint64_t>(per_axis);
            for (std::uint64_t idx = 0; idx < total; ++idx) {
                std::uint64_t rest = idx;
                for (int axis = 0; axis < d; ++axis) {
                    std::uint64_t c = rest % static_cast<std::uint64_t>(per_axis);
                    rest /= static_cast<std::uint64_t>(per_axis);
                    x[static_cast<std::size_t>(axis)] =
                        -2.0 + 4.0 * (static_cast<double>(c) + 0.5) / per_axis;
                }
                sup_f = std::max(sup_f, std::abs(eval(w, x)));
            }
            double bound = sup_m * (std::pow(3.0, d) + std::pow(K, d) / n);
            std::ostringstream name;
            name << "boundedness_d" << d << "_K" << K;
            report.add(name.str(), sup_f <= bound, "sup|f|=" + fmt(sup_f) + " bound=" + fmt(bound));
        }
    }

    // Off-strip error for d = 1 and its decrease under (K, n) doubling.
    auto off_strip_error = [&](int K, double n) {
        DataSpec spec;
        spec.d = 1;
        spec.target = "sin";
        TargetFn m = target_function(spec);
        Topology topo{1, 2, 2, K};
        GridSpec grid;
        grid.a = {-1.0};
        grid.b = {1.0};
        grid.K = K;
        grid.delta = 0.05;
        std::vector<int> slots(static_cast<std::size_t>(K));
        for (int i = 0; i < K; ++i) slots[static_cast<std::size_t>(i)] = i;
        WeightVector w = piecewise_constant_network(m, grid, n, slots, topo);
        double worst = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            std::vector<double> x{-1.0 + 2.0 * i / 4000.0};
            if (in_boundary_strips(grid, grid.delta, x)) continue;
            worst = std::max(worst, std::abs(eval(w, x) - m(x)));
        }
        return worst;
    };
    const double c_lip = 2.0; // slope of the sine target
    double err_small = off_strip_error(2, 1000.0);
    double err_big = off_strip_error(4, 2000.0);
    double bound_small = C_check * (c_lip * 2.0 / 2.0 + 2.0 / 1000.0);
    double bound_big = C_check * (c_lip * 2.0 / 4.0 + 4.0 / 2000.0);
    report.add("error_bound_K2", err_small <= bound_small,
               "err=" + fmt(err_small) + " bound=" + fmt(bound_small));
    report.add("error_bound_K4_n2000", err_big <= bound_big,
               "err=" + fmt(err_big) + " bound=" + fmt(bound_big));
    report.add("error_decreases_on_doubling", err_big < err_small,
               "err(K=2,n=1e3)=" + fmt(err_small) + " err(K=4,n=2e3)=" + fmt(err_big));

    // Constant target, one cell, evaluated at the center.
    {
        TargetFn one = [](std::span<const double>) { return 1.0; };
        Topology topo{1, 2, 2, 1};
        GridSpec grid;
        grid.a = {-1.0};
        grid.b = {1.0};
        grid.K = 1;
        grid.delta = 0.25;
        WeightVector w = piecewise_constant_network(one, grid, 1000.0, {0}, topo);
        std::vector<double> center{0.0};
        double err = std::abs(eval(w, center) - 1.0);
        report.add("constant_center", err <= C_check / 1000.0,
                   "err=" + fmt(err) + " bound=" + fmt(C_check / 1000.0));
    }
    return report;
}

// Shifted-grid networks: active-subnetwork count, outer-weight magnitudes,
// pigeonhole shift selection against exhaustive enumeration, and the
// Monte-Carlo L2 error decreasing in grid resolution.
inline SuiteReport verify_lemma7(std::uint64_t seed, int mc_points = 100000) {
    using namespace verify_detail;
    SuiteReport report;
    report.suite = "lemma7";

    DataSpec spec;
    spec.d = 1;
    spec.target = "sin";
    spec.x_dist = "uniform";
    spec.x_scale = 2.0;
    TargetFn m = target_function(spec);
    const double sup_m = 1.0;
    const double n_sharp = 1000.0;
    Topology topo{1, 2, 2, 1000};

    // Sample of the design measure driving the shift selection.
    Rng sample_rng(derive_seed(seed, 1));
    std::vector<double> sample(2000);
    for (double& v : sample) v = sample_rng.uniform(-2.0, 2.0);

    double errors[2] = {0.0, 0.0};
    for (int K : {2, 3}) {
        ShiftedGridNetwork net = shifted_grid_network(m, K, n_sharp, sample, topo);

        double active_expected = std::pow(K * K + 1.0, 3.0);
        report.add("active_count_K" + std::to_string(K),
                   static_cast<double>(net.slots.size()) == active_expected,
                   "active=" + std::to_string(net.slots.size()) + " expected=" + fmt(active_expected));

        double outer_bound = sup_m / std::pow(K * K + 1.0, 2.0);
        double max_outer = 0.0;
        int nonzero = 0;
        for (int k = 0; k < topo.K; ++k) {
            double c = std::abs(net.weights.outer(k));
            max_outer = std::max(max_outer, c);
            if (c != 0.0) ++nonzero;
        }
        report.add("outer_bound_K" + std::to_string(K), max_outer <= outer_bound,
                   "max|outer|=" + fmt(max_outer) + " bound=" + fmt(outer_bound));

        double delta = 1.0 / (static_cast<double>(K) * K);
        std::vector<int> chosen = select_shift(sample, 1, K, delta);
        double best_mass = 2.0;
        double chosen_mass = shift_strip_mass(sample, 1, 0, K, delta, chosen[0]);
        for (int s = 0; s < K; ++s)
            best_mass = std::min(best_mass, shift_strip_mass(sample, 1, 0, K, delta, s));
        report.add("shift_mass_K" + std::to_string(K),
                   chosen_mass == best_mass && chosen_mass <= 1.0 / K + 1e-12,
                   "selected_mass=" + fmt(chosen_mass) + " exhaustive_min=" + fmt(best_mass) +
                       " bound=" + fmt(1.0 / K));

        Rng mc_rng(derive_seed(seed, 2, static_cast<std::uint64_t>(K)));
        const WeightVector& w = net.weights;
        auto predictor = [&](std::span<const double> x) { return eval(w, x); };
        errors[K - 2] = l2_error_mc(predictor, m, x_sampler(spec), mc_points, mc_rng, 1);
    }
    report.add("mc_error_decreases", errors[1] < errors[0],
               "err(K=2)=" + fmt(errors[0]) + " err(K=3)=" + fmt(errors[1]));

    TargetFn zero = [](std::span<const double>) { return 0.0; };
    ShiftedGridNetwork zn = shifted_grid_network(zero, 2, n_sharp, sample, topo);
    bool all_zero = true;
    for (int i = 0; i <= 20; ++i) {
        std::vector<double> x{-2.0 + 0.2 * i};
        if (eval(zn.weights, x) != 0.0) all_zero = false;
    }
    report.add("zero_target_zero_network", all_zero, "evaluated on 21 points");
    return report;
}

// The covering-number machinery: the closed-form bound on a hand value,
// monotonicity in its arguments, greedy-cover sanity, and greedy counts
// dominated by the formula on sampled weight-bounded networks.
inline SuiteReport verify_covering(std::uint64_t seed, double c11 = 1.0, double c12 = 1.0,
                                   double c13 = 1.0) {
    using namespace verify_detail;
    SuiteReport report;
    report.suite = "covering";

    CoveringBoundParams base;
    base.alpha = 1.0;
    base.beta = 1.0;
    base.eps = 0.5;
    base.p = 2.0;
    base.A = base.B = base.C = 1.0;
    base.d = 1;
    base.k = 1;
    base.L = 2;
    double v = covering_bound(base).value;
    report.add("hand_value_64", std::abs(v - 64.0) <= 1e-9 * 64.0, "value=" + fmt(v));

    bool eps_monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double eps = 0.1; eps < 1.0; eps += 0.1) {
        CoveringBoundParams q = base;
        q.eps = eps;
        double lv = covering_bound(q).log_value;
        if (lv > prev + 1e-12) eps_monotone = false;
        prev = lv;
    }
    report.add("monotone_in_eps", eps_monotone, "non-increasing over eps grid");

    bool arg_monotone = true;
    for (int which = 0; which < 4; ++which) {
        double last = -std::numeric_limits<double>::infinity();
        for (double t = 1.0; t <= 3.0; t += 0.5) {
            CoveringBoundParams q = base;
            (which == 0 ? q.alpha : which == 1 ? q.A : which == 2 ? q.B : q.C) = t;
            double lv = covering_bound(q).log_value;
            if (lv < last - 1e-12) arg_monotone = false;
            last = lv;
        }
    }
    report.add("monotone_in_alpha_A_B_C", arg_monotone, "non-decreasing over parameter grids");

    report.add("singleton_cover", empirical_cover({{1.0, 2.0, 3.0}}, 0.5, 2.0) == 1, "count=1");
    report.add("coincident_cover",
               empirical_cover({{1.0, 2.0}, {1.0, 2.0}}, 0.5, 2.0) == 1, "two identical functions");

    Rng fam_rng(derive_seed(seed, 7));
    std::vector<std::vector<double>> family;
    for (int f = 0; f < 50; ++f) {
        std::vector<double> row(30);
        for (double& x : row) x = fam_rng.uniform(-1.0, 1.0);
        family.push_back(std::move(row));
    }
    bool cover_monotone = true;
    std::size_t last_count = family.size() + 1;
    for (double eps = 0.1; eps <= 2.0; eps += 0.1) {
        std::size_t c = empirical_cover(family, eps, 2.0);
        if (c > last_count) cover_monotone = false;
        last_count = c;
    }
    report.add("cover_monotone_in_eps", cover_monotone, "non-increasing over eps grid");

    // 100 networks with bounded weights, covered on 40 fixed points.
    Topology topo{1, 2, 2, 4};
    const double A = 2.0, B = 2.0, C = 2.0, beta = 1.0, alpha = 1.0, eps = 0.3;
    std::vector<std::vector<double>> points;
    for (int i = 0; i < 40; ++i) points.push_back({-alpha + 2.0 * alpha * i / 39.0});
    std::vector<std::vector<double>> values;
    for (int f = 0; f < 100; ++f) {
        Rng rng(derive_seed(seed, 9, static_cast<std::uint64_t>(f)));
        WeightVector w(topo);
        double outer_l1 = 0.0;
        for (int k = 0; k < topo.K; ++k) {
            w.outer(k) = rng.uniform(-1.0, 1.0);
            outer_l1 += std::abs(w.outer(k));
        }
        if (outer_l1 > C)
            for (int k = 0; k < topo.K; ++k) w.outer(k) *= C / outer_l1;
        for (int k = 0; k < topo.K; ++k) {
            for (int i = 1; i <= topo.r; ++i)
                for (int j = 0; j <= topo.d; ++j) w.input_w(k, i, j) = rng.uniform(-A, A);
            for (int i = 1; i <= topo.r; ++i)
                for (int j = 0; j <= topo.r; ++j) w.hidden_w(k, 1, i, j) = rng.uniform(-B, B);
        }
        std::vector<double> row;
        for (const auto& x : points) row.push_back(truncate(eval(w, x), beta));
        values.push_back(std::move(row));
    }
    std::size_t greedy = empirical_cover(values, eps, 2.0);
    CoveringBoundParams q;
    q.alpha = alpha;
    q.beta = beta;
    q.eps = eps;
    q.p = 2.0;
    q.A = A;
    q.B = B;
    q.C = C;
    q.d = 1;
    q.k = 1;
    q.L = 2;
    q.c11 = c11;
    q.c12 = c12;
    q.c13 = c13;
    CoveringBound cb = covering_bound(q);
    bool within = cb.value == std::numeric_limits<double>::infinity() ||
                  static_cast<double>(greedy) <= cb.value;
    report.add("greedy_below_formula", within,
               "greedy=" + std::to_string(greedy) + " log_bound=" + fmt(cb.log_value));
    return report;
}

} // namespace parnet
