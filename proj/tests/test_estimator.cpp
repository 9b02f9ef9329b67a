#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "parnet/estimator.hpp"
#include "parnet/hyperparams.hpp"
#include "parnet/network.hpp"
#include "parnet/rng.hpp"
#include "parnet/theory_checks.hpp"

using namespace parnet;
using Catch::Approx;

namespace {

Dataset make_dataset(std::vector<std::vector<double>> xs, std::vector<double> ys) {
    Dataset data;
    data.d = static_cast<int>(xs.front().size());
    for (std::size_t i = 0; i < xs.size(); ++i) data.push_back(xs[i], ys[i]);
    return data;
}

} // namespace

TEST_CASE("schedule resolves the stated formulas", "[estimator]") {
    Topology topo{1, 2, 2, 4};
    ScheduleConstants constants;
    constants.tau = 0.25;

    Hyperparams hp = schedule(100, constants, 1000.0, topo);
    double ln = std::log(100.0);
    REQUIRE(hp.alpha_n == Approx(ln));
    REQUIRE(hp.beta_n == Approx(ln));
    REQUIRE(hp.lambda_n == Approx(1e-3));
    REQUIRE(hp.L_n == 1000.0);
    REQUIRE(hp.t_n == std::ceil(1000.0 * ln));
    REQUIRE(hp.t_n == 4606.0);
    REQUIRE(hp.lambda_n * hp.L_n == Approx(1.0));
    REQUIRE_FALSE(hp.theory_mode);

    constants.c1 = 2.0;
    constants.c3 = 0.5;
    constants.c4 = 2.0;
    Hyperparams hp2 = schedule(100, constants, 50.0, topo);
    REQUIRE(hp2.alpha_n == Approx(2.0 * ln));
    REQUIRE(hp2.beta_n == Approx(0.5 * ln));
    REQUIRE(hp2.t_n == std::ceil(2.0 * 50.0 * ln));

    // theory mode: L_n = (log n)^{10L+10} K^{3/2}; K = 4 contributes exactly 8
    Hyperparams hp3 = schedule(100, ScheduleConstants{}, std::nullopt, topo);
    REQUIRE(hp3.theory_mode);
    REQUIRE(hp3.L_n == Approx(8.0 * std::pow(ln, 30.0)));

    REQUIRE_THROWS_AS(schedule(1, constants, 10.0, topo), std::invalid_argument);
    ScheduleConstants bad_tau;
    bad_tau.tau = 0.9; // >= 1/(d+1) = 0.5
    REQUIRE_THROWS_AS(schedule(100, bad_tau, 10.0, topo), std::invalid_argument);
    bad_tau.tau = 0.5; // boundary excluded
    REQUIRE_THROWS_AS(schedule(100, bad_tau, 10.0, topo), std::invalid_argument);
    ScheduleConstants bad_c;
    bad_c.c2 = -1.0;
    REQUIRE_THROWS_AS(schedule(100, bad_c, 10.0, topo), std::invalid_argument);
}

TEST_CASE("condition report evaluates finite-n inequalities", "[estimator]") {
    ScheduleConstants constants;
    constants.tau = 0.25;

    SECTION("over-parametrization fails at realistic scale") {
        Topology topo{1, 2, 2, 10000};
        Hyperparams hp = schedule(100, constants, 1000.0, topo);
        ConditionReport report = validate_theorem_conditions(topo, hp);
        const Condition* growth = nullptr;
        for (const auto& c : report.conditions)
            if (c.name == "th1eq2") growth = &c;
        REQUIRE(growth != nullptr);
        REQUIRE_FALSE(growth->satisfied);
        REQUIRE(growth->rhs == Approx(10000.0 * std::log(100.0))); // 100^2 log 100
        REQUIRE(growth->rhs == Approx(46051.70185988091));
        REQUIRE_FALSE(report.all_satisfied());
    }

    SECTION("over-parametrization holds for tiny n") {
        Topology topo{1, 2, 2, 100};
        Hyperparams hp = schedule(3, constants, 1000.0, topo);
        ConditionReport report = validate_theorem_conditions(topo, hp);
        const Condition* growth = nullptr;
        for (const auto& c : report.conditions)
            if (c.name == "th1eq2") growth = &c;
        REQUIRE(growth->satisfied);
        REQUIRE(growth->rhs == Approx(9.0 * std::log(3.0)));
        REQUIRE(growth->rhs == Approx(9.887510598012987).epsilon(1e-12));
    }

    SECTION("tau at the boundary is flagged") {
        Topology topo{1, 2, 2, 4};
        Hyperparams hp = schedule(100, constants, 1000.0, topo);
        hp.tau = 0.5; // = 1/(d+1)
        ConditionReport report = validate_theorem_conditions(topo, hp);
        for (const auto& c : report.conditions)
            if (c.name == "tau_range") REQUIRE_FALSE(c.satisfied);
    }

    SECTION("theory mode satisfies the inverse-step condition") {
        Topology topo{1, 2, 2, 4};
        Hyperparams hp = schedule(100, constants, std::nullopt, topo);
        ConditionReport report = validate_theorem_conditions(topo, hp);
        for (const auto& c : report.conditions)
            if (c.name == "th1eq4") REQUIRE(c.satisfied);
    }
}

TEST_CASE("initialization law", "[estimator]") {
    Topology topo{1, 3, 2, 50};
    ScheduleConstants constants;
    constants.tau = 0.25;
    Hyperparams hp = schedule(100, constants, 1000.0, topo);

    Rng rng(99);
    WeightVector w = init_weights(topo, hp, rng);

    for (int k = 0; k < topo.K; ++k) REQUIRE(w.outer(k) == 0.0);

    double hidden_bound = 20.0 * 1 * std::pow(std::log(100.0), 2.0); // 424.15...
    REQUIRE(hidden_bound == Approx(424.1509447594798));
    double input_bound = std::pow(100.0, 0.25);
    double max_hidden = 0.0, max_input = 0.0;
    for (int k = 0; k < topo.K; ++k) {
        for (int i = 1; i <= topo.r; ++i)
            for (int j = 0; j <= topo.d; ++j)
                max_input = std::max(max_input, std::abs(w.input_w(k, i, j)));
        for (int l = 1; l <= topo.L - 1; ++l)
            for (int i = 1; i <= topo.r; ++i)
                for (int j = 0; j <= topo.r; ++j)
                    max_hidden = std::max(max_hidden, std::abs(w.hidden_w(k, l, i, j)));
    }
    REQUIRE(max_hidden <= hidden_bound);
    REQUIRE(max_hidden >= 0.95 * hidden_bound); // 300 draws reach near the edge
    REQUIRE(max_input <= input_bound);
    REQUIRE(max_input >= 0.9 * input_bound);

    Rng rng_again(99);
    WeightVector w_again = init_weights(topo, hp, rng_again);
    REQUIRE(w.flat() == w_again.flat());

    Rng rng_other(100);
    WeightVector w_other = init_weights(topo, hp, rng_other);
    REQUIRE(w.flat() != w_other.flat());
}

TEST_CASE("empirical risk formula", "[estimator]") {
    Topology topo{1, 2, 2, 2};
    Hyperparams hp;
    hp.n = 3;
    hp.alpha_n = 1.0;
    hp.c2 = 0.1;

    Rng rng(5);
    WeightVector w(topo);
    for (int k = 0; k < topo.K; ++k) {
        for (int i = 1; i <= topo.r; ++i)
            for (int j = 0; j <= topo.d; ++j) w.input_w(k, i, j) = rng.uniform(-2.0, 2.0);
        for (int i = 1; i <= topo.r; ++i)
            for (int j = 0; j <= topo.r; ++j) w.hidden_w(k, 1, i, j) = rng.uniform(-2.0, 2.0);
    }

    SECTION("zero outer weights reduce to clipped mean square of Y") {
        Dataset data = make_dataset({{0.5}, {2.0}, {-0.25}}, {1.0, 5.0, 2.0});
        // x = 2.0 falls outside [-1, 1]
        REQUIRE(empirical_risk(w, data, hp) == Approx((1.0 + 4.0) / 3.0));
    }

    SECTION("single in-cube point") {
        Dataset data = make_dataset({{0.0}}, {2.0});
        hp.n = 1;
        REQUIRE(empirical_risk(w, data, hp) == Approx(4.0));
    }

    SECTION("all points outside the cube") {
        Dataset data = make_dataset({{3.0}, {-2.0}}, {1.0, 1.0});
        hp.n = 2;
        REQUIRE(empirical_risk(w, data, hp) == 0.0);
    }

    SECTION("ridge term uses the outer weights only") {
        Dataset data = make_dataset({{5.0}}, {0.0});
        hp.n = 1;
        w.outer(0) = 2.0;
        w.outer(1) = -1.0;
        REQUIRE(empirical_risk(w, data, hp) == Approx(0.1 * 5.0));
    }
}

TEST_CASE("risk gradient at initialization", "[estimator]") {
    Topology topo{1, 2, 2, 3};
    ScheduleConstants constants;
    Hyperparams hp = schedule(10, constants, 100.0, topo);
    Rng rng(17);
    WeightVector w = init_weights(topo, hp, rng);

    Dataset data = make_dataset({{0.2}, {-0.4}}, {1.5, -0.5});
    std::vector<double> grad = risk_gradient(w, data, hp);

    // inner partials all vanish because every outer weight is zero
    for (int k = 0; k < topo.K; ++k) {
        const std::size_t base = w.subnet_base(k);
        for (std::size_t i = 0; i < w.subnet_size(); ++i) REQUIRE(grad[base + i] == 0.0);
    }

    // outer component k: (2/n) sum_i (0 - Y_i) f_{k,1}^{(L)}(X_i)
    for (int k = 0; k < topo.K; ++k) {
        double expected = 0.0;
        for (int i = 0; i < data.n(); ++i) {
            auto [value, acts] = forward(w, data.x(i));
            (void)value;
            expected += (0.0 - data.ys[static_cast<std::size_t>(i)]) *
                        acts.output[static_cast<std::size_t>(k)];
        }
        expected *= 2.0 / data.n();
        REQUIRE(grad[w.outer_index(k)] == Approx(expected).margin(1e-14));
    }
}

TEST_CASE("risk gradient matches finite differences", "[estimator]") {
    const double h = 1e-5;
    Rng rng(29);
    Topology topo{1, 2, 2, 3};
    Hyperparams hp;
    hp.n = 4;
    hp.alpha_n = 2.0;
    hp.c2 = 0.1;

    Dataset data = make_dataset({{0.2}, {-0.7}, {2.5}, {1.1}}, {0.5, -1.0, 3.0, 0.1});
    WeightVector w(topo);
    for (double& v : w.flat()) v = rng.uniform(-2.0, 2.0);

    std::vector<double> grad = risk_gradient(w, data, hp);
    WeightVector probe = w;
    for (std::size_t p = 0; p < w.size(); ++p) {
        double keep = probe.flat()[p];
        probe.flat()[p] = keep + h;
        double up = empirical_risk(probe, data, hp);
        probe.flat()[p] = keep - h;
        double down = empirical_risk(probe, data, hp);
        probe.flat()[p] = keep;
        double fd = (up - down) / (2.0 * h);
        double tol = std::max(1e-8, 1e-6 * std::max(std::abs(fd), std::abs(grad[p])));
        REQUIRE(std::abs(grad[p] - fd) <= tol);
    }
}

TEST_CASE("training runs the exact schedule", "[estimator]") {
    Topology topo{1, 2, 2, 8};
    ScheduleConstants constants;

    SECTION("zero steps return the initialization") {
        Hyperparams hp = schedule(10, constants, 100.0, topo);
        hp.t_n = 0.0;
        Dataset data = make_dataset({{0.1}, {0.5}}, {1.0, 2.0});
        Rng rng(3);
        TrainResult run = train(data, topo, hp, rng);
        REQUIRE(run.final_weights.flat() == run.initial.flat());
        REQUIRE(run.trace.risk.size() == 1);
        REQUIRE(run.trace.step_len.empty());
    }

    SECTION("all-zero targets keep the outer weights at zero") {
        Hyperparams hp = schedule(10, constants, 50.0, topo);
        hp.t_n = 40.0;
        Dataset data = make_dataset({{0.1}, {-0.5}, {0.8}}, {0.0, 0.0, 0.0});
        Rng rng(31);
        TrainResult run = train(data, topo, hp, rng);
        for (int k = 0; k < topo.K; ++k) REQUIRE(run.final_weights.outer(k) == 0.0);
        for (double risk : run.trace.risk) REQUIRE(risk == 0.0);
    }

    SECTION("desk-mode run has non-increasing risk and a full trace") {
        Hyperparams hp = schedule(20, constants, 1000.0, topo);
        Rng data_rng(7);
        Dataset data;
        data.d = 1;
        for (int i = 0; i < 20; ++i) {
            double x = data_rng.uniform(-1.0, 1.0);
            data.push_back(std::vector<double>{x}, std::sin(2.0 * x) + 0.1 * data_rng.gaussian());
        }
        Rng rng(11);
        TrainOptions opts;
        opts.store_iterates = true;
        TrainResult run = train(data, topo, hp, rng, opts);
        REQUIRE(run.trace.risk.size() == static_cast<std::size_t>(hp.t_n) + 1);
        REQUIRE(run.trace.step_len.size() == static_cast<std::size_t>(hp.t_n));
        for (std::size_t t = 1; t < run.trace.risk.size(); ++t)
            REQUIRE(run.trace.risk[t] <= run.trace.risk[t - 1]);
        REQUIRE(run.trace.risk.back() < run.trace.risk.front());

        // the descent inequalities hold along this trajectory (the inverse
        // step size is far above the measured gradient Lipschitz ratio)
        DescentReport dr = descent_report_for_training(run, data, hp);
        REQUIRE(dr.pass);
    }

    SECTION("update exactness against recomputed gradients") {
        Hyperparams hp = schedule(10, constants, 100.0, topo);
        hp.t_n = 25.0;
        Dataset data = make_dataset({{0.3}, {-0.2}, {0.9}}, {1.0, -1.0, 0.5});
        Rng rng(13);
        TrainOptions opts;
        opts.store_iterates = true;
        TrainResult run = train(data, topo, hp, rng, opts);
        REQUIRE(run.iterates.size() == 26);
        for (std::size_t t : {std::size_t{0}, std::size_t{7}, std::size_t{24}}) {
            WeightVector wt(topo);
            wt.flat() = run.iterates[t];
            std::vector<double> grad = risk_gradient(wt, data, hp);
            for (std::size_t p = 0; p < grad.size(); ++p) {
                double expected = run.iterates[t][p] - hp.lambda_n * grad[p];
                REQUIRE(run.iterates[t + 1][p] == expected);
            }
        }
    }

    SECTION("identical seeds give bit-identical traces") {
        Hyperparams hp = schedule(10, constants, 100.0, topo);
        hp.t_n = 30.0;
        Dataset data = make_dataset({{0.3}, {-0.2}}, {1.0, -1.0});
        Rng rng_a(77), rng_b(77);
        TrainResult a = train(data, topo, hp, rng_a);
        TrainResult b = train(data, topo, hp, rng_b);
        REQUIRE(a.trace.risk == b.trace.risk);
        REQUIRE(a.trace.grad_norm == b.trace.grad_norm);
        REQUIRE(a.trace.drift == b.trace.drift);
        REQUIRE(a.final_weights.flat() == b.final_weights.flat());
    }

    SECTION("divergence aborts with the step index") {
        Hyperparams hp = schedule(10, constants, 1e-9, topo); // step size 1e9
        hp.t_n = 50.0;
        Dataset data = make_dataset({{0.1}, {0.2}}, {5.0, -3.0});
        Rng rng(41);
        REQUIRE_THROWS_AS(train(data, topo, hp, rng), TrainingError);
    }

    SECTION("inexecutable schedules are refused up front") {
        Hyperparams hp = schedule(1000, constants, std::nullopt, topo); // theory mode
        Dataset data = make_dataset({{0.1}}, {1.0});
        Rng rng(1);
        REQUIRE_THROWS_AS(train(data, topo, hp, rng), std::runtime_error);
    }
}

TEST_CASE("truncation operator", "[estimator]") {
    REQUIRE(truncate(3.0, 2.0) == 2.0);
    REQUIRE(truncate(-5.0, 2.0) == -2.0);
    REQUIRE(truncate(1.0, 2.0) == 1.0);
    REQUIRE_THROWS_AS(truncate(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("prediction support and bound", "[estimator]") {
    Topology topo{1, 2, 2, 4};
    ScheduleConstants constants;
    Hyperparams hp = schedule(10, constants, 100.0, topo);
    Rng rng(55);
    WeightVector w = init_weights(topo, hp, rng);
    for (int k = 0; k < topo.K; ++k) w.outer(k) = rng.uniform(-40.0, 40.0);

    std::vector<double> outside{hp.alpha_n + 0.5};
    REQUIRE(predict(w, hp, outside) == 0.0);

    for (int i = 0; i < 200; ++i) {
        std::vector<double> x{rng.uniform(-1.5 * hp.alpha_n, 1.5 * hp.alpha_n)};
        REQUIRE(std::abs(predict(w, hp, x)) <= hp.beta_n);
    }

    WeightVector zero(topo);
    std::vector<double> x{0.1};
    REQUIRE(predict(zero, hp, x) == 0.0);

    std::vector<double> bad{0.1, 0.2};
    REQUIRE_THROWS_AS(predict(w, hp, bad), std::invalid_argument);
}
