#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "parnet/constructions.hpp"
#include "parnet/experiments.hpp"
#include "parnet/network.hpp"
#include "parnet/rng.hpp"

using namespace parnet;
using Catch::Approx;

TEST_CASE("dataset generation", "[experiments]") {
    SECTION("zero target without noise gives zero responses") {
        DataSpec spec;
        spec.target = "zero";
        spec.noise_sigma = 0.0;
        Rng rng(1);
        Dataset data = generate_dataset(spec, 50, rng);
        for (double y : data.ys) REQUIRE(y == 0.0);
    }

    SECTION("noiseless responses equal the target exactly") {
        DataSpec spec;
        spec.target = "sin";
        spec.noise_sigma = 0.0;
        Rng rng(2);
        Dataset data = generate_dataset(spec, 40, rng);
        TargetFn m = target_function(spec);
        for (int i = 0; i < data.n(); ++i)
            REQUIRE(data.ys[static_cast<std::size_t>(i)] == m(data.x(i)));
    }

    SECTION("fixed seed reproduces the dataset") {
        DataSpec spec;
        spec.target = "quad";
        spec.noise_sigma = 0.3;
        spec.x_dist = "gaussian";
        Rng a(3), b(3);
        Dataset da = generate_dataset(spec, 30, a);
        Dataset db = generate_dataset(spec, 30, b);
        REQUIRE(da.xs == db.xs);
        REQUIRE(da.ys == db.ys);
    }

    SECTION("unknown identifiers are rejected") {
        DataSpec spec;
        spec.target = "nope";
        Rng rng(4);
        REQUIRE_THROWS_AS(generate_dataset(spec, 5, rng), std::invalid_argument);
        spec.target = "sin";
        spec.x_dist = "cauchy";
        REQUIRE_THROWS_AS(generate_dataset(spec, 5, rng), std::invalid_argument);
    }

    SECTION("mixture and gaussian draws are finite") {
        DataSpec spec;
        spec.x_dist = "mixture";
        spec.d = 2;
        Rng rng(5);
        Dataset data = generate_dataset(spec, 100, rng);
        data.validate();
    }
}

TEST_CASE("Monte-Carlo L2 error estimator", "[experiments]") {
    DataSpec spec;
    spec.x_dist = "uniform";
    spec.x_scale = 1.0;
    TargetFn m = target_function(spec);

    SECTION("perfect predictor has zero error") {
        Rng rng(6);
        double err = l2_error_mc([&](std::span<const double> x) { return m(x); }, m,
                                 x_sampler(spec), 1000, rng, 1);
        REQUIRE(err == 0.0);
    }

    SECTION("constant offset of one has error one") {
        Rng rng(7);
        double err = l2_error_mc([&](std::span<const double> x) { return m(x) + 1.0; }, m,
                                 x_sampler(spec), 1000, rng, 1);
        REQUIRE(err == Approx(1.0));
    }

    SECTION("matches a closed-form integral within three standard errors") {
        // zero predictor against m(x) = x on uniform [-1, 1]: E x^2 = 1/3,
        // Var x^2 = 1/5 - 1/9 = 4/45
        TargetFn identity = [](std::span<const double> x) { return x[0]; };
        const int N = 100000;
        Rng rng(8);
        double err = l2_error_mc([](std::span<const double>) { return 0.0; }, identity,
                                 x_sampler(spec), N, rng, 1);
        double se = std::sqrt((4.0 / 45.0) / N);
        REQUIRE(std::abs(err - 1.0 / 3.0) <= 3.0 * se);
    }
}

namespace {

ConsistencyConfig tiny_config() {
    ConsistencyConfig cfg;
    cfg.topo = {1, 2, 2, 8};
    cfg.L_n_override = 50.0;
    cfg.data.target = "zero";
    cfg.data.noise_sigma = 0.0;
    cfg.n_grid = {5, 10};
    cfg.replicates = 2;
    cfg.mc_points = 200;
    cfg.master_seed = 42;
    cfg.threads = 1;
    return cfg;
}

} // namespace

TEST_CASE("consistency curve on the zero problem", "[experiments]") {
    ConsistencyConfig cfg = tiny_config();
    CurveResult curve = consistency_curve(cfg);
    REQUIRE(curve.rows.size() == 2);
    for (const auto& row : curve.rows) {
        REQUIRE(row.median_l2 == 0.0);
        REQUIRE(row.q25 == 0.0);
        REQUIRE(row.q75 == 0.0);
        REQUIRE(row.mean_final_risk == 0.0);
        REQUIRE(row.errors.size() == 2);
        REQUIRE_FALSE(row.report.conditions.empty());
    }
}

TEST_CASE("consistency curve is reproducible and extensible", "[experiments]") {
    ConsistencyConfig cfg = tiny_config();
    cfg.data.target = "sin";
    cfg.data.noise_sigma = 0.1;

    CurveResult first = consistency_curve(cfg);
    CurveResult second = consistency_curve(cfg);
    for (std::size_t i = 0; i < first.rows.size(); ++i) {
        REQUIRE(first.rows[i].errors == second.rows[i].errors);
        REQUIRE(first.rows[i].mean_final_risk == second.rows[i].mean_final_risk);
    }

    // more threads, same numbers
    ConsistencyConfig threaded = cfg;
    threaded.threads = 2;
    CurveResult parallel = consistency_curve(threaded);
    for (std::size_t i = 0; i < first.rows.size(); ++i)
        REQUIRE(first.rows[i].errors == parallel.rows[i].errors);

    // doubling the replicate count reproduces the original runs as a prefix
    ConsistencyConfig doubled = cfg;
    doubled.replicates = 4;
    CurveResult more = consistency_curve(doubled);
    for (std::size_t i = 0; i < first.rows.size(); ++i) {
        REQUIRE(more.rows[i].errors.size() == 4);
        REQUIRE(more.rows[i].errors[0] == first.rows[i].errors[0]);
        REQUIRE(more.rows[i].errors[1] == first.rows[i].errors[1]);
    }
}

TEST_CASE("consistency config validation", "[experiments]") {
    ConsistencyConfig cfg = tiny_config();
    cfg.n_grid = {10, 10};
    REQUIRE_THROWS_AS(consistency_curve(cfg), std::invalid_argument);
    cfg = tiny_config();
    cfg.n_grid.clear();
    REQUIRE_THROWS_AS(consistency_curve(cfg), std::invalid_argument);
    cfg = tiny_config();
    cfg.data.d = 2;
    REQUIRE_THROWS_AS(consistency_curve(cfg), std::invalid_argument);
}

TEST_CASE("grid comparator beats the zero predictor on its own class", "[experiments]") {
    // noiseless target representable by the shifted-grid construction: its
    // network must carry more signal than predicting zero everywhere
    DataSpec spec;
    spec.target = "sin";
    spec.x_dist = "uniform";
    spec.x_scale = 2.0;
    spec.noise_sigma = 0.0;
    TargetFn m = target_function(spec);

    Topology topo{1, 2, 2, 125};
    Rng sample_rng(9);
    std::vector<double> sample(500);
    for (double& v : sample) v = sample_rng.uniform(-2.0, 2.0);
    ShiftedGridNetwork net = shifted_grid_network(m, 2, 1000.0, sample, topo);

    Rng mc_a(10), mc_b(10);
    const WeightVector& w = net.weights;
    double err_net = l2_error_mc([&](std::span<const double> x) { return eval(w, x); }, m,
                                 x_sampler(spec), 20000, mc_a, 1);
    double err_zero = l2_error_mc([](std::span<const double>) { return 0.0; }, m,
                                  x_sampler(spec), 20000, mc_b, 1);
    REQUIRE(err_net < err_zero);
}
