#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "parnet/dataset.hpp"
#include "parnet/estimator.hpp"
#include "parnet/weights.hpp"

namespace parnet {

// Slack of the three smooth-descent inequalities at one step k:
//   drift:    ||a_k - a_0||            <= sqrt(2 (k/L) (F(a_0) - F(a_k)))
//   step sum: sum_{j<k} ||a_{j+1}-a_j||^2 <= (2/L) (F(a_0) - F(a_k))
//   descent:  F(a_k) <= F(a_{k-1}) - (1/2L) ||grad F(a_{k-1})||^2
// Each slack is "right side minus left side"; nonnegative means the
// inequality holds.
struct DescentReport {
    struct StepSlack {
        double drift = 0.0;
        double step_sum = 0.0;
        double descent = 0.0;
    };
    std::vector<StepSlack> steps; // index k-1 holds step k
    double min_drift = std::numeric_limits<double>::infinity();
    double min_step_sum = std::numeric_limits<double>::infinity();
    double min_descent = std::numeric_limits<double>::infinity();
    long first_violation = -1;
    double tolerance = 0.0;
    bool pass = false;

    double worst_slack() const { return std::min({min_drift, min_step_sum, min_descent}); }
};

using RiskFn = std::function<double(const std::vector<double>&)>;
using RiskGradFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Evaluates the three inequalities at every step of a recorded trajectory,
// recomputing risks and gradients from the iterates; the recorded trace is
// deliberately not trusted here.
inline DescentReport descent_report(const std::vector<std::vector<double>>& iterates,
                                    double L, const RiskFn& risk, const RiskGradFn& risk_grad,
                                    double rel_tol = 1e-9) {
    if (iterates.size() < 2)
        throw std::invalid_argument("descent report: needs the full iterate sequence");
    if (!(L > 0.0)) throw std::invalid_argument("descent report: L must be positive");

    const std::size_t t = iterates.size() - 1;
    std::vector<double> risks(t + 1);
    for (std::size_t k = 0; k <= t; ++k) risks[k] = risk(iterates[k]);

    DescentReport report;
    report.tolerance = rel_tol * std::max(1.0, std::abs(risks[0]));
    report.steps.resize(t);
    report.pass = true;

    double step_sq_sum = 0.0;
    for (std::size_t k = 1; k <= t; ++k) {
        const auto& prev = iterates[k - 1];
        const auto& cur = iterates[k];

        double decrease = risks[0] - risks[k];
        double drift_rhs = std::sqrt(std::max(0.0, 2.0 * (static_cast<double>(k) / L) * decrease));
        double drift_slack = drift_rhs - l2_dist(cur, iterates[0]);

        double step = l2_dist(cur, prev);
        step_sq_sum += step * step;
        double step_sum_slack = (2.0 / L) * decrease - step_sq_sum;

        double gnorm = l2_norm(risk_grad(prev));
        double descent_slack = (risks[k - 1] - gnorm * gnorm / (2.0 * L)) - risks[k];

        auto& s = report.steps[k - 1];
        s.drift = drift_slack;
        s.step_sum = step_sum_slack;
        s.descent = descent_slack;
        report.min_drift = std::min(report.min_drift, drift_slack);
        report.min_step_sum = std::min(report.min_step_sum, step_sum_slack);
        report.min_descent = std::min(report.min_descent, descent_slack);
        bool ok = drift_slack >= -report.tolerance && step_sum_slack >= -report.tolerance &&
                  descent_slack >= -report.tolerance;
        if (!ok && report.pass) {
            report.pass = false;
            report.first_violation = static_cast<long>(k);
        }
    }
    return report;
}

// Adapter for a stored-iterate training run.
inline DescentReport descent_report_for_training(const TrainResult& run, const Dataset& data,
                                                 const Hyperparams& hp, double rel_tol = 1e-9) {
    if (run.iterates.empty())
        throw std::invalid_argument("descent report: train run did not store iterates");
    const Topology topo = run.initial.topology();
    auto risk = [&](const std::vector<double>& flat) {
        WeightVector w(topo);
        w.flat() = flat;
        return empirical_risk(w, data, hp);
    };
    auto grad = [&](const std::vector<double>& flat) {
        WeightVector w(topo);
        w.flat() = flat;
        return risk_gradient(w, data, hp);
    };
    return descent_report(run.iterates, hp.L_n, risk, grad, rel_tol);
}

// Weight-magnitude regime of the trained network used by the gradient-size
// and gradient-smoothness bounds.
struct BoundParams {
    double gamma_star = 1.0; // outer-weight magnitude bound
    double B_n = 1.0;        // inner-weight magnitude bound (levels 1..L-1)
    double alpha_n = 1.0;    // clipping cube half-width
    double t_n = 1.0;
    double L_n = 1.0;
    int K_n = 1;
    int L = 2;

    void validate() const {
        if (!(gamma_star >= 1.0 && B_n >= 1.0 && alpha_n >= 1.0))
            throw std::invalid_argument("bound params: gamma*, B_n, alpha_n must be >= 1");
        if (!(t_n >= L_n) || !(L_n > 0.0))
            throw std::invalid_argument("bound params: requires t_n >= L_n > 0");
        if (K_n < 1 || L < 2) throw std::invalid_argument("bound params: invalid topology");
    }
};

// c5 * K_n^{3/2} * B_n^{2L} * gamma*^2 * alpha_n^2 * sqrt(t_n/L_n * max{F,1}).
inline double gradient_norm_bound(const BoundParams& p, double c5, double risk_value) {
    p.validate();
    return c5 * std::pow(static_cast<double>(p.K_n), 1.5) * std::pow(p.B_n, 2.0 * p.L) *
           p.gamma_star * p.gamma_star * p.alpha_n * p.alpha_n *
           std::sqrt(p.t_n / p.L_n * std::max(risk_value, 1.0));
}

// c7 * max{sqrt F, 1} * gamma*^2 * B_n^{3L} * alpha_n^3 * K_n^{3/2}
//    * sqrt(t_n/L_n); multiplied by ||w1 - w2|| it bounds the gradient
// difference.
inline double gradient_lipschitz_bound(const BoundParams& p, double c7, double risk_value) {
    p.validate();
    return c7 * std::max(std::sqrt(std::max(risk_value, 0.0)), 1.0) * p.gamma_star * p.gamma_star *
           std::pow(p.B_n, 3.0 * p.L) * std::pow(p.alpha_n, 3.0) *
           std::pow(static_cast<double>(p.K_n), 1.5) * std::sqrt(p.t_n / p.L_n);
}

struct LipschitzEstimate {
    double max_ratio = 0.0;
    std::size_t pairs_used = 0;
    std::size_t pairs_skipped = 0; // coincident pairs
};

// Largest observed ratio ||grad F_n(w1) - grad F_n(w2)|| / ||w1 - w2|| over
// the supplied weight pairs; the empirical counterpart of the smoothness
// bound above.
inline LipschitzEstimate lipschitz_estimate(
    const std::vector<std::pair<WeightVector, WeightVector>>& pairs, const Dataset& data,
    const Hyperparams& hp) {
    LipschitzEstimate est;
    for (const auto& [w1, w2] : pairs) {
        double dist = l2_dist(w1.flat(), w2.flat());
        if (dist == 0.0) {
            ++est.pairs_skipped;
            continue;
        }
        std::vector<double> g1 = risk_gradient(w1, data, hp);
        std::vector<double> g2 = risk_gradient(w2, data, hp);
        est.max_ratio = std::max(est.max_ratio, l2_dist(g1, g2) / dist);
        ++est.pairs_used;
    }
    return est;
}

struct CoveringBoundParams {
    double alpha = 1.0; // support cube half-width
    double beta = 1.0;  // truncation level
    double eps = 0.5;
    double p = 2.0;
    double A = 1.0; // level-0 weight bound
    double B = 1.0; // hidden weight bound
    double C = 1.0; // outer-weight l1 bound
    int d = 1;
    int k = 1; // smoothness order of the squasher used in the argument
    int L = 2;
    double c11 = 1.0, c12 = 1.0, c13 = 1.0;
};

struct CoveringBound {
    double log_value = 0.0; // natural log of the bound
    double value = 0.0;     // +inf when it overflows
};

// (c11 beta^p / eps^p) ^ (c12 alpha^d B^{(L-1)d} A^d (C/eps)^{d/k} + c13),
// evaluated in log space.
inline CoveringBound covering_bound(const CoveringBoundParams& q) {
    if (!(q.eps > 0.0) || !(q.eps < q.beta))
        throw std::invalid_argument("covering bound: requires 0 < eps < beta");
    if (!(q.alpha >= 1.0 && q.A >= 1.0 && q.B >= 1.0 && q.C >= 1.0))
        throw std::invalid_argument("covering bound: alpha, A, B, C must be >= 1");
    if (q.d < 1 || q.k < 1 || q.L < 2 || !(q.p >= 1.0))
        throw std::invalid_argument("covering bound: invalid d, k, L or p");

    double exponent = q.c12 * std::pow(q.alpha, q.d) * std::pow(q.B, (q.L - 1.0) * q.d) *
                          std::pow(q.A, q.d) * std::pow(q.C / q.eps, static_cast<double>(q.d) / q.k) +
                      q.c13;
    double log_base = std::log(q.c11) + q.p * (std::log(q.beta) - std::log(q.eps));
    CoveringBound out;
    out.log_value = exponent * log_base;
    out.value = std::exp(out.log_value);
    return out;
}

// Greedy cover count of a finite function family under the empirical L_p
// distance ((1/n) sum |f - g|^p)^{1/p} on fixed points: repeatedly take the
// first uncovered function as a center and cover everything within eps.
// An upper bound for the covering number, within the usual greedy factor of
// the packing number.
inline std::size_t empirical_cover(const std::vector<std::vector<double>>& values, double eps,
                                   double p) {
    if (values.empty()) throw std::invalid_argument("empirical cover: empty family");
    const std::size_t npts = values.front().size();
    if (npts == 0) throw std::invalid_argument("empirical cover: no evaluation points");
    for (const auto& row : values)
        if (row.size() != npts) throw std::invalid_argument("empirical cover: ragged values");
    if (!(p >= 1.0)) throw std::invalid_argument("empirical cover: p must be >= 1");

    auto distance = [&](const std::vector<double>& f, const std::vector<double>& g) {
        double s = 0.0;
        for (std::size_t i = 0; i < npts; ++i) s += std::pow(std::abs(f[i] - g[i]), p);
        return std::pow(s / static_cast<double>(npts), 1.0 / p);
    };

    std::vector<bool> covered(values.size(), false);
    std::size_t count = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (covered[i]) continue;
        ++count;
        covered[i] = true;
        for (std::size_t j = i + 1; j < values.size(); ++j)
            if (!covered[j] && distance(values[i], values[j]) < eps) covered[j] = true;
    }
    return count;
}

} // namespace parnet
