#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "parnet/dataset.hpp"
#include "parnet/hyperparams.hpp"
#include "parnet/network.hpp"
#include "parnet/rng.hpp"
#include "parnet/simd.hpp"
#include "parnet/topology.hpp"
#include "parnet/weights.hpp"

namespace parnet {

// Random initialization: outer coefficients exactly zero, level-0 weights
// i.i.d. uniform on [-n^tau, n^tau], all other inner weights i.i.d. uniform
// on [-20 d (log n)^2, 20 d (log n)^2].  Every stored row gets the same
// treatment, including the hidden rows that never feed an output.  Draw
// order is the flat storage order, so a seed pins the full vector.
inline WeightVector init_weights(const Topology& topo, const Hyperparams& hp, Rng& rng) {
    topo.validate();
    WeightVector w(topo);
    double ln = std::log(static_cast<double>(hp.n));
    double input_range = std::pow(static_cast<double>(hp.n), hp.tau);
    double hidden_range = 20.0 * topo.d * ln * ln;
    for (int k = 0; k < topo.K; ++k) {
        for (int i = 1; i <= topo.r; ++i)
            for (int j = 0; j <= topo.d; ++j)
                w.input_w(k, i, j) = rng.uniform(-input_range, input_range);
        for (int l = 1; l <= topo.L - 1; ++l)
            for (int i = 1; i <= topo.r; ++i)
                for (int j = 0; j <= topo.r; ++j)
                    w.hidden_w(k, l, i, j) = rng.uniform(-hidden_range, hidden_range);
    }
    return w;
}

// Regularized empirical L2 risk
//   F_n(w) = (1/n) sum_i |f_w(X_i) - Y_i|^2 1[X_i in [-alpha_n, alpha_n]^d]
//            + c2 sum_k outer_k^2.
inline double empirical_risk(const WeightVector& w, const Dataset& data, const Hyperparams& hp) {
    const Topology& topo = w.topology();
    if (data.d != topo.d) throw std::invalid_argument("empirical_risk: dimension mismatch");
    const double inv_n = 1.0 / data.n();
    double loss = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        auto xi = data.x(i);
        if (!in_cube(xi, hp.alpha_n)) continue;
        double res = eval(w, xi) - data.ys[static_cast<std::size_t>(i)];
        loss += res * res;
    }
    double ridge = 0.0;
    for (int k = 0; k < topo.K; ++k) ridge += w.outer(k) * w.outer(k);
    return loss * inv_n + hp.c2 * ridge;
}

namespace detail {

// Depth-2 fast path for the fused risk/gradient pass.  The two squasher
// stages are batched across subnetworks so the logistic can run through the
// wide kernel; point and subnetwork accumulation orders stay fixed, so the
// result is reproducible call to call.
inline double risk_and_gradient_depth2(const WeightVector& w, const Dataset& data,
                                       const Hyperparams& hp, std::vector<double>& grad,
                                       NetWorkspace& ws) {
    const Topology& topo = w.topology();
    const int d = topo.d, r = topo.r, K = topo.K;
    const std::size_t sub = w.subnet_size();
    const std::size_t hid_off = static_cast<std::size_t>(r) * (d + 1);
    const double* W = w.data();
    double* G = grad.data();
    double* a1 = ws.acts.hidden.data(); // K*r layer-1 values
    double* aL = ws.acts.output.data(); // K subnetwork outputs

    const double inv_n = 1.0 / data.n();
    double loss = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        auto xi = data.x(i);
        if (!in_cube(xi, hp.alpha_n)) continue;
        const double* x = xi.data();

        for (int k = 0; k < K; ++k) {
            const double* blk = W + K + static_cast<std::size_t>(k) * sub;
            double* pre = a1 + static_cast<std::size_t>(k) * r;
            for (int ii = 0; ii < r; ++ii) {
                const double* row = blk + static_cast<std::size_t>(ii) * (d + 1);
                double s = row[0];
                for (int j = 0; j < d; ++j) s += row[j + 1] * x[j];
                pre[ii] = s;
            }
        }
        logistic_inplace(a1, static_cast<std::size_t>(K) * r);

        for (int k = 0; k < K; ++k) {
            const double* out_row = W + K + static_cast<std::size_t>(k) * sub + hid_off;
            const double* acts = a1 + static_cast<std::size_t>(k) * r;
            double s = out_row[0];
            for (int j = 0; j < r; ++j) s += out_row[j + 1] * acts[j];
            aL[k] = s;
        }
        logistic_inplace(aL, static_cast<std::size_t>(K));

        double value = 0.0;
        for (int k = 0; k < K; ++k) value += W[k] * aL[k];
        double res = value - data.ys[static_cast<std::size_t>(i)];
        loss += res * res;
        const double factor = 2.0 * inv_n * res;

        for (int k = 0; k < K; ++k) {
            const double out = aL[k];
            G[k] += factor * out;
            const double coeff = W[k];
            if (coeff == 0.0) continue;
            const double delta_out = factor * coeff * out * (1.0 - out);

            const double* blk = W + K + static_cast<std::size_t>(k) * sub;
            double* gblk = G + K + static_cast<std::size_t>(k) * sub;
            const double* out_row = blk + hid_off;
            double* out_row_g = gblk + hid_off;
            const double* acts = a1 + static_cast<std::size_t>(k) * r;

            out_row_g[0] += delta_out;
            for (int j = 0; j < r; ++j) out_row_g[j + 1] += delta_out * acts[j];
            for (int ii = 0; ii < r; ++ii) {
                const double a = acts[ii];
                const double din = delta_out * out_row[ii + 1] * a * (1.0 - a);
                double* row_g = gblk + static_cast<std::size_t>(ii) * (d + 1);
                row_g[0] += din;
                for (int j = 0; j < d; ++j) row_g[j + 1] += din * x[j];
            }
        }
    }

    double ridge = 0.0;
    for (int k = 0; k < K; ++k) {
        double c = W[k];
        ridge += c * c;
        G[k] += 2.0 * hp.c2 * c;
    }
    return loss * inv_n + hp.c2 * ridge;
}

} // namespace detail

// Fused risk + gradient evaluation; one forward/backward pass per in-cube
// point, accumulated in a fixed order so repeated calls are bit-identical.
inline double risk_and_gradient(const WeightVector& w, const Dataset& data,
                                const Hyperparams& hp, std::vector<double>& grad,
                                NetWorkspace& ws) {
    const Topology& topo = w.topology();
    if (data.d != topo.d) throw std::invalid_argument("risk_gradient: dimension mismatch");
    grad.assign(w.size(), 0.0);
    if (ws.acts.topo != topo) ws.resize(topo);
    if (topo.L == 2) return detail::risk_and_gradient_depth2(w, data, hp, grad, ws);

    const double inv_n = 1.0 / data.n();
    double loss = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        auto xi = data.x(i);
        if (!in_cube(xi, hp.alpha_n)) continue;
        double value = 0.0;
        for (int k = 0; k < topo.K; ++k)
            value += w.outer(k) * detail::subnet_forward(topo, w, k, xi, ws.acts);
        double res = value - data.ys[static_cast<std::size_t>(i)];
        loss += res * res;
        add_network_gradient(w, xi, 2.0 * inv_n * res, ws.acts, grad, ws);
    }
    double ridge = 0.0;
    for (int k = 0; k < topo.K; ++k) {
        double c = w.outer(k);
        ridge += c * c;
        grad[w.outer_index(k)] += 2.0 * hp.c2 * c;
    }
    return loss * inv_n + hp.c2 * ridge;
}

inline std::vector<double> risk_gradient(const WeightVector& w, const Dataset& data,
                                         const Hyperparams& hp) {
    std::vector<double> grad;
    NetWorkspace ws;
    risk_and_gradient(w, data, hp, grad, ws);
    return grad;
}

// Per-step scalar record of a gradient descent run.  risk, grad_norm and
// drift have t_n + 1 entries (steps 0..t_n); step_len has t_n entries.
struct GDTrace {
    std::vector<double> risk;
    std::vector<double> grad_norm;
    std::vector<double> drift;    // ||w^(t) - w^(0)||
    std::vector<double> step_len; // ||w^(t+1) - w^(t)||

    std::size_t length() const { return risk.size(); }
};

struct TrainOptions {
    bool store_iterates = false; // keep every iterate for trajectory checks
    double step_cap = 1e8;       // refuse schedules beyond this many steps
};

struct TrainResult {
    WeightVector initial;
    WeightVector final_weights;
    GDTrace trace;
    std::vector<std::vector<double>> iterates; // filled when requested
};

// Training aborted on a non-finite risk or gradient; downstream trajectory
// checks assume finite traces.
class TrainingError : public std::runtime_error {
public:
    TrainingError(std::uint64_t step, const std::string& what_happened)
        : std::runtime_error("training aborted at step " + std::to_string(step) + ": " + what_happened),
          step_(step) {}
    std::uint64_t step() const { return step_; }

private:
    std::uint64_t step_;
};

// Full-batch gradient descent, exactly t_n steps of
//   w^(t+1) = w^(t) - lambda_n * grad F_n(w^(t))
// from the random initialization.  No early stopping, no line search.
inline TrainResult train(const Dataset& data, const Topology& topo, const Hyperparams& hp,
                         Rng& rng, const TrainOptions& options = {}) {
    data.validate();
    const std::uint64_t t_n = hp.steps(options.step_cap);

    TrainResult result;
    result.initial = init_weights(topo, hp, rng);
    WeightVector w = result.initial;

    GDTrace& trace = result.trace;
    trace.risk.reserve(t_n + 1);
    trace.grad_norm.reserve(t_n + 1);
    trace.drift.reserve(t_n + 1);
    trace.step_len.reserve(t_n);
    if (options.store_iterates) result.iterates.push_back(w.flat());

    std::vector<double> grad;
    NetWorkspace ws;
    ws.resize(topo);
    const std::vector<double>& w0 = result.initial.flat();

    for (std::uint64_t t = 0; t <= t_n; ++t) {
        double risk = risk_and_gradient(w, data, hp, grad, ws);
        double gnorm = l2_norm(grad);
        trace.risk.push_back(risk);
        trace.grad_norm.push_back(gnorm);
        trace.drift.push_back(l2_dist(w.flat(), w0));
        if (!std::isfinite(risk)) throw TrainingError(t, "risk is not finite");
        if (!std::isfinite(gnorm)) throw TrainingError(t, "gradient norm is not finite");
        if (t == t_n) break;

        double step_sq = 0.0;
        for (std::size_t i = 0; i < grad.size(); ++i) {
            double before = w.flat()[i];
            double after = before - hp.lambda_n * grad[i];
            w.flat()[i] = after;
            double delta = after - before;
            step_sq += delta * delta;
        }
        trace.step_len.push_back(std::sqrt(step_sq));
        if (options.store_iterates) result.iterates.push_back(w.flat());
    }

    result.final_weights = std::move(w);
    return result;
}

// Truncation operator T_beta z = max{-beta, min{beta, z}}.
inline double truncate(double z, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("truncate: beta must be positive");
    return std::max(-beta, std::min(beta, z));
}

// The estimate itself: the trained network truncated at beta_n and set to
// zero outside the clipping cube.
inline double predict(const WeightVector& w, const Hyperparams& hp, std::span<const double> x) {
    detail::check_dimension(w.topology(), x);
    if (!in_cube(x, hp.alpha_n)) return 0.0;
    return truncate(eval(w, x), hp.beta_n);
}

} // namespace parnet
