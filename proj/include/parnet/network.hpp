#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "parnet/topology.hpp"
#include "parnet/weights.hpp"

namespace parnet {

// Logistic squasher 1/(1+e^{-x}), computed branchwise so that first-layer
// pre-activations of magnitude up to the largest finite double saturate to
// 0 or 1 instead of overflowing.
inline double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

namespace detail {

inline void check_dimension(const Topology& topo, std::span<const double> x) {
    if (static_cast<int>(x.size()) != topo.d)
        throw std::invalid_argument("network: input dimension does not match topology");
}

// Layer-1..L activations of subnetwork k written into acts; returns the
// subnetwork output f_{k,1}^{(L)}.
inline double subnet_forward(const Topology& topo, const WeightVector& w, int k,
                             std::span<const double> x, Activations& acts) {
    const int d = topo.d, L = topo.L, r = topo.r;
    const double* base = w.data() + w.subnet_base(k);
    double* a1 = acts.hidden.data() + acts.hidden_offset(k, 1, 1);
    for (int i = 0; i < r; ++i) {
        const double* row = base + static_cast<std::size_t>(i) * (d + 1);
        double pre = row[0];
        for (int j = 0; j < d; ++j) pre += row[j + 1] * x[j];
        a1[i] = logistic(pre);
    }
    const double* hid = base + static_cast<std::size_t>(r) * (d + 1);
    for (int l = 2; l <= L - 1; ++l) {
        const double* lvl = hid + static_cast<std::size_t>(l - 2) * r * (r + 1);
        const double* prev = acts.hidden.data() + acts.hidden_offset(k, l - 1, 1);
        double* cur = acts.hidden.data() + acts.hidden_offset(k, l, 1);
        for (int i = 0; i < r; ++i) {
            const double* row = lvl + static_cast<std::size_t>(i) * (r + 1);
            double pre = row[0];
            for (int j = 0; j < r; ++j) pre += row[j + 1] * prev[j];
            cur[i] = logistic(pre);
        }
    }
    const double* out_row = hid + static_cast<std::size_t>(L - 2) * r * (r + 1);
    const double* last = acts.hidden.data() + acts.hidden_offset(k, L - 1, 1);
    double pre = out_row[0];
    for (int j = 0; j < r; ++j) pre += out_row[j + 1] * last[j];
    double out = logistic(pre);
    acts.output[static_cast<std::size_t>(k)] = out;
    return out;
}

} // namespace detail

// Scratch buffers for backpropagation, reusable across points.
struct NetWorkspace {
    Activations acts;
    std::vector<double> delta, delta_next;

    void resize(const Topology& topo) {
        acts.resize(topo);
        delta.assign(static_cast<std::size_t>(topo.r), 0.0);
        delta_next.assign(static_cast<std::size_t>(topo.r), 0.0);
    }
};

// Full forward pass: fills acts for every subnetwork and returns
// f_w(x) = sum_k outer_k * f_{k,1}^{(L)}(x).
inline double forward(const WeightVector& w, std::span<const double> x, Activations& acts) {
    const Topology& topo = w.topology();
    detail::check_dimension(topo, x);
    if (acts.topo != topo) acts.resize(topo);
    double value = 0.0;
    for (int k = 0; k < topo.K; ++k)
        value += w.outer(k) * detail::subnet_forward(topo, w, k, x, acts);
    return value;
}

inline std::pair<double, Activations> forward(const WeightVector& w, std::span<const double> x) {
    Activations acts;
    acts.resize(w.topology());
    double value = forward(w, x, acts);
    return {value, std::move(acts)};
}

// Value-only evaluation; subnetworks with an exactly zero outer coefficient
// contribute nothing and are skipped.
inline double eval(const WeightVector& w, std::span<const double> x) {
    const Topology& topo = w.topology();
    detail::check_dimension(topo, x);
    thread_local Activations acts;
    if (acts.topo != topo) acts.resize(topo);
    double value = 0.0;
    for (int k = 0; k < topo.K; ++k) {
        double c = w.outer(k);
        if (c == 0.0) continue;
        value += c * detail::subnet_forward(topo, w, k, x, acts);
    }
    return value;
}

// Accumulates scale * (d f_w / d w)(x) into grad, using the activations of a
// forward pass at the same (w, x).  Reverse accumulation per subnetwork; the
// output coefficient multiplies every inner partial, so subnetworks with
// outer weight zero contribute only their output-layer partial.
inline void add_network_gradient(const WeightVector& w, std::span<const double> x,
                                 double scale, const Activations& acts,
                                 std::vector<double>& grad, NetWorkspace& ws) {
    const Topology& topo = w.topology();
    const int d = topo.d, L = topo.L, r = topo.r;
    if (grad.size() != w.size())
        throw std::invalid_argument("network gradient: size mismatch");
    if (ws.delta.size() != static_cast<std::size_t>(r)) ws.resize(topo);

    for (int k = 0; k < topo.K; ++k) {
        const double out = acts.output[static_cast<std::size_t>(k)];
        grad[w.outer_index(k)] += scale * out;

        const double coeff = w.outer(k);
        if (coeff == 0.0) continue;

        const std::size_t base = w.subnet_base(k);
        const double* wp = w.data() + base;
        double* gp = grad.data() + base;
        const double* hid_w = wp + static_cast<std::size_t>(r) * (d + 1);
        double* hid_g = gp + static_cast<std::size_t>(r) * (d + 1);

        double delta_out = scale * coeff * out * (1.0 - out);

        // output row of the last weight level (only row 1 feeds the output)
        const double* last_acts = acts.hidden.data() + acts.hidden_offset(k, L - 1, 1);
        const double* out_row = hid_w + static_cast<std::size_t>(L - 2) * r * (r + 1);
        double* out_row_g = hid_g + static_cast<std::size_t>(L - 2) * r * (r + 1);
        out_row_g[0] += delta_out;
        for (int j = 0; j < r; ++j) out_row_g[j + 1] += delta_out * last_acts[j];

        double* delta = ws.delta.data();
        for (int j = 0; j < r; ++j) {
            double a = last_acts[j];
            delta[j] = delta_out * out_row[j + 1] * a * (1.0 - a);
        }

        for (int l = L - 2; l >= 1; --l) {
            const double* lvl_w = hid_w + static_cast<std::size_t>(l - 1) * r * (r + 1);
            double* lvl_g = hid_g + static_cast<std::size_t>(l - 1) * r * (r + 1);
            const double* a_prev = acts.hidden.data() + acts.hidden_offset(k, l, 1);
            double* nxt = ws.delta_next.data();
            for (int j = 0; j < r; ++j) nxt[j] = 0.0;
            for (int i = 0; i < r; ++i) {
                const double di = delta[i];
                const double* row = lvl_w + static_cast<std::size_t>(i) * (r + 1);
                double* row_g = lvl_g + static_cast<std::size_t>(i) * (r + 1);
                row_g[0] += di;
                for (int j = 0; j < r; ++j) {
                    row_g[j + 1] += di * a_prev[j];
                    nxt[j] += di * row[j + 1];
                }
            }
            for (int j = 0; j < r; ++j) {
                double a = a_prev[j];
                nxt[j] *= a * (1.0 - a);
            }
            std::swap(ws.delta, ws.delta_next);
            delta = ws.delta.data();
        }

        for (int i = 0; i < r; ++i) {
            double* row_g = gp + static_cast<std::size_t>(i) * (d + 1);
            const double di = delta[i];
            row_g[0] += di;
            for (int j = 0; j < d; ++j) row_g[j + 1] += di * x[j];
        }
    }
}

// Exact partial derivatives of f_w at x with respect to every weight, in the
// flat WeightVector layout.
inline std::vector<double> network_gradient(const WeightVector& w, std::span<const double> x) {
    NetWorkspace ws;
    ws.resize(w.topology());
    forward(w, x, ws.acts);
    std::vector<double> grad(w.size(), 0.0);
    add_network_gradient(w, x, 1.0, ws.acts, grad, ws);
    return grad;
}

} // namespace parnet
