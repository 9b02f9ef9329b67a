#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "parnet/topology.hpp"

namespace parnet {

// All weights of the parallel network in one flat array so that gradient
// descent, norms and serialization can treat the parameter vector uniformly,
// while the accessors expose the (k, i, j, level) structure.
//
// Index conventions follow the network recursion: subnetworks k are 0-based;
// neuron indices i run 1..r; input j = 0 addresses the bias of a neuron.
// Weight level 0 connects the input to layer 1, level l (1 <= l <= L-1)
// connects layer l to layer l+1, and the K outer coefficients form the final
// linear combination.  All r rows are stored at every hidden level even
// though only row 1 of the last level feeds a subnetwork's output.
class WeightVector {
public:
    WeightVector() = default;

    explicit WeightVector(const Topology& topo)
        : topo_(topo), values_(param_count(topo), 0.0) {}

    const Topology& topology() const { return topo_; }
    std::size_t size() const { return values_.size(); }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::vector<double>& flat() { return values_; }
    const std::vector<double>& flat() const { return values_; }

    double& outer(int k) { return values_[check_k(k)]; }
    double outer(int k) const { return values_[check_k(k)]; }

    // Level-0 weight w_{k,i,j}^{(0)}, j = 0 is the bias, j = 1..d the input.
    double& input_w(int k, int i, int j) { return values_[input_index(k, i, j)]; }
    double input_w(int k, int i, int j) const { return values_[input_index(k, i, j)]; }

    // Hidden weight w_{k,i,j}^{(l)} for level l in 1..L-1, j = 0 the bias.
    double& hidden_w(int k, int l, int i, int j) { return values_[hidden_index(k, l, i, j)]; }
    double hidden_w(int k, int l, int i, int j) const { return values_[hidden_index(k, l, i, j)]; }

    std::size_t outer_index(int k) const { return check_k(k); }

    std::size_t input_index(int k, int i, int j) const {
        check_range(k, i, j, topo_.d);
        return subnet_base(k) + static_cast<std::size_t>(i - 1) * (topo_.d + 1) + j;
    }

    std::size_t hidden_index(int k, int l, int i, int j) const {
        if (l < 1 || l > topo_.L - 1)
            throw std::out_of_range("weights: hidden level out of range");
        check_range(k, i, j, topo_.r);
        return subnet_base(k) + static_cast<std::size_t>(topo_.r) * (topo_.d + 1) +
               static_cast<std::size_t>(l - 1) * topo_.r * (topo_.r + 1) +
               static_cast<std::size_t>(i - 1) * (topo_.r + 1) + j;
    }

    // First flat index of subnetwork k's inner weights.
    std::size_t subnet_base(int k) const {
        return static_cast<std::size_t>(topo_.K) + static_cast<std::size_t>(check_k(k)) * topo_.subnet_params();
    }

    std::size_t subnet_size() const { return topo_.subnet_params(); }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const WeightVector&) const = default;

private:
    std::size_t check_k(int k) const {
        if (k < 0 || k >= topo_.K) throw std::out_of_range("weights: subnet index out of range");
        return static_cast<std::size_t>(k);
    }
    void check_range(int k, int i, int j, int j_max) const {
        check_k(k);
        if (i < 1 || i > topo_.r) throw std::out_of_range("weights: neuron index out of range");
        if (j < 0 || j > j_max) throw std::out_of_range("weights: input index out of range");
    }

    Topology topo_;
    std::vector<double> values_;
};

// Per-point activations: f_{k,i}^{(l)} for the hidden layers l = 1..L-1 and
// the scalar subnetwork outputs f_{k,1}^{(L)}.
struct Activations {
    Topology topo{1, 2, 2, 0}; // K = 0 marks "not sized yet"
    std::vector<double> hidden; // [k][l-1][i-1], contiguous per subnetwork
    std::vector<double> output; // f_{k,1}^{(L)} per subnetwork

    void resize(const Topology& t) {
        topo = t;
        hidden.assign(static_cast<std::size_t>(t.K) * (t.L - 1) * t.r, 0.0);
        output.assign(static_cast<std::size_t>(t.K), 0.0);
    }

    double value(int k, int l, int i) const { return hidden[hidden_offset(k, l, i)]; }
    double& value(int k, int l, int i) { return hidden[hidden_offset(k, l, i)]; }

    std::size_t hidden_offset(int k, int l, int i) const {
        return (static_cast<std::size_t>(k) * (topo.L - 1) + (l - 1)) * topo.r + (i - 1);
    }
};

// Euclidean norm and distance over flat parameter vectors.
inline double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double l2_dist(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("l2_dist: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        s += diff * diff;
    }
    return std::sqrt(s);
}

} // namespace parnet
