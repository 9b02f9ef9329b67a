#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "parnet/network.hpp"
#include "parnet/rng.hpp"
#include "parnet/topology.hpp"
#include "parnet/weights.hpp"

namespace parnet {

// Axis-aligned cube [u, v] with an approximation margin delta.  The
// indicator construction is exact on [u+delta, v-delta] and off
// [u-delta, v+delta].
struct CubeSpec {
    std::vector<double> u, v;
    double delta = 0.0;

    int d() const { return static_cast<int>(u.size()); }

    void validate() const {
        if (u.empty() || u.size() != v.size())
            throw std::invalid_argument("cube: u and v must have equal positive dimension");
        if (!(delta > 0.0) || delta > 1.0)
            throw std::invalid_argument("cube: delta must lie in (0, 1]");
        for (std::size_t l = 0; l < u.size(); ++l)
            if (!(v[l] - u[l] >= 2.0 * delta))
                throw std::invalid_argument("cube: v - u must be >= 2*delta in every coordinate");
    }
};

// Inner weights of a single subnetwork (levels 0..L-1) in the same layout as
// one WeightVector block, plus install() to drop them into a parallel net.
struct SubnetWeights {
    Topology topo; // K is ignored; only (d, L, r) matter
    std::vector<double> values;

    explicit SubnetWeights(const Topology& t)
        : topo(t), values(t.subnet_params(), 0.0) {}

    double& input_w(int i, int j) {
        return values[static_cast<std::size_t>(i - 1) * (topo.d + 1) + j];
    }
    double& hidden_w(int l, int i, int j) {
        return values[static_cast<std::size_t>(topo.r) * (topo.d + 1) +
                      static_cast<std::size_t>(l - 1) * topo.r * (topo.r + 1) +
                      static_cast<std::size_t>(i - 1) * (topo.r + 1) + j];
    }

    void install(WeightVector& w, int k) const {
        if (w.topology().d != topo.d || w.topology().L != topo.L || w.topology().r != topo.r)
            throw std::invalid_argument("subnet install: topology mismatch");
        std::copy(values.begin(), values.end(), w.data() + w.subnet_base(k));
    }
};

// Output of subnetwork k alone, f_{k,1}^{(L)}(x).
inline double subnet_output(const WeightVector& w, int k, std::span<const double> x) {
    detail::check_dimension(w.topology(), x);
    thread_local Activations acts;
    if (acts.topo != w.topology()) acts.resize(w.topology());
    return detail::subnet_forward(w.topology(), w, k, x, acts);
}

// Hand-set weights making one subnetwork an approximate indicator of the
// cube: 2d first-layer neurons encode the half-space conditions with slope
// 4d (log n)^2 / delta, one second-layer neuron aggregates them, and any
// remaining layers pass the value through.  The sharpness parameter n sets
// the output gap (>= 1 - 1/n inside, <= 1/n off the enlarged cube), robust
// to inner-weight perturbations up to log n.
//
// The guarantee needs n >= 8d and n >= e^{r+1}; these are enforced unless
// enforce_sharpness is cleared for probing regimes where the conclusion is
// checked empirically instead.
inline SubnetWeights indicator_subnetwork(const Topology& topo, const CubeSpec& cube,
                                          double n, bool enforce_sharpness = true) {
    topo.validate();
    cube.validate();
    if (cube.d() != topo.d)
        throw std::invalid_argument("indicator: cube dimension does not match topology");
    if (!(n > 1.0)) throw std::invalid_argument("indicator: n must exceed 1");
    if (enforce_sharpness) {
        if (n < 8.0 * topo.d)
            throw std::invalid_argument("indicator: requires n >= 8d");
        if (n < std::exp(topo.r + 1.0))
            throw std::invalid_argument("indicator: requires n >= exp(r+1)");
    }

    const int d = topo.d;
    const double ln2 = std::log(n) * std::log(n);
    const double slope = 4.0 * d * ln2 / cube.delta;

    SubnetWeights sw(topo);
    for (int j = 1; j <= d; ++j) {
        sw.input_w(j, j) = slope;
        sw.input_w(j, 0) = -slope * cube.u[static_cast<std::size_t>(j - 1)];
        sw.input_w(j + d, j) = -slope;
        sw.input_w(j + d, 0) = slope * cube.v[static_cast<std::size_t>(j - 1)];
    }
    for (int t = 1; t <= 2 * d; ++t) sw.hidden_w(1, 1, t) = 8.0 * ln2;
    sw.hidden_w(1, 1, 0) = -8.0 * ln2 * (2.0 * d - 0.5);
    for (int l = 2; l <= topo.L - 1; ++l) {
        sw.hidden_w(l, 1, 1) = 6.0 * ln2;
        sw.hidden_w(l, 1, 0) = -3.0 * ln2;
    }
    return sw;
}

// Adds an independent uniform draw from [-bound, bound] to every inner
// weight (levels 0..L-1) of every subnetwork; outer coefficients untouched.
inline WeightVector perturb(const WeightVector& w, double bound, Rng& rng) {
    if (bound < 0.0) throw std::invalid_argument("perturb: bound must be >= 0");
    WeightVector out = w;
    const Topology& topo = w.topology();
    for (int k = 0; k < topo.K; ++k) {
        double* block = out.data() + out.subnet_base(k);
        for (std::size_t i = 0; i < out.subnet_size(); ++i)
            block[i] += rng.uniform(-bound, bound);
    }
    return out;
}

// Equal cube partition of [a_1, b_1) x ... x [a_d, b_d) into K^d cells of
// side (b-a)/K, optionally shifted per axis.  Cells are numbered with axis 1
// fastest.
struct GridSpec {
    std::vector<double> a, b;
    int K = 1;
    double delta = 0.0;
    std::vector<double> shift; // per-axis offset; empty means zero

    int d() const { return static_cast<int>(a.size()); }
    double width() const { return b[0] - a[0]; }
    double cell_side() const { return width() / K; }
    double shift_at(int axis) const { return shift.empty() ? 0.0 : shift[static_cast<std::size_t>(axis)]; }

    void validate() const {
        if (a.empty() || a.size() != b.size())
            throw std::invalid_argument("grid: anchor dimension mismatch");
        if (K < 1) throw std::invalid_argument("grid: K must be >= 1");
        if (!(delta > 0.0)) throw std::invalid_argument("grid: delta must be positive");
        double w0 = b[0] - a[0];
        if (!(w0 > 0.0)) throw std::invalid_argument("grid: b must exceed a");
        for (std::size_t i = 0; i < a.size(); ++i) {
            double wi = b[i] - a[i];
            if (std::abs(wi - w0) > 1e-12 * std::max(1.0, w0))
                throw std::invalid_argument("grid: all axes must have equal width");
        }
        if (!shift.empty() && shift.size() != a.size())
            throw std::invalid_argument("grid: shift dimension mismatch");
    }

    std::uint64_t cell_count() const {
        std::uint64_t count = 1;
        for (int i = 0; i < d(); ++i) {
            if (count > (1ULL << 40) / static_cast<std::uint64_t>(K))
                throw std::invalid_argument("grid: K^d too large");
            count *= static_cast<std::uint64_t>(K);
        }
        return count;
    }

    // Lower corner / upper corner / center of cell `index`.
    void cell_bounds(std::uint64_t index, std::vector<double>& lo, std::vector<double>& hi) const {
        lo.resize(static_cast<std::size_t>(d()));
        hi.resize(static_cast<std::size_t>(d()));
        double side = cell_side();
        for (int axis = 0; axis < d(); ++axis) {
            std::uint64_t c = index % static_cast<std::uint64_t>(K);
            index /= static_cast<std::uint64_t>(K);
            lo[static_cast<std::size_t>(axis)] =
                a[static_cast<std::size_t>(axis)] + shift_at(axis) + static_cast<double>(c) * side;
            hi[static_cast<std::size_t>(axis)] = lo[static_cast<std::size_t>(axis)] + side;
        }
    }

    std::vector<double> cell_center(std::uint64_t index) const {
        std::vector<double> lo, hi;
        cell_bounds(index, lo, hi);
        for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = 0.5 * (lo[i] + hi[i]);
        return lo;
    }
};

// True iff x lies within delta of any grid hyperplane along any axis.
inline bool in_boundary_strips(const GridSpec& grid, double delta, std::span<const double> x) {
    if (static_cast<int>(x.size()) != grid.d())
        throw std::invalid_argument("boundary strips: dimension mismatch");
    double side = grid.cell_side();
    for (int axis = 0; axis < grid.d(); ++axis) {
        double origin = grid.a[static_cast<std::size_t>(axis)] + grid.shift_at(axis);
        double rel = (x[static_cast<std::size_t>(axis)] - origin) / side;
        double j = std::round(rel);
        if (j < 0.0) j = 0.0;
        if (j > grid.K) j = grid.K;
        if (std::abs(x[static_cast<std::size_t>(axis)] - (origin + j * side)) < delta) return true;
    }
    return false;
}

inline std::function<bool(std::span<const double>)> boundary_strips(const GridSpec& grid, double delta) {
    grid.validate();
    return [grid, delta](std::span<const double> x) { return in_boundary_strips(grid, delta, x); };
}

using TargetFn = std::function<double(std::span<const double>)>;

// One subnetwork per grid cell, acting as that cell's indicator with the
// cell-center value of m as its output coefficient; all other outer
// coefficients are zero.
inline WeightVector piecewise_constant_network(const TargetFn& m, const GridSpec& grid,
                                               double n, const std::vector<int>& slots,
                                               const Topology& topo,
                                               bool enforce_sharpness = true) {
    topo.validate();
    grid.validate();
    if (grid.d() != topo.d)
        throw std::invalid_argument("grid network: grid dimension does not match topology");
    std::uint64_t cells = grid.cell_count();
    if (cells > static_cast<std::uint64_t>(topo.K))
        throw std::invalid_argument("grid network: K^d exceeds the subnetwork count");
    if (slots.size() != cells)
        throw std::invalid_argument("grid network: slot list must have K^d entries");
    std::set<int> seen;
    for (int s : slots) {
        if (s < 0 || s >= topo.K)
            throw std::invalid_argument("grid network: slot index out of range");
        if (!seen.insert(s).second)
            throw std::invalid_argument("grid network: duplicate slot index");
    }

    WeightVector w(topo);
    std::vector<double> lo, hi;
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        grid.cell_bounds(cell, lo, hi);
        CubeSpec cube{lo, hi, grid.delta};
        SubnetWeights sw = indicator_subnetwork(topo, cube, n, enforce_sharpness);
        int slot = slots[static_cast<std::size_t>(cell)];
        sw.install(w, slot);
        w.outer(slot) = m(grid.cell_center(cell));
    }
    return w;
}

// Empirical strip mass of shift candidate s on one axis: the fraction of
// sample points within delta of a plane of the base grid
// {-K - 2/K + s*2/K^2 + i*2/K : i = 0..K^2+1}.
inline double shift_strip_mass(std::span<const double> xs, int d, int axis, int K,
                               double delta, int shift_index) {
    std::size_t count = xs.size() / static_cast<std::size_t>(d);
    if (count == 0) throw std::invalid_argument("shift mass: empty sample");
    double spacing = 2.0 / K;
    double origin = -static_cast<double>(K) - spacing +
                    shift_index * 2.0 / (static_cast<double>(K) * K);
    int max_plane = K * K + 1;
    std::size_t hits = 0;
    for (std::size_t p = 0; p < count; ++p) {
        double xj = xs[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(axis)];
        double idx = std::round((xj - origin) / spacing);
        if (idx < 0.0) idx = 0.0;
        if (idx > max_plane) idx = max_plane;
        if (std::abs(xj - (origin + idx * spacing)) < delta) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(count);
}

// Per-axis shift choice among {0..K-1}: the candidate with minimal empirical
// boundary-strip mass.  For delta <= 1/K^2 the K candidate strip families
// are disjoint, so the masses sum to at most one and the selected mass is at
// most 1/K by pigeonhole.
inline std::vector<int> select_shift(std::span<const double> xs, int d, int K, double delta) {
    if (K < 2) throw std::invalid_argument("select_shift: K must be >= 2");
    if (xs.empty() || xs.size() % static_cast<std::size_t>(d) != 0)
        throw std::invalid_argument("select_shift: empty or ragged sample");
    std::vector<int> shifts(static_cast<std::size_t>(d), 0);
    for (int axis = 0; axis < d; ++axis) {
        double best = 2.0;
        for (int s = 0; s < K; ++s) {
            double mass = shift_strip_mass(xs, d, axis, K, delta, s);
            if (mass < best) {
                best = mass;
                shifts[static_cast<std::size_t>(axis)] = s;
            }
        }
    }
    return shifts;
}

struct ShiftedGridNetwork {
    WeightVector weights;
    GridSpec grid;          // shifted (K^2+1)-cell-per-axis grid
    std::vector<int> shifts;
    std::vector<int> slots; // active subnetwork indices, repetition-major
    double scale_divisor = 1.0; // (K^2+1)^{2d}
};

// Scaled-and-shifted grid approximation: the (K^2+1)^d-cell cube grid over
// [-K-2/K, K]^d approximating m / (K^2+1)^{2d}, replicated (K^2+1)^{2d}
// times so the copies sum back to m, with the grid shifted per axis to the
// minimal-strip-mass candidate and margin delta = 1/K^2.
inline ShiftedGridNetwork shifted_grid_network(const TargetFn& m, int K, double n,
                                               std::span<const double> sample,
                                               const Topology& topo,
                                               const std::optional<std::vector<int>>& slot_override = std::nullopt,
                                               bool enforce_sharpness = true) {
    topo.validate();
    if (K < 2) throw std::invalid_argument("shifted grid: K must be >= 2");
    if (sample.empty() || sample.size() % static_cast<std::size_t>(topo.d) != 0)
        throw std::invalid_argument("shifted grid: degenerate sample");

    const int d = topo.d;
    const int cells_per_axis = K * K + 1;
    double active_f = std::pow(static_cast<double>(cells_per_axis), 3.0 * d);
    if (active_f > static_cast<double>(topo.K))
        throw std::invalid_argument("shifted grid: needs (K^2+1)^{3d} <= K_n");
    std::uint64_t cells = 1, reps = 1;
    for (int i = 0; i < d; ++i) cells *= static_cast<std::uint64_t>(cells_per_axis);
    for (int i = 0; i < 2 * d; ++i) reps *= static_cast<std::uint64_t>(cells_per_axis);
    const std::uint64_t active = cells * reps;

    const double delta = 1.0 / (static_cast<double>(K) * K);
    ShiftedGridNetwork out;
    out.shifts = select_shift(sample, d, K, delta);
    out.scale_divisor = static_cast<double>(reps);

    GridSpec& grid = out.grid;
    grid.a.assign(static_cast<std::size_t>(d), -static_cast<double>(K) - 2.0 / K);
    grid.b.assign(static_cast<std::size_t>(d), static_cast<double>(K));
    grid.K = cells_per_axis;
    grid.delta = delta;
    grid.shift.resize(static_cast<std::size_t>(d));
    for (int axis = 0; axis < d; ++axis)
        grid.shift[static_cast<std::size_t>(axis)] = out.shifts[static_cast<std::size_t>(axis)] * 2.0 * delta;
    grid.validate();

    if (slot_override) {
        if (slot_override->size() != active)
            throw std::invalid_argument("shifted grid: slot list must have (K^2+1)^{3d} entries");
        out.slots = *slot_override;
        std::set<int> seen;
        for (int s : out.slots) {
            if (s < 0 || s >= topo.K)
                throw std::invalid_argument("shifted grid: slot index out of range");
            if (!seen.insert(s).second)
                throw std::invalid_argument("shifted grid: duplicate slot index");
        }
    } else {
        out.slots.resize(static_cast<std::size_t>(active));
        for (std::uint64_t i = 0; i < active; ++i) out.slots[static_cast<std::size_t>(i)] = static_cast<int>(i);
    }

    WeightVector w(topo);
    std::vector<double> lo, hi;
    std::vector<SubnetWeights> cell_weights;
    std::vector<double> cell_values;
    cell_weights.reserve(static_cast<std::size_t>(cells));
    cell_values.reserve(static_cast<std::size_t>(cells));
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        grid.cell_bounds(cell, lo, hi);
        CubeSpec cube{lo, hi, delta};
        cell_weights.push_back(indicator_subnetwork(topo, cube, n, enforce_sharpness));
        cell_values.push_back(m(grid.cell_center(cell)) / out.scale_divisor);
    }
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        for (std::uint64_t cell = 0; cell < cells; ++cell) {
            int slot = out.slots[static_cast<std::size_t>(rep * cells + cell)];
            cell_weights[static_cast<std::size_t>(cell)].install(w, slot);
            w.outer(slot) = cell_values[static_cast<std::size_t>(cell)];
        }
    }
    out.weights = std::move(w);
    return out;
}

// Deterministic lattice estimate of sup |m| over [lo, hi]^d.
inline double sup_abs_on_grid(const TargetFn& m, double lo, double hi, int per_axis, int d) {
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    std::uint64_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::uint64_t>(per_axis);
    double best = 0.0;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t rest = idx;
        for (int axis = 0; axis < d; ++axis) {
            std::uint64_t c = rest % static_cast<std::uint64_t>(per_axis);
            rest /= static_cast<std::uint64_t>(per_axis);
            x[static_cast<std::size_t>(axis)] =
                lo + (hi - lo) * (static_cast<double>(c) + 0.5) / static_cast<double>(per_axis);
        }
        best = std::max(best, std::abs(m(x)));
    }
    return best;
}

} // namespace parnet
