#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace parnet {

// Regression sample (X_i, Y_i), i = 1..n, with X stored row-contiguous.
struct Dataset {
    int d = 1;
    std::vector<double> xs; // n * d, row i is X_i
    std::vector<double> ys; // n

    int n() const { return static_cast<int>(ys.size()); }

    std::span<const double> x(int i) const {
        return {xs.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)};
    }

    void push_back(std::span<const double> xi, double yi) {
        if (static_cast<int>(xi.size()) != d)
            throw std::invalid_argument("dataset: point dimension mismatch");
        xs.insert(xs.end(), xi.begin(), xi.end());
        ys.push_back(yi);
    }

    void validate() const {
        if (ys.empty()) throw std::invalid_argument("dataset: empty");
        if (xs.size() != ys.size() * static_cast<std::size_t>(d))
            throw std::invalid_argument("dataset: inconsistent sizes");
        for (double v : xs)
            if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite X");
        for (double v : ys)
            if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite Y");
    }
};

// Closed cube membership test used by the clipped loss and the predictor.
inline bool in_cube(std::span<const double> x, double half_width) {
    for (double v : x)
        if (std::abs(v) > half_width) return false;
    return true;
}

} // namespace parnet
