#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace parnet {

// Shape of the parallel network: K independent fully connected subnetworks
// of depth L and width r over inputs in R^d, combined linearly.
struct Topology {
    int d = 1; // input dimension
    int L = 2; // depth (number of sigmoidal layers per subnetwork)
    int r = 2; // width of every hidden layer
    int K = 1; // number of parallel subnetworks

    void validate() const {
        if (d < 1) throw std::invalid_argument("topology: d must be >= 1");
        if (L < 2) throw std::invalid_argument("topology: L must be >= 2");
        if (r < 2 * d) throw std::invalid_argument("topology: r must be >= 2*d");
        if (K < 1) throw std::invalid_argument("topology: K_n must be >= 1");
    }

    // Scalar weights in one subnetwork, excluding its output coefficient.
    std::size_t subnet_params() const {
        return static_cast<std::size_t>(L - 1) * r * (r + 1) +
               static_cast<std::size_t>(r) * (d + 1);
    }

    bool operator==(const Topology&) const = default;
};

// Total weight count K * (1 + (L-1) r (r+1) + r (d+1)).
inline std::size_t param_count(const Topology& t) {
    t.validate();
    return static_cast<std::size_t>(t.K) * (1 + t.subnet_params());
}

} // namespace parnet
