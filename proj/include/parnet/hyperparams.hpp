#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parnet/topology.hpp"

namespace parnet {

// The free constants of the training schedule.  tau < 0 means "derive the
// default 0.4/(d+1) from the topology".
struct ScheduleConstants {
    double tau = -1.0;
    double c1 = 1.0;  // clipping cube half-width factor, alpha_n = c1 log n
    double c2 = 0.1;  // ridge weight on the outer coefficients
    double c3 = 1.0;  // truncation level factor, beta_n = c3 log n
    double c4 = 1.0;  // step-count factor, t_n = ceil(c4 L_n log n)
    std::optional<double> kappa; // reported-only growth exponent
};

// Resolved schedule for a given sample size.  t_n is kept as a double: the
// theoretical choice of L_n makes it astronomically large, far beyond any
// integer type, and the validator still has to report it.
struct Hyperparams {
    int n = 0;
    double tau = 0.0;
    double c1 = 1.0, c2 = 0.1, c3 = 1.0, c4 = 1.0;
    double alpha_n = 0.0;  // data lives in [-alpha_n, alpha_n]^d for the loss
    double beta_n = 0.0;   // prediction truncation level
    double L_n = 0.0;      // inverse step size
    double lambda_n = 0.0; // step size, 1/L_n
    double t_n = 0.0;      // number of gradient descent steps
    bool theory_mode = false;
    std::optional<double> kappa;

    // Step count as an executable integer.
    std::uint64_t steps(double cap = 1e8) const {
        if (!std::isfinite(t_n) || t_n > cap)
            throw std::runtime_error(
                "hyperparams: t_n = " + std::to_string(t_n) +
                " exceeds the executable cap; supply an L_n override");
        return static_cast<std::uint64_t>(t_n);
    }
};

// The right-hand side of the inverse-step-size requirement,
// (log n)^{10 L + 10} * K^{3/2}.
inline double theoretical_inverse_step(int n, const Topology& topo) {
    double ln = std::log(static_cast<double>(n));
    return std::pow(ln, 10.0 * topo.L + 10.0) * std::pow(static_cast<double>(topo.K), 1.5);
}

// Resolves the schedule: alpha_n = c1 log n, beta_n = c3 log n,
// lambda_n = 1/L_n, t_n = ceil(c4 L_n log n).  Without an override L_n is the
// theoretical value above ("theory mode"); with one it is taken verbatim
// ("desk mode").
inline Hyperparams schedule(int n, const ScheduleConstants& c,
                            std::optional<double> L_n_override, const Topology& topo) {
    topo.validate();
    if (n < 2) throw std::invalid_argument("schedule: n must be >= 2");
    double tau = c.tau;
    if (tau < 0.0) tau = 0.4 / (topo.d + 1);
    if (!(tau > 0.0) || !(tau < 1.0 / (topo.d + 1)))
        throw std::invalid_argument("schedule: tau must lie in (0, 1/(d+1))");
    if (!(c.c1 > 0.0 && c.c2 > 0.0 && c.c3 > 0.0 && c.c4 > 0.0))
        throw std::invalid_argument("schedule: c1..c4 must be positive");
    if (L_n_override && !(*L_n_override > 0.0))
        throw std::invalid_argument("schedule: L_n override must be positive");

    Hyperparams hp;
    hp.n = n;
    hp.tau = tau;
    hp.c1 = c.c1;
    hp.c2 = c.c2;
    hp.c3 = c.c3;
    hp.c4 = c.c4;
    hp.kappa = c.kappa;
    double ln = std::log(static_cast<double>(n));
    hp.alpha_n = c.c1 * ln;
    hp.beta_n = c.c3 * ln;
    hp.theory_mode = !L_n_override.has_value();
    hp.L_n = L_n_override ? *L_n_override : theoretical_inverse_step(n, topo);
    hp.lambda_n = 1.0 / hp.L_n;
    hp.t_n = std::ceil(c.c4 * hp.L_n * ln);
    return hp;
}

// One consistency-theorem requirement evaluated at finite n.
struct Condition {
    std::string name;
    std::string description;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
};

struct ConditionReport {
    std::vector<Condition> conditions;

    bool all_satisfied() const {
        for (const auto& c : conditions)
            if (!c.satisfied) return false;
        return true;
    }
};

// Evaluates every requirement of the consistency theorem at the given finite
// n.  Asymptotic statements become finite-n inequalities; the subnetwork
// growth condition (K_n versus n^kappa) has no prescribed kappa, so it is
// reported with the configured exponent but never flagged.  The report never
// blocks training.
inline ConditionReport validate_theorem_conditions(const Topology& topo, const Hyperparams& hp) {
    topo.validate();
    ConditionReport report;
    double n = static_cast<double>(hp.n);
    double ln = std::log(n);
    double kappa = hp.kappa.value_or(1.0);

    report.conditions.push_back({"th1eq1", "K_n / n^kappa (reported only, kappa=" + std::to_string(kappa) + ")",
                                 topo.K / std::pow(n, kappa), 1.0, true});
    double growth_rhs = std::pow(n, static_cast<double>(topo.r)) * ln;
    report.conditions.push_back({"th1eq2", "K_n >= n^r log n",
                                 static_cast<double>(topo.K), growth_rhs,
                                 static_cast<double>(topo.K) >= growth_rhs});
    double ln_rhs = theoretical_inverse_step(hp.n, topo);
    report.conditions.push_back({"th1eq4", "L_n >= (log n)^{10L+10} K_n^{3/2}",
                                 hp.L_n, ln_rhs, hp.L_n >= ln_rhs});
    double tau_rhs = 1.0 / (topo.d + 1);
    report.conditions.push_back({"tau_range", "0 < tau < 1/(d+1)", hp.tau, tau_rhs,
                                 hp.tau > 0.0 && hp.tau < tau_rhs});
    report.conditions.push_back({"width", "r >= 2d", static_cast<double>(topo.r),
                                 2.0 * topo.d, topo.r >= 2 * topo.d});
    report.conditions.push_back({"depth", "L >= 2", static_cast<double>(topo.L), 2.0,
                                 topo.L >= 2});
    return report;
}

} // namespace parnet
