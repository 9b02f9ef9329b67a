#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace parnet {

// Ridge regression in a fixed basis: minimize over coefficients a
//   F(a) = (1/n) sum_i |sum_k a_k B_k(x_i) - y_i|^2 + c2 sum_k a_k^2.
// This is the outer-weight optimization the full network reduces to once the
// subnetwork outputs are frozen as basis functions.
struct RidgeProblem {
    Eigen::MatrixXd B; // n x K, entries B_k(x_i)
    Eigen::VectorXd y; // n
    double c2 = 0.0;

    int n() const { return static_cast<int>(B.rows()); }
    int K() const { return static_cast<int>(B.cols()); }

    void validate() const {
        if (B.rows() < 1 || B.cols() < 1)
            throw std::invalid_argument("ridge: empty basis matrix");
        if (y.size() != B.rows())
            throw std::invalid_argument("ridge: target length does not match basis rows");
        if (!(c2 > 0.0)) throw std::invalid_argument("ridge: c2 must be positive");
        if (!B.allFinite() || !y.allFinite())
            throw std::invalid_argument("ridge: non-finite entries");
    }

    // A = (1/n) B^T B + c2 I; positive definite for c2 > 0.
    Eigen::MatrixXd system_matrix() const {
        Eigen::MatrixXd A = (B.transpose() * B) / static_cast<double>(n());
        A.diagonal().array() += c2;
        return A;
    }
};

inline double ridge_objective(const Eigen::VectorXd& a, const RidgeProblem& prob) {
    if (a.size() != prob.B.cols())
        throw std::invalid_argument("ridge objective: coefficient length mismatch");
    double fit = (prob.B * a - prob.y).squaredNorm() / static_cast<double>(prob.n());
    return fit + prob.c2 * a.squaredNorm();
}

// grad F(a) = 2 A a - (2/n) B^T y.
inline Eigen::VectorXd ridge_gradient(const Eigen::VectorXd& a, const RidgeProblem& prob) {
    if (a.size() != prob.B.cols())
        throw std::invalid_argument("ridge gradient: coefficient length mismatch");
    return 2.0 * (prob.system_matrix() * a) -
           (2.0 / static_cast<double>(prob.n())) * (prob.B.transpose() * prob.y);
}

struct RidgeOptimum {
    Eigen::VectorXd a;
    double value = 0.0;
};

// Direct positive-definite solve of A a = (1/n) B^T y; the closed-form
// optimum used as the oracle for every convergence check.
inline RidgeOptimum ridge_optimum(const RidgeProblem& prob) {
    prob.validate();
    Eigen::MatrixXd A = prob.system_matrix();
    Eigen::VectorXd rhs = prob.B.transpose() * prob.y / static_cast<double>(prob.n());
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("ridge optimum: Cholesky factorization failed");
    RidgeOptimum opt;
    opt.a = llt.solve(rhs);
    opt.value = ridge_objective(opt.a, prob);
    return opt;
}

// Slack of the gradient-dominance inequality
//   ||grad F(a)||^2 >= 4 c2 (F(a) - F(a_opt));
// nonnegative up to floating-point noise for every a.
inline double pl_slack(const Eigen::VectorXd& a, const RidgeProblem& prob) {
    RidgeOptimum opt = ridge_optimum(prob);
    double gap = ridge_objective(a, prob) - opt.value;
    return ridge_gradient(a, prob).squaredNorm() - 4.0 * prob.c2 * gap;
}

struct GeometricDecayResult {
    bool precondition_ok = false; // L_n >= lambda_max(2A)
    double lambda_max = 0.0;
    double f_opt = 0.0;
    bool decay_ok = false;
    long first_violation = -1;
    std::vector<double> gap; // F(a_t) - F_opt per step
    std::vector<Eigen::VectorXd> iterates;

    bool pass() const { return precondition_ok && decay_ok; }
};

// Gradient descent a_{t+1} = a_t - (1/L_n) grad F(a_t), checked against the
// per-step contraction F(a_t) - F_opt <= (1 - 2 c2 / L_n)^t (F(a_0) - F_opt).
// A violated step-size precondition is reported, not silently ignored.
inline GeometricDecayResult outer_gd_convergence(const RidgeProblem& prob,
                                                 const Eigen::VectorXd& a0, double L_n,
                                                 int steps, double rel_tol = 1e-9) {
    prob.validate();
    if (!(L_n > 0.0)) throw std::invalid_argument("outer gd: L_n must be positive");
    if (steps < 0) throw std::invalid_argument("outer gd: negative step count");

    GeometricDecayResult result;
    Eigen::MatrixXd A = prob.system_matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
    result.lambda_max = 2.0 * eig.eigenvalues().maxCoeff();
    result.precondition_ok = L_n >= result.lambda_max * (1.0 - 1e-12);

    RidgeOptimum opt = ridge_optimum(prob);
    result.f_opt = opt.value;

    Eigen::VectorXd a = a0;
    const double factor = 1.0 - 2.0 * prob.c2 / L_n;
    double gap0 = ridge_objective(a, prob) - opt.value;
    double allowed = gap0;
    const double tol = rel_tol * std::max(1.0, std::abs(gap0));

    result.decay_ok = true;
    result.gap.push_back(gap0);
    result.iterates.push_back(a);
    for (int t = 1; t <= steps; ++t) {
        a -= ridge_gradient(a, prob) / L_n;
        double gap = ridge_objective(a, prob) - opt.value;
        allowed *= factor;
        result.gap.push_back(gap);
        result.iterates.push_back(a);
        if (gap > allowed + tol && result.decay_ok) {
            result.decay_ok = false;
            result.first_violation = t;
        }
    }
    return result;
}

} // namespace parnet
