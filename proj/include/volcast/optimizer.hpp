#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace volcast {

/// Objective for minimization. May return a non-finite value to mark a
/// rejected candidate; the line search treats it as +infinity.
using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimOptions {
    double grad_tol = 1e-8;       // stop when the gradient 2-norm falls below this
    double converged_tol = 1e-5;  // `converged` flag threshold at exit
    int max_iterations = 500;
    double fd_step = 1e-6;        // per-coordinate step h_i = fd_step * max(1, |x_i|)
};

struct OptimResult {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd gradient;
    double grad_norm = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Central-difference gradient with h_i = fd_step * max(1, |x_i|). This is
/// the optimizer's internal gradient; tests compare against it directly.
Eigen::VectorXd central_difference_gradient(const Objective& f, const Eigen::VectorXd& x,
                                            double fd_step);

/// Deterministic BFGS with backtracking Armijo line search. The inverse
/// Hessian approximation is reset to the identity whenever the curvature
/// condition fails or a descent step cannot be found.
OptimResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                          const OptimOptions& options = {});

/// Symmetric numerical Hessian, h_i = rel_step * (|x_i| + 1e-4). Returns
/// nullopt if any stencil evaluation is non-finite.
std::optional<Eigen::MatrixXd> numerical_hessian(const Objective& f, const Eigen::VectorXd& x,
                                                 double rel_step = 1e-4);

/// Standard errors from the inverse of a positive-definite Hessian of the
/// negative log-likelihood; nullopt when the Hessian is not PD.
std::optional<Eigen::VectorXd> hessian_std_errors(const Eigen::MatrixXd& hessian);

}  // namespace volcast
