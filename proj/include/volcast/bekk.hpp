#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "volcast/stats.hpp"

namespace volcast {

/// Full BEKK(1,1) parameter set: H_t = C'C + A' eps eps' A + B' H_{t-1} B.
/// C is lower triangular with nonnegative diagonal (sign normalization);
/// A and B are canonicalized so the first nonzero diagonal entry is
/// nonnegative (the likelihood is invariant under a global sign flip of
/// either matrix).
struct BekkParams {
    Eigen::MatrixXd C;
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;

    int dim() const { return static_cast<int>(C.rows()); }
    /// Free-parameter count: N(N+1)/2 + 2 N^2.
    int n_free() const;
};

struct BekkFit {
    BekkParams params;
    std::optional<std::vector<double>> std_errors;  // order of pack_bekk
    double log_likelihood = 0.0;
    std::vector<Eigen::MatrixXd> covariance_path;
    Eigen::VectorXd mean;  // per-series sample means removed before filtering
    double spectral_radius = 0.0;
    bool stationary = false;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
};

struct BekkFitOptions {
    int max_iterations = 500;
};

/// Covariance recursion on demeaned returns (T x N); H_1 is the sample
/// covariance. Every H_t is symmetric by construction; positive
/// definiteness follows when C'C is positive definite. Throws on
/// non-finite entries, naming the step.
std::vector<Eigen::MatrixXd> filter_covariance(const BekkParams& params,
                                               const Eigen::MatrixXd& residuals);

/// Multivariate Gaussian quasi log-likelihood
/// -1/2 sum_t [N ln 2pi + ln det H_t + eps_t' H_t^{-1} eps_t].
/// Returns -infinity when a candidate produces a non-PD H_t, so the
/// optimizer rejects it instead of crashing.
double bekk_log_likelihood(const BekkParams& params, const Eigen::MatrixXd& residuals);

/// Largest eigenvalue modulus of M = kron(A, A) + kron(B, B); the process
/// is covariance stationary iff this is < 1.
double bekk_spectral_radius(const BekkParams& params);

/// QML estimation. Returns are demeaned by per-series sample means.
/// Deterministic start: A = 0.3 I, B = 0.9 I, C'C = 0.1 x sample
/// covariance. Requires T > N and N >= 1.
BekkFit fit_bekk(const Eigen::MatrixXd& returns, const BekkFitOptions& options = {});

/// Diagonal of H_{t+1} = C'C + A' eps eps' A + B' H_T B given the last
/// demeaned residual vector.
Eigen::VectorXd bekk_forecast_one_step(const BekkFit& fit, const Eigen::VectorXd& latest_residuals);

/// Hosking portmanteau statistic of order m on vech(u_t u_t') where u_t
/// are the Cholesky-standardized residuals; chi-square(d^2 m) reference
/// with d = N(N+1)/2.
TestResult multivariate_ljung_box_squared(const BekkFit& fit, const Eigen::MatrixXd& returns,
                                          int m);

/// Flat layout: C lower triangle column by column, then A row-major, then
/// B row-major.
Eigen::VectorXd pack_bekk(const BekkParams& params);
BekkParams unpack_bekk(int n, const Eigen::VectorXd& v);

/// Sign canonicalization described on BekkParams; idempotent.
BekkParams canonicalize_signs(const BekkParams& params);

}  // namespace volcast
