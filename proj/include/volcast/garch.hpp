#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace volcast {

enum class GarchKind { garch11, egarch, gjr };

enum class MeanModel { constant, zero };

std::string to_string(GarchKind k);
GarchKind garch_kind_from_string(const std::string& s);

struct GarchSpec {
    GarchKind kind = GarchKind::garch11;
    std::vector<std::string> exogenous;  // column names, may be empty
    MeanModel mean_model = MeanModel::constant;

    bool has_gamma() const { return kind != GarchKind::garch11; }
    std::size_t n_exog() const { return exogenous.size(); }
    std::size_t n_params() const;  // [mu] + kind params + exo coefficients
};

/// Model coefficients. gamma is meaningful for EGARCH/GJR only.
///
/// Admissible sets enforced during estimation:
///   GARCH(1,1): omega > 0, alpha >= 0, beta >= 0, alpha + beta < 1
///   GJR:        omega > 0, alpha >= 0, beta >= 0, alpha + gamma >= 0,
///               alpha + beta + gamma/2 < 1
///   EGARCH:     |beta| < 1 (omega, alpha, gamma unconstrained)
/// Exogenous coefficients are unconstrained everywhere.
struct GarchParams {
    double mu = 0.0;
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    std::vector<double> exo_coefs;
};

struct GarchFilterResult {
    std::vector<double> variance;   // sigma^2_t, strictly positive
    std::vector<double> residuals;  // eps_t = r_t - mu
    int floor_hits = 0;             // times the 1e-12 variance floor engaged (-X models)
};

struct GarchFit {
    GarchSpec spec;
    GarchParams params;
    std::optional<std::vector<double>> std_errors;  // same order as pack_params
    double log_likelihood = 0.0;
    std::vector<double> variance_path;
    std::vector<double> std_residuals;  // (r_t - mu) / sigma_t
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;  // of the mean negative log-likelihood, unconstrained space
    int floor_hits = 0;
};

struct GarchFitOptions {
    bool multi_start = false;  // sweep a small grid of (alpha, beta) starts
    int max_iterations = 500;
};

/// Variance recursion. sigma^2_1 is initialized at the sample variance of
/// the returns; EGARCH uses E|z| = sqrt(2/pi). Exogenous columns enter with
/// a one-day lag: sigma^2_t uses X_{t-1}. For GARCH-X/GJR-X the variance is
/// floored at 1e-12 when exogenous terms would drive it nonpositive.
/// Throws if the recursion produces a non-finite or (without the floor)
/// nonpositive variance, naming the offending index.
GarchFilterResult filter_variance(const GarchSpec& spec, const GarchParams& params,
                                  const std::vector<double>& returns,
                                  const std::vector<std::vector<double>>& exog = {});

/// Gaussian quasi log-likelihood of the filtered path:
/// -1/2 sum_t [ln 2pi + ln sigma^2_t + eps^2_t / sigma^2_t].
double log_likelihood(const GarchSpec& spec, const GarchParams& params,
                      const std::vector<double>& returns,
                      const std::vector<std::vector<double>>& exog = {});

/// One observation's Gaussian log-density contribution.
double normal_loglik_term(double eps, double sigma2);

/// Constrained QML estimation via BFGS on a smooth unconstrained
/// reparameterization (log for positive parameters, logistic stick-breaking
/// onto the stationarity simplex). Deterministic given the fixed starting
/// point (alpha = 0.05, beta = 0.90, omega from the sample variance,
/// gamma = 0, exogenous coefficients 0). Standard errors come from the
/// inverse numerical Hessian of the negative log-likelihood in the original
/// parameter space; they are absent when that Hessian is not positive
/// definite. converged=false after the iteration cap is not an error.
GarchFit fit_garch(const GarchSpec& spec, const std::vector<double>& returns,
                   const std::vector<std::vector<double>>& exog = {},
                   const GarchFitOptions& options = {});

/// One-step-ahead variance forecast. latest_return is the return of the
/// last fitted day t and latest_exog the exogenous row for day t (entering
/// with the one-day information lag).
double forecast_one_step(const GarchFit& fit, double latest_return,
                         const std::vector<double>& latest_exog = {});

/// GARCH(1,1): alpha + beta; GJR: alpha + beta + gamma/2; EGARCH: |beta|.
double persistence(const GarchFit& fit);

/// Ordered parameter vector: [mu if estimated], omega, alpha, beta,
/// [gamma for EGARCH/GJR], exogenous coefficients.
std::vector<std::string> param_names(const GarchSpec& spec);
Eigen::VectorXd pack_params(const GarchSpec& spec, const GarchParams& params);
GarchParams unpack_params(const GarchSpec& spec, const Eigen::VectorXd& v);

/// Bijection between the admissible parameter set and R^p used by the
/// optimizer. to_unconstrained requires an interior admissible point.
Eigen::VectorXd garch_to_unconstrained(const GarchSpec& spec, const GarchParams& params);
GarchParams garch_from_unconstrained(const GarchSpec& spec, const Eigen::VectorXd& u);

}  // namespace volcast
