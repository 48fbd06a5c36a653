#include "volcast/garch.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "volcast/optimizer.hpp"

namespace volcast {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kVarianceFloor = 1e-12;

double sample_mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Unbiased (n-1) sample variance.
double sample_variance(const std::vector<double>& x) {
    const double m = sample_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

void check_exog(const GarchSpec& spec, const std::vector<std::vector<double>>& exog,
                std::size_t n) {
    if (exog.size() != spec.n_exog())
        throw std::invalid_argument("garch: exogenous column count does not match spec");
    for (const auto& col : exog)
        if (col.size() != n)
            throw std::invalid_argument("garch: exogenous column length does not match returns");
}

double exo_term(const GarchParams& params, const std::vector<std::vector<double>>& exog,
                std::size_t t_lagged) {
    double s = 0.0;
    for (std::size_t i = 0; i < exog.size(); ++i) s += params.exo_coefs[i] * exog[i][t_lagged];
    return s;
}

[[noreturn]] void bad_step(std::size_t t) {
    throw std::runtime_error("garch filter: non-finite or nonpositive variance at index " +
                             std::to_string(t));
}

}  // namespace

std::string to_string(GarchKind k) {
    switch (k) {
        case GarchKind::garch11: return "garch";
        case GarchKind::egarch: return "egarch";
        case GarchKind::gjr: return "gjr";
    }
    return "garch";
}

GarchKind garch_kind_from_string(const std::string& s) {
    if (s == "garch" || s == "garch11") return GarchKind::garch11;
    if (s == "egarch") return GarchKind::egarch;
    if (s == "gjr" || s == "gjr-garch") return GarchKind::gjr;
    throw std::invalid_argument("unknown GARCH kind '" + s + "'");
}

std::size_t GarchSpec::n_params() const {
    std::size_t p = 3 + n_exog();  // omega, alpha, beta
    if (has_gamma()) ++p;
    if (mean_model == MeanModel::constant) ++p;
    return p;
}

GarchFilterResult filter_variance(const GarchSpec& spec, const GarchParams& params,
                                  const std::vector<double>& returns,
                                  const std::vector<std::vector<double>>& exog) {
    const std::size_t n = returns.size();
    if (n < 2) throw std::invalid_argument("garch filter: need at least 2 returns");
    if (params.exo_coefs.size() != spec.n_exog())
        throw std::invalid_argument("garch filter: exo_coefs size does not match spec");
    check_exog(spec, exog, n);

    GarchFilterResult out;
    out.variance.resize(n);
    out.residuals.resize(n);
    for (std::size_t t = 0; t < n; ++t) out.residuals[t] = returns[t] - params.mu;

    const double v0 = sample_variance(returns);
    if (!(v0 > 0.0) || !std::isfinite(v0))
        throw std::runtime_error("garch filter: sample variance of returns is not positive");

    const bool has_exog = !exog.empty();
    if (spec.kind == GarchKind::egarch) {
        const double e_abs_z = std::sqrt(2.0 / M_PI);
        double logv = std::log(v0);
        out.variance[0] = v0;
        for (std::size_t t = 1; t < n; ++t) {
            const double sigma_prev = std::sqrt(out.variance[t - 1]);
            const double z = out.residuals[t - 1] / sigma_prev;
            logv = params.omega + params.alpha * (std::fabs(z) - e_abs_z) + params.gamma * z +
                   params.beta * std::log(out.variance[t - 1]);
            if (has_exog) logv += exo_term(params, exog, t - 1);
            const double v = std::exp(logv);
            if (!std::isfinite(v) || !(v > 0.0)) bad_step(t);
            out.variance[t] = v;
        }
    } else {
        out.variance[0] = v0;
        for (std::size_t t = 1; t < n; ++t) {
            const double eps = out.residuals[t - 1];
            double shock = params.alpha;
            if (spec.kind == GarchKind::gjr && eps < 0.0) shock += params.gamma;
            double v = params.omega + shock * eps * eps + params.beta * out.variance[t - 1];
            if (has_exog) {
                v += exo_term(params, exog, t - 1);
                if (v < kVarianceFloor) {
                    v = kVarianceFloor;
                    ++out.floor_hits;
                }
            }
            if (!std::isfinite(v) || !(v > 0.0)) bad_step(t);
            out.variance[t] = v;
        }
    }
    return out;
}

double normal_loglik_term(double eps, double sigma2) {
    return -0.5 * (std::log(kTwoPi) + std::log(sigma2) + eps * eps / sigma2);
}

double log_likelihood(const GarchSpec& spec, const GarchParams& params,
                      const std::vector<double>& returns,
                      const std::vector<std::vector<double>>& exog) {
    const GarchFilterResult f = filter_variance(spec, params, returns, exog);
    double ll = 0.0;
    for (std::size_t t = 0; t < returns.size(); ++t)
        ll += normal_loglik_term(f.residuals[t], f.variance[t]);
    return ll;
}

std::vector<std::string> param_names(const GarchSpec& spec) {
    std::vector<std::string> names;
    if (spec.mean_model == MeanModel::constant) names.push_back("mu");
    names.insert(names.end(), {"omega", "alpha", "beta"});
    if (spec.has_gamma()) names.push_back("gamma");
    for (const auto& e : spec.exogenous) names.push_back("exo_" + e);
    return names;
}

Eigen::VectorXd pack_params(const GarchSpec& spec, const GarchParams& params) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(spec.n_params()));
    Eigen::Index i = 0;
    if (spec.mean_model == MeanModel::constant) v(i++) = params.mu;
    v(i++) = params.omega;
    v(i++) = params.alpha;
    v(i++) = params.beta;
    if (spec.has_gamma()) v(i++) = params.gamma;
    for (double c : params.exo_coefs) v(i++) = c;
    return v;
}

GarchParams unpack_params(const GarchSpec& spec, const Eigen::VectorXd& v) {
    if (v.size() != static_cast<Eigen::Index>(spec.n_params()))
        throw std::invalid_argument("unpack_params: wrong vector length");
    GarchParams p;
    Eigen::Index i = 0;
    p.mu = spec.mean_model == MeanModel::constant ? v(i++) : 0.0;
    p.omega = v(i++);
    p.alpha = v(i++);
    p.beta = v(i++);
    p.gamma = spec.has_gamma() ? v(i++) : 0.0;
    p.exo_coefs.resize(spec.n_exog());
    for (auto& c : p.exo_coefs) c = v(i++);
    return p;
}

Eigen::VectorXd garch_to_unconstrained(const GarchSpec& spec, const GarchParams& params) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(spec.n_params()));
    Eigen::Index i = 0;
    if (spec.mean_model == MeanModel::constant) u(i++) = params.mu;
    switch (spec.kind) {
        case GarchKind::garch11: {
            const double p = params.alpha + params.beta;
            u(i++) = std::log(params.omega);
            u(i++) = logit(p);
            u(i++) = logit(params.alpha / p);
            break;
        }
        case GarchKind::gjr: {
            // Stick-breaking over (alpha/2, beta, (alpha+gamma)/2), whose sum
            // is the persistence alpha + beta + gamma/2.
            const double p = 0.5 * params.alpha + params.beta + 0.5 * (params.alpha + params.gamma);
            const double q1 = 0.5 * params.alpha / p;
            const double q2 = params.beta / (p * (1.0 - q1));
            u(i++) = std::log(params.omega);
            u(i++) = logit(p);
            u(i++) = logit(q1);
            u(i++) = logit(q2);
            break;
        }
        case GarchKind::egarch:
            u(i++) = params.omega;
            u(i++) = params.alpha;
            u(i++) = std::atanh(params.beta);
            u(i++) = params.gamma;
            break;
    }
    for (double c : params.exo_coefs) u(i++) = c;
    return u;
}

GarchParams garch_from_unconstrained(const GarchSpec& spec, const Eigen::VectorXd& u) {
    if (u.size() != static_cast<Eigen::Index>(spec.n_params()))
        throw std::invalid_argument("garch_from_unconstrained: wrong vector length");
    GarchParams params;
    Eigen::Index i = 0;
    params.mu = spec.mean_model == MeanModel::constant ? u(i++) : 0.0;
    switch (spec.kind) {
        case GarchKind::garch11: {
            params.omega = std::exp(u(i++));
            const double p = sigmoid(u(i++));
            const double q = sigmoid(u(i++));
            params.alpha = p * q;
            params.beta = p * (1.0 - q);
            break;
        }
        case GarchKind::gjr: {
            params.omega = std::exp(u(i++));
            const double p = sigmoid(u(i++));
            const double q1 = sigmoid(u(i++));
            const double q2 = sigmoid(u(i++));
            params.alpha = 2.0 * p * q1;
            params.beta = p * (1.0 - q1) * q2;
            const double d = 2.0 * p * (1.0 - q1) * (1.0 - q2);  // alpha + gamma
            params.gamma = d - params.alpha;
            break;
        }
        case GarchKind::egarch:
            params.omega = u(i++);
            params.alpha = u(i++);
            params.beta = std::tanh(u(i++));
            params.gamma = u(i++);
            break;
    }
    params.exo_coefs.resize(spec.n_exog());
    for (auto& c : params.exo_coefs) c = u(i++);
    return params;
}

namespace {

GarchParams starting_point(const GarchSpec& spec, const std::vector<double>& returns,
                           double alpha0, double beta0) {
    GarchParams p;
    p.mu = spec.mean_model == MeanModel::constant ? sample_mean(returns) : 0.0;
    const double var = sample_variance(returns);
    p.alpha = alpha0;
    p.beta = beta0;
    p.gamma = 0.0;
    p.omega = spec.kind == GarchKind::egarch ? (1.0 - beta0) * std::log(var)
                                             : var * (1.0 - alpha0 - beta0);
    p.exo_coefs.assign(spec.n_exog(), 0.0);
    return p;
}

}  // namespace

GarchFit fit_garch(const GarchSpec& spec, const std::vector<double>& returns,
                   const std::vector<std::vector<double>>& exog,
                   const GarchFitOptions& options) {
    if (returns.size() < 250)
        throw std::invalid_argument("fit_garch: need at least 250 returns");
    check_exog(spec, exog, returns.size());

    const double n = static_cast<double>(returns.size());
    // Mean negative log-likelihood keeps gradient tolerances sample-size free.
    const Objective objective = [&](const Eigen::VectorXd& u) {
        return -log_likelihood(spec, garch_from_unconstrained(spec, u), returns, exog) / n;
    };

    std::vector<std::pair<double, double>> starts = {{0.05, 0.90}};
    if (options.multi_start)
        starts.insert(starts.end(), {{0.02, 0.95}, {0.10, 0.85}, {0.15, 0.80}});

    OptimOptions opt;
    opt.max_iterations = options.max_iterations;
    std::optional<OptimResult> best;
    for (const auto& [a0, b0] : starts) {
        const Eigen::VectorXd u0 =
            garch_to_unconstrained(spec, starting_point(spec, returns, a0, b0));
        const OptimResult r = minimize_bfgs(objective, u0, opt);
        if (!best || r.f < best->f) best = r;
    }

    GarchFit fit;
    fit.spec = spec;
    fit.params = garch_from_unconstrained(spec, best->x);
    fit.converged = best->converged;
    fit.iterations = best->iterations;
    fit.grad_norm = best->grad_norm;

    const GarchFilterResult filtered = filter_variance(spec, fit.params, returns, exog);
    fit.variance_path = filtered.variance;
    fit.floor_hits = filtered.floor_hits;
    fit.std_residuals.resize(returns.size());
    for (std::size_t t = 0; t < returns.size(); ++t)
        fit.std_residuals[t] = filtered.residuals[t] / std::sqrt(filtered.variance[t]);
    fit.log_likelihood = -best->f * n;

    // Plain QMLE standard errors from the negative log-likelihood Hessian
    // in the original parameter space.
    const Objective neg_ll = [&](const Eigen::VectorXd& v) {
        return -log_likelihood(spec, unpack_params(spec, v), returns, exog);
    };
    if (const auto hess = numerical_hessian(neg_ll, pack_params(spec, fit.params))) {
        if (const auto se = hessian_std_errors(*hess))
            fit.std_errors = std::vector<double>(se->data(), se->data() + se->size());
    }
    return fit;
}

double forecast_one_step(const GarchFit& fit, double latest_return,
                         const std::vector<double>& latest_exog) {
    if (fit.variance_path.empty())
        throw std::invalid_argument("forecast_one_step: fit has no variance path");
    if (latest_exog.size() != fit.spec.n_exog())
        throw std::invalid_argument("forecast_one_step: exogenous row size does not match spec");

    const GarchParams& p = fit.params;
    const double v_prev = fit.variance_path.back();
    const double eps = latest_return - p.mu;
    double exo = 0.0;
    for (std::size_t i = 0; i < latest_exog.size(); ++i) exo += p.exo_coefs[i] * latest_exog[i];

    if (fit.spec.kind == GarchKind::egarch) {
        const double z = eps / std::sqrt(v_prev);
        const double logv = p.omega + p.alpha * (std::fabs(z) - std::sqrt(2.0 / M_PI)) +
                            p.gamma * z + p.beta * std::log(v_prev) + exo;
        return std::exp(logv);
    }
    double shock = p.alpha;
    if (fit.spec.kind == GarchKind::gjr && eps < 0.0) shock += p.gamma;
    double v = p.omega + shock * eps * eps + p.beta * v_prev + exo;
    if (v < kVarianceFloor) v = kVarianceFloor;
    return v;
}

double persistence(const GarchFit& fit) {
    switch (fit.spec.kind) {
        case GarchKind::garch11: return fit.params.alpha + fit.params.beta;
        case GarchKind::gjr: return fit.params.alpha + fit.params.beta + 0.5 * fit.params.gamma;
        case GarchKind::egarch: return std::fabs(fit.params.beta);
    }
    return 0.0;
}

}  // namespace volcast
