#include "volcast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace volcast {

namespace {

constexpr double kAdfCritical1 = -3.43;
constexpr double kAdfCritical5 = -2.86;
constexpr double kAdfCritical10 = -2.57;

void verdicts_from_pvalue(TestResult& r) {
    const double p = *r.p_value;
    r.verdict_at[0.10] = p < 0.10;
    r.verdict_at[0.05] = p < 0.05;
    r.verdict_at[0.01] = p < 0.01;
}

// Regularized lower incomplete gamma P(a,x) by series expansion.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by Lentz continued fraction.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

struct OlsResult {
    Eigen::VectorXd coef;
    Eigen::VectorXd std_err;
    double ssr = 0.0;
    double r_squared = 0.0;
    Eigen::Index n = 0;
};

// Plain OLS with rank check; throws on a rank-deficient design.
OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const char* who) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols())
        throw std::invalid_argument(std::string(who) + ": singular regression design");
    OlsResult r;
    r.coef = qr.solve(y);
    const Eigen::VectorXd resid = y - X * r.coef;
    r.ssr = resid.squaredNorm();
    r.n = X.rows();
    const double dof = static_cast<double>(X.rows() - X.cols());
    const double sigma2 = dof > 0 ? r.ssr / dof : 0.0;
    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    r.std_err = (sigma2 * xtx_inv.diagonal()).cwiseMax(0.0).cwiseSqrt();
    const double mean_y = y.mean();
    const double sst = (y.array() - mean_y).square().sum();
    r.r_squared = sst > 0 ? 1.0 - r.ssr / sst : 0.0;
    return r;
}

}  // namespace

Summary describe(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("describe: need at least 2 observations");
    Summary s;
    s.mean = 0.0;
    s.max = x[0];
    s.min = x[0];
    for (double v : x) {
        s.mean += v;
        s.max = std::max(s.max, v);
        s.min = std::min(s.min, v);
    }
    s.mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0, ss = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        ss += d * d;
    }
    s.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

double chi2_survival(double x, double k) {
    if (x <= 0.0) return 1.0;
    const double a = 0.5 * k;
    const double hx = 0.5 * x;
    if (hx < a + 1.0) return 1.0 - gamma_p_series(a, hx);
    return gamma_q_cf(a, hx);
}

TestResult jarque_bera(const std::vector<double>& x) {
    if (x.size() < 8) throw std::invalid_argument("jarque_bera: need at least 8 observations");
    const Summary s = describe(x);
    if (!s.skewness)
        throw std::invalid_argument("jarque_bera: constant input, moments undefined");
    const double n = static_cast<double>(x.size());
    const double skew = *s.skewness;
    const double exk = *s.excess_kurtosis;
    TestResult r;
    r.test = "jarque_bera";
    r.statistic = n / 6.0 * (skew * skew + exk * exk / 4.0);
    r.p_value = chi2_survival(r.statistic, 2.0);
    verdicts_from_pvalue(r);
    return r;
}

TestResult ljung_box_squared(const std::vector<double>& residuals, int m) {
    const std::size_t n = residuals.size();
    if (m < 1) throw std::invalid_argument("ljung_box_squared: lag order must be >= 1");
    if (n <= static_cast<std::size_t>(m))
        throw std::invalid_argument("ljung_box_squared: lag order must be < sample size");

    std::vector<double> s(n);
    for (std::size_t t = 0; t < n; ++t) s[t] = residuals[t] * residuals[t];
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : s) denom += (v - mean) * (v - mean);
    if (denom <= 0.0)
        throw std::invalid_argument("ljung_box_squared: squared series is constant");

    const double dn = static_cast<double>(n);
    double q = 0.0;
    for (int k = 1; k <= m; ++k) {
        double num = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t)
            num += (s[t] - mean) * (s[t - k] - mean);
        const double rho = num / denom;
        q += rho * rho / (dn - k);
    }
    TestResult r;
    r.test = "ljung_box_q2";
    r.statistic = dn * (dn + 2.0) * q;
    r.lag_order = m;
    r.p_value = chi2_survival(r.statistic, static_cast<double>(m));
    verdicts_from_pvalue(r);
    return r;
}

TestResult arch_lm(const std::vector<double>& residuals, int m) {
    const std::size_t n = residuals.size();
    if (m < 1) throw std::invalid_argument("arch_lm: lag order must be >= 1");
    if (n <= 2 * static_cast<std::size_t>(m))
        throw std::invalid_argument("arch_lm: need n > 2m observations");

    std::vector<double> s(n);
    for (std::size_t t = 0; t < n; ++t) s[t] = residuals[t] * residuals[t];

    const Eigen::Index rows = static_cast<Eigen::Index>(n) - m;
    Eigen::MatrixXd X(rows, m + 1);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::size_t t = static_cast<std::size_t>(i) + m;
        y(i) = s[t];
        X(i, 0) = 1.0;
        for (int k = 1; k <= m; ++k) X(i, k) = s[t - k];
    }
    const double sst = (y.array() - y.mean()).square().sum();
    if (sst <= 0.0) throw std::invalid_argument("arch_lm: squared series is constant");
    const OlsResult fit = ols(X, y, "arch_lm");

    TestResult r;
    r.test = "arch_lm";
    r.statistic = static_cast<double>(rows) * fit.r_squared;
    r.lag_order = m;
    r.p_value = chi2_survival(r.statistic, static_cast<double>(m));
    verdicts_from_pvalue(r);
    return r;
}

namespace {

struct AdfRegression {
    double t_stat = 0.0;
    double aic = 0.0;
};

AdfRegression adf_regression(const std::vector<double>& x, int p, std::size_t t_start) {
    const std::size_t n = x.size();
    const Eigen::Index rows = static_cast<Eigen::Index>(n - t_start);
    const Eigen::Index k = 2 + p;
    Eigen::MatrixXd X(rows, k);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::size_t t = t_start + static_cast<std::size_t>(i);
        y(i) = x[t] - x[t - 1];
        X(i, 0) = 1.0;
        X(i, 1) = x[t - 1];
        for (int j = 1; j <= p; ++j) X(i, 1 + j) = x[t - j] - x[t - j - 1];
    }
    const OlsResult fit = ols(X, y, "adf");
    AdfRegression out;
    out.t_stat = fit.std_err(1) > 0 ? fit.coef(1) / fit.std_err(1)
                                    : -std::numeric_limits<double>::infinity();
    const double dn = static_cast<double>(rows);
    out.aic = dn * std::log(std::max(fit.ssr / dn, 1e-300)) + 2.0 * static_cast<double>(k);
    return out;
}

}  // namespace

TestResult adf(const std::vector<double>& x, int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("adf: max_lag must be >= 0");
    if (x.size() <= static_cast<std::size_t>(max_lag) + 10)
        throw std::invalid_argument("adf: need length > max_lag + 10");

    // Lag by minimum AIC on the common sample, then re-estimate on the
    // longest sample available at the chosen lag.
    int best_p = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    const std::size_t common_start = static_cast<std::size_t>(max_lag) + 1;
    for (int p = 0; p <= max_lag; ++p) {
        const double aic = adf_regression(x, p, common_start).aic;
        if (aic < best_aic - 1e-12) {
            best_aic = aic;
            best_p = p;
        }
    }
    const AdfRegression chosen =
        adf_regression(x, best_p, static_cast<std::size_t>(best_p) + 1);

    TestResult r;
    r.test = "adf";
    r.statistic = chosen.t_stat;
    r.lag_order = best_p;
    r.verdict_at[0.01] = r.statistic < kAdfCritical1;
    r.verdict_at[0.05] = r.statistic < kAdfCritical5;
    r.verdict_at[0.10] = r.statistic < kAdfCritical10;
    return r;
}

}  // namespace volcast
