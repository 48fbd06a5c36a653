#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace volcast {

/// Hypothesis-test outcome. p_value is absent for tests reported against
/// critical-value bands only (ADF). verdict_at maps a significance level
/// to true = reject the null.
struct TestResult {
    std::string test;
    double statistic = 0.0;
    std::optional<double> p_value;
    int lag_order = 0;
    std::map<double, bool> verdict_at;  // keys 0.10, 0.05, 0.01
};

struct Summary {
    double mean = 0.0;
    double max = 0.0;
    double min = 0.0;
    double std_dev = 0.0;  // unbiased (n-1) denominator
    std::optional<double> skewness;         // undefined for constant input
    std::optional<double> excess_kurtosis;  // undefined for constant input
};

/// Sample moments; requires length >= 2.
Summary describe(const std::vector<double>& x);

/// Survival function of the chi-square distribution with k degrees of
/// freedom, 1 - CDF(x), via the regularized incomplete gamma function.
double chi2_survival(double x, double k);

/// Jarque-Bera normality test: JB = n/6 (S^2 + (K-3)^2/4), chi-square(2)
/// reference. Requires length >= 8; constant input is rejected.
TestResult jarque_bera(const std::vector<double>& x);

/// Ljung-Box Q statistic of order m on the squared input series
/// (standardized residuals are expected), chi-square(m) reference.
TestResult ljung_box_squared(const std::vector<double>& residuals, int m);

/// Engle's ARCH-LM test of order m: auxiliary regression of eps^2 on m of
/// its own lags, LM = n R^2, chi-square(m) reference. Requires n > 2m.
TestResult arch_lm(const std::vector<double>& residuals, int m);

/// Augmented Dickey-Fuller test, constant-only specification, lag order
/// chosen by minimum AIC up to max_lag. Verdicts against the standard
/// constant-only critical values (-3.43 / -2.86 / -2.57); no p-value.
TestResult adf(const std::vector<double>& x, int max_lag);

}  // namespace volcast
