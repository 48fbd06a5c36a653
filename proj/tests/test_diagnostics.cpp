#include <doctest.h>

#include <cmath>
#include <vector>

#include "sim_helpers.hpp"
#include "volcast/stats.hpp"

using namespace volcast;
using volcast::testing::gaussian_sample;

namespace {

// Independent chi-square survival oracle: closed form for even df,
// erfc-based df=1 plus the two-step recurrence
// Q_{k+2}(x) = Q_k(x) + (x/2)^{k/2} e^{-x/2} / Gamma(k/2 + 1).
double chi2_sf_oracle(double x, int k) {
    if (k % 2 == 0) {
        double term = 1.0, sum = 1.0;
        for (int j = 1; j < k / 2; ++j) {
            term *= (x / 2.0) / j;
            sum += term;
        }
        return std::exp(-x / 2.0) * sum;
    }
    double q = std::erfc(std::sqrt(x / 2.0));
    for (int kk = 1; kk + 2 <= k; kk += 2)
        q += std::pow(x / 2.0, kk / 2.0) * std::exp(-x / 2.0) / std::tgamma(kk / 2.0 + 1.0);
    return q;
}

// ARCH(1) residuals: eps_t = sqrt(omega + alpha eps_{t-1}^2) z_t.
std::vector<double> simulate_arch1(double omega, double alpha, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> eps(n);
    double prev = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double v = omega + alpha * prev * prev;
        prev = std::sqrt(v) * rng.normal();
        eps[t] = prev;
    }
    return eps;
}

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    double level = 0.0;
    for (auto& v : x) {
        level += rng.normal();
        v = level;
    }
    return x;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("describe: small exact cases") {
    const Summary s = describe({1.0, 2.0, 3.0});
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.std_dev == doctest::Approx(1.0));
    CHECK(s.max == 3.0);
    CHECK(s.min == 1.0);

    const Summary c = describe({4.0, 4.0, 4.0, 4.0});
    CHECK(c.std_dev == 0.0);
    CHECK_FALSE(c.skewness.has_value());
    CHECK_FALSE(c.excess_kurtosis.has_value());

    CHECK_THROWS_AS(describe({1.0}), std::invalid_argument);
}

TEST_CASE("describe: seeded standard normal sample lands near the truth") {
    const auto x = gaussian_sample(100000, 987654321);
    const Summary s = describe(x);
    CHECK(std::fabs(s.mean) < 0.02);
    CHECK(std::fabs(s.std_dev - 1.0) < 0.02);
    CHECK(std::fabs(*s.skewness) < 0.05);
    CHECK(std::fabs(*s.excess_kurtosis) < 0.1);
}

TEST_CASE("chi-square survival matches the series oracle at tabulated points") {
    int checked = 0;
    for (int k : {1, 2, 3, 5, 40}) {
        for (double x : {0.5, 2.0, 10.0, 45.0}) {
            CHECK(chi2_survival(x, k) == doctest::Approx(chi2_sf_oracle(x, k)).epsilon(1e-10));
            ++checked;
        }
    }
    CHECK(checked == 20);
}

TEST_CASE("p-values decrease monotonically in the statistic") {
    for (double k : {1.0, 2.0, 40.0}) {
        double prev = 1.0;
        for (double x = 0.5; x < 80.0; x += 0.5) {
            const double p = chi2_survival(x, k);
            CHECK(p <= prev);
            prev = p;
        }
    }
}

TEST_CASE("jarque_bera: zero for a sample with S=0, K=3 exactly") {
    // k pairs of +-1 and 4k zeros give kurtosis n/(2k) = 3 and zero skew.
    std::vector<double> x = {1.0, -1.0, 1.0, -1.0};
    x.resize(12, 0.0);
    const TestResult r = jarque_bera(x);
    CHECK(r.statistic < 1e-24);
    CHECK(*r.p_value == 1.0);
    CHECK_FALSE(r.verdict_at.at(0.10));
}

TEST_CASE("jarque_bera: n=600, S=0, K=6 gives statistic 225") {
    // 50 pairs of +-1 plus 500 zeros: kurtosis = 600/100 = 6.
    std::vector<double> x;
    for (int i = 0; i < 50; ++i) {
        x.push_back(1.0);
        x.push_back(-1.0);
    }
    x.resize(600, 0.0);
    const TestResult r = jarque_bera(x);
    CHECK(r.statistic == doctest::Approx(225.0).epsilon(1e-9));
    CHECK(*r.p_value < 0.01);
}

TEST_CASE("jarque_bera rejects heavy-tailed t(3) data") {
    Rng rng(5150);
    std::vector<double> x(5000);
    for (auto& v : x) {
        const double z = rng.normal();
        const double c1 = rng.normal(), c2 = rng.normal(), c3 = rng.normal();
        v = z / std::sqrt((c1 * c1 + c2 * c2 + c3 * c3) / 3.0);
    }
    const TestResult r = jarque_bera(x);
    CHECK(*r.p_value < 0.01);
    CHECK(r.verdict_at.at(0.01));
}

TEST_CASE("jarque_bera is invariant under affine rescaling") {
    const auto x = gaussian_sample(500, 42, 0.0, 1.0);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 + 17.5 * x[i];
    CHECK(jarque_bera(x).statistic ==
          doctest::Approx(jarque_bera(y).statistic).epsilon(1e-9));
}

TEST_CASE("jarque_bera preconditions") {
    CHECK_THROWS_AS(jarque_bera({1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(jarque_bera(std::vector<double>(20, 5.0)), std::invalid_argument);
}

TEST_CASE("ljung_box_squared: exactly zero on an orthogonalized series") {
    // Squares are flat except one spike at 0 and one at a distance > m; all
    // lag-k autocovariances up to m pair a nonzero deviation with zeros.
    const int m = 3;
    std::vector<double> sq(16, 2.0);
    sq[0] = 3.0;
    sq[8] = 1.0;
    std::vector<double> resid(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i) resid[i] = std::sqrt(sq[i]);
    const TestResult r = ljung_box_squared(resid, m);
    CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(*r.p_value == 1.0);
}

TEST_CASE("ljung_box_squared: size close to nominal under the null") {
    // 500 seeded replications of iid N(0,1), n=5000, m=40: the 5% rejection
    // rate should sit within +-0.02 of 0.05.
    const int reps = 500;
    int rejections = 0;
    for (int r = 0; r < reps; ++r) {
        const auto z = gaussian_sample(5000, 90000 + static_cast<std::uint64_t>(r));
        if (*ljung_box_squared(z, 40).p_value < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;
    CHECK(rate > 0.03);
    CHECK(rate < 0.07);
}

TEST_CASE("ljung_box_squared flags strong ARCH dependence") {
    const auto eps = simulate_arch1(1.0, 0.5, 5000, 777);
    const Summary s = describe(eps);
    std::vector<double> z(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) z[i] = (eps[i] - s.mean) / s.std_dev;
    CHECK(*ljung_box_squared(z, 40).p_value < 0.01);
}

TEST_CASE("ljung_box_squared preconditions") {
    CHECK_THROWS_AS(ljung_box_squared({1.0, 2.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(ljung_box_squared({1.0, 2.0, 3.0}, 0), std::invalid_argument);
}

TEST_CASE("arch_lm: well-sized under iid residuals") {
    const int reps = 200;
    int calm = 0;
    for (int r = 0; r < reps; ++r) {
        const auto z = gaussian_sample(1000, 50000 + static_cast<std::uint64_t>(r));
        if (*arch_lm(z, 5).p_value > 0.10) ++calm;
    }
    CHECK(calm >= 0.9 * reps);
}

TEST_CASE("arch_lm detects ARCH residuals and clears standardized ones") {
    const auto out = volcast::testing::simulate_garch11(0.0, 0.05, 0.3, 0.6, 4000, 2024);
    CHECK(*arch_lm(out.returns, 5).p_value < 0.01);

    std::vector<double> z(out.returns.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = out.returns[i] / std::sqrt(out.true_variance[i]);
    CHECK(*arch_lm(z, 5).p_value > 0.10);
}

TEST_CASE("arch_lm rejects a singular auxiliary regression") {
    CHECK_THROWS_AS(arch_lm(std::vector<double>(50, 1.0), 3), std::invalid_argument);
    CHECK_THROWS_AS(arch_lm(std::vector<double>(10, 1.0), 5), std::invalid_argument);
}

TEST_CASE("adf: fails to reject a pure random walk") {
    const int reps = 200;
    int fail_to_reject = 0;
    for (int r = 0; r < reps; ++r) {
        const auto x = random_walk(2000, 31000 + static_cast<std::uint64_t>(r));
        if (!adf(x, 5).verdict_at.at(0.05)) ++fail_to_reject;
    }
    CHECK(fail_to_reject >= 0.9 * reps);
}

TEST_CASE("adf: rejects stationary noise and an AR(1)") {
    const int reps = 200;
    int reject = 0;
    for (int r = 0; r < reps; ++r) {
        const auto x = gaussian_sample(2000, 61000 + static_cast<std::uint64_t>(r));
        if (adf(x, 5).verdict_at.at(0.01)) ++reject;
    }
    CHECK(reject >= 0.95 * reps);

    Rng rng(515151);
    std::vector<double> ar(2000);
    double prev = 0.0;
    for (auto& v : ar) {
        prev = 0.5 * prev + rng.normal();
        v = prev;
    }
    const TestResult r = adf(ar, 5);
    CHECK(r.verdict_at.at(0.05));
    CHECK_FALSE(r.p_value.has_value());  // bands only
}

TEST_CASE("adf t-statistic is scale invariant") {
    const auto x = random_walk(500, 99);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 250.0 * x[i];
    CHECK(adf(x, 4).statistic == doctest::Approx(adf(y, 4).statistic).epsilon(1e-8));
    CHECK(adf(x, 4).lag_order == adf(y, 4).lag_order);
}

TEST_CASE("adf precondition: needs length > max_lag + 10") {
    CHECK_THROWS_AS(adf(std::vector<double>(12, 1.0), 2), std::invalid_argument);
}

}  // TEST_SUITE
