#include "volcast/bekk.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "volcast/optimizer.hpp"

namespace volcast {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& demeaned) {
    const double denom = static_cast<double>(demeaned.rows() - 1);
    return demeaned.transpose() * demeaned / denom;
}

// Lower-triangular C with C'C = W (reverse Cholesky via the exchange
// permutation).
Eigen::MatrixXd lower_factor_ctc(const Eigen::MatrixXd& W) {
    const Eigen::Index n = W.rows();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) J(i, n - 1 - i) = 1.0;
    const Eigen::MatrixXd M = J * W * J;
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("bekk: sample covariance is not positive definite");
    const Eigen::MatrixXd U = J * Eigen::MatrixXd(llt.matrixL()) * J;
    return U.transpose();
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    const Eigen::Index n = X.rows(), m = X.cols();
    Eigen::MatrixXd K(n * Y.rows(), m * Y.cols());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            K.block(i * Y.rows(), j * Y.cols(), Y.rows(), Y.cols()) = X(i, j) * Y;
    return K;
}

// Filter and likelihood share one pass; ll == -inf marks a rejected
// candidate (non-PD H_t or non-finite recursion).
double loglik_and_path(const BekkParams& params, const Eigen::MatrixXd& eps,
                       std::vector<Eigen::MatrixXd>* path) {
    const Eigen::Index T = eps.rows();
    const Eigen::Index N = eps.cols();
    const double neg_inf = -std::numeric_limits<double>::infinity();

    const Eigen::MatrixXd intercept = params.C.transpose() * params.C;
    Eigen::MatrixXd H = sample_covariance(eps);
    Eigen::MatrixXd tmp(N, N);
    Eigen::VectorXd v(N);
    double ll = 0.0;
    if (path) {
        path->clear();
        path->reserve(static_cast<std::size_t>(T));
    }

    for (Eigen::Index t = 0; t < T; ++t) {
        if (t > 0) {
            v.noalias() = params.A.transpose() * eps.row(t - 1).transpose();
            tmp.noalias() = params.B.transpose() * H;
            H.noalias() = tmp * params.B;
            H.noalias() += v * v.transpose();
            H += intercept;
            H = 0.5 * (H + H.transpose());  // keep exact symmetry
        }
        if (!H.allFinite()) {
            if (path)
                throw std::runtime_error("bekk filter: non-finite covariance at index " +
                                         std::to_string(t));
            return neg_inf;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(H);
        if (llt.info() != Eigen::Success) {
            if (path)
                throw std::runtime_error("bekk filter: covariance not positive definite at index " +
                                         std::to_string(t));
            return neg_inf;
        }
        if (path) path->push_back(H);
        double log_det = 0.0;
        const auto& L = llt.matrixLLT();
        for (Eigen::Index i = 0; i < N; ++i) log_det += 2.0 * std::log(L(i, i));
        const Eigen::VectorXd u = llt.matrixL().solve(eps.row(t).transpose());
        ll += -0.5 * (static_cast<double>(N) * kLogTwoPi + log_det + u.squaredNorm());
    }
    return ll;
}

}  // namespace

int BekkParams::n_free() const {
    const int n = dim();
    return n * (n + 1) / 2 + 2 * n * n;
}

Eigen::VectorXd pack_bekk(const BekkParams& params) {
    const int n = params.dim();
    Eigen::VectorXd v(params.n_free());
    Eigen::Index k = 0;
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) v(k++) = params.C(i, j);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v(k++) = params.A(i, j);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v(k++) = params.B(i, j);
    return v;
}

BekkParams unpack_bekk(int n, const Eigen::VectorXd& v) {
    BekkParams p;
    p.C = Eigen::MatrixXd::Zero(n, n);
    p.A.resize(n, n);
    p.B.resize(n, n);
    if (v.size() != p.n_free()) throw std::invalid_argument("unpack_bekk: wrong vector length");
    Eigen::Index k = 0;
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) p.C(i, j) = v(k++);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p.A(i, j) = v(k++);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p.B(i, j) = v(k++);
    return p;
}

BekkParams canonicalize_signs(const BekkParams& params) {
    BekkParams out = params;
    const int n = out.dim();
    // C'C is invariant under per-row sign flips of C.
    for (int i = 0; i < n; ++i)
        if (out.C(i, i) < 0.0) out.C.row(i) = -out.C.row(i);
    // The quadratic forms are invariant under global sign flips of A and B.
    auto flip_if_needed = [n](Eigen::MatrixXd& m) {
        for (int i = 0; i < n; ++i) {
            if (m(i, i) != 0.0) {
                if (m(i, i) < 0.0) m = -m;
                return;
            }
        }
    };
    flip_if_needed(out.A);
    flip_if_needed(out.B);
    return out;
}

std::vector<Eigen::MatrixXd> filter_covariance(const BekkParams& params,
                                               const Eigen::MatrixXd& residuals) {
    if (residuals.rows() < 2) throw std::invalid_argument("bekk filter: need at least 2 rows");
    if (params.C.rows() != residuals.cols())
        throw std::invalid_argument("bekk filter: parameter dimension does not match returns");
    std::vector<Eigen::MatrixXd> path;
    loglik_and_path(params, residuals, &path);
    return path;
}

double bekk_log_likelihood(const BekkParams& params, const Eigen::MatrixXd& residuals) {
    return loglik_and_path(params, residuals, nullptr);
}

double bekk_spectral_radius(const BekkParams& params) {
    const Eigen::MatrixXd M = kron(params.A, params.A) + kron(params.B, params.B);
    const Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

BekkFit fit_bekk(const Eigen::MatrixXd& returns, const BekkFitOptions& options) {
    const Eigen::Index T = returns.rows();
    const Eigen::Index N = returns.cols();
    if (N < 1) throw std::invalid_argument("fit_bekk: need at least one series");
    if (T <= N) throw std::invalid_argument("fit_bekk: need more observations than series");

    BekkFit fit;
    fit.mean = returns.colwise().mean();
    Eigen::MatrixXd eps = returns.rowwise() - fit.mean.transpose();

    BekkParams start;
    start.A = 0.3 * Eigen::MatrixXd::Identity(N, N);
    start.B = 0.9 * Eigen::MatrixXd::Identity(N, N);
    start.C = lower_factor_ctc(0.1 * sample_covariance(eps));

    const double scale = static_cast<double>(T);
    const int n = static_cast<int>(N);
    const Objective objective = [&](const Eigen::VectorXd& v) {
        return -bekk_log_likelihood(unpack_bekk(n, v), eps) / scale;
    };

    OptimOptions opt;
    opt.max_iterations = options.max_iterations;
    const OptimResult r = minimize_bfgs(objective, pack_bekk(start), opt);

    fit.params = canonicalize_signs(unpack_bekk(n, r.x));
    fit.log_likelihood = -r.f * scale;
    fit.converged = r.converged;
    fit.iterations = r.iterations;
    fit.grad_norm = r.grad_norm;
    fit.covariance_path = filter_covariance(fit.params, eps);
    fit.spectral_radius = bekk_spectral_radius(fit.params);
    fit.stationary = fit.spectral_radius < 1.0;

    const Objective neg_ll = [&](const Eigen::VectorXd& v) {
        return -bekk_log_likelihood(unpack_bekk(n, v), eps);
    };
    if (const auto hess = numerical_hessian(neg_ll, pack_bekk(fit.params))) {
        if (const auto se = hessian_std_errors(*hess))
            fit.std_errors = std::vector<double>(se->data(), se->data() + se->size());
    }
    return fit;
}

Eigen::VectorXd bekk_forecast_one_step(const BekkFit& fit,
                                       const Eigen::VectorXd& latest_residuals) {
    if (fit.covariance_path.empty())
        throw std::invalid_argument("bekk_forecast_one_step: fit has no covariance path");
    const BekkParams& p = fit.params;
    const Eigen::VectorXd v = p.A.transpose() * latest_residuals;
    const Eigen::MatrixXd H = p.C.transpose() * p.C + v * v.transpose() +
                              p.B.transpose() * fit.covariance_path.back() * p.B;
    return H.diagonal();
}

TestResult multivariate_ljung_box_squared(const BekkFit& fit, const Eigen::MatrixXd& returns,
                                          int m) {
    const Eigen::Index T = returns.rows();
    const Eigen::Index N = returns.cols();
    if (m < 1) throw std::invalid_argument("multivariate_ljung_box_squared: lag order must be >= 1");
    if (static_cast<Eigen::Index>(fit.covariance_path.size()) != T)
        throw std::invalid_argument("multivariate_ljung_box_squared: fit does not match returns");
    if (T <= m + N)
        throw std::invalid_argument("multivariate_ljung_box_squared: sample too short");

    const Eigen::MatrixXd eps = returns.rowwise() - fit.mean.transpose();
    const Eigen::Index d = N * (N + 1) / 2;
    Eigen::MatrixXd s(T, d);
    for (Eigen::Index t = 0; t < T; ++t) {
        const Eigen::LLT<Eigen::MatrixXd> llt(fit.covariance_path[t]);
        const Eigen::VectorXd u = llt.matrixL().solve(eps.row(t).transpose());
        Eigen::Index k = 0;
        for (Eigen::Index j = 0; j < N; ++j)
            for (Eigen::Index i = j; i < N; ++i) s(t, k++) = u(i) * u(j);
    }
    const Eigen::RowVectorXd mean = s.colwise().mean();
    const Eigen::MatrixXd z = s.rowwise() - mean;

    const auto cov_at_lag = [&](int k) {
        return Eigen::MatrixXd(z.bottomRows(T - k).transpose() * z.topRows(T - k) /
                               static_cast<double>(T));
    };
    const Eigen::MatrixXd c0 = cov_at_lag(0);
    const Eigen::LDLT<Eigen::MatrixXd> c0_ldlt(c0);
    if (c0_ldlt.info() != Eigen::Success || !c0_ldlt.isPositive())
        throw std::invalid_argument("multivariate_ljung_box_squared: singular lag-0 covariance");

    double q = 0.0;
    const double dT = static_cast<double>(T);
    for (int k = 1; k <= m; ++k) {
        const Eigen::MatrixXd ck = cov_at_lag(k);
        const Eigen::MatrixXd left = c0_ldlt.solve(ck.transpose());
        const Eigen::MatrixXd right = c0_ldlt.solve(ck);
        q += (left * right).trace() / (dT - k);
    }
    TestResult r;
    r.test = "multivariate_ljung_box_q2";
    r.statistic = dT * dT * q;
    r.lag_order = m;
    const double dof = static_cast<double>(d * d) * m;
    r.p_value = chi2_survival(r.statistic, dof);
    r.verdict_at[0.10] = *r.p_value < 0.10;
    r.verdict_at[0.05] = *r.p_value < 0.05;
    r.verdict_at[0.01] = *r.p_value < 0.01;
    return r;
}

}  // namespace volcast
