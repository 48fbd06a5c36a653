#include "volcast/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace volcast {

namespace {

double guarded(const Objective& f, const Eigen::VectorXd& x) {
    double v;
    try {
        v = f(x);
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

Eigen::VectorXd central_difference_gradient(const Objective& f, const Eigen::VectorXd& x,
                                            double fd_step) {
    const Eigen::Index p = x.size();
    Eigen::VectorXd g(p);
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < p; ++i) {
        const double h = fd_step * std::max(1.0, std::fabs(x(i)));
        xp(i) = x(i) + h;
        const double fp = guarded(f, xp);
        xp(i) = x(i) - h;
        const double fm = guarded(f, xp);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

OptimResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                          const OptimOptions& options) {
    const Eigen::Index p = x0.size();
    OptimResult res;
    res.x = x0;
    res.f = guarded(f, res.x);
    if (!std::isfinite(res.f))
        throw std::invalid_argument("minimize_bfgs: objective not finite at the starting point");

    Eigen::VectorXd g = central_difference_gradient(f, res.x, options.fd_step);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(p, p);
    bool identity_h = true;

    int iter = 0;
    while (iter < options.max_iterations) {
        if (g.norm() <= options.grad_tol) break;
        ++iter;

        Eigen::VectorXd d = -(H * g);
        double slope = d.dot(g);
        if (!(slope < 0.0)) {
            H.setIdentity();
            identity_h = true;
            d = -g;
            slope = d.dot(g);
            if (!(slope < 0.0)) break;  // zero gradient direction, nothing to do
        }

        // Backtracking Armijo search; non-finite objective values shrink the step.
        double step = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = res.x + step * d;
            f_new = guarded(f, x_new);
            if (f_new <= res.f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!identity_h) {
                H.setIdentity();
                identity_h = true;
                continue;  // retry along steepest descent
            }
            break;  // stalled
        }

        const Eigen::VectorXd g_new = central_difference_gradient(f, x_new, options.fd_step);
        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::VectorXd Hy = H * y;
            const double yHy = y.dot(Hy);
            H.noalias() -= rho * (s * Hy.transpose() + Hy * s.transpose());
            H.noalias() += (rho * rho * yHy + rho) * (s * s.transpose());
            identity_h = false;
        } else {
            H.setIdentity();
            identity_h = true;
        }
        res.x = x_new;
        res.f = f_new;
        g = g_new;
    }

    res.gradient = g;
    res.grad_norm = g.norm();
    res.converged = res.grad_norm <= options.converged_tol;
    res.iterations = iter;
    return res;
}

std::optional<Eigen::MatrixXd> numerical_hessian(const Objective& f, const Eigen::VectorXd& x,
                                                 double rel_step) {
    const Eigen::Index p = x.size();
    Eigen::VectorXd h(p);
    for (Eigen::Index i = 0; i < p; ++i) h(i) = rel_step * (std::fabs(x(i)) + 1e-4);

    Eigen::MatrixXd H(p, p);
    const double f0 = guarded(f, x);
    if (!std::isfinite(f0)) return std::nullopt;
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i; j < p; ++j) {
            double v;
            if (i == j) {
                xp(i) = x(i) + h(i);
                const double fp = guarded(f, xp);
                xp(i) = x(i) - h(i);
                const double fm = guarded(f, xp);
                xp(i) = x(i);
                v = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
            } else {
                xp(i) = x(i) + h(i);
                xp(j) = x(j) + h(j);
                const double fpp = guarded(f, xp);
                xp(j) = x(j) - h(j);
                const double fpm = guarded(f, xp);
                xp(i) = x(i) - h(i);
                xp(j) = x(j) + h(j);
                const double fmp = guarded(f, xp);
                xp(j) = x(j) - h(j);
                const double fmm = guarded(f, xp);
                xp(i) = x(i);
                xp(j) = x(j);
                v = (fpp - fpm - fmp + fmm) / (4.0 * h(i) * h(j));
            }
            if (!std::isfinite(v)) return std::nullopt;
            H(i, j) = v;
            H(j, i) = v;
        }
    }
    return H;
}

std::optional<Eigen::VectorXd> hessian_std_errors(const Eigen::MatrixXd& hessian) {
    Eigen::LLT<Eigen::MatrixXd> llt(hessian);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Eigen::MatrixXd inv =
        llt.solve(Eigen::MatrixXd::Identity(hessian.rows(), hessian.cols()));
    Eigen::VectorXd se(hessian.rows());
    for (Eigen::Index i = 0; i < hessian.rows(); ++i) {
        if (inv(i, i) <= 0.0) return std::nullopt;
        se(i) = std::sqrt(inv(i, i));
    }
    return se;
}

}  // namespace volcast
