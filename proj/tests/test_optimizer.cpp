#include <doctest.h>

#include <cmath>
#include <limits>

#include "volcast/optimizer.hpp"

using namespace volcast;

TEST_SUITE("optimizer") {

TEST_CASE("bfgs minimizes a quadratic in a handful of iterations") {
    Eigen::MatrixXd Q(3, 3);
    Q << 4, 1, 0, 1, 3, 0, 0, 0, 2;
    const Eigen::VectorXd b = Eigen::Vector3d(1, -2, 0.5);
    const Objective f = [&](const Eigen::VectorXd& x) {
        return 0.5 * x.dot(Q * x) - b.dot(x);
    };
    const OptimResult r = minimize_bfgs(f, Eigen::Vector3d(5, 5, 5));
    CHECK(r.converged);
    const Eigen::VectorXd expected = Q.ldlt().solve(b);
    CHECK((r.x - expected).norm() < 1e-6);
    CHECK(r.grad_norm <= 1e-5);
}

TEST_CASE("bfgs solves Rosenbrock from the classic start") {
    const Objective f = [](const Eigen::VectorXd& x) {
        const double a = 1.0 - x(0);
        const double b = x(1) - x(0) * x(0);
        return a * a + 100.0 * b * b;
    };
    const OptimResult r = minimize_bfgs(f, Eigen::Vector2d(-1.2, 1.0));
    CHECK(r.converged);
    CHECK(std::fabs(r.x(0) - 1.0) < 1e-5);
    CHECK(std::fabs(r.x(1) - 1.0) < 1e-5);
}

TEST_CASE("bfgs treats non-finite objective values as rejected candidates") {
    const Objective f = [](const Eigen::VectorXd& x) {
        if (x.norm() > 3.0) return std::numeric_limits<double>::quiet_NaN();
        return (x - Eigen::Vector2d(1.0, 2.0)).squaredNorm();
    };
    const OptimResult r = minimize_bfgs(f, Eigen::Vector2d(0.0, 0.0));
    CHECK(r.converged);
    CHECK((r.x - Eigen::Vector2d(1.0, 2.0)).norm() < 1e-6);
}

TEST_CASE("bfgs rejects a non-finite starting point") {
    const Objective f = [](const Eigen::VectorXd&) {
        return std::numeric_limits<double>::infinity();
    };
    CHECK_THROWS_AS(minimize_bfgs(f, Eigen::Vector2d(0, 0)), std::invalid_argument);
}

TEST_CASE("central differences reproduce an analytic gradient") {
    const Objective f = [](const Eigen::VectorXd& x) {
        return x(0) * x(0) * x(0) + 2.0 * x(0) * x(1) + std::sin(x(1));
    };
    const Eigen::VectorXd x = Eigen::Vector2d(0.7, -1.3);
    const Eigen::VectorXd g = central_difference_gradient(f, x, 1e-6);
    CHECK(g(0) == doctest::Approx(3.0 * 0.7 * 0.7 + 2.0 * -1.3).epsilon(1e-6));
    CHECK(g(1) == doctest::Approx(2.0 * 0.7 + std::cos(-1.3)).epsilon(1e-6));
}

TEST_CASE("numerical hessian of a quadratic recovers the matrix") {
    Eigen::MatrixXd Q(2, 2);
    Q << 5, 1, 1, 2;
    const Objective f = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(Q * x); };
    const auto H = numerical_hessian(f, Eigen::Vector2d(0.3, -0.4));
    REQUIRE(H.has_value());
    CHECK((*H - Q).norm() < 1e-4 * Q.norm());

    const auto se = hessian_std_errors(*H);
    REQUIRE(se.has_value());
    const Eigen::MatrixXd inv = Q.inverse();
    CHECK((*se)(0) == doctest::Approx(std::sqrt(inv(0, 0))).epsilon(1e-3));
    CHECK((*se)(1) == doctest::Approx(std::sqrt(inv(1, 1))).epsilon(1e-3));
}

TEST_CASE("hessian_std_errors refuses a non-PD matrix") {
    Eigen::MatrixXd H(2, 2);
    H << 1, 0, 0, -1;
    CHECK_FALSE(hessian_std_errors(H).has_value());
}

}  // TEST_SUITE
