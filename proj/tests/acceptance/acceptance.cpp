// Acceptance suite: runs every release criterion end to end and prints one
// pass/fail line per criterion. Exit status is nonzero if any criterion
// fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "../sim_helpers.hpp"
#include "volcast/backtest.hpp"
#include "volcast/bekk.hpp"
#include "volcast/forecasters.hpp"
#include "volcast/garch.hpp"
#include "volcast/linear.hpp"
#include "volcast/mlp.hpp"
#include "volcast/shap.hpp"
#include "volcast/tree.hpp"

using namespace volcast;
using namespace volcast::testing;

namespace {

int g_failures = 0;

void report(int criterion, bool passed, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", passed ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!passed) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// 1. univariate simulate-and-recover

void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    const double omega = 0.05, alpha = 0.08, beta = 0.90;
    double worst = 0.0;
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto sim = simulate_garch11(0.0, omega, alpha, beta, 20000, seed * 101);
        GarchSpec spec;
        const GarchFit fit = fit_garch(spec, sim.returns);
        const double err = std::max({std::fabs(fit.params.mu - 0.0),
                                     std::fabs(fit.params.omega - omega),
                                     std::fabs(fit.params.alpha - alpha),
                                     std::fabs(fit.params.beta - beta)});
        worst = std::max(worst, err);
        ok = ok && err <= 0.03;
    }
    const double garch_time = seconds_since(start);
    ok = ok && garch_time <= 60.0;

    double worst_gjr = 0.0;
    bool ok_gjr = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto sim = simulate_gjr(0.0, 0.05, 0.05, 0.88, 0.10, 20000, seed * 707);
        GarchSpec spec;
        spec.kind = GarchKind::gjr;
        const GarchFit fit = fit_garch(spec, sim.returns);
        const double err = std::max({std::fabs(fit.params.omega - 0.05),
                                     std::fabs(fit.params.alpha - 0.05),
                                     std::fabs(fit.params.beta - 0.88),
                                     std::fabs(fit.params.gamma - 0.10)});
        worst_gjr = std::max(worst_gjr, err);
        ok_gjr = ok_gjr && err <= 0.05 && fit.params.gamma > 0.0;
    }

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "GARCH(1,1) recovery 10 seeds: max |err| %.4f (<=0.03) in %.1fs (<=60s); "
                  "GJR max |err| %.4f (<=0.05)",
                  worst, garch_time, worst_gjr);
    report(1, ok && ok_gjr, buf);
}

// ---------------------------------------------------------------------------
// 2. BEKK simulate-and-recover

void criterion_2() {
    const auto start = std::chrono::steady_clock::now();
    Eigen::MatrixXd C(2, 2);
    C << 0.05, 0.0, 0.02, 0.04;
    const Eigen::MatrixXd returns = simulate_bekk_diagonal(C, 0.3, 0.9, 10000, 5551212);
    const BekkFit fit = fit_bekk(returns);
    const double elapsed = seconds_since(start);
    const double err = std::max({std::fabs(fit.params.A(0, 0) - 0.3),
                                 std::fabs(fit.params.A(1, 1) - 0.3),
                                 std::fabs(fit.params.B(0, 0) - 0.9),
                                 std::fabs(fit.params.B(1, 1) - 0.9)});
    const bool ok = err <= 0.05 && fit.spectral_radius < 1.0 && elapsed <= 300.0;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "BEKK N=2 T=10000 diagonal recovery: max |err| %.4f (<=0.05), spectral "
                  "radius %.4f (<1) in %.1fs (<=300s)",
                  err, fit.spectral_radius, elapsed);
    report(2, ok, buf);
}

// ---------------------------------------------------------------------------
// 3. N=1 BEKK vs univariate GARCH

void criterion_3() {
    const auto sim = simulate_garch11(0.0, 0.05, 0.08, 0.90, 4000, 909090);
    Eigen::MatrixXd returns(sim.returns.size(), 1);
    for (std::size_t i = 0; i < sim.returns.size(); ++i)
        returns(static_cast<Eigen::Index>(i), 0) = sim.returns[i];
    const BekkFit bekk = fit_bekk(returns);

    std::vector<double> centered(sim.returns.size());
    for (std::size_t i = 0; i < centered.size(); ++i)
        centered[i] = sim.returns[i] - bekk.mean(0);
    GarchSpec spec;
    spec.mean_model = MeanModel::zero;
    const GarchFit garch = fit_garch(spec, centered);

    const double dll = std::fabs(bekk.log_likelihood - garch.log_likelihood);
    const double dc = std::fabs(bekk.params.C(0, 0) * bekk.params.C(0, 0) - garch.params.omega);
    const double da = std::fabs(bekk.params.A(0, 0) * bekk.params.A(0, 0) - garch.params.alpha);
    const double db = std::fabs(bekk.params.B(0, 0) * bekk.params.B(0, 0) - garch.params.beta);
    const bool ok = dll <= 1e-4 && dc <= 1e-3 && da <= 1e-3 && db <= 1e-3;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "N=1 BEKK vs GARCH(1,1): |dloglik| %.2e (<=1e-4), |dc2| %.2e, |da2| %.2e, "
                  "|db2| %.2e (<=1e-3)",
                  dll, dc, da, db);
    report(3, ok, buf);
}

// ---------------------------------------------------------------------------
// 4. TreeSHAP oracle equivalence

int acc_random_subtree(Tree& tree, Rng& rng, int p, int depth, int max_depth, double cover) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    tree.nodes[static_cast<std::size_t>(index)].cover = cover;
    if (depth >= max_depth || rng.uniform() < 0.3) {
        tree.nodes[static_cast<std::size_t>(index)].value = rng.uniform(-5.0, 5.0);
        return index;
    }
    const double share = rng.uniform(0.2, 0.8);
    const int left = acc_random_subtree(tree, rng, p, depth + 1, max_depth, cover * share);
    const int right =
        acc_random_subtree(tree, rng, p, depth + 1, max_depth, cover * (1.0 - share));
    TreeNode& n = tree.nodes[static_cast<std::size_t>(index)];
    n.feature = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
    n.threshold = rng.uniform(-1.0, 1.0);
    n.left = left;
    n.right = right;
    return index;
}

void criterion_4() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(424242);
    double worst_gap = 0.0, worst_local = 0.0;
    for (int rep = 0; rep < 500; ++rep) {
        const int p = 2 + static_cast<int>(rng.below(9));
        TreeEnsemble e;
        const int n_trees = 1 + static_cast<int>(rng.below(20));
        for (int i = 0; i < n_trees; ++i) {
            Tree t;
            acc_random_subtree(t, rng, p, 0, 4, rng.uniform(10.0, 100.0));
            e.trees.push_back(std::move(t));
        }
        const double pick = rng.uniform();
        if (pick < 0.34) {
            e.combiner = Combiner::single;
            e.trees.resize(1);
        } else if (pick < 0.67) {
            e.combiner = Combiner::average;
        } else {
            e.combiner = Combiner::additive;
            e.learning_rate = rng.uniform(0.05, 1.0);
            e.base_score = rng.uniform(-2.0, 2.0);
        }
        for (int r = 0; r < 5; ++r) {
            Eigen::VectorXd row(p);
            for (int j = 0; j < p; ++j) row(j) = rng.uniform(-1.5, 1.5);
            const ShapExplanation fast = tree_shap(e, row);
            const ShapExplanation slow = brute_force_shapley(e, row);
            worst_gap = std::max(worst_gap,
                                 (fast.attributions - slow.attributions).cwiseAbs().maxCoeff());
            worst_local = std::max(
                worst_local,
                std::fabs(fast.base_value + fast.attributions.sum() - fast.model_output));
        }
    }
    const double elapsed = seconds_since(start);
    const bool ok = worst_gap <= 1e-9 && worst_local <= 1e-9 && elapsed <= 120.0;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "TreeSHAP vs brute force, 500 ensembles x 5 rows: max gap %.2e (<=1e-9), "
                  "max local-accuracy defect %.2e (<=1e-9) in %.1fs (<=120s)",
                  worst_gap, worst_local, elapsed);
    report(4, ok, buf);
}

// ---------------------------------------------------------------------------
// 5. metric identities

void criterion_5() {
    Rng rng(5);
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const std::size_t n = 1 + rng.below(60);
        std::vector<ForecastRecord> records(n);
        const bool all_over = trial % 5 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            records[i].model_id = "m";
            records[i].actual = rng.uniform(0.0, 3.0);
            records[i].predicted =
                all_over ? records[i].actual + rng.uniform(0.001, 2.0) : rng.uniform(-0.5, 3.5);
        }
        const MetricRow row = evaluate(records).rows.at(0);
        ok = ok && (row.mmeo + row.mmeu == row.mae);
        ok = ok && (row.rmse >= row.mae - 1e-15);
        if (all_over) ok = ok && row.mmeu == 0.0 && row.mmeo == row.mae;
    }
    report(5, ok,
           "metric identities over 1000 random record sets: MMEO+MMEU == MAE exactly, "
           "RMSE >= MAE, all-overprediction sets give MMEU = 0");
}

// ---------------------------------------------------------------------------
// 6. lasso correctness

void criterion_6() {
    Rng rng(6);
    const Eigen::Index n = 128, p = 6;
    Eigen::MatrixXd raw(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) raw(i, j) = rng.normal();
    raw.rowwise() -= Eigen::RowVectorXd(raw.colwise().mean());
    const Eigen::MatrixXd Q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() *
        Eigen::MatrixXd::Identity(n, p);
    FeatureMatrix fm;
    fm.X = std::sqrt(static_cast<double>(n)) * Q;
    fm.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        fm.y(i) = 2.0 * fm.X(i, 0) - 0.4 * fm.X(i, 1) + 0.05 * fm.X(i, 2) + 0.2 * rng.normal();
    for (Eigen::Index j = 0; j < p; ++j) fm.feature_names.push_back("f" + std::to_string(j));

    const double lambda = 0.15;
    const LinearModel lasso = fit_linear(fm, Penalty::lasso(lambda));
    const Eigen::VectorXd yc = fm.y.array() - fm.y.mean();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double ols_j = fm.X.col(j).dot(yc) / static_cast<double>(n);
        const double expect =
            ols_j > lambda ? ols_j - lambda : (ols_j < -lambda ? ols_j + lambda : 0.0);
        const double scale =
            std::sqrt(fm.X.col(j).squaredNorm() / static_cast<double>(n));
        worst = std::max(worst, std::fabs(lasso.coefficients(j) * scale - expect));
    }

    const FeatureMatrix general = [&] {
        FeatureMatrix g;
        g.X.resize(100, 4);
        g.y.resize(100);
        for (Eigen::Index i = 0; i < 100; ++i) {
            for (Eigen::Index j = 0; j < 4; ++j) g.X(i, j) = rng.normal();
            g.y(i) = g.X(i, 0) - g.X(i, 3) + 0.3 * rng.normal();
        }
        for (int j = 0; j < 4; ++j) g.feature_names.push_back("g" + std::to_string(j));
        return g;
    }();
    const LinearModel ols = fit_linear(general, Penalty::none());
    const LinearModel zero_lasso = fit_linear(general, Penalty::lasso(0.0));
    double worst_zero = std::fabs(ols.intercept - zero_lasso.intercept);
    for (Eigen::Index j = 0; j < 4; ++j)
        worst_zero =
            std::max(worst_zero, std::fabs(ols.coefficients(j) - zero_lasso.coefficients(j)));

    const bool ok = worst <= 1e-8 && worst_zero <= 1e-8;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "lasso: orthonormal soft-threshold gap %.2e (<=1e-8), lambda=0 vs OLS gap "
                  "%.2e (<=1e-8)",
                  worst, worst_zero);
    report(6, ok, buf);
}

// ---------------------------------------------------------------------------
// 7. MLP gradient check

void criterion_7() {
    Rng rng(7);
    double worst = 0.0;
    for (int net = 0; net < 20; ++net) {
        const Eigen::Index n = 10 + static_cast<Eigen::Index>(rng.below(10));
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng.below(3));
        const int h = 2 + static_cast<int>(rng.below(4));
        MlpModel model;
        model.w1.resize(h, p);
        model.b1.resize(h);
        model.w2.resize(h);
        for (int i = 0; i < h; ++i) {
            model.b1(i) = rng.uniform(-0.5, 0.5);
            model.w2(i) = rng.uniform(-1.0, 1.0);
            for (Eigen::Index j = 0; j < p; ++j) model.w1(i, j) = rng.uniform(-1.0, 1.0);
        }
        model.b2 = rng.uniform(-0.5, 0.5);
        Eigen::MatrixXd X(n, p);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal();
            y(i) = rng.normal();
        }
        MlpGradient grad;
        mlp_loss_and_gradient(model, X, y, &grad);

        const double fd_h = 1e-5;
        const auto check = [&](double* param, double analytic) {
            const double save = *param;
            *param = save + fd_h;
            const double up = mlp_loss_and_gradient(model, X, y, nullptr);
            *param = save - fd_h;
            const double dn = mlp_loss_and_gradient(model, X, y, nullptr);
            *param = save;
            const double fd = (up - dn) / (2.0 * fd_h);
            const double rel = std::fabs(fd - analytic) / std::max(1e-8, std::fabs(fd));
            worst = std::max(worst, rel);
        };
        check(&model.b2, grad.b2);
        for (int i = 0; i < h; ++i) {
            check(&model.w2(i), grad.w2(i));
            check(&model.b1(i), grad.b1(i));
            for (Eigen::Index j = 0; j < p; ++j) check(&model.w1(i, j), grad.w1(i, j));
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "MLP analytic vs central-difference gradients, 20 nets: max relative error "
                  "%.2e (<1e-5)",
                  worst);
    report(7, worst < 1e-5, buf);
}

// ---------------------------------------------------------------------------
// 8. boosting monotonicity + interpolation

void criterion_8() {
    bool monotone = true;
    for (std::uint64_t seed = 0; seed < 50 && monotone; ++seed) {
        Rng rng(8000 + seed);
        FeatureMatrix fm;
        fm.X.resize(80, 3);
        fm.y.resize(80);
        for (Eigen::Index i = 0; i < 80; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) fm.X(i, j) = rng.normal();
            fm.y(i) = fm.X(i, 0) - 0.5 * fm.X(i, 1) + 0.5 * rng.normal();
        }
        for (int j = 0; j < 3; ++j) fm.feature_names.push_back("f" + std::to_string(j));
        BoostOptions opts;
        opts.n_rounds = 15;
        opts.learning_rate = 0.3;
        opts.max_depth = 3;
        const TreeEnsemble model = fit_boosted(fm, opts);
        TreeEnsemble partial = model;
        partial.trees.clear();
        double prev =
            (Eigen::VectorXd::Constant(fm.rows(), model.base_score) - fm.y).squaredNorm();
        for (const Tree& t : model.trees) {
            partial.trees.push_back(t);
            const double sse = (partial.predict(fm.X) - fm.y).squaredNorm();
            monotone = monotone && sse <= prev * (1.0 + 1e-12);
            prev = sse;
        }
    }

    Rng rng(88);
    FeatureMatrix fm;
    fm.X.resize(40, 2);
    fm.y.resize(40);
    for (Eigen::Index i = 0; i < 40; ++i) {
        fm.X(i, 0) = static_cast<double>(i) + 0.4 * rng.uniform();
        fm.X(i, 1) = rng.normal();
        fm.y(i) = rng.normal();
    }
    fm.feature_names = {"a", "b"};
    BoostOptions opts;
    opts.n_rounds = 1;
    opts.learning_rate = 1.0;
    opts.max_depth = 0;
    opts.lambda_l2 = 0.0;
    opts.alpha_l1 = 0.0;
    opts.min_child_weight = 1.0;
    const TreeEnsemble interp = fit_boosted(fm, opts);
    const Eigen::VectorXd resid = interp.predict(fm.X) - fm.y;
    const double worst_resid = resid.cwiseAbs().maxCoeff();
    const bool ok = monotone && worst_resid <= 1e-10;
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "boosting: training MSE nonincreasing across rounds on 50 seeds %s; "
                  "interpolation residual %.2e (<=1e-10)",
                  monotone ? "yes" : "NO", worst_resid);
    report(8, ok, buf);
}

// ---------------------------------------------------------------------------
// 9. backtest accounting

class FixedForecaster : public Forecaster {
public:
    explicit FixedForecaster(std::string id) : id_(std::move(id)) {}
    std::string id() const override { return id_; }
    void fit(const AlignedPanel&, std::size_t begin, std::size_t end) override {
        last_window = {begin, end};
    }
    double forecast(const AlignedPanel&, std::size_t row) override {
        if (row < last_window.second)
            throw std::logic_error("window reaches the forecast row");
        return 1.0;
    }
    std::pair<std::size_t, std::size_t> last_window{0, 0};

private:
    std::string id_;
};

void criterion_9() {
    const auto returns = gaussian_sample(4506, 9, 0.0, 0.02);
    AlignedPanel panel;
    panel.names = {"co"};
    panel.columns = {returns};
    panel.tags = {Transform::log_return};
    for (std::size_t t = 0; t < returns.size(); ++t)
        panel.dates.push_back(Date{2006 + static_cast<int>(t / 336),
                                   1 + static_cast<int>((t / 28) % 12),
                                   1 + static_cast<int>(t % 28)});

    auto dummy = std::make_shared<FixedForecaster>("dummy");
    FeatureConfig fc;
    fc.target = "co";
    fc.volatility_columns = {"co"};
    fc.lags = 1;
    auto ols = std::make_shared<MlForecaster>("ols", MlKind::ols, fc, std::vector<MlHyper>{});

    BacktestConfig config;
    config.in_sample_length = 3506;
    config.out_of_sample_length = 1000;
    config.reestimation_period = 250;
    const auto records = rolling_backtest(panel, "co", {dummy, ols}, config);

    // Training windows are [begin, end) with end = the forecast row, so the
    // forecast date is structurally excluded; FixedForecaster::forecast also
    // throws if it is ever handed a row inside its window.
    std::size_t dummy_count = 0, ols_count = 0, bad_windows = 0, failures = 0;
    for (const auto& r : records) {
        (r.model_id == "dummy" ? dummy_count : ols_count) += 1;
        if (r.window_end - r.window_begin != 3506 || r.window_end > panel.rows()) ++bad_windows;
        if (r.fit_failed) ++failures;
    }
    const bool ok =
        dummy_count == 1000 && ols_count == 1000 && bad_windows == 0 && failures == 0;
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "backtest 3506/1000 on 4506 rows: %zu + %zu records (1000 each), 0 "
                  "malformed windows (%zu), 0 lookahead failures (%zu)",
                  dummy_count, ols_count, bad_windows, failures);
    report(9, ok, buf);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf(
        "[INFO] criterion 10: qualitative reproduction on user-fetched market data is a "
        "documented manual run (see README), not part of this suite\n");
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
