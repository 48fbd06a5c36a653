#include <doctest.h>

#include "sim_helpers.hpp"
#include "volcast/model_io.hpp"
#include "volcast/shap.hpp"

using namespace volcast;
using volcast::testing::gaussian_sample;

namespace {

FeatureMatrix small_features(std::uint64_t seed) {
    Rng rng(seed);
    FeatureMatrix fm;
    fm.X.resize(60, 3);
    fm.y.resize(60);
    for (Eigen::Index i = 0; i < 60; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) fm.X(i, j) = rng.normal();
        fm.y(i) = fm.X(i, 0) * 0.4 + 0.1 * rng.normal();
    }
    fm.feature_names = {"a", "b", "c"};
    return fm;
}

}  // namespace

TEST_SUITE("model_io") {

TEST_CASE("garch fit round-trips with identical forecasts") {
    const auto sim = volcast::testing::simulate_garch11(0.0, 0.05, 0.1, 0.85, 600, 41);
    GarchSpec spec;
    const GarchFit fit = fit_garch(spec, sim.returns);
    const GarchFit back = garch_fit_from_json(garch_fit_to_json(fit));
    CHECK(forecast_one_step(back, sim.returns.back()) ==
          forecast_one_step(fit, sim.returns.back()));
    CHECK(back.log_likelihood == fit.log_likelihood);
    CHECK(back.params.alpha == fit.params.alpha);
    REQUIRE(back.std_errors.has_value() == fit.std_errors.has_value());
}

TEST_CASE("tree ensemble round-trips with identical predictions and SHAP values") {
    const FeatureMatrix fm = small_features(42);
    BoostOptions opts;
    opts.n_rounds = 15;
    opts.max_depth = 3;
    const TreeEnsemble model = fit_boosted(fm, opts);
    const TreeEnsemble back = ensemble_from_json(to_json(model));
    for (Eigen::Index i = 0; i < fm.rows(); ++i) {
        const Eigen::VectorXd row = fm.X.row(i).transpose();
        CHECK(back.predict_row(row) == model.predict_row(row));
        const ShapExplanation a = tree_shap(model, row);
        const ShapExplanation b = tree_shap(back, row);
        CHECK(a.base_value == b.base_value);
        for (Eigen::Index j = 0; j < 3; ++j) CHECK(a.attributions(j) == b.attributions(j));
    }
}

TEST_CASE("linear, knn and mlp models round-trip bit-exactly") {
    const FeatureMatrix fm = small_features(43);
    const Eigen::VectorXd probe = fm.X.row(5).transpose();

    const MlPredictor lin(fit_linear(fm, Penalty::elastic(0.01, 0.3)));
    CHECK(ml_predictor_from_json(ml_predictor_to_json(lin)).predict_row(probe) ==
          lin.predict_row(probe));

    const MlPredictor knn(fit_knn(fm, 4));
    CHECK(ml_predictor_from_json(ml_predictor_to_json(knn)).predict_row(probe) ==
          knn.predict_row(probe));

    MlpOptions mo;
    mo.epochs = 50;
    mo.seed = 9;
    const MlPredictor mlp(fit_mlp(fm, mo));
    CHECK(ml_predictor_from_json(ml_predictor_to_json(mlp)).predict_row(probe) ==
          mlp.predict_row(probe));
}

TEST_CASE("bekk fit round-trips with identical one-step forecasts") {
    Eigen::MatrixXd C(2, 2);
    C << 0.05, 0.0, 0.01, 0.04;
    const Eigen::MatrixXd returns =
        volcast::testing::simulate_bekk_diagonal(C, 0.3, 0.85, 400, 44);
    const BekkFit fit = fit_bekk(returns);
    const BekkFit back = bekk_fit_from_json(bekk_fit_to_json(fit));
    Eigen::VectorXd latest = returns.row(returns.rows() - 1).transpose() - fit.mean;
    CHECK((bekk_forecast_one_step(back, latest) - bekk_forecast_one_step(fit, latest)).norm() ==
          0.0);
}

TEST_CASE("corrupted JSON is rejected with a byte offset") {
    CHECK_THROWS_WITH_AS(parse_json("{\"a\": 1, oops", "model file"),
                         doctest::Contains("byte"), std::invalid_argument);
}

TEST_CASE("format version mismatch names both versions") {
    nlohmann::json j = {{"format_version", 99}, {"kind", "linear"}};
    try {
        linear_from_json(j);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("99") != std::string::npos);
        CHECK(msg.find("1") != std::string::npos);
    }
}

}  // TEST_SUITE
