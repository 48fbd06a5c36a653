#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "volcast/backtest.hpp"
#include "volcast/bekk.hpp"
#include "volcast/features.hpp"
#include "volcast/garch.hpp"
#include "volcast/mlmodels.hpp"

namespace volcast {

/// Univariate GARCH-family rolling forecaster. Between refits the fitted
/// parameters are kept and the variance recursion is re-filtered forward
/// over the data seen so far.
class GarchForecaster : public Forecaster {
public:
    GarchForecaster(std::string id, GarchSpec spec, std::string target,
                    GarchFitOptions options = {});

    std::string id() const override { return id_; }
    void fit(const AlignedPanel& panel, std::size_t begin, std::size_t end) override;
    double forecast(const AlignedPanel& panel, std::size_t row) override;

    const std::optional<GarchFit>& last_fit() const { return fit_; }

private:
    std::vector<std::vector<double>> exog_columns(const AlignedPanel& panel, std::size_t begin,
                                                  std::size_t end) const;

    std::string id_;
    GarchSpec spec_;
    std::string target_;
    GarchFitOptions options_;
    std::optional<GarchFit> fit_;
    std::size_t fit_begin_ = 0;
    std::size_t fit_end_ = 0;
};

/// BEKK rolling forecaster; forecasts the target's diagonal entry of
/// H_{t+1}.
class BekkForecaster : public Forecaster {
public:
    BekkForecaster(std::string id, std::vector<std::string> series, std::string target,
                   BekkFitOptions options = {});

    std::string id() const override { return id_; }
    void fit(const AlignedPanel& panel, std::size_t begin, std::size_t end) override;
    double forecast(const AlignedPanel& panel, std::size_t row) override;

    const std::optional<BekkFit>& last_fit() const { return fit_; }

private:
    Eigen::MatrixXd returns_matrix(const AlignedPanel& panel, std::size_t begin,
                                   std::size_t end) const;

    std::string id_;
    std::vector<std::string> series_;
    std::size_t target_index_;
    BekkFitOptions options_;
    std::optional<BekkFit> fit_;
    std::size_t fit_begin_ = 0;
    std::size_t fit_end_ = 0;
};

/// ML rolling forecaster. With more than one hyperparameter candidate the
/// last 20% of each training window (temporal order preserved) selects the
/// candidate by validation MSE before refitting on the full window.
class MlForecaster : public Forecaster {
public:
    MlForecaster(std::string id, MlKind kind, FeatureConfig features,
                 std::vector<MlHyper> candidates);

    std::string id() const override { return id_; }
    bool applies_floor() const override { return true; }
    void fit(const AlignedPanel& panel, std::size_t begin, std::size_t end) override;
    double forecast(const AlignedPanel& panel, std::size_t row) override;

    const std::optional<MlPredictor>& predictor() const { return predictor_; }
    int selected_candidate() const { return selected_; }

private:
    std::string id_;
    MlKind kind_;
    FeatureConfig features_;
    std::vector<MlHyper> candidates_;
    std::optional<MlPredictor> predictor_;
    int selected_ = -1;
};

}  // namespace volcast
