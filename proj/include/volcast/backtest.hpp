#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "volcast/series.hpp"

namespace volcast {

enum class MetricScale { variance, volatility };

struct BacktestConfig {
    std::size_t in_sample_length = 3506;
    std::size_t out_of_sample_length = 1000;
    std::size_t reestimation_period = 1;  // days between refits
    double volatility_floor = 0.0;        // applied to ML predictions
    MetricScale scale = MetricScale::variance;
};

struct ForecastRecord {
    Date date;
    std::string model_id;
    double actual = 0.0;     // squared return of the target
    double predicted = 0.0;  // variance forecast
    bool refit = false;
    bool fit_failed = false;           // carried the previous forecast
    std::size_t window_begin = 0;      // training rows [begin, end)
    std::size_t window_end = 0;
};

/// One model in the rolling harness. fit() sees panel rows [begin, end);
/// forecast(row) must only read rows < row.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string id() const = 0;
    /// ML predictions get the volatility floor at the harness boundary.
    virtual bool applies_floor() const { return false; }
    virtual void fit(const AlignedPanel& panel, std::size_t begin, std::size_t end) = 0;
    virtual double forecast(const AlignedPanel& panel, std::size_t row) = 0;
};

/// Rolling one-step-ahead backtest: for each out-of-sample day t, fit (or
/// reuse, per reestimation_period) on the in_sample_length rows ending at
/// t-1 and forecast the variance of day t. Produces exactly
/// out_of_sample_length records per model. A fit or forecast failure
/// yields a flagged record carrying the previous forecast (the training
/// window's mean squared return when there is none); the run never aborts.
std::vector<ForecastRecord> rolling_backtest(const AlignedPanel& panel,
                                             const std::string& target,
                                             const std::vector<std::shared_ptr<Forecaster>>& models,
                                             const BacktestConfig& config);

struct MetricRow {
    std::string model_id;
    double rmse = 0.0;
    double mae = 0.0;   // equals mmeo + mmeu by construction
    double mmeo = 0.0;  // mean over-prediction mass, full-sample 1/n
    double mmeu = 0.0;  // mean under-prediction mass, full-sample 1/n
    std::size_t n_forecasts = 0;
};

struct EvaluationReport {
    std::vector<MetricRow> rows;
    /// metric name -> ids of every model attaining the minimum
    std::map<std::string, std::set<std::string>> best;
};

/// RMSE = sqrt(1/n sum (a-p)^2), MAE = 1/n sum |a-p|,
/// MMEO = 1/n sum [p>a](p-a), MMEU = 1/n sum [p<a](a-p), grouped by model.
/// Under the volatility scale both sides enter as square roots (negative
/// predictions clamped to zero first).
EvaluationReport evaluate(const std::vector<ForecastRecord>& records,
                          MetricScale scale = MetricScale::variance);

struct ComparisonEntry {
    std::string commodity;
    std::string model_id;
    double rmse = 0.0, mae = 0.0, mmeo = 0.0, mmeu = 0.0;
    std::size_t n_forecasts = 0;
    bool best_rmse = false, best_mae = false, best_mmeo = false, best_mmeu = false;
};

/// Models x commodities table; every minimum per metric and commodity is
/// marked (ties mark all).
std::vector<ComparisonEntry> compare_report(
    const std::vector<std::pair<std::string, EvaluationReport>>& reports);

}  // namespace volcast
