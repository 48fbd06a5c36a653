#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "volcast/backtest.hpp"
#include "volcast/features.hpp"
#include "volcast/series.hpp"

namespace volcast {

/// Configuration problems map to exit code 2 at the CLI boundary.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DataFileConfig {
    std::string path;
    std::map<std::string, std::string> columns;  // csv header -> series name
};

struct ModelConfig {
    std::string id;
    std::string kind;                     // garch|egarch|gjr|bekk|ols|ridge|...
    std::vector<std::string> exogenous;   // GARCH-X variants
    std::vector<std::string> series;      // BEKK
    nlohmann::json hyper;                 // ML: overrides applied to defaults
    std::vector<nlohmann::json> grid;     // ML: candidate overrides (optional)
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    std::vector<DataFileConfig> files;
    std::map<std::string, Transform> transforms;
    std::set<std::string> arcsinh_fallback;
    std::string target;
    std::vector<std::string> volatility_columns;
    std::vector<std::string> exogenous_columns;
    int lags = 1;
    std::vector<ModelConfig> models;
    BacktestConfig backtest;
};

/// Parse and type-check a config document; field problems raise
/// ConfigError naming the field.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Load the configured CSVs, align them on the union of dates of the
/// highest-frequency series, and apply the configured transforms.
AlignedPanel ingest_panel(const RunConfig& config);

/// Column references in target/features/models checked against the panel;
/// violations raise ConfigError naming the column.
void validate_columns(const RunConfig& config, const AlignedPanel& panel);

FeatureConfig feature_config(const RunConfig& config);

/// Documented per-kind hyperparameter candidates used when a model config
/// carries no explicit grid.
std::vector<nlohmann::json> default_grid(const std::string& kind);

std::shared_ptr<Forecaster> make_forecaster(const ModelConfig& model, const RunConfig& config);

/// Table-1-style diagnostics for every panel column: moments, Jarque-Bera
/// and ADF (bands only).
nlohmann::json diagnostics_json(const AlignedPanel& panel, int adf_max_lag = 20);

nlohmann::json report_to_json(const std::string& target, const EvaluationReport& report,
                              MetricScale scale);

void write_records_csv(const std::vector<ForecastRecord>& records, const std::string& path);

struct PipelineResult {
    int exit_code = 0;
    std::vector<std::string> artifacts;
    std::map<std::string, std::size_t> failed_windows;  // model id -> flagged records
};

/// ingest -> diagnose -> in-sample fits -> rolling backtest -> evaluate ->
/// explain, with every artifact written under config.output_dir.
/// Deterministic for a fixed seed; individual model failures are recorded
/// in the run manifest and do not abort the run.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace volcast
