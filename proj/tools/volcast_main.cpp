// volcast: volatility modeling and forecasting for commodity price series.
//
// Subcommands: ingest, diagnose, fit-garch, fit-bekk, fit-ml, backtest,
// explain, report, run. Global flags override config fields; precedence is
// flags > config > defaults. VOLCAST_OUTPUT_DIR sets the default output
// directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "volcast/csv.hpp"
#include "volcast/forecasters.hpp"
#include "volcast/model_io.hpp"
#include "volcast/pipeline.hpp"
#include "volcast/rng.hpp"
#include "volcast/shap.hpp"
#include "volcast/stats.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace volcast;

struct GlobalFlags {
    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

std::string default_output_dir() {
    const char* env = std::getenv("VOLCAST_OUTPUT_DIR");
    return env ? env : "out";
}

void emit_error(const std::string& code, const std::string& message) {
    const json err{{"error", {{"code", code}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig resolve_config(const GlobalFlags& flags) {
    if (flags.config_path.empty()) throw ConfigError("config: --config is required");
    RunConfig config = load_run_config(flags.config_path);
    if (flags.seed_set) config.seed = flags.seed;
    if (!flags.output_dir.empty())
        config.output_dir = flags.output_dir;
    else if (config.output_dir.empty() || config.output_dir == "out")
        config.output_dir = default_output_dir();
    return config;
}

AlignedPanel load_panel_arg(const std::string& panel_path, const std::string& manifest_path) {
    std::string manifest = manifest_path;
    if (manifest.empty()) {
        const fs::path side = fs::path(panel_path).parent_path() / "panel.manifest.json";
        if (fs::exists(side)) manifest = side.string();
    }
    return load_panel_csv(panel_path, manifest);
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

int cmd_ingest(const GlobalFlags& flags) {
    const RunConfig config = resolve_config(flags);
    const AlignedPanel panel = ingest_panel(config);
    validate_columns(config, panel);
    fs::create_directories(config.output_dir);
    write_panel_csv(panel, (fs::path(config.output_dir) / "panel.csv").string());
    write_panel_manifest(panel, (fs::path(config.output_dir) / "panel.manifest.json").string());
    std::cout << "wrote panel with " << panel.rows() << " rows x " << panel.cols()
              << " columns to " << config.output_dir << "\n";
    return 0;
}

int cmd_diagnose(const GlobalFlags& flags, const std::string& panel_path,
                 const std::string& manifest_path, int max_lag) {
    AlignedPanel panel;
    std::string out_dir;
    if (!panel_path.empty()) {
        panel = load_panel_arg(panel_path, manifest_path);
        out_dir = flags.output_dir.empty() ? default_output_dir() : flags.output_dir;
    } else {
        const RunConfig config = resolve_config(flags);
        panel = ingest_panel(config);
        out_dir = config.output_dir;
    }
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "diagnostics.json").string();
    write_text(path, diagnostics_json(panel, max_lag).dump(2) + "\n");
    std::cout << diagnostics_json(panel, max_lag).dump(2) << "\n";
    return 0;
}

int cmd_fit_garch(const std::string& panel_path, const std::string& manifest_path,
                  const std::string& model, const std::string& target, const std::string& exog,
                  const std::string& out_path, bool multi_start) {
    const AlignedPanel panel = load_panel_arg(panel_path, manifest_path);
    GarchSpec spec;
    spec.kind = garch_kind_from_string(model);
    spec.exogenous = split_list(exog);
    GarchFitOptions options;
    options.multi_start = multi_start;

    GarchForecaster forecaster("cli", spec, target, options);
    forecaster.fit(panel, 0, panel.rows());
    const GarchFit& fit = *forecaster.last_fit();

    json out = garch_fit_to_json(fit);
    out["persistence"] = persistence(fit);
    const int m = 40;
    if (fit.std_residuals.size() > 2 * static_cast<std::size_t>(m) + 1) {
        const auto add = [&](const char* name, const TestResult& r) {
            out["diagnostics"][name] = {{"statistic", r.statistic},
                                        {"p_value", r.p_value ? json(*r.p_value) : json()},
                                        {"lag_order", r.lag_order}};
        };
        add("ljung_box_q2_40", ljung_box_squared(fit.std_residuals, m));
        add("arch_lm_40", arch_lm(fit.std_residuals, m));
    }
    const std::string text = out.dump(2) + "\n";
    if (!out_path.empty()) write_text(out_path, text);
    std::cout << text;
    return 0;
}

int cmd_fit_bekk(const std::string& panel_path, const std::string& manifest_path,
                 const std::string& series_csv, const std::string& out_path) {
    const AlignedPanel panel = load_panel_arg(panel_path, manifest_path);
    const std::vector<std::string> series = split_list(series_csv);
    if (series.size() < 2) throw ConfigError("fit-bekk: --series needs at least 2 columns");

    BekkForecaster forecaster("cli", series, series.front());
    forecaster.fit(panel, 0, panel.rows());
    const BekkFit& fit = *forecaster.last_fit();

    json out = bekk_fit_to_json(fit);
    Eigen::MatrixXd returns(static_cast<Eigen::Index>(panel.rows()),
                            static_cast<Eigen::Index>(series.size()));
    for (std::size_t j = 0; j < series.size(); ++j)
        for (std::size_t t = 0; t < panel.rows(); ++t)
            returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) =
                panel.column(series[j])[t];
    const int m = 40;
    if (panel.rows() > static_cast<std::size_t>(m) + series.size() + 1) {
        const TestResult q = multivariate_ljung_box_squared(fit, returns, m);
        out["diagnostics"]["multivariate_q2_40"] = {
            {"statistic", q.statistic},
            {"p_value", q.p_value ? json(*q.p_value) : json()},
            {"lag_order", q.lag_order}};
    }
    const std::string text = out.dump(2) + "\n";
    if (!out_path.empty()) write_text(out_path, text);
    std::cout << text;
    return 0;
}

int cmd_fit_ml(const std::string& panel_path, const std::string& manifest_path,
               const std::string& model, const std::string& target, const std::string& vol_cols,
               const std::string& exog_cols, int lags, const json& hyper_json,
               std::uint64_t seed, const std::string& out_path) {
    const AlignedPanel panel = load_panel_arg(panel_path, manifest_path);
    FeatureConfig fc;
    fc.target = target;
    fc.volatility_columns = vol_cols.empty() ? std::vector<std::string>{target}
                                             : split_list(vol_cols);
    fc.exogenous_columns = split_list(exog_cols);
    fc.lags = lags;

    const MlKind kind = ml_kind_from_string(model);
    const FeatureMatrix fm = build_features(panel, fc);
    MlHyper hyper;
    if (hyper_json.contains("lambda")) hyper.lambda = hyper_json.at("lambda").get<double>();
    if (hyper_json.contains("mix")) hyper.mix = hyper_json.at("mix").get<double>();
    if (hyper_json.contains("max_depth")) hyper.max_depth = hyper_json.at("max_depth").get<int>();
    if (hyper_json.contains("min_leaf")) hyper.min_leaf = hyper_json.at("min_leaf").get<int>();
    if (hyper_json.contains("n_trees")) hyper.n_trees = hyper_json.at("n_trees").get<int>();
    if (hyper_json.contains("feature_fraction"))
        hyper.feature_fraction = hyper_json.at("feature_fraction").get<double>();
    if (hyper_json.contains("n_rounds")) hyper.n_rounds = hyper_json.at("n_rounds").get<int>();
    if (hyper_json.contains("learning_rate"))
        hyper.learning_rate = hyper_json.at("learning_rate").get<double>();
    if (hyper_json.contains("lambda_l2")) hyper.lambda_l2 = hyper_json.at("lambda_l2").get<double>();
    if (hyper_json.contains("alpha_l1")) hyper.alpha_l1 = hyper_json.at("alpha_l1").get<double>();
    if (hyper_json.contains("min_child_weight"))
        hyper.min_child_weight = hyper_json.at("min_child_weight").get<double>();
    if (hyper_json.contains("k")) hyper.k = hyper_json.at("k").get<int>();
    if (hyper_json.contains("hidden_width"))
        hyper.hidden_width = hyper_json.at("hidden_width").get<int>();
    if (hyper_json.contains("epochs")) hyper.epochs = hyper_json.at("epochs").get<int>();
    if (hyper_json.contains("step_size")) hyper.step_size = hyper_json.at("step_size").get<double>();
    hyper.seed = seed;

    const MlPredictor predictor = fit_ml(kind, fm, hyper);
    json features{{"target", fc.target},
                  {"volatility_columns", fc.volatility_columns},
                  {"exogenous_columns", fc.exogenous_columns},
                  {"lags", fc.lags},
                  {"names", fm.feature_names}};
    const json artifact{{"format_version", kModelFormatVersion},
                        {"model_kind", model},
                        {"features", std::move(features)},
                        {"model", ml_predictor_to_json(predictor)}};
    const std::string text = artifact.dump(2) + "\n";
    if (!out_path.empty()) write_text(out_path, text);
    std::cout << text;
    return 0;
}

int cmd_backtest(const GlobalFlags& flags) {
    const RunConfig config = resolve_config(flags);
    const AlignedPanel panel = ingest_panel(config);
    validate_columns(config, panel);
    if (config.backtest.in_sample_length + config.backtest.out_of_sample_length > panel.rows())
        throw ConfigError("config: backtest window exceeds panel length " +
                          std::to_string(panel.rows()));

    std::vector<std::shared_ptr<Forecaster>> forecasters;
    for (const auto& m : config.models) forecasters.push_back(make_forecaster(m, config));
    const auto records = rolling_backtest(panel, config.target, forecasters, config.backtest);

    fs::create_directories(config.output_dir);
    write_records_csv(records, (fs::path(config.output_dir) / "records.csv").string());
    const EvaluationReport report = evaluate(records, config.backtest.scale);
    write_text((fs::path(config.output_dir) / "report.json").string(),
               report_to_json(config.target, report, config.backtest.scale).dump(2) + "\n");
    std::cout << "backtest complete: " << records.size() << " records, "
              << report.rows.size() << " models\n";
    return 0;
}

int cmd_explain(const std::string& model_path, const std::string& panel_path,
                const std::string& manifest_path, const std::string& out_dir) {
    const json artifact = parse_json(read_text(model_path), "model file");
    check_format_version(artifact, "model file");
    if (!artifact.contains("model") || !artifact.contains("features"))
        throw std::invalid_argument("explain: artifact lacks model/features sections");
    const MlPredictor predictor = ml_predictor_from_json(artifact.at("model"));
    const TreeEnsemble* ensemble = predictor.as_tree_ensemble();
    if (!ensemble)
        throw std::invalid_argument("explain: SHAP requires a tree-based model artifact");

    const json& f = artifact.at("features");
    FeatureConfig fc;
    fc.target = f.at("target").get<std::string>();
    fc.volatility_columns = f.at("volatility_columns").get<std::vector<std::string>>();
    fc.exogenous_columns = f.at("exogenous_columns").get<std::vector<std::string>>();
    fc.lags = f.at("lags").get<int>();

    const AlignedPanel panel = load_panel_arg(panel_path, manifest_path);
    const FeatureMatrix fm = build_features(panel, fc);

    fs::create_directories(out_dir);
    const std::string csv_path = (fs::path(out_dir) / ("shap_" + fc.target + ".csv")).string();
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write '" + csv_path + "'");
    csv << "row_index,feature,feature_value,shap_value\n";
    double base_value = 0.0;
    Eigen::VectorXd mean_abs = Eigen::VectorXd::Zero(fm.n_features());
    for (Eigen::Index r = 0; r < fm.rows(); ++r) {
        const ShapExplanation ex = tree_shap(*ensemble, fm.X.row(r).transpose());
        base_value = ex.base_value;
        mean_abs += ex.attributions.cwiseAbs();
        for (Eigen::Index j = 0; j < fm.n_features(); ++j)
            csv << r << ',' << fm.feature_names[static_cast<std::size_t>(j)] << ','
                << ex.feature_values(j) << ',' << ex.attributions(j) << '\n';
    }
    mean_abs /= static_cast<double>(fm.rows());
    std::vector<int> order(static_cast<std::size_t>(fm.n_features()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (mean_abs(a) != mean_abs(b)) return mean_abs(a) > mean_abs(b);
        return a < b;
    });
    json importance = json::array();
    for (int j : order)
        importance.push_back({{"feature", fm.feature_names[static_cast<std::size_t>(j)]},
                              {"mean_abs_shap", mean_abs(j)}});
    const json summary{{"format_version", kModelFormatVersion},
                       {"target", fc.target},
                       {"base_value", base_value},
                       {"importance", std::move(importance)}};
    write_text((fs::path(out_dir) / "shap_summary.json").string(), summary.dump(2) + "\n");
    std::cout << "explained " << fm.rows() << " rows; top feature: "
              << fm.feature_names[static_cast<std::size_t>(order.front())] << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir) {
    std::vector<std::pair<std::string, EvaluationReport>> reports;
    for (const auto& path : inputs) {
        const json j = parse_json(read_text(path), path);
        check_format_version(j, path);
        EvaluationReport report;
        for (const auto& m : j.at("models")) {
            MetricRow row;
            row.model_id = m.at("model").get<std::string>();
            row.rmse = m.at("rmse").get<double>();
            row.mae = m.at("mae").get<double>();
            row.mmeo = m.at("mmeo").get<double>();
            row.mmeu = m.at("mmeu").get<double>();
            row.n_forecasts = m.at("n_forecasts").get<std::size_t>();
            report.rows.push_back(row);
        }
        // Recompute best markers so merged reports stay consistent.
        const auto mark = [&report](const char* name, auto get) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& r : report.rows) best = std::min(best, get(r));
            for (const auto& r : report.rows)
                if (get(r) == best) report.best[name].insert(r.model_id);
        };
        mark("rmse", [](const MetricRow& r) { return r.rmse; });
        mark("mae", [](const MetricRow& r) { return r.mae; });
        mark("mmeo", [](const MetricRow& r) { return r.mmeo; });
        mark("mmeu", [](const MetricRow& r) { return r.mmeu; });
        reports.emplace_back(j.at("target").get<std::string>(), std::move(report));
    }
    const auto table = compare_report(reports);

    fs::create_directories(out_dir);
    json out = json::array();
    std::ofstream csv((fs::path(out_dir) / "comparison.csv").string());
    csv << "commodity,model,rmse,mae,mmeo,mmeu,n_forecasts,best_rmse,best_mae,best_mmeo,best_mmeu\n";
    for (const auto& e : table) {
        out.push_back({{"commodity", e.commodity},
                       {"model", e.model_id},
                       {"rmse", e.rmse},
                       {"mae", e.mae},
                       {"mmeo", e.mmeo},
                       {"mmeu", e.mmeu},
                       {"n_forecasts", e.n_forecasts},
                       {"best",
                        {{"rmse", e.best_rmse},
                         {"mae", e.best_mae},
                         {"mmeo", e.best_mmeo},
                         {"mmeu", e.best_mmeu}}}});
        csv << e.commodity << ',' << e.model_id << ',' << e.rmse << ',' << e.mae << ',' << e.mmeo
            << ',' << e.mmeu << ',' << e.n_forecasts << ',' << e.best_rmse << ',' << e.best_mae
            << ',' << e.best_mmeo << ',' << e.best_mmeu << '\n';
    }
    write_text((fs::path(out_dir) / "comparison.json").string(), out.dump(2) + "\n");
    std::cout << "wrote comparison for " << reports.size() << " commodities\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"volatility modeling and forecasting toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "JSON run configuration");
    app.add_option("--out", flags.output_dir, "output directory (overrides config)");
    auto* seed_opt = app.add_option("--seed", flags.seed, "global seed (overrides config)");

    auto* ingest = app.add_subcommand("ingest", "load, align and transform raw CSV series");

    std::string panel_path, manifest_path;
    int adf_lag = 20;
    auto* diagnose = app.add_subcommand("diagnose", "descriptive statistics and tests per column");
    diagnose->add_option("--panel", panel_path, "ingested panel.csv (otherwise uses --config)");
    diagnose->add_option("--manifest", manifest_path, "panel manifest path");
    diagnose->add_option("--adf-max-lag", adf_lag, "maximum ADF lag order");

    std::string g_model = "garch", g_target, g_exog, g_out;
    bool g_multi = false;
    auto* fitg = app.add_subcommand("fit-garch", "fit a univariate GARCH-family model");
    fitg->add_option("--panel", panel_path, "ingested panel.csv")->required();
    fitg->add_option("--manifest", manifest_path, "panel manifest path");
    fitg->add_option("--model", g_model, "garch|egarch|gjr");
    fitg->add_option("--target", g_target, "return column")->required();
    fitg->add_option("--exog", g_exog, "comma-separated exogenous columns");
    fitg->add_option("--out-file", g_out, "output JSON path");
    fitg->add_flag("--multi-start", g_multi, "sweep extra starting points");

    std::string b_series, b_out;
    auto* fitb = app.add_subcommand("fit-bekk", "fit a full BEKK(1,1) model");
    fitb->add_option("--panel", panel_path, "ingested panel.csv")->required();
    fitb->add_option("--manifest", manifest_path, "panel manifest path");
    fitb->add_option("--series", b_series, "comma-separated return columns")->required();
    fitb->add_option("--out-file", b_out, "output JSON path");

    std::string m_model, m_target, m_vol, m_exog, m_out, m_hyper = "{}";
    int m_lags = 1;
    auto* fitm = app.add_subcommand("fit-ml", "fit an ML regressor on squared returns");
    fitm->add_option("--panel", panel_path, "ingested panel.csv")->required();
    fitm->add_option("--manifest", manifest_path, "panel manifest path");
    fitm->add_option("--model", m_model, "ols|ridge|lasso|enet|tree|forest|boost|knn|mlp")
        ->required();
    fitm->add_option("--target", m_target, "target commodity column")->required();
    fitm->add_option("--vol-cols", m_vol, "volatility columns (default: the target)");
    fitm->add_option("--exog-cols", m_exog, "exogenous columns");
    fitm->add_option("--lags", m_lags, "squared-return lags");
    fitm->add_option("--hyper", m_hyper, "hyperparameters as inline JSON");
    fitm->add_option("--out-file", m_out, "output JSON path");

    auto* backtest = app.add_subcommand("backtest", "rolling out-of-sample forecast comparison");

    std::string e_model, e_out;
    auto* explain = app.add_subcommand("explain", "TreeSHAP attributions for a tree model");
    explain->add_option("--model", e_model, "fit-ml artifact JSON")->required();
    explain->add_option("--data", panel_path, "ingested panel.csv")->required();
    explain->add_option("--manifest", manifest_path, "panel manifest path");
    explain->add_option("--out", e_out, "output directory")->default_val(default_output_dir());

    std::vector<std::string> r_inputs;
    std::string r_out;
    auto* report = app.add_subcommand("report", "merge per-commodity reports into one table");
    report->add_option("inputs", r_inputs, "report.json files")->required();
    report->add_option("--out", r_out, "output directory")->default_val(default_output_dir());

    auto* run = app.add_subcommand("run", "full pipeline: ingest through explain");

    CLI11_PARSE(app, argc, argv);
    flags.seed_set = seed_opt->count() > 0;

    try {
        if (ingest->parsed()) return cmd_ingest(flags);
        if (diagnose->parsed()) return cmd_diagnose(flags, panel_path, manifest_path, adf_lag);
        if (fitg->parsed())
            return cmd_fit_garch(panel_path, manifest_path, g_model, g_target, g_exog, g_out,
                                 g_multi);
        if (fitb->parsed()) return cmd_fit_bekk(panel_path, manifest_path, b_series, b_out);
        if (fitm->parsed())
            return cmd_fit_ml(panel_path, manifest_path, m_model, m_target, m_vol, m_exog, m_lags,
                              parse_json(m_hyper, "--hyper"),
                              flags.seed_set ? flags.seed : 0, m_out);
        if (backtest->parsed()) return cmd_backtest(flags);
        if (explain->parsed()) return cmd_explain(e_model, panel_path, manifest_path, e_out);
        if (report->parsed()) return cmd_report(r_inputs, r_out);
        if (run->parsed()) {
            const RunConfig config = resolve_config(flags);
            const PipelineResult result = run_pipeline(config);
            std::cout << "pipeline wrote " << result.artifacts.size() << " artifacts to "
                      << config.output_dir << "\n";
            return result.exit_code;
        }
    } catch (const ConfigError& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        emit_error("invalid_input", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what());
        return 1;
    }
    return 0;
}
