#include "volcast/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "volcast/csv.hpp"
#include "volcast/forecasters.hpp"
#include "volcast/model_io.hpp"
#include "volcast/rng.hpp"
#include "volcast/shap.hpp"
#include "volcast/stats.hpp"

namespace volcast {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("config: missing field '" + where + key + "'");
    return j.at(key);
}

MlHyper hyper_from_json(const json& base, const json& overrides, std::uint64_t seed) {
    MlHyper h;
    const auto apply = [&h](const json& src) {
        if (src.contains("lambda")) h.lambda = src.at("lambda").get<double>();
        if (src.contains("mix")) h.mix = src.at("mix").get<double>();
        if (src.contains("max_depth")) h.max_depth = src.at("max_depth").get<int>();
        if (src.contains("min_leaf")) h.min_leaf = src.at("min_leaf").get<int>();
        if (src.contains("n_trees")) h.n_trees = src.at("n_trees").get<int>();
        if (src.contains("feature_fraction"))
            h.feature_fraction = src.at("feature_fraction").get<double>();
        if (src.contains("n_rounds")) h.n_rounds = src.at("n_rounds").get<int>();
        if (src.contains("learning_rate")) h.learning_rate = src.at("learning_rate").get<double>();
        if (src.contains("lambda_l2")) h.lambda_l2 = src.at("lambda_l2").get<double>();
        if (src.contains("alpha_l1")) h.alpha_l1 = src.at("alpha_l1").get<double>();
        if (src.contains("min_child_weight"))
            h.min_child_weight = src.at("min_child_weight").get<double>();
        if (src.contains("k")) h.k = src.at("k").get<int>();
        if (src.contains("hidden_width")) h.hidden_width = src.at("hidden_width").get<int>();
        if (src.contains("epochs")) h.epochs = src.at("epochs").get<int>();
        if (src.contains("step_size")) h.step_size = src.at("step_size").get<double>();
    };
    if (!base.is_null()) apply(base);
    if (!overrides.is_null()) apply(overrides);
    h.seed = seed;
    return h;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, static_cast<std::size_t>(ptr - buf));
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    RunConfig c;
    c.seed = j.value("seed", std::uint64_t{0});
    c.output_dir = j.value("output_dir", std::string{"out"});

    const json& data = require(j, "data", "");
    for (const auto& f : require(data, "files", "data.")) {
        DataFileConfig file;
        file.path = require(f, "path", "data.files[].").get<std::string>();
        for (const auto& [col, name] : require(f, "columns", "data.files[].").items())
            file.columns[col] = name.get<std::string>();
        if (file.columns.empty())
            throw ConfigError("config: data.files[].columns must not be empty");
        c.files.push_back(std::move(file));
    }
    if (c.files.empty()) throw ConfigError("config: data.files must not be empty");
    for (const auto& [name, tag] : require(data, "transforms", "data.").items()) {
        try {
            c.transforms[name] = transform_from_string(tag.get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError("config: data.transforms." + name + ": " + e.what());
        }
    }
    if (data.contains("arcsinh_fallback"))
        for (const auto& name : data.at("arcsinh_fallback"))
            c.arcsinh_fallback.insert(name.get<std::string>());

    c.target = require(j, "target", "").get<std::string>();
    const json& features = require(j, "features", "");
    c.volatility_columns =
        require(features, "volatility_columns", "features.").get<std::vector<std::string>>();
    if (features.contains("exogenous_columns"))
        c.exogenous_columns = features.at("exogenous_columns").get<std::vector<std::string>>();
    c.lags = features.value("lags", 1);
    if (c.lags < 1) throw ConfigError("config: features.lags must be >= 1");

    for (const auto& m : require(j, "models", "")) {
        ModelConfig model;
        model.id = require(m, "id", "models[].").get<std::string>();
        model.kind = require(m, "kind", "models[].").get<std::string>();
        if (m.contains("exogenous"))
            model.exogenous = m.at("exogenous").get<std::vector<std::string>>();
        if (m.contains("series")) model.series = m.at("series").get<std::vector<std::string>>();
        if (m.contains("hyper")) model.hyper = m.at("hyper");
        if (m.contains("grid"))
            for (const auto& g : m.at("grid")) model.grid.push_back(g);
        c.models.push_back(std::move(model));
    }
    if (c.models.empty()) throw ConfigError("config: models must not be empty");
    {
        std::set<std::string> ids;
        for (const auto& m : c.models)
            if (!ids.insert(m.id).second)
                throw ConfigError("config: duplicate model id '" + m.id + "'");
    }

    if (j.contains("backtest")) {
        const json& b = j.at("backtest");
        c.backtest.in_sample_length = b.value("in_sample_length", std::size_t{3506});
        c.backtest.out_of_sample_length = b.value("out_of_sample_length", std::size_t{1000});
        c.backtest.reestimation_period = b.value("reestimation_period", std::size_t{1});
        c.backtest.volatility_floor = b.value("volatility_floor", 0.0);
        const std::string scale = b.value("scale", std::string{"variance"});
        if (scale == "variance")
            c.backtest.scale = MetricScale::variance;
        else if (scale == "volatility")
            c.backtest.scale = MetricScale::volatility;
        else
            throw ConfigError("config: backtest.scale must be 'variance' or 'volatility'");
        if (c.backtest.reestimation_period < 1)
            throw ConfigError("config: backtest.reestimation_period must be >= 1");
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_run_config(parse_json(text, "config"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

AlignedPanel ingest_panel(const RunConfig& config) {
    std::vector<RawSeries> series;
    for (const auto& file : config.files) {
        auto loaded = load_csv(file.path, file.columns);
        for (auto& s : loaded) series.push_back(std::move(s));
    }

    // Calendar: union of dates present in the highest-frequency series.
    Frequency best = Frequency::monthly;
    for (const auto& s : series)
        if (static_cast<int>(s.native_frequency) < static_cast<int>(best))
            best = s.native_frequency;
    std::set<Date> dates;
    for (const auto& s : series)
        if (s.native_frequency == best) dates.insert(s.dates.begin(), s.dates.end());
    const std::vector<Date> calendar(dates.begin(), dates.end());

    const AlignedPanel levels = align_daily(series, calendar);
    TransformOptions opts;
    opts.arcsinh_fallback = config.arcsinh_fallback;
    return transform(levels, config.transforms, opts);
}

void validate_columns(const RunConfig& config, const AlignedPanel& panel) {
    const auto check = [&](const std::string& col, const std::string& where) {
        if (!panel.has_column(col))
            throw ConfigError("config: " + where + " references missing column '" + col + "'");
    };
    check(config.target, "target");
    for (const auto& c : config.volatility_columns) check(c, "features.volatility_columns");
    for (const auto& c : config.exogenous_columns) check(c, "features.exogenous_columns");
    for (const auto& m : config.models) {
        for (const auto& c : m.exogenous) check(c, "models." + m.id + ".exogenous");
        for (const auto& c : m.series) check(c, "models." + m.id + ".series");
    }
}

FeatureConfig feature_config(const RunConfig& config) {
    FeatureConfig f;
    f.target = config.target;
    f.volatility_columns = config.volatility_columns;
    f.exogenous_columns = config.exogenous_columns;
    f.lags = config.lags;
    return f;
}

std::vector<json> default_grid(const std::string& kind) {
    if (kind == "ridge" || kind == "lasso" || kind == "enet")
        return {{{"lambda", 1e-4}}, {{"lambda", 1e-3}}, {{"lambda", 1e-2}}};
    if (kind == "tree") return {{{"max_depth", 3}}, {{"max_depth", 5}}};
    if (kind == "boost") return {{{"max_depth", 2}}, {{"max_depth", 3}}};
    if (kind == "knn") return {{{"k", 5}}, {{"k", 10}}, {{"k", 20}}};
    return {json::object()};  // ols, forest, mlp: single default candidate
}

std::shared_ptr<Forecaster> make_forecaster(const ModelConfig& model, const RunConfig& config) {
    const std::string& kind = model.kind;
    if (kind == "garch" || kind == "egarch" || kind == "gjr") {
        GarchSpec spec;
        spec.kind = garch_kind_from_string(kind);
        spec.exogenous = model.exogenous;
        return std::make_shared<GarchForecaster>(model.id, spec, config.target);
    }
    if (kind == "bekk") {
        std::vector<std::string> series =
            model.series.empty() ? config.volatility_columns : model.series;
        return std::make_shared<BekkForecaster>(model.id, std::move(series), config.target);
    }
    MlKind ml_kind;
    try {
        ml_kind = ml_kind_from_string(kind);
    } catch (const std::exception&) {
        throw ConfigError("config: models." + model.id + ": unknown kind '" + kind + "'");
    }
    const std::uint64_t seed = derive_seed(config.seed, model.id);
    std::vector<MlHyper> candidates;
    const std::vector<json> grid =
        !model.grid.empty()
            ? model.grid
            : (model.hyper.is_null() ? default_grid(kind) : std::vector<json>{json::object()});
    for (const auto& g : grid) candidates.push_back(hyper_from_json(model.hyper, g, seed));
    return std::make_shared<MlForecaster>(model.id, ml_kind, feature_config(config),
                                          std::move(candidates));
}

json diagnostics_json(const AlignedPanel& panel, int adf_max_lag) {
    json out = json::array();
    for (std::size_t c = 0; c < panel.cols(); ++c) {
        const std::string& name = panel.names[c];
        const auto& col = panel.columns[c];
        {
            const Summary s = describe(col);
            json entry{{"series", name}, {"test", "describe"}};
            entry["summary"] = {{"mean", s.mean},
                                {"max", s.max},
                                {"min", s.min},
                                {"std_dev", s.std_dev}};
            entry["summary"]["skewness"] = s.skewness ? json(*s.skewness) : json();
            entry["summary"]["excess_kurtosis"] =
                s.excess_kurtosis ? json(*s.excess_kurtosis) : json();
            out.push_back(std::move(entry));
        }
        const auto run_test = [&](const char* label, auto&& fn) {
            json entry{{"series", name}, {"test", label}};
            try {
                const TestResult r = fn();
                entry["statistic"] = r.statistic;
                entry["p_value"] = r.p_value ? json(*r.p_value) : json();
                entry["lag_order"] = r.lag_order;
                json verdicts;
                for (const auto& [level, reject] : r.verdict_at)
                    verdicts[format_double(level)] = reject;
                entry["verdicts"] = std::move(verdicts);
            } catch (const std::exception& e) {
                entry["error"] = e.what();
            }
            out.push_back(std::move(entry));
        };
        run_test("jarque_bera", [&] { return jarque_bera(col); });
        run_test("adf", [&] { return adf(col, adf_max_lag); });
    }
    return out;
}

json report_to_json(const std::string& target, const EvaluationReport& report, MetricScale scale) {
    json models = json::array();
    for (const auto& row : report.rows) {
        const auto best = [&](const char* m) {
            const auto it = report.best.find(m);
            return it != report.best.end() && it->second.count(row.model_id) > 0;
        };
        models.push_back({{"model", row.model_id},
                          {"rmse", row.rmse},
                          {"mae", row.mae},
                          {"mmeo", row.mmeo},
                          {"mmeu", row.mmeu},
                          {"n_forecasts", row.n_forecasts},
                          {"best",
                           {{"rmse", best("rmse")},
                            {"mae", best("mae")},
                            {"mmeo", best("mmeo")},
                            {"mmeu", best("mmeu")}}}});
    }
    return {{"format_version", kModelFormatVersion},
            {"target", target},
            {"scale", scale == MetricScale::variance ? "variance" : "volatility"},
            {"models", std::move(models)}};
}

void write_records_csv(const std::vector<ForecastRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "date,model,actual,predicted,refit,fit_failed\n";
    for (const auto& r : records)
        out << r.date.to_string() << ',' << r.model_id << ',' << format_double(r.actual) << ','
            << format_double(r.predicted) << ',' << (r.refit ? 1 : 0) << ','
            << (r.fit_failed ? 1 : 0) << '\n';
}

PipelineResult run_pipeline(const RunConfig& config) {
    namespace fs = std::filesystem;
    PipelineResult result;
    fs::create_directories(config.output_dir);
    const auto artifact = [&](const std::string& name) {
        const std::string path = (fs::path(config.output_dir) / name).string();
        result.artifacts.push_back(path);
        return path;
    };

    const AlignedPanel panel = ingest_panel(config);
    validate_columns(config, panel);
    if (config.backtest.in_sample_length + config.backtest.out_of_sample_length > panel.rows())
        throw ConfigError("config: backtest window (" +
                          std::to_string(config.backtest.in_sample_length) + " + " +
                          std::to_string(config.backtest.out_of_sample_length) +
                          ") exceeds panel length " + std::to_string(panel.rows()));

    write_panel_csv(panel, artifact("panel.csv"));
    write_panel_manifest(panel, artifact("panel.manifest.json"));
    write_text(artifact("diagnostics.json"), diagnostics_json(panel).dump(2) + "\n");

    // Initial training window: the in-sample rows preceding the first
    // out-of-sample day.
    const std::size_t oos_start = panel.rows() - config.backtest.out_of_sample_length;
    const std::size_t in_start = oos_start - config.backtest.in_sample_length;

    std::vector<std::shared_ptr<Forecaster>> forecasters;
    json manifest_models = json::array();
    for (const auto& model : config.models) forecasters.push_back(make_forecaster(model, config));

    // In-sample fit artifacts for the GARCH-family and BEKK models.
    for (std::size_t i = 0; i < config.models.size(); ++i) {
        const auto& model = config.models[i];
        if (model.kind == "garch" || model.kind == "egarch" || model.kind == "gjr" ||
            model.kind == "bekk") {
            try {
                forecasters[i]->fit(panel, in_start, oos_start);
                json fit_json;
                if (auto* g = dynamic_cast<GarchForecaster*>(forecasters[i].get())) {
                    fit_json = garch_fit_to_json(*g->last_fit());
                    fit_json["persistence"] = persistence(*g->last_fit());
                } else if (auto* b = dynamic_cast<BekkForecaster*>(forecasters[i].get())) {
                    fit_json = bekk_fit_to_json(*b->last_fit());
                }
                write_text(artifact("fit_" + model.id + ".json"), fit_json.dump(2) + "\n");
            } catch (const std::exception& e) {
                manifest_models.push_back(
                    {{"id", model.id}, {"stage", "in_sample_fit"}, {"error", e.what()}});
            }
        }
    }

    const std::vector<ForecastRecord> records =
        rolling_backtest(panel, config.target, forecasters, config.backtest);
    write_records_csv(records, artifact("records.csv"));

    const EvaluationReport report = evaluate(records, config.backtest.scale);
    write_text(artifact("report.json"),
               report_to_json(config.target, report, config.backtest.scale).dump(2) + "\n");

    for (const auto& r : records)
        if (r.fit_failed) ++result.failed_windows[r.model_id];

    // SHAP on the first tree-based model of the roster, boosting preferred.
    const ModelConfig* shap_model = nullptr;
    for (const char* preferred : {"boost", "forest", "tree"}) {
        for (const auto& m : config.models)
            if (m.kind == preferred && !shap_model) shap_model = &m;
        if (shap_model) break;
    }
    if (shap_model) {
        try {
            const FeatureConfig fc = feature_config(config);
            const FeatureMatrix train = build_features(panel, fc, in_start, oos_start);
            const MlHyper hyper = hyper_from_json(
                shap_model->hyper,
                shap_model->grid.empty() ? json::object() : shap_model->grid.front(),
                derive_seed(config.seed, shap_model->id));
            const MlPredictor predictor = fit_ml(ml_kind_from_string(shap_model->kind), train, hyper);
            const TreeEnsemble* ensemble = predictor.as_tree_ensemble();
            if (!ensemble) throw std::runtime_error("explain: model is not a tree ensemble");
            const FeatureMatrix all = build_features(panel, fc);

            std::ofstream shap_csv(artifact("shap_" + config.target + ".csv"));
            shap_csv << "row_index,feature,feature_value,shap_value\n";
            double base_value = 0.0;
            Eigen::VectorXd mean_abs = Eigen::VectorXd::Zero(all.n_features());
            for (Eigen::Index r = 0; r < all.rows(); ++r) {
                const ShapExplanation ex = tree_shap(*ensemble, all.X.row(r).transpose());
                base_value = ex.base_value;
                mean_abs += ex.attributions.cwiseAbs();
                for (Eigen::Index f = 0; f < all.n_features(); ++f)
                    shap_csv << r << ',' << all.feature_names[static_cast<std::size_t>(f)] << ','
                             << format_double(ex.feature_values(f)) << ','
                             << format_double(ex.attributions(f)) << '\n';
            }
            mean_abs /= static_cast<double>(all.rows());
            std::vector<int> order(static_cast<std::size_t>(all.n_features()));
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (mean_abs(a) != mean_abs(b)) return mean_abs(a) > mean_abs(b);
                return a < b;
            });
            json importance = json::array();
            for (int f : order)
                importance.push_back(
                    {{"feature", all.feature_names[static_cast<std::size_t>(f)]},
                     {"mean_abs_shap", mean_abs(f)}});
            const json summary{{"format_version", kModelFormatVersion},
                               {"model", shap_model->id},
                               {"target", config.target},
                               {"base_value", base_value},
                               {"importance", std::move(importance)}};
            write_text(artifact("shap_summary.json"), summary.dump(2) + "\n");
        } catch (const std::exception& e) {
            manifest_models.push_back(
                {{"id", shap_model->id}, {"stage", "explain"}, {"error", e.what()}});
        }
    }

    std::size_t completed = 0;
    json model_status = json::array();
    for (const auto& model : config.models) {
        const std::size_t failed = result.failed_windows.count(model.id)
                                       ? result.failed_windows.at(model.id)
                                       : 0;
        const bool ok = failed < config.backtest.out_of_sample_length;
        if (ok) ++completed;
        model_status.push_back({{"id", model.id},
                                {"kind", model.kind},
                                {"completed", ok},
                                {"failed_windows", failed}});
    }
    json manifest{{"format_version", kModelFormatVersion},
                  {"seed", config.seed},
                  {"target", config.target},
                  {"models", std::move(model_status)},
                  {"errors", std::move(manifest_models)}};
    {
        json names = json::array();
        for (const auto& a : result.artifacts) names.push_back(fs::path(a).filename().string());
        manifest["artifacts"] = std::move(names);
    }
    write_text(artifact("run_manifest.json"), manifest.dump(2) + "\n");

    result.exit_code = completed > 0 ? 0 : 1;
    return result;
}

}  // namespace volcast
