#include "volcast/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace volcast {

std::vector<ForecastRecord> rolling_backtest(const AlignedPanel& panel,
                                             const std::string& target,
                                             const std::vector<std::shared_ptr<Forecaster>>& models,
                                             const BacktestConfig& config) {
    const std::size_t T = panel.rows();
    if (config.in_sample_length + config.out_of_sample_length > T)
        throw std::invalid_argument("rolling_backtest: in + out of sample exceeds data length");
    if (config.reestimation_period < 1)
        throw std::invalid_argument("rolling_backtest: reestimation_period must be >= 1");
    if (config.in_sample_length < 2)
        throw std::invalid_argument("rolling_backtest: in_sample_length too short");
    const auto& target_col = panel.column(target);

    std::vector<ForecastRecord> records;
    records.reserve(models.size() * config.out_of_sample_length);
    const std::size_t first_forecast = T - config.out_of_sample_length;

    for (const auto& model : models) {
        bool have_fit = false;
        bool have_prev = false;
        double prev_forecast = 0.0;
        for (std::size_t i = 0; i < config.out_of_sample_length; ++i) {
            const std::size_t t = first_forecast + i;
            ForecastRecord rec;
            rec.date = panel.dates[t];
            rec.model_id = model->id();
            rec.window_begin = t - config.in_sample_length;
            rec.window_end = t;
            rec.refit = i % config.reestimation_period == 0;

            if (rec.refit) {
                try {
                    model->fit(panel, rec.window_begin, rec.window_end);
                    have_fit = true;
                } catch (const std::exception&) {
                    rec.fit_failed = true;
                }
            }
            double pred = std::numeric_limits<double>::quiet_NaN();
            if (!rec.fit_failed && have_fit) {
                try {
                    pred = model->forecast(panel, t);
                } catch (const std::exception&) {
                    rec.fit_failed = true;
                }
            }
            if (rec.fit_failed || !std::isfinite(pred)) {
                rec.fit_failed = true;
                if (have_prev) {
                    pred = prev_forecast;
                } else {
                    // No earlier forecast to carry: fall back to the training
                    // window's mean squared return.
                    double s = 0.0;
                    for (std::size_t u = rec.window_begin; u < rec.window_end; ++u)
                        s += target_col[u] * target_col[u];
                    pred = s / static_cast<double>(config.in_sample_length);
                }
            }
            if (model->applies_floor()) pred = std::max(pred, config.volatility_floor);

            rec.predicted = pred;
            rec.actual = target_col[t] * target_col[t];
            prev_forecast = pred;
            have_prev = true;
            records.push_back(rec);
        }
    }
    return records;
}

EvaluationReport evaluate(const std::vector<ForecastRecord>& records, MetricScale scale) {
    if (records.empty()) throw std::invalid_argument("evaluate: no records");

    struct Accum {
        double sq = 0.0, over = 0.0, under = 0.0;
        std::size_t n = 0;
    };
    std::vector<std::string> order;  // first-seen model order
    std::map<std::string, Accum> acc;
    for (const auto& r : records) {
        if (!acc.count(r.model_id)) order.push_back(r.model_id);
        Accum& a = acc[r.model_id];
        double actual = r.actual;
        double predicted = r.predicted;
        if (scale == MetricScale::volatility) {
            actual = std::sqrt(std::max(actual, 0.0));
            predicted = std::sqrt(std::max(predicted, 0.0));
        }
        const double d = predicted - actual;
        a.sq += d * d;
        if (d > 0.0)
            a.over += d;
        else
            a.under += -d;
        ++a.n;
    }

    EvaluationReport report;
    for (const auto& id : order) {
        const Accum& a = acc[id];
        MetricRow row;
        row.model_id = id;
        row.n_forecasts = a.n;
        const double n = static_cast<double>(a.n);
        row.rmse = std::sqrt(a.sq / n);
        row.mmeo = a.over / n;
        row.mmeu = a.under / n;
        row.mae = row.mmeo + row.mmeu;  // the identity holds exactly
        report.rows.push_back(row);
    }

    const auto mark_best = [&](const char* name, auto get) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& row : report.rows) best = std::min(best, get(row));
        for (const auto& row : report.rows)
            if (get(row) == best) report.best[name].insert(row.model_id);
    };
    mark_best("rmse", [](const MetricRow& r) { return r.rmse; });
    mark_best("mae", [](const MetricRow& r) { return r.mae; });
    mark_best("mmeo", [](const MetricRow& r) { return r.mmeo; });
    mark_best("mmeu", [](const MetricRow& r) { return r.mmeu; });
    return report;
}

std::vector<ComparisonEntry> compare_report(
    const std::vector<std::pair<std::string, EvaluationReport>>& reports) {
    if (reports.empty()) throw std::invalid_argument("compare_report: no reports");
    std::vector<ComparisonEntry> table;
    for (const auto& [commodity, report] : reports) {
        for (const auto& row : report.rows) {
            ComparisonEntry e;
            e.commodity = commodity;
            e.model_id = row.model_id;
            e.rmse = row.rmse;
            e.mae = row.mae;
            e.mmeo = row.mmeo;
            e.mmeu = row.mmeu;
            e.n_forecasts = row.n_forecasts;
            const auto in_best = [&](const char* m) {
                const auto it = report.best.find(m);
                return it != report.best.end() && it->second.count(row.model_id) > 0;
            };
            e.best_rmse = in_best("rmse");
            e.best_mae = in_best("mae");
            e.best_mmeo = in_best("mmeo");
            e.best_mmeu = in_best("mmeu");
            table.push_back(e);
        }
    }
    return table;
}

}  // namespace volcast
