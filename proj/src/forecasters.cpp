#include "volcast/forecasters.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace volcast {

namespace {

std::vector<double> slice(const std::vector<double>& col, std::size_t begin, std::size_t end) {
    return std::vector<double>(col.begin() + static_cast<std::ptrdiff_t>(begin),
                               col.begin() + static_cast<std::ptrdiff_t>(end));
}

}  // namespace

GarchForecaster::GarchForecaster(std::string id, GarchSpec spec, std::string target,
                                 GarchFitOptions options)
    : id_(std::move(id)), spec_(std::move(spec)), target_(std::move(target)), options_(options) {}

std::vector<std::vector<double>> GarchForecaster::exog_columns(const AlignedPanel& panel,
                                                               std::size_t begin,
                                                               std::size_t end) const {
    std::vector<std::vector<double>> exog;
    exog.reserve(spec_.exogenous.size());
    for (const auto& name : spec_.exogenous) exog.push_back(slice(panel.column(name), begin, end));
    return exog;
}

void GarchForecaster::fit(const AlignedPanel& panel, std::size_t begin, std::size_t end) {
    const std::vector<double> returns = slice(panel.column(target_), begin, end);
    fit_ = fit_garch(spec_, returns, exog_columns(panel, begin, end), options_);
    fit_begin_ = begin;
    fit_end_ = end;
}

double GarchForecaster::forecast(const AlignedPanel& panel, std::size_t row) {
    if (!fit_) throw std::runtime_error("GarchForecaster: forecast before fit");
    if (row < 1 || row < fit_end_) throw std::invalid_argument("GarchForecaster: bad forecast row");

    GarchFit current = *fit_;
    if (row > fit_end_) {
        // Parameters fixed, recursion refreshed through row-1.
        const std::vector<double> returns = slice(panel.column(target_), fit_begin_, row);
        const GarchFilterResult f =
            filter_variance(spec_, fit_->params, returns, exog_columns(panel, fit_begin_, row));
        current.variance_path = f.variance;
    }
    std::vector<double> latest_exog;
    latest_exog.reserve(spec_.exogenous.size());
    for (const auto& name : spec_.exogenous) latest_exog.push_back(panel.column(name)[row - 1]);
    return forecast_one_step(current, panel.column(target_)[row - 1], latest_exog);
}

BekkForecaster::BekkForecaster(std::string id, std::vector<std::string> series, std::string target,
                               BekkFitOptions options)
    : id_(std::move(id)), series_(std::move(series)), options_(options) {
    const auto it = std::find(series_.begin(), series_.end(), target);
    if (it == series_.end())
        throw std::invalid_argument("BekkForecaster: target '" + target +
                                    "' not among the BEKK series");
    target_index_ = static_cast<std::size_t>(it - series_.begin());
}

Eigen::MatrixXd BekkForecaster::returns_matrix(const AlignedPanel& panel, std::size_t begin,
                                               std::size_t end) const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(end - begin),
                      static_cast<Eigen::Index>(series_.size()));
    for (std::size_t j = 0; j < series_.size(); ++j) {
        const auto& col = panel.column(series_[j]);
        for (std::size_t t = begin; t < end; ++t)
            m(static_cast<Eigen::Index>(t - begin), static_cast<Eigen::Index>(j)) = col[t];
    }
    return m;
}

void BekkForecaster::fit(const AlignedPanel& panel, std::size_t begin, std::size_t end) {
    fit_ = fit_bekk(returns_matrix(panel, begin, end), options_);
    fit_begin_ = begin;
    fit_end_ = end;
}

double BekkForecaster::forecast(const AlignedPanel& panel, std::size_t row) {
    if (!fit_) throw std::runtime_error("BekkForecaster: forecast before fit");
    if (row < 1 || row < fit_end_) throw std::invalid_argument("BekkForecaster: bad forecast row");

    BekkFit current = *fit_;
    if (row > fit_end_) {
        const Eigen::MatrixXd returns = returns_matrix(panel, fit_begin_, row);
        const Eigen::MatrixXd eps = returns.rowwise() - fit_->mean.transpose();
        current.covariance_path = filter_covariance(fit_->params, eps);
    }
    Eigen::VectorXd latest(series_.size());
    for (std::size_t j = 0; j < series_.size(); ++j)
        latest(static_cast<Eigen::Index>(j)) = panel.column(series_[j])[row - 1] - fit_->mean(j);
    return bekk_forecast_one_step(current, latest)(static_cast<Eigen::Index>(target_index_));
}

MlForecaster::MlForecaster(std::string id, MlKind kind, FeatureConfig features,
                           std::vector<MlHyper> candidates)
    : id_(std::move(id)),
      kind_(kind),
      features_(std::move(features)),
      candidates_(std::move(candidates)) {
    if (candidates_.empty()) candidates_.push_back(MlHyper{});
}

void MlForecaster::fit(const AlignedPanel& panel, std::size_t begin, std::size_t end) {
    const FeatureMatrix fm = build_features(panel, features_, begin, end);
    selected_ = 0;
    if (candidates_.size() > 1) {
        const Eigen::Index n = fm.rows();
        const Eigen::Index n_val = std::max<Eigen::Index>(1, n / 5);
        const Eigen::Index n_train = n - n_val;
        if (n_train < 2)
            throw std::invalid_argument("MlForecaster: window too short for validation split");
        FeatureMatrix train;
        train.target_name = fm.target_name;
        train.feature_names = fm.feature_names;
        train.X = fm.X.topRows(n_train);
        train.y = fm.y.head(n_train);
        train.dates.assign(fm.dates.begin(), fm.dates.begin() + n_train);

        double best_mse = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < candidates_.size(); ++c) {
            const MlPredictor candidate = fit_ml(kind_, train, candidates_[c]);
            const Eigen::VectorXd pred = candidate.predict(fm.X.bottomRows(n_val));
            const double mse =
                (pred - fm.y.tail(n_val)).squaredNorm() / static_cast<double>(n_val);
            if (mse < best_mse) {
                best_mse = mse;
                selected_ = static_cast<int>(c);
            }
        }
    }
    predictor_ = fit_ml(kind_, fm, candidates_[static_cast<std::size_t>(selected_)]);
}

double MlForecaster::forecast(const AlignedPanel& panel, std::size_t row) {
    if (!predictor_) throw std::runtime_error("MlForecaster: forecast before fit");
    return predictor_->predict_row(feature_row(panel, features_, row));
}

}  // namespace volcast
