#include "volcast/features.hpp"

#include <stdexcept>

namespace volcast {

namespace {

void check_config(const AlignedPanel& panel, const FeatureConfig& config) {
    if (config.lags < 1) throw std::invalid_argument("build_features: lags must be >= 1");
    if (!panel.has_column(config.target))
        throw std::invalid_argument("build_features: target column '" + config.target +
                                    "' not in panel");
    for (const auto& c : config.volatility_columns)
        if (!panel.has_column(c))
            throw std::invalid_argument("build_features: volatility column '" + c +
                                        "' not in panel");
    for (const auto& c : config.exogenous_columns)
        if (!panel.has_column(c))
            throw std::invalid_argument("build_features: exogenous column '" + c +
                                        "' not in panel");
}

}  // namespace

std::vector<std::string> feature_names(const FeatureConfig& config) {
    std::vector<std::string> names;
    for (const auto& c : config.volatility_columns)
        for (int k = 1; k <= config.lags; ++k)
            names.push_back(c + "_sq_lag" + std::to_string(k));
    for (const auto& c : config.exogenous_columns) names.push_back(c + "_lag1");
    return names;
}

Eigen::VectorXd feature_row(const AlignedPanel& panel, const FeatureConfig& config,
                            std::size_t row) {
    check_config(panel, config);
    const std::size_t lags = static_cast<std::size_t>(config.lags);
    if (row < lags || row > panel.rows())
        throw std::invalid_argument("feature_row: insufficient history at row " +
                                    std::to_string(row));
    const std::size_t p =
        config.volatility_columns.size() * lags + config.exogenous_columns.size();
    Eigen::VectorXd x(static_cast<Eigen::Index>(p));
    Eigen::Index j = 0;
    for (const auto& c : config.volatility_columns) {
        const auto& col = panel.column(c);
        for (std::size_t k = 1; k <= lags; ++k) {
            const double r = col[row - k];
            x(j++) = r * r;
        }
    }
    for (const auto& c : config.exogenous_columns) x(j++) = panel.column(c)[row - 1];
    return x;
}

FeatureMatrix build_features(const AlignedPanel& panel, const FeatureConfig& config,
                             std::size_t begin, std::size_t end) {
    check_config(panel, config);
    if (end == SIZE_MAX) end = panel.rows();
    if (begin > end || end > panel.rows())
        throw std::invalid_argument("build_features: bad row range");

    const std::size_t lags = static_cast<std::size_t>(config.lags);
    const std::size_t first = begin + lags;  // feature rows stay inside [begin, end)
    if (first >= end)
        throw std::invalid_argument("build_features: insufficient history (need more than " +
                                    std::to_string(lags) + " rows)");

    FeatureMatrix fm;
    fm.target_name = config.target;
    fm.feature_names = feature_names(config);
    const Eigen::Index n = static_cast<Eigen::Index>(end - first);
    fm.X.resize(n, static_cast<Eigen::Index>(fm.feature_names.size()));
    fm.y.resize(n);
    fm.dates.reserve(static_cast<std::size_t>(n));

    const auto& target_col = panel.column(config.target);
    for (std::size_t t = first; t < end; ++t) {
        const Eigen::Index i = static_cast<Eigen::Index>(t - first);
        fm.X.row(i) = feature_row(panel, config, t).transpose();
        const double r = target_col[t];
        fm.y(i) = r * r;
        fm.dates.push_back(panel.dates[t]);
    }
    return fm;
}

}  // namespace volcast
