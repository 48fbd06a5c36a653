#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "volcast/series.hpp"

namespace volcast {

/// Supervised design for the regressors. Row t of X only contains
/// information dated <= t-1 relative to y_t.
struct FeatureMatrix {
    std::vector<Date> dates;  // date of y_t
    Eigen::MatrixXd X;
    std::vector<std::string> feature_names;
    Eigen::VectorXd y;  // squared return of the target commodity
    std::string target_name;

    Eigen::Index rows() const { return X.rows(); }
    Eigen::Index n_features() const { return X.cols(); }
};

struct FeatureConfig {
    std::string target;
    std::vector<std::string> volatility_columns;  // squared returns enter at lags 1..lags
    std::vector<std::string> exogenous_columns;   // enter at lag 1
    int lags = 1;
};

/// Build the target/design pair over panel rows [begin, end):
/// y_t = r_target(t)^2; X row t holds the squared returns of every
/// volatility column at lags 1..lags plus each exogenous column at lag 1.
FeatureMatrix build_features(const AlignedPanel& panel, const FeatureConfig& config,
                             std::size_t begin = 0, std::size_t end = SIZE_MAX);

/// Feature row for forecasting y at panel row `row` (reads only rows
/// row-lags .. row-1). `row` may equal panel.rows() to extend one step
/// past the sample.
Eigen::VectorXd feature_row(const AlignedPanel& panel, const FeatureConfig& config,
                            std::size_t row);

std::vector<std::string> feature_names(const FeatureConfig& config);

}  // namespace volcast
