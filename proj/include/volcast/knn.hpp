#pragma once

#include <Eigen/Dense>

#include "volcast/features.hpp"

namespace volcast {

/// k-nearest-neighbor regressor on standardized features, Euclidean
/// distance, distance ties broken by lower training row index.
struct KnnModel {
    int k = 1;
    Eigen::MatrixXd X_std;  // standardized training rows
    Eigen::VectorXd y;
    Eigen::VectorXd feature_mean;
    Eigen::VectorXd feature_scale;

    double predict_row(const Eigen::VectorXd& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

KnnModel fit_knn(const FeatureMatrix& fm, int k);

}  // namespace volcast
