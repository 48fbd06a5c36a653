#pragma once

#include <string>

#include <Eigen/Dense>

#include "volcast/features.hpp"

namespace volcast {

enum class PenaltyKind { none, l2, l1, elastic };

/// Penalized least squares, glmnet conventions:
///   (1/2n) ||y - b0 - X beta||^2 + lambda [ mix ||beta||_1 + (1-mix)/2 ||beta||_2^2 ]
/// none: lambda = 0; l2: mix = 0; l1: mix = 1.
struct Penalty {
    PenaltyKind kind = PenaltyKind::none;
    double lambda = 0.0;
    double mix = 0.5;  // elastic only

    double l1_weight() const;
    double l2_weight() const;

    static Penalty none() { return {PenaltyKind::none, 0.0, 0.0}; }
    static Penalty ridge(double lambda) { return {PenaltyKind::l2, lambda, 0.0}; }
    static Penalty lasso(double lambda) { return {PenaltyKind::l1, lambda, 1.0}; }
    static Penalty elastic(double lambda, double mix) { return {PenaltyKind::elastic, lambda, mix}; }
};

struct LinearModel {
    double intercept = 0.0;
    Eigen::VectorXd coefficients;  // original feature scale
    Penalty penalty;
    Eigen::VectorXd feature_mean;   // standardization used at fit time
    Eigen::VectorXd feature_scale;  // population std; 1 for constant features

    double predict_row(const Eigen::VectorXd& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

/// Features are standardized to zero mean / unit variance internally and
/// the intercept is unpenalized. OLS and ridge solve the normal equations
/// (with the ridge shift); lasso and elastic net run cyclic coordinate
/// descent with soft-thresholding until the largest coefficient change
/// falls below 1e-9 (cap 1e5 sweeps). An unpenalized singular design is
/// rejected with a hint to add a penalty.
LinearModel fit_linear(const FeatureMatrix& fm, const Penalty& penalty);

}  // namespace volcast
