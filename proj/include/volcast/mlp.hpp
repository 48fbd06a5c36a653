#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "volcast/features.hpp"

namespace volcast {

/// One-hidden-layer perceptron: tanh hidden activation, linear output.
struct MlpModel {
    Eigen::MatrixXd w1;  // hidden x p
    Eigen::VectorXd b1;  // hidden
    Eigen::VectorXd w2;  // hidden
    double b2 = 0.0;

    double predict_row(const Eigen::VectorXd& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

struct MlpGradient {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::VectorXd w2;
    double b2 = 0.0;
};

/// Loss = (1/2n) sum (yhat - y)^2 and its analytic gradient (backprop).
double mlp_loss_and_gradient(const MlpModel& model, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, MlpGradient* grad);

struct MlpOptions {
    int hidden_width = 16;
    int epochs = 2000;
    double step_size = 0.05;
    std::uint64_t seed = 0;
};

/// Full-batch gradient descent with a fixed step. Weights start
/// symmetric-uniform scaled by 1/sqrt(fan_in); biases start at zero.
/// Rejects when the loss exceeds 1e6 x its initial value (advises a
/// smaller step).
MlpModel fit_mlp(const FeatureMatrix& fm, const MlpOptions& options);

}  // namespace volcast
