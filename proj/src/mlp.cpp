#include "volcast/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "volcast/rng.hpp"

namespace volcast {

double MlpModel::predict_row(const Eigen::VectorXd& x) const {
    if (x.size() != w1.cols()) throw std::invalid_argument("mlp predict: feature count mismatch");
    const Eigen::VectorXd a1 = ((w1 * x) + b1).array().tanh();
    return w2.dot(a1) + b2;
}

Eigen::VectorXd MlpModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != w1.cols()) throw std::invalid_argument("mlp predict: feature count mismatch");
    const Eigen::MatrixXd a1 = ((X * w1.transpose()).rowwise() + b1.transpose()).array().tanh();
    return (a1 * w2).array() + b2;
}

double mlp_loss_and_gradient(const MlpModel& model, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, MlpGradient* grad) {
    const Eigen::Index n = X.rows();
    const Eigen::MatrixXd z1 = (X * model.w1.transpose()).rowwise() + model.b1.transpose();
    const Eigen::MatrixXd a1 = z1.array().tanh();
    const Eigen::VectorXd yhat = (a1 * model.w2).array() + model.b2;
    const Eigen::VectorXd err = yhat - y;
    const double loss = 0.5 * err.squaredNorm() / static_cast<double>(n);
    if (grad) {
        const Eigen::VectorXd delta = err / static_cast<double>(n);
        grad->b2 = delta.sum();
        grad->w2 = a1.transpose() * delta;
        const Eigen::MatrixXd delta1 =
            (delta * model.w2.transpose()).array() * (1.0 - a1.array().square());
        grad->b1 = delta1.colwise().sum();
        grad->w1 = delta1.transpose() * X;
    }
    return loss;
}

MlpModel fit_mlp(const FeatureMatrix& fm, const MlpOptions& options) {
    if (options.hidden_width < 1) throw std::invalid_argument("fit_mlp: hidden_width must be >= 1");
    if (options.epochs < 1) throw std::invalid_argument("fit_mlp: epochs must be >= 1");
    if (!(options.step_size > 0.0)) throw std::invalid_argument("fit_mlp: step_size must be > 0");

    const Eigen::Index p = fm.n_features();
    const int h = options.hidden_width;
    Rng rng(options.seed);
    MlpModel model;
    model.w1.resize(h, p);
    const double a1 = 1.0 / std::sqrt(static_cast<double>(p));
    for (int i = 0; i < h; ++i)
        for (Eigen::Index j = 0; j < p; ++j) model.w1(i, j) = rng.uniform(-a1, a1);
    model.b1 = Eigen::VectorXd::Zero(h);
    model.w2.resize(h);
    const double a2 = 1.0 / std::sqrt(static_cast<double>(h));
    for (int i = 0; i < h; ++i) model.w2(i) = rng.uniform(-a2, a2);
    model.b2 = 0.0;

    MlpGradient grad;
    const double initial_loss = mlp_loss_and_gradient(model, fm.X, fm.y, nullptr);
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        const double loss = mlp_loss_and_gradient(model, fm.X, fm.y, &grad);
        if (!std::isfinite(loss) || loss > 1e6 * std::max(initial_loss, 1e-300))
            throw std::runtime_error("fit_mlp: training diverged; use a smaller step_size");
        model.w1 -= options.step_size * grad.w1;
        model.b1 -= options.step_size * grad.b1;
        model.w2 -= options.step_size * grad.w2;
        model.b2 -= options.step_size * grad.b2;
    }
    return model;
}

}  // namespace volcast
