#include "volcast/linear.hpp"

#include <cmath>
#include <stdexcept>

namespace volcast {

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

}  // namespace

double Penalty::l1_weight() const {
    switch (kind) {
        case PenaltyKind::none: return 0.0;
        case PenaltyKind::l2: return 0.0;
        case PenaltyKind::l1: return lambda;
        case PenaltyKind::elastic: return lambda * mix;
    }
    return 0.0;
}

double Penalty::l2_weight() const {
    switch (kind) {
        case PenaltyKind::none: return 0.0;
        case PenaltyKind::l2: return lambda;
        case PenaltyKind::l1: return 0.0;
        case PenaltyKind::elastic: return lambda * (1.0 - mix);
    }
    return 0.0;
}

double LinearModel::predict_row(const Eigen::VectorXd& x) const {
    if (x.size() != coefficients.size())
        throw std::invalid_argument("linear predict: feature count mismatch");
    return intercept + coefficients.dot(x);
}

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != coefficients.size())
        throw std::invalid_argument("linear predict: feature count mismatch");
    return (X * coefficients).array() + intercept;
}

LinearModel fit_linear(const FeatureMatrix& fm, const Penalty& penalty) {
    const Eigen::Index n = fm.rows();
    const Eigen::Index p = fm.n_features();
    if (n <= 2) throw std::invalid_argument("fit_linear: need more than 2 rows");
    if (penalty.lambda < 0.0) throw std::invalid_argument("fit_linear: lambda must be >= 0");
    if (penalty.mix < 0.0 || penalty.mix > 1.0)
        throw std::invalid_argument("fit_linear: mix must be in [0, 1]");

    LinearModel model;
    model.penalty = penalty;
    model.feature_mean = fm.X.colwise().mean();
    model.feature_scale.resize(p);
    Eigen::MatrixXd Z = fm.X.rowwise() - model.feature_mean.transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
        const double var = Z.col(j).squaredNorm() / static_cast<double>(n);
        const double scale = var > 0.0 ? std::sqrt(var) : 1.0;
        model.feature_scale(j) = scale;
        Z.col(j) /= scale;
    }
    const double y_mean = fm.y.mean();
    const Eigen::VectorXd yc = fm.y.array() - y_mean;

    const double l1 = penalty.l1_weight();
    const double l2 = penalty.l2_weight();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);

    if (l1 == 0.0) {
        // Normal equations with the ridge shift.
        Eigen::MatrixXd G = Z.transpose() * Z / static_cast<double>(n);
        G.diagonal().array() += l2;
        if (l2 == 0.0) {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);
            qr.setThreshold(1e-10);
            if (qr.rank() < p)
                throw std::invalid_argument(
                    "fit_linear: singular design; add a ridge or elastic-net penalty");
            beta = qr.solve(Z.transpose() * yc / static_cast<double>(n));
        } else {
            beta = G.ldlt().solve(Z.transpose() * yc / static_cast<double>(n));
        }
    } else {
        // Cyclic coordinate descent with soft-thresholding. Standardized
        // columns have unit second moment, so the curvature term is 1 + l2.
        Eigen::VectorXd resid = yc;
        const double denom = 1.0 + l2;
        const int max_sweeps = 100000;
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double max_change = 0.0;
            for (Eigen::Index j = 0; j < p; ++j) {
                const double old = beta(j);
                const double z = old + Z.col(j).dot(resid) / static_cast<double>(n);
                const double next = soft_threshold(z, l1) / denom;
                if (next != old) {
                    resid += Z.col(j) * (old - next);
                    beta(j) = next;
                    max_change = std::max(max_change, std::fabs(next - old));
                }
            }
            if (max_change < 1e-9) break;
        }
    }

    model.coefficients = beta.cwiseQuotient(model.feature_scale);
    model.intercept = y_mean - model.coefficients.dot(model.feature_mean);
    return model;
}

}  // namespace volcast
