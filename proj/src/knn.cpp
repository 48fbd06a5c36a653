#include "volcast/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace volcast {

KnnModel fit_knn(const FeatureMatrix& fm, int k) {
    if (k < 1 || k > fm.rows())
        throw std::invalid_argument("fit_knn: k must be in [1, number of rows]");
    KnnModel m;
    m.k = k;
    m.y = fm.y;
    m.feature_mean = fm.X.colwise().mean();
    m.feature_scale.resize(fm.n_features());
    m.X_std = fm.X.rowwise() - m.feature_mean.transpose();
    for (Eigen::Index j = 0; j < fm.n_features(); ++j) {
        const double var = m.X_std.col(j).squaredNorm() / static_cast<double>(fm.rows());
        m.feature_scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
        m.X_std.col(j) /= m.feature_scale(j);
    }
    return m;
}

double KnnModel::predict_row(const Eigen::VectorXd& x) const {
    if (x.size() != X_std.cols()) throw std::invalid_argument("knn predict: feature count mismatch");
    const Eigen::VectorXd q = (x - feature_mean).cwiseQuotient(feature_scale);
    const Eigen::Index n = X_std.rows();
    std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        dist[static_cast<std::size_t>(i)] = {(X_std.row(i).transpose() - q).squaredNorm(),
                                             static_cast<int>(i)};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());  // pair order = tie rule
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += y(dist[static_cast<std::size_t>(i)].second);
    return sum / static_cast<double>(k);
}

Eigen::VectorXd KnnModel::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_row(X.row(i).transpose());
    return out;
}

}  // namespace volcast
