#include "volcast/mlmodels.hpp"

#include <stdexcept>

namespace volcast {

std::string to_string(MlKind k) {
    switch (k) {
        case MlKind::ols: return "ols";
        case MlKind::ridge: return "ridge";
        case MlKind::lasso: return "lasso";
        case MlKind::enet: return "enet";
        case MlKind::tree: return "tree";
        case MlKind::forest: return "forest";
        case MlKind::boost: return "boost";
        case MlKind::knn: return "knn";
        case MlKind::mlp: return "mlp";
    }
    return "ols";
}

MlKind ml_kind_from_string(const std::string& s) {
    if (s == "ols" || s == "linear") return MlKind::ols;
    if (s == "ridge") return MlKind::ridge;
    if (s == "lasso") return MlKind::lasso;
    if (s == "enet" || s == "elastic") return MlKind::enet;
    if (s == "tree") return MlKind::tree;
    if (s == "forest") return MlKind::forest;
    if (s == "boost" || s == "xgb") return MlKind::boost;
    if (s == "knn") return MlKind::knn;
    if (s == "mlp") return MlKind::mlp;
    throw std::invalid_argument("unknown ML model kind '" + s + "'");
}

double MlPredictor::predict_row(const Eigen::VectorXd& x) const {
    return std::visit([&](const auto& m) { return m.predict_row(x); }, model_);
}

Eigen::VectorXd MlPredictor::predict(const Eigen::MatrixXd& X) const {
    return std::visit([&](const auto& m) { return m.predict(X); }, model_);
}

MlPredictor fit_ml(MlKind kind, const FeatureMatrix& fm, const MlHyper& hyper) {
    switch (kind) {
        case MlKind::ols: return MlPredictor(fit_linear(fm, Penalty::none()));
        case MlKind::ridge: return MlPredictor(fit_linear(fm, Penalty::ridge(hyper.lambda)));
        case MlKind::lasso: return MlPredictor(fit_linear(fm, Penalty::lasso(hyper.lambda)));
        case MlKind::enet:
            return MlPredictor(fit_linear(fm, Penalty::elastic(hyper.lambda, hyper.mix)));
        case MlKind::tree: return MlPredictor(fit_tree(fm, hyper.max_depth, hyper.min_leaf));
        case MlKind::forest: {
            ForestOptions o;
            o.n_trees = hyper.n_trees;
            o.max_depth = hyper.max_depth;
            o.min_leaf = hyper.min_leaf;
            o.feature_fraction = hyper.feature_fraction;
            o.seed = hyper.seed;
            return MlPredictor(fit_forest(fm, o));
        }
        case MlKind::boost: {
            BoostOptions o;
            o.n_rounds = hyper.n_rounds;
            o.learning_rate = hyper.learning_rate;
            o.max_depth = hyper.max_depth;
            o.lambda_l2 = hyper.lambda_l2;
            o.alpha_l1 = hyper.alpha_l1;
            o.min_child_weight = hyper.min_child_weight;
            return MlPredictor(fit_boosted(fm, o));
        }
        case MlKind::knn: return MlPredictor(fit_knn(fm, hyper.k));
        case MlKind::mlp: {
            MlpOptions o;
            o.hidden_width = hyper.hidden_width;
            o.epochs = hyper.epochs;
            o.step_size = hyper.step_size;
            o.seed = hyper.seed;
            return MlPredictor(fit_mlp(fm, o));
        }
    }
    throw std::invalid_argument("fit_ml: unknown kind");
}

}  // namespace volcast
