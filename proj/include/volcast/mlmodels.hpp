#pragma once

#include <string>
#include <variant>

#include "volcast/features.hpp"
#include "volcast/knn.hpp"
#include "volcast/linear.hpp"
#include "volcast/mlp.hpp"
#include "volcast/tree.hpp"

namespace volcast {

enum class MlKind { ols, ridge, lasso, enet, tree, forest, boost, knn, mlp };

std::string to_string(MlKind k);
MlKind ml_kind_from_string(const std::string& s);

/// One hyperparameter candidate; each kind reads only its own fields.
struct MlHyper {
    double lambda = 1e-3;  // ridge/lasso/enet
    double mix = 0.5;      // enet
    int max_depth = 5;     // tree/forest/boost (0 = unbounded for boost)
    int min_leaf = 5;      // tree/forest
    int n_trees = 100;     // forest
    double feature_fraction = 1.0 / 3.0;
    int n_rounds = 200;          // boost
    double learning_rate = 0.1;  // boost
    double lambda_l2 = 1.0;      // boost
    double alpha_l1 = 0.0;       // boost
    double min_child_weight = 1.0;
    int k = 10;             // knn
    int hidden_width = 16;  // mlp
    int epochs = 2000;
    double step_size = 0.05;
    std::uint64_t seed = 0;  // forest/mlp
};

/// Fitted regressor of any kind behind one predict surface.
class MlPredictor {
public:
    using Model = std::variant<LinearModel, TreeEnsemble, KnnModel, MlpModel>;

    MlPredictor() = default;
    explicit MlPredictor(Model model) : model_(std::move(model)) {}

    double predict_row(const Eigen::VectorXd& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

    const Model& model() const { return model_; }
    const TreeEnsemble* as_tree_ensemble() const { return std::get_if<TreeEnsemble>(&model_); }

private:
    Model model_;
};

MlPredictor fit_ml(MlKind kind, const FeatureMatrix& fm, const MlHyper& hyper);

}  // namespace volcast
