#pragma once

#include <vector>

#include <Eigen/Dense>

#include "volcast/tree.hpp"

namespace volcast {

/// Per-row attribution. Local accuracy holds as an identity:
/// base_value + sum(attributions) = model_output.
struct ShapExplanation {
    double base_value = 0.0;
    Eigen::VectorXd attributions;
    Eigen::VectorXd feature_values;
    double model_output = 0.0;
};

/// Exact path-dependent TreeSHAP, polynomial in depth and leaf count.
/// The marginal distribution is the tree-cover one: descending past a
/// split on an absent feature weights both branches by cover share.
/// Rejects ensembles whose child covers do not sum to the parent cover.
ShapExplanation tree_shap(const TreeEnsemble& ensemble, const Eigen::VectorXd& row);

/// Shapley values by subset enumeration against the same cover-based
/// value function; the independent oracle for tree_shap. p <= 15.
ShapExplanation brute_force_shapley(const TreeEnsemble& ensemble, const Eigen::VectorXd& row);

/// Mean absolute attribution per feature over a dataset, ordered
/// descending (ties broken by feature index).
struct GlobalImportance {
    Eigen::VectorXd mean_abs;
    std::vector<int> order;
};

GlobalImportance global_importance(const TreeEnsemble& ensemble, const Eigen::MatrixXd& X);

}  // namespace volcast
