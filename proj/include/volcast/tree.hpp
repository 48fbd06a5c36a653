#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "volcast/features.hpp"

namespace volcast {

/// Tree node in a flat array; feature == -1 marks a leaf. Rows with
/// x[feature] < threshold go left. cover is the training weight (row
/// count) that reached the node; child covers sum to the parent's.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    double value = 0.0;  // leaf value (raw, before any ensemble scaling)
    double cover = 0.0;
    int left = -1;
    int right = -1;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // root at index 0

    double predict_row(const Eigen::VectorXd& x) const;
    /// Cover-weighted expectation of the tree output.
    double expectation() const;
};

enum class Combiner { single, average, additive };

/// Additive collection of regression trees.
///   single:   prediction = base_score + tree0(x)
///   average:  prediction = base_score + mean_t tree_t(x)
///   additive: prediction = base_score + learning_rate * sum_t tree_t(x)
struct TreeEnsemble {
    std::vector<Tree> trees;
    double base_score = 0.0;
    Combiner combiner = Combiner::single;
    double learning_rate = 1.0;

    double tree_scale() const;
    double predict_row(const Eigen::VectorXd& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

/// Greedy variance-reduction CART. Thresholds are midpoints of sorted
/// unique feature values; equal-gain ties resolve to the lowest feature
/// index, then the lowest threshold. max_depth >= 1 caps split levels;
/// both children must keep at least min_leaf rows. Degenerate data yields
/// a single leaf.
TreeEnsemble fit_tree(const FeatureMatrix& fm, int max_depth, int min_leaf);

struct ForestOptions {
    int n_trees = 100;
    int max_depth = 8;
    int min_leaf = 1;
    double feature_fraction = 1.0;  // fraction of features sampled per split
    std::uint64_t seed = 0;
    bool bootstrap = true;  // off: every tree sees the full sample
};

/// Bootstrap forest with per-split feature subsampling and per-tree
/// deterministic PRNG streams; prediction is the mean of tree outputs.
TreeEnsemble fit_forest(const FeatureMatrix& fm, const ForestOptions& options);

struct BoostOptions {
    int n_rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 3;  // 0 = unbounded
    double lambda_l2 = 1.0;
    double alpha_l1 = 0.0;
    double min_child_weight = 1.0;
};

/// Second-order gradient boosting with squared loss (g = yhat - y, h = 1).
/// Leaf value: -sign(G) max(|G| - alpha_l1, 0) / (H + lambda_l2).
/// Split gain: 1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)];
/// splits with nonpositive gain or a child below min_child_weight are
/// rejected. base_score = mean(y).
TreeEnsemble fit_boosted(const FeatureMatrix& fm, const BoostOptions& options);

}  // namespace volcast
