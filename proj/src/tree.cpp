#include "volcast/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "volcast/rng.hpp"

namespace volcast {

double Tree::predict_row(const Eigen::VectorXd& x) const {
    int i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& n = nodes[i];
        i = x(n.feature) < n.threshold ? n.left : n.right;
    }
    return nodes[i].value;
}

double Tree::expectation() const {
    // Bottom-up cover-weighted average; nodes precede their children.
    std::vector<double> e(nodes.size());
    for (std::size_t i = nodes.size(); i-- > 0;) {
        const TreeNode& n = nodes[i];
        if (n.is_leaf())
            e[i] = n.value;
        else
            e[i] = (nodes[n.left].cover * e[n.left] + nodes[n.right].cover * e[n.right]) / n.cover;
    }
    return e[0];
}

double TreeEnsemble::tree_scale() const {
    switch (combiner) {
        case Combiner::single: return 1.0;
        case Combiner::average: return 1.0 / static_cast<double>(trees.size());
        case Combiner::additive: return learning_rate;
    }
    return 1.0;
}

double TreeEnsemble::predict_row(const Eigen::VectorXd& x) const {
    double s = 0.0;
    for (const Tree& t : trees) s += t.predict_row(x);
    return base_score + tree_scale() * s;
}

Eigen::VectorXd TreeEnsemble::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_row(X.row(i).transpose());
    return out;
}

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// Shared grower for CART (targets) and boosting (gradients). The split
// criterion is score(S,n) = S^2/(n + lambda) summed over children minus the
// parent; with lambda = 0 and S = sum of targets this is the variance
// reduction criterion up to a constant factor.
class TreeGrower {
public:
    TreeGrower(const Eigen::MatrixXd& X, const Eigen::VectorXd& g, bool boost_mode,
               double lambda, double alpha, double min_child, int max_depth,
               double feature_fraction, Rng* rng)
        : X_(X),
          g_(g),
          boost_(boost_mode),
          lambda_(lambda),
          alpha_(alpha),
          min_child_(min_child),
          max_depth_(max_depth),
          feature_fraction_(feature_fraction),
          rng_(rng) {}

    Tree grow(std::vector<int> rows) {
        Tree tree;
        grow_node(tree, std::move(rows), 0);
        return tree;
    }

private:
    double score(double s, double n) const { return s * s / (n + lambda_); }

    double leaf_value(double s, double n) const {
        if (boost_) return -soft_threshold(s, alpha_) / (n + lambda_);
        return s / n;
    }

    std::vector<int> split_features() const {
        const int p = static_cast<int>(X_.cols());
        std::vector<int> feats(p);
        std::iota(feats.begin(), feats.end(), 0);
        if (!rng_ || feature_fraction_ >= 1.0) return feats;
        const int m = std::max(1, static_cast<int>(std::ceil(feature_fraction_ * p)));
        for (int i = 0; i < m; ++i) {
            const int j = i + static_cast<int>(rng_->below(static_cast<std::uint64_t>(p - i)));
            std::swap(feats[i], feats[j]);
        }
        feats.resize(m);
        std::sort(feats.begin(), feats.end());  // ascending scan keeps the tie rule
        return feats;
    }

    int grow_node(Tree& tree, std::vector<int> rows, int depth) {
        const double n = static_cast<double>(rows.size());
        double sum = 0.0, sum_sq = 0.0;
        for (int r : rows) {
            sum += g_(r);
            sum_sq += g_(r) * g_(r);
        }

        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        tree.nodes[node_index].cover = n;
        tree.nodes[node_index].value = leaf_value(sum, n);

        const bool depth_ok = max_depth_ == 0 || depth < max_depth_;
        if (!depth_ok || rows.size() < 2 || n < 2.0 * min_child_) return node_index;

        // Exhaustive threshold search at midpoints of sorted unique values;
        // ties resolve to the lowest feature index, then lowest threshold.
        int best_feature = -1;
        double best_threshold = 0.0;
        // Positive-gain requirement with a relative guard against summation
        // roundoff posing as gain on constant nodes.
        double best_gain = 1e-10 * sum_sq;
        std::vector<int> order;
        for (int f : split_features()) {
            order = rows;
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return X_(a, f) < X_(b, f); });
            double left_sum = 0.0;
            for (std::size_t i = 1; i < order.size(); ++i) {
                left_sum += g_(order[i - 1]);
                const double prev = X_(order[i - 1], f);
                const double next = X_(order[i], f);
                if (!(prev < next)) continue;
                const double nl = static_cast<double>(i);
                const double nr = n - nl;
                if (nl < min_child_ || nr < min_child_) continue;
                const double gain =
                    score(left_sum, nl) + score(sum - left_sum, nr) - score(sum, n);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (prev + next);
                    // Adjacent doubles can round the midpoint onto prev;
                    // fall back to next so the partition matches the scan.
                    if (!(best_threshold > prev)) best_threshold = next;
                }
            }
        }
        if (best_feature < 0) return node_index;

        std::vector<int> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (int r : rows)
            (X_(r, best_feature) < best_threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int left = grow_node(tree, std::move(left_rows), depth + 1);
        const int right = grow_node(tree, std::move(right_rows), depth + 1);
        TreeNode& node = tree.nodes[node_index];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }

    const Eigen::MatrixXd& X_;
    const Eigen::VectorXd& g_;
    bool boost_;
    double lambda_;
    double alpha_;
    double min_child_;
    int max_depth_;
    double feature_fraction_;
    Rng* rng_;
};

std::vector<int> all_rows(Eigen::Index n) {
    std::vector<int> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

}  // namespace

TreeEnsemble fit_tree(const FeatureMatrix& fm, int max_depth, int min_leaf) {
    if (max_depth < 1) throw std::invalid_argument("fit_tree: max_depth must be >= 1");
    if (min_leaf < 1) throw std::invalid_argument("fit_tree: min_leaf must be >= 1");
    if (fm.rows() < 1) throw std::invalid_argument("fit_tree: empty feature matrix");

    TreeGrower grower(fm.X, fm.y, false, 0.0, 0.0, static_cast<double>(min_leaf), max_depth, 1.0,
                      nullptr);
    TreeEnsemble ensemble;
    ensemble.combiner = Combiner::single;
    ensemble.trees.push_back(grower.grow(all_rows(fm.rows())));
    return ensemble;
}

TreeEnsemble fit_forest(const FeatureMatrix& fm, const ForestOptions& options) {
    if (options.n_trees < 1) throw std::invalid_argument("fit_forest: n_trees must be >= 1");
    if (options.max_depth < 1) throw std::invalid_argument("fit_forest: max_depth must be >= 1");
    if (options.min_leaf < 1) throw std::invalid_argument("fit_forest: min_leaf must be >= 1");
    if (!(options.feature_fraction > 0.0 && options.feature_fraction <= 1.0))
        throw std::invalid_argument("fit_forest: feature_fraction must be in (0, 1]");
    if (fm.rows() < 1) throw std::invalid_argument("fit_forest: empty feature matrix");

    TreeEnsemble ensemble;
    ensemble.combiner = Combiner::average;
    const Eigen::Index n = fm.rows();
    for (int i = 0; i < options.n_trees; ++i) {
        // Per-tree stream: adding trees never perturbs earlier ones.
        Rng rng(splitmix64(options.seed ^ splitmix64(static_cast<std::uint64_t>(i) + 1)));
        std::vector<int> rows;
        if (options.bootstrap) {
            rows.resize(static_cast<std::size_t>(n));
            for (auto& r : rows)
                r = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        } else {
            rows = all_rows(n);
        }
        TreeGrower grower(fm.X, fm.y, false, 0.0, 0.0, static_cast<double>(options.min_leaf),
                          options.max_depth, options.feature_fraction, &rng);
        ensemble.trees.push_back(grower.grow(std::move(rows)));
    }
    return ensemble;
}

TreeEnsemble fit_boosted(const FeatureMatrix& fm, const BoostOptions& options) {
    if (options.n_rounds < 1) throw std::invalid_argument("fit_boosted: n_rounds must be >= 1");
    if (!(options.learning_rate > 0.0 && options.learning_rate <= 1.0))
        throw std::invalid_argument("fit_boosted: learning_rate must be in (0, 1]");
    if (options.lambda_l2 < 0.0 || options.alpha_l1 < 0.0)
        throw std::invalid_argument("fit_boosted: penalties must be >= 0");
    if (fm.rows() < 1) throw std::invalid_argument("fit_boosted: empty feature matrix");

    TreeEnsemble ensemble;
    ensemble.combiner = Combiner::additive;
    ensemble.learning_rate = options.learning_rate;
    ensemble.base_score = fm.y.mean();

    const Eigen::Index n = fm.rows();
    Eigen::VectorXd pred = Eigen::VectorXd::Constant(n, ensemble.base_score);
    Eigen::VectorXd grad(n);
    for (int round = 0; round < options.n_rounds; ++round) {
        grad = pred - fm.y;
        TreeGrower grower(fm.X, grad, true, options.lambda_l2, options.alpha_l1,
                          options.min_child_weight, options.max_depth, 1.0, nullptr);
        Tree tree = grower.grow(all_rows(n));
        for (Eigen::Index i = 0; i < n; ++i)
            pred(i) += options.learning_rate * tree.predict_row(fm.X.row(i).transpose());
        ensemble.trees.push_back(std::move(tree));
    }
    return ensemble;
}

}  // namespace volcast
