#include <doctest.h>

#include <cmath>

#include "volcast/rng.hpp"
#include "volcast/shap.hpp"
#include "volcast/tree.hpp"

using namespace volcast;

namespace {

// Stump: split on `feature`, covers split cover_left/cover_right, leaf
// values vl/vr.
Tree stump(int feature, double threshold, double vl, double vr, double cover_left,
           double cover_right) {
    Tree t;
    t.nodes.resize(3);
    t.nodes[0] = TreeNode{feature, threshold, 0.0, cover_left + cover_right, 1, 2};
    t.nodes[1] = TreeNode{-1, 0.0, vl, cover_left, -1, -1};
    t.nodes[2] = TreeNode{-1, 0.0, vr, cover_right, -1, -1};
    return t;
}

// Random tree over p features with consistent covers; depth-bounded.
int random_subtree(Tree& tree, Rng& rng, int p, int depth, int max_depth, double cover) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    tree.nodes[static_cast<std::size_t>(index)].cover = cover;
    const bool leaf = depth >= max_depth || rng.uniform() < 0.3;
    if (leaf) {
        tree.nodes[static_cast<std::size_t>(index)].value = rng.uniform(-5.0, 5.0);
        return index;
    }
    const double share = rng.uniform(0.2, 0.8);
    const int left = random_subtree(tree, rng, p, depth + 1, max_depth, cover * share);
    const int right = random_subtree(tree, rng, p, depth + 1, max_depth, cover * (1.0 - share));
    TreeNode& n = tree.nodes[static_cast<std::size_t>(index)];
    n.feature = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
    n.threshold = rng.uniform(-1.0, 1.0);
    n.left = left;
    n.right = right;
    return index;
}

TreeEnsemble random_ensemble(Rng& rng, int p, int max_depth, int max_trees) {
    TreeEnsemble e;
    const int n_trees = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_trees)));
    for (int i = 0; i < n_trees; ++i) {
        Tree t;
        random_subtree(t, rng, p, 0, max_depth, rng.uniform(10.0, 100.0));
        e.trees.push_back(std::move(t));
    }
    const double pick = rng.uniform();
    if (pick < 0.34) {
        e.combiner = Combiner::single;
        e.trees.resize(1);
    } else if (pick < 0.67) {
        e.combiner = Combiner::average;
    } else {
        e.combiner = Combiner::additive;
        e.learning_rate = rng.uniform(0.05, 1.0);
        e.base_score = rng.uniform(-2.0, 2.0);
    }
    return e;
}

}  // namespace

TEST_SUITE("shap") {

TEST_CASE("single stump: base is the cover-weighted mean, phi moves it to the leaf") {
    TreeEnsemble e;
    e.trees.push_back(stump(0, 0.0, 0.0, 10.0, 50.0, 50.0));
    Eigen::VectorXd row(1);
    row << 1.0;  // lands on the 10-branch
    for (const auto& ex : {tree_shap(e, row), brute_force_shapley(e, row)}) {
        CHECK(ex.base_value == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(ex.attributions(0) == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(ex.model_output == doctest::Approx(10.0).epsilon(1e-12));
    }
}

TEST_CASE("dummy: features never split on receive exactly zero") {
    TreeEnsemble e;
    e.trees.push_back(stump(1, 0.0, -3.0, 7.0, 30.0, 10.0));
    Eigen::VectorXd row(4);
    row << 0.5, 0.5, -2.0, 9.0;
    const ShapExplanation a = tree_shap(e, row);
    const ShapExplanation b = brute_force_shapley(e, row);
    for (int j : {0, 2, 3}) {
        CHECK(a.attributions(j) == 0.0);
        CHECK(b.attributions(j) == 0.0);
    }
}

TEST_CASE("symmetry: identical stumps on two features, symmetric row") {
    TreeEnsemble e;
    e.combiner = Combiner::additive;
    e.learning_rate = 1.0;
    e.trees.push_back(stump(0, 0.0, 0.0, 4.0, 20.0, 20.0));
    e.trees.push_back(stump(1, 0.0, 0.0, 4.0, 20.0, 20.0));
    Eigen::VectorXd row(2);
    row << 1.0, 1.0;
    const ShapExplanation ex = tree_shap(e, row);
    CHECK(ex.attributions(0) == doctest::Approx(ex.attributions(1)).epsilon(1e-12));
    const ShapExplanation bf = brute_force_shapley(e, row);
    CHECK(bf.attributions(0) == doctest::Approx(bf.attributions(1)).epsilon(1e-12));
}

TEST_CASE("single-leaf tree: zero attributions, base equals the leaf") {
    TreeEnsemble e;
    Tree t;
    t.nodes.push_back(TreeNode{-1, 0.0, 2.75, 40.0, -1, -1});
    e.trees.push_back(t);
    Eigen::VectorXd row(3);
    row << 1.0, 2.0, 3.0;
    const ShapExplanation ex = tree_shap(e, row);
    CHECK(ex.base_value == doctest::Approx(2.75));
    for (int j = 0; j < 3; ++j) CHECK(ex.attributions(j) == 0.0);
    CHECK(ex.model_output == doctest::Approx(2.75));
}

TEST_CASE("oracle equivalence on random ensembles") {
    Rng rng(20260810);
    double worst = 0.0;
    for (int rep = 0; rep < 120; ++rep) {
        const int p = 2 + static_cast<int>(rng.below(9));  // up to 10 features
        const TreeEnsemble e = random_ensemble(rng, p, 4, 20);
        for (int r = 0; r < 5; ++r) {
            Eigen::VectorXd row(p);
            for (int j = 0; j < p; ++j) row(j) = rng.uniform(-1.5, 1.5);
            const ShapExplanation fast = tree_shap(e, row);
            const ShapExplanation slow = brute_force_shapley(e, row);
            CHECK(fast.base_value == doctest::Approx(slow.base_value).epsilon(1e-9));
            for (int j = 0; j < p; ++j)
                worst = std::max(worst,
                                 std::fabs(fast.attributions(j) - slow.attributions(j)));
            // Local accuracy for both routes.
            CHECK(std::fabs(fast.base_value + fast.attributions.sum() - fast.model_output) <=
                  1e-9);
            CHECK(std::fabs(slow.base_value + slow.attributions.sum() - slow.model_output) <=
                  1e-9);
        }
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("additivity: ensemble attributions are the sum over trees") {
    Rng rng(31415);
    const int p = 5;
    TreeEnsemble e = random_ensemble(rng, p, 3, 6);
    e.combiner = Combiner::additive;
    e.learning_rate = 0.25;
    e.base_score = 1.0;
    Eigen::VectorXd row(p);
    for (int j = 0; j < p; ++j) row(j) = rng.uniform(-1.0, 1.0);

    const ShapExplanation whole = tree_shap(e, row);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(p);
    for (const Tree& t : e.trees) {
        TreeEnsemble single;
        single.combiner = Combiner::additive;
        single.learning_rate = e.learning_rate;
        single.base_score = 0.0;
        single.trees.push_back(t);
        sum += tree_shap(single, row).attributions;
    }
    for (int j = 0; j < p; ++j)
        CHECK(whole.attributions(j) == doctest::Approx(sum(j)).epsilon(1e-12));
}

TEST_CASE("local accuracy on a fitted boosted model") {
    Rng rng(161803);
    FeatureMatrix fm;
    const Eigen::Index n = 120, p = 6;
    fm.X.resize(n, p);
    fm.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) fm.X(i, j) = rng.normal();
        fm.y(i) = std::sin(fm.X(i, 0)) + 0.3 * fm.X(i, 1) * fm.X(i, 2) + 0.1 * rng.normal();
    }
    for (Eigen::Index j = 0; j < p; ++j) fm.feature_names.push_back("f" + std::to_string(j));
    BoostOptions opts;
    opts.n_rounds = 40;
    opts.max_depth = 3;
    const TreeEnsemble model = fit_boosted(fm, opts);
    for (Eigen::Index i = 0; i < n; ++i) {
        const ShapExplanation ex = tree_shap(model, fm.X.row(i).transpose());
        CHECK(std::fabs(ex.base_value + ex.attributions.sum() - model.predict_row(
                            fm.X.row(i).transpose())) <= 1e-9);
    }
}

TEST_CASE("malformed covers are rejected") {
    TreeEnsemble e;
    Tree t = stump(0, 0.0, 1.0, 2.0, 10.0, 20.0);
    t.nodes[0].cover = 25.0;  // children sum to 30
    e.trees.push_back(t);
    Eigen::VectorXd row(1);
    row << 0.5;
    CHECK_THROWS_WITH_AS(tree_shap(e, row), doctest::Contains("cover"), std::invalid_argument);
}

TEST_CASE("brute force refuses more than 15 features") {
    TreeEnsemble e;
    e.trees.push_back(stump(0, 0.0, 0.0, 1.0, 1.0, 1.0));
    Eigen::VectorXd row(16);
    row.setZero();
    CHECK_THROWS_AS(brute_force_shapley(e, row), std::invalid_argument);
}

TEST_CASE("global importance: ignored features rank last with exact zeros") {
    TreeEnsemble e;
    e.trees.push_back(stump(1, 0.0, -1.0, 3.0, 25.0, 75.0));
    Rng rng(55);
    Eigen::MatrixXd X(40, 3);
    for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = rng.uniform(-1.0, 1.0);
    const GlobalImportance gi = global_importance(e, X);
    CHECK(gi.order[0] == 1);
    CHECK(gi.mean_abs(0) == 0.0);
    CHECK(gi.mean_abs(2) == 0.0);
    CHECK(gi.mean_abs(1) > 0.0);
    CHECK(gi.order[1] == 0);  // tie between 0 and 2 resolves by index
    CHECK(gi.order[2] == 2);

    SUBCASE("a single-leaf model gives all-zero importances") {
        TreeEnsemble flat;
        Tree leaf;
        leaf.nodes.push_back(TreeNode{-1, 0.0, 1.0, 10.0, -1, -1});
        flat.trees.push_back(leaf);
        const GlobalImportance gz = global_importance(flat, X);
        for (int j = 0; j < 3; ++j) CHECK(gz.mean_abs(j) == 0.0);
    }
}

}  // TEST_SUITE
