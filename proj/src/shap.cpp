#include "volcast/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace volcast {

namespace {

void check_covers(const Tree& tree) {
    for (const TreeNode& n : tree.nodes) {
        if (n.is_leaf()) continue;
        const double children = tree.nodes[n.left].cover + tree.nodes[n.right].cover;
        if (!(n.cover > 0.0) ||
            std::fabs(children - n.cover) > 1e-9 * std::max(1.0, n.cover))
            throw std::invalid_argument(
                "tree_shap: malformed covers (children do not sum to parent)");
    }
}

// One element of the unique-feature path maintained by the recursion.
struct PathElement {
    int feature = -1;       // -1 for the root placeholder
    double zero_fraction = 0.0;  // cover share when the feature is absent
    double one_fraction = 0.0;   // 1 when x follows this branch, else 0
    double pweight = 0.0;
};

using Path = std::vector<PathElement>;

void extend(Path& m, double pz, double po, int pi) {
    const std::size_t l = m.size();
    m.push_back({pi, pz, po, l == 0 ? 1.0 : 0.0});
    for (std::size_t i = l; i-- > 0;) {
        m[i + 1].pweight +=
            po * m[i].pweight * static_cast<double>(i + 1) / static_cast<double>(l + 1);
        m[i].pweight = pz * m[i].pweight * static_cast<double>(l - i) / static_cast<double>(l + 1);
    }
}

Path unwind(const Path& m, std::size_t i) {
    Path out(m.begin(), m.end() - 1);
    const std::size_t l = m.size() - 1;
    double n = m[l].pweight;
    if (m[i].one_fraction != 0.0) {
        for (std::size_t j = l; j-- > 0;) {
            const double t = out[j].pweight;
            out[j].pweight =
                n * static_cast<double>(l + 1) / (static_cast<double>(j + 1) * m[i].one_fraction);
            n = t - out[j].pweight * m[i].zero_fraction * static_cast<double>(l - j) /
                        static_cast<double>(l + 1);
        }
    } else {
        for (std::size_t j = l; j-- > 0;)
            out[j].pweight = out[j].pweight * static_cast<double>(l + 1) /
                             (m[i].zero_fraction * static_cast<double>(l - j));
    }
    for (std::size_t j = i; j < l; ++j) {
        out[j].feature = m[j + 1].feature;
        out[j].zero_fraction = m[j + 1].zero_fraction;
        out[j].one_fraction = m[j + 1].one_fraction;
    }
    return out;
}

double unwound_sum(const Path& m, std::size_t i) {
    const Path u = unwind(m, i);
    double s = 0.0;
    for (const auto& e : u) s += e.pweight;
    return s;
}

void shap_recurse(const Tree& tree, const Eigen::VectorXd& x, Eigen::VectorXd& phi, int node,
                  Path m, double pz, double po, int pi) {
    extend(m, pz, po, pi);
    const TreeNode& n = tree.nodes[node];
    if (n.is_leaf()) {
        for (std::size_t i = 1; i < m.size(); ++i) {
            const double w = unwound_sum(m, i);
            phi(m[i].feature) += w * (m[i].one_fraction - m[i].zero_fraction) * n.value;
        }
        return;
    }
    const bool go_left = x(n.feature) < n.threshold;
    const int hot = go_left ? n.left : n.right;
    const int cold = go_left ? n.right : n.left;

    double iz = 1.0, io = 1.0;
    for (std::size_t k = 1; k < m.size(); ++k) {
        if (m[k].feature == n.feature) {
            iz = m[k].zero_fraction;
            io = m[k].one_fraction;
            m = unwind(m, k);
            break;
        }
    }
    const double cover = n.cover;
    shap_recurse(tree, x, phi, hot, m, iz * tree.nodes[hot].cover / cover, io, n.feature);
    shap_recurse(tree, x, phi, cold, m, iz * tree.nodes[cold].cover / cover, 0.0, n.feature);
}

// Cover-conditional expectation given the feature subset `mask`: follow
// x's branch on present features, cover-average over absent ones.
double subset_value(const Tree& tree, const Eigen::VectorXd& x, std::uint32_t mask, int node) {
    const TreeNode& n = tree.nodes[node];
    if (n.is_leaf()) return n.value;
    if (mask & (1u << n.feature))
        return subset_value(tree, x, mask, x(n.feature) < n.threshold ? n.left : n.right);
    const double wl = tree.nodes[n.left].cover;
    const double wr = tree.nodes[n.right].cover;
    return (wl * subset_value(tree, x, mask, n.left) + wr * subset_value(tree, x, mask, n.right)) /
           n.cover;
}

}  // namespace

ShapExplanation tree_shap(const TreeEnsemble& ensemble, const Eigen::VectorXd& row) {
    if (ensemble.trees.empty()) throw std::invalid_argument("tree_shap: empty ensemble");
    const Eigen::Index p = row.size();
    ShapExplanation ex;
    ex.feature_values = row;
    ex.attributions = Eigen::VectorXd::Zero(p);
    ex.base_value = ensemble.base_score;

    const double scale = ensemble.tree_scale();
    Eigen::VectorXd phi(p);
    for (const Tree& tree : ensemble.trees) {
        check_covers(tree);
        phi.setZero();
        shap_recurse(tree, row, phi, 0, Path{}, 1.0, 1.0, -1);
        ex.attributions += scale * phi;
        ex.base_value += scale * tree.expectation();
    }
    ex.model_output = ensemble.predict_row(row);
    return ex;
}

ShapExplanation brute_force_shapley(const TreeEnsemble& ensemble, const Eigen::VectorXd& row) {
    if (ensemble.trees.empty()) throw std::invalid_argument("brute_force_shapley: empty ensemble");
    const int p = static_cast<int>(row.size());
    if (p > 15) throw std::invalid_argument("brute_force_shapley: supports at most 15 features");

    const double scale = ensemble.tree_scale();
    const std::uint32_t n_subsets = 1u << p;
    std::vector<double> value(n_subsets);
    for (std::uint32_t mask = 0; mask < n_subsets; ++mask) {
        double v = ensemble.base_score;
        for (const Tree& tree : ensemble.trees) v += scale * subset_value(tree, row, mask, 0);
        value[mask] = v;
    }

    std::vector<double> factorial(static_cast<std::size_t>(p) + 1, 1.0);
    for (int i = 1; i <= p; ++i) factorial[i] = factorial[i - 1] * i;

    ShapExplanation ex;
    ex.feature_values = row;
    ex.base_value = value[0];
    ex.model_output = value[n_subsets - 1];
    ex.attributions = Eigen::VectorXd::Zero(p);
    for (int j = 0; j < p; ++j) {
        const std::uint32_t bit = 1u << j;
        double phi = 0.0;
        for (std::uint32_t mask = 0; mask < n_subsets; ++mask) {
            if (mask & bit) continue;
            const int s = std::popcount(mask);
            const double w = factorial[s] * factorial[p - s - 1] / factorial[p];
            phi += w * (value[mask | bit] - value[mask]);
        }
        ex.attributions(j) = phi;
    }
    return ex;
}

GlobalImportance global_importance(const TreeEnsemble& ensemble, const Eigen::MatrixXd& X) {
    if (X.rows() == 0) throw std::invalid_argument("global_importance: empty dataset");
    GlobalImportance gi;
    gi.mean_abs = Eigen::VectorXd::Zero(X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const ShapExplanation ex = tree_shap(ensemble, X.row(i).transpose());
        gi.mean_abs += ex.attributions.cwiseAbs();
    }
    gi.mean_abs /= static_cast<double>(X.rows());
    gi.order.resize(static_cast<std::size_t>(X.cols()));
    std::iota(gi.order.begin(), gi.order.end(), 0);
    std::sort(gi.order.begin(), gi.order.end(), [&](int a, int b) {
        if (gi.mean_abs(a) != gi.mean_abs(b)) return gi.mean_abs(a) > gi.mean_abs(b);
        return a < b;
    });
    return gi;
}

}  // namespace volcast
