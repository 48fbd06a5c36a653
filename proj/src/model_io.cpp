#include "volcast/model_io.hpp"

#include <stdexcept>

namespace volcast {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    Eigen::Index i = 0;
    for (const auto& x : a) v(i++) = x.get<double>();
    return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd mat_from_json(const json& a) {
    const Eigen::Index rows = static_cast<Eigen::Index>(a.size());
    const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(a.at(0).size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = a.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)).get<double>();
    return m;
}

json node_to_json(const Tree& tree, int index) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(index)];
    json j;
    j["cover"] = n.cover;
    if (n.is_leaf()) {
        j["value"] = n.value;
    } else {
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["left"] = node_to_json(tree, n.left);
        j["right"] = node_to_json(tree, n.right);
    }
    return j;
}

int node_from_json(const json& j, Tree& tree) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    tree.nodes[static_cast<std::size_t>(index)].cover = j.at("cover").get<double>();
    if (j.contains("feature")) {
        const int left = node_from_json(j.at("left"), tree);
        const int right = node_from_json(j.at("right"), tree);
        TreeNode& n = tree.nodes[static_cast<std::size_t>(index)];
        n.feature = j.at("feature").get<int>();
        n.threshold = j.at("threshold").get<double>();
        n.left = left;
        n.right = right;
    } else {
        tree.nodes[static_cast<std::size_t>(index)].value = j.at("value").get<double>();
    }
    return index;
}

json penalty_to_json(const Penalty& p) {
    switch (p.kind) {
        case PenaltyKind::none: return {{"kind", "none"}};
        case PenaltyKind::l2: return {{"kind", "l2"}, {"lambda", p.lambda}};
        case PenaltyKind::l1: return {{"kind", "l1"}, {"lambda", p.lambda}};
        case PenaltyKind::elastic:
            return {{"kind", "elastic"}, {"lambda", p.lambda}, {"mix", p.mix}};
    }
    return {{"kind", "none"}};
}

Penalty penalty_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "none") return Penalty::none();
    if (kind == "l2") return Penalty::ridge(j.at("lambda").get<double>());
    if (kind == "l1") return Penalty::lasso(j.at("lambda").get<double>());
    if (kind == "elastic")
        return Penalty::elastic(j.at("lambda").get<double>(), j.at("mix").get<double>());
    throw std::invalid_argument("unknown penalty kind '" + kind + "'");
}

}  // namespace

void check_format_version(const json& j, const std::string& what) {
    const int v = j.value("format_version", -1);
    if (v != kModelFormatVersion)
        throw std::invalid_argument(what + ": format_version " + std::to_string(v) +
                                    " is not the supported version " +
                                    std::to_string(kModelFormatVersion));
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(what + ": parse error at byte " + std::to_string(e.byte) +
                                    ": " + e.what());
    }
}

json to_json(const LinearModel& m) {
    return {{"format_version", kModelFormatVersion},
            {"kind", "linear"},
            {"intercept", m.intercept},
            {"coefficients", vec_to_json(m.coefficients)},
            {"penalty", penalty_to_json(m.penalty)},
            {"feature_mean", vec_to_json(m.feature_mean)},
            {"feature_scale", vec_to_json(m.feature_scale)}};
}

LinearModel linear_from_json(const json& j) {
    check_format_version(j, "linear model");
    LinearModel m;
    m.intercept = j.at("intercept").get<double>();
    m.coefficients = vec_from_json(j.at("coefficients"));
    m.penalty = penalty_from_json(j.at("penalty"));
    m.feature_mean = vec_from_json(j.at("feature_mean"));
    m.feature_scale = vec_from_json(j.at("feature_scale"));
    return m;
}

json to_json(const TreeEnsemble& m) {
    json trees = json::array();
    for (const Tree& t : m.trees) trees.push_back(node_to_json(t, 0));
    const char* combiner = m.combiner == Combiner::single
                               ? "single"
                               : (m.combiner == Combiner::average ? "average" : "additive");
    return {{"format_version", kModelFormatVersion},
            {"kind", "tree_ensemble"},
            {"combiner", combiner},
            {"base_score", m.base_score},
            {"learning_rate", m.learning_rate},
            {"trees", std::move(trees)}};
}

TreeEnsemble ensemble_from_json(const json& j) {
    check_format_version(j, "tree ensemble");
    TreeEnsemble m;
    const std::string combiner = j.at("combiner").get<std::string>();
    if (combiner == "single")
        m.combiner = Combiner::single;
    else if (combiner == "average")
        m.combiner = Combiner::average;
    else if (combiner == "additive")
        m.combiner = Combiner::additive;
    else
        throw std::invalid_argument("unknown combiner '" + combiner + "'");
    m.base_score = j.at("base_score").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    for (const auto& t : j.at("trees")) {
        Tree tree;
        node_from_json(t, tree);
        m.trees.push_back(std::move(tree));
    }
    if (m.trees.empty()) throw std::invalid_argument("tree ensemble: no trees");
    return m;
}

json to_json(const KnnModel& m) {
    return {{"format_version", kModelFormatVersion},
            {"kind", "knn"},
            {"k", m.k},
            {"X_std", mat_to_json(m.X_std)},
            {"y", vec_to_json(m.y)},
            {"feature_mean", vec_to_json(m.feature_mean)},
            {"feature_scale", vec_to_json(m.feature_scale)}};
}

KnnModel knn_from_json(const json& j) {
    check_format_version(j, "knn model");
    KnnModel m;
    m.k = j.at("k").get<int>();
    m.X_std = mat_from_json(j.at("X_std"));
    m.y = vec_from_json(j.at("y"));
    m.feature_mean = vec_from_json(j.at("feature_mean"));
    m.feature_scale = vec_from_json(j.at("feature_scale"));
    return m;
}

json to_json(const MlpModel& m) {
    return {{"format_version", kModelFormatVersion},
            {"kind", "mlp"},
            {"w1", mat_to_json(m.w1)},
            {"b1", vec_to_json(m.b1)},
            {"w2", vec_to_json(m.w2)},
            {"b2", m.b2}};
}

MlpModel mlp_from_json(const json& j) {
    check_format_version(j, "mlp model");
    MlpModel m;
    m.w1 = mat_from_json(j.at("w1"));
    m.b1 = vec_from_json(j.at("b1"));
    m.w2 = vec_from_json(j.at("w2"));
    m.b2 = j.at("b2").get<double>();
    return m;
}

json ml_predictor_to_json(const MlPredictor& m) {
    return std::visit([](const auto& inner) { return to_json(inner); }, m.model());
}

MlPredictor ml_predictor_from_json(const json& j) {
    check_format_version(j, "model");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") return MlPredictor(linear_from_json(j));
    if (kind == "tree_ensemble") return MlPredictor(ensemble_from_json(j));
    if (kind == "knn") return MlPredictor(knn_from_json(j));
    if (kind == "mlp") return MlPredictor(mlp_from_json(j));
    throw std::invalid_argument("unknown model kind '" + kind + "'");
}

json garch_fit_to_json(const GarchFit& fit) {
    json exog = json::array();
    for (const auto& e : fit.spec.exogenous) exog.push_back(e);
    json j{{"format_version", kModelFormatVersion},
           {"kind", "garch_fit"},
           {"model", to_string(fit.spec.kind)},
           {"exogenous", std::move(exog)},
           {"mean_model", fit.spec.mean_model == MeanModel::constant ? "constant" : "zero"},
           {"params",
            {{"mu", fit.params.mu},
             {"omega", fit.params.omega},
             {"alpha", fit.params.alpha},
             {"beta", fit.params.beta},
             {"gamma", fit.params.gamma},
             {"exo_coefs", fit.params.exo_coefs}}},
           {"log_likelihood", fit.log_likelihood},
           {"converged", fit.converged},
           {"iterations", fit.iterations},
           {"grad_norm", fit.grad_norm},
           {"floor_hits", fit.floor_hits},
           {"variance_path", fit.variance_path},
           {"std_residuals", fit.std_residuals}};
    if (fit.std_errors) j["std_errors"] = *fit.std_errors;
    return j;
}

GarchFit garch_fit_from_json(const json& j) {
    check_format_version(j, "garch fit");
    GarchFit fit;
    fit.spec.kind = garch_kind_from_string(j.at("model").get<std::string>());
    fit.spec.exogenous = j.at("exogenous").get<std::vector<std::string>>();
    fit.spec.mean_model =
        j.at("mean_model").get<std::string>() == "zero" ? MeanModel::zero : MeanModel::constant;
    const auto& p = j.at("params");
    fit.params.mu = p.at("mu").get<double>();
    fit.params.omega = p.at("omega").get<double>();
    fit.params.alpha = p.at("alpha").get<double>();
    fit.params.beta = p.at("beta").get<double>();
    fit.params.gamma = p.at("gamma").get<double>();
    fit.params.exo_coefs = p.at("exo_coefs").get<std::vector<double>>();
    fit.log_likelihood = j.at("log_likelihood").get<double>();
    fit.converged = j.at("converged").get<bool>();
    fit.iterations = j.at("iterations").get<int>();
    fit.grad_norm = j.at("grad_norm").get<double>();
    fit.floor_hits = j.at("floor_hits").get<int>();
    fit.variance_path = j.at("variance_path").get<std::vector<double>>();
    fit.std_residuals = j.at("std_residuals").get<std::vector<double>>();
    if (j.contains("std_errors")) fit.std_errors = j.at("std_errors").get<std::vector<double>>();
    return fit;
}

json bekk_fit_to_json(const BekkFit& fit) {
    json j{{"format_version", kModelFormatVersion},
           {"kind", "bekk_fit"},
           {"C", mat_to_json(fit.params.C)},
           {"A", mat_to_json(fit.params.A)},
           {"B", mat_to_json(fit.params.B)},
           {"mean", vec_to_json(fit.mean)},
           {"log_likelihood", fit.log_likelihood},
           {"spectral_radius", fit.spectral_radius},
           {"stationary", fit.stationary},
           {"converged", fit.converged},
           {"iterations", fit.iterations},
           {"grad_norm", fit.grad_norm},
           {"last_covariance", mat_to_json(fit.covariance_path.back())}};
    if (fit.std_errors) j["std_errors"] = *fit.std_errors;
    return j;
}

BekkFit bekk_fit_from_json(const json& j) {
    check_format_version(j, "bekk fit");
    BekkFit fit;
    fit.params.C = mat_from_json(j.at("C"));
    fit.params.A = mat_from_json(j.at("A"));
    fit.params.B = mat_from_json(j.at("B"));
    fit.mean = vec_from_json(j.at("mean"));
    fit.log_likelihood = j.at("log_likelihood").get<double>();
    fit.spectral_radius = j.at("spectral_radius").get<double>();
    fit.stationary = j.at("stationary").get<bool>();
    fit.converged = j.at("converged").get<bool>();
    fit.iterations = j.at("iterations").get<int>();
    fit.grad_norm = j.at("grad_norm").get<double>();
    fit.covariance_path = {mat_from_json(j.at("last_covariance"))};
    if (j.contains("std_errors")) fit.std_errors = j.at("std_errors").get<std::vector<double>>();
    return fit;
}

}  // namespace volcast
