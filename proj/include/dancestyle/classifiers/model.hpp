#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "boosting.hpp"
#include "data.hpp"
#include "forest.hpp"
#include "logreg.hpp"
#include "mlp.hpp"

namespace dancestyle {

enum class ModelKind { logreg_l1, random_forest, gradient_boosting, mlp };

inline std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::logreg_l1: return "logreg_l1";
        case ModelKind::random_forest: return "random_forest";
        case ModelKind::gradient_boosting: return "gradient_boosting";
        case ModelKind::mlp: return "mlp";
    }
    return "?";
}

/// Accepts the canonical names and the short aliases lr, rf, gb, nn.
inline ModelKind parse_model_kind(std::string_view name) {
    if (name == "logreg_l1" || name == "lr") return ModelKind::logreg_l1;
    if (name == "random_forest" || name == "rf") return ModelKind::random_forest;
    if (name == "gradient_boosting" || name == "gb") return ModelKind::gradient_boosting;
    if (name == "mlp" || name == "nn") return ModelKind::mlp;
    throw DataError("unknown model kind '" + std::string(name) + "'");
}

struct ModelSpec {
    ModelKind kind = ModelKind::gradient_boosting;
    LogRegParams logreg;
    ForestParams forest;
    BoostParams boosting;
    MlpParams mlp;
    std::uint64_t seed = 42;
};

/// Hyperparameters of the selected kind as a JSON object.
inline nlohmann::json hyperparameters_to_json(const ModelSpec& spec) {
    nlohmann::json j;
    switch (spec.kind) {
        case ModelKind::logreg_l1:
            j = {{"C", spec.logreg.C}, {"max_iter", spec.logreg.max_iter}, {"tol", spec.logreg.tol}};
            break;
        case ModelKind::random_forest:
            j = {{"n_trees", spec.forest.n_trees},
                 {"max_features", spec.forest.max_features},
                 {"min_samples_split", spec.forest.min_samples_split},
                 {"max_depth", spec.forest.max_depth},
                 {"bootstrap", spec.forest.bootstrap}};
            break;
        case ModelKind::gradient_boosting:
            j = {{"rounds", spec.boosting.rounds},
                 {"max_depth", spec.boosting.max_depth},
                 {"learning_rate", spec.boosting.learning_rate},
                 {"lambda", spec.boosting.lambda},
                 {"min_child_weight", spec.boosting.min_child_weight},
                 {"gamma", spec.boosting.gamma}};
            break;
        case ModelKind::mlp:
            j = {{"hidden", spec.mlp.hidden},       {"learning_rate", spec.mlp.learning_rate},
                 {"beta1", spec.mlp.beta1},         {"beta2", spec.mlp.beta2},
                 {"epsilon", spec.mlp.epsilon},     {"batch_size", spec.mlp.batch_size},
                 {"epochs", spec.mlp.epochs},       {"alpha", spec.mlp.alpha}};
            break;
    }
    return j;
}

/// Overrides hyperparameters of the selected kind; unknown keys are rejected.
inline void apply_hyperparameters(ModelSpec& spec, const nlohmann::json& overrides) {
    if (overrides.is_null()) return;
    if (!overrides.is_object()) throw DataError("hyperparameters must be a JSON object");
    nlohmann::json merged = hyperparameters_to_json(spec);
    for (const auto& [key, value] : overrides.items()) {
        if (!merged.contains(key))
            throw DataError("unknown hyperparameter '" + key + "' for model " + std::string(to_string(spec.kind)));
        if (!value.is_number() && !value.is_boolean())
            throw DataError("hyperparameter '" + key + "' must be a number or boolean");
        merged[key] = value;
    }
    try {
        switch (spec.kind) {
            case ModelKind::logreg_l1:
                spec.logreg.C = merged["C"].get<double>();
                spec.logreg.max_iter = merged["max_iter"].get<int>();
                spec.logreg.tol = merged["tol"].get<double>();
                if (!(spec.logreg.C > 0)) throw DataError("hyperparameter C must be > 0");
                break;
            case ModelKind::random_forest:
                spec.forest.n_trees = merged["n_trees"].get<std::size_t>();
                spec.forest.max_features = merged["max_features"].get<std::size_t>();
                spec.forest.min_samples_split = merged["min_samples_split"].get<std::size_t>();
                spec.forest.max_depth = merged["max_depth"].get<std::size_t>();
                spec.forest.bootstrap = merged["bootstrap"].get<bool>();
                if (spec.forest.n_trees == 0) throw DataError("hyperparameter n_trees must be >= 1");
                break;
            case ModelKind::gradient_boosting:
                spec.boosting.rounds = merged["rounds"].get<std::size_t>();
                spec.boosting.max_depth = merged["max_depth"].get<std::size_t>();
                spec.boosting.learning_rate = merged["learning_rate"].get<double>();
                spec.boosting.lambda = merged["lambda"].get<double>();
                spec.boosting.min_child_weight = merged["min_child_weight"].get<double>();
                spec.boosting.gamma = merged["gamma"].get<double>();
                break;
            case ModelKind::mlp:
                spec.mlp.hidden = merged["hidden"].get<std::size_t>();
                spec.mlp.learning_rate = merged["learning_rate"].get<double>();
                spec.mlp.beta1 = merged["beta1"].get<double>();
                spec.mlp.beta2 = merged["beta2"].get<double>();
                spec.mlp.epsilon = merged["epsilon"].get<double>();
                spec.mlp.batch_size = merged["batch_size"].get<std::size_t>();
                spec.mlp.epochs = merged["epochs"].get<std::size_t>();
                spec.mlp.alpha = merged["alpha"].get<double>();
                if (spec.mlp.hidden == 0) throw DataError("hyperparameter hidden must be >= 1");
                break;
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid hyperparameter value: ") + e.what());
    }
}

struct TrainedModel {
    ModelKind kind = ModelKind::gradient_boosting;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    Standardizer standardizer;  // identity for tree models
    std::variant<LogRegModel, ForestModel, BoostModel, MlpModel> params;

    std::size_t feature_count() const { return standardizer.mean.size(); }
};

inline bool uses_standardizer(ModelKind kind) { return kind == ModelKind::logreg_l1 || kind == ModelKind::mlp; }

/// Fits the model family selected by `spec`. Identical (spec, data) gives identical models.
inline TrainedModel fit(const ModelSpec& spec, const LabeledMatrix& data) {
    validate(data);
    TrainedModel model;
    model.kind = spec.kind;
    model.class_names = data.class_names;
    model.feature_names = data.feature_names;
    const std::size_t C = data.class_count();
    if (uses_standardizer(spec.kind)) {
        model.standardizer = Standardizer::fit(data.X);
    } else {
        model.standardizer = Standardizer::identity(data.X.cols);
    }
    switch (spec.kind) {
        case ModelKind::logreg_l1:
            model.params = fit_logreg(model.standardizer.transform(data.X), data.y, C, spec.logreg);
            break;
        case ModelKind::random_forest:
            model.params = fit_forest(data.X, data.y, C, spec.forest, spec.seed);
            break;
        case ModelKind::gradient_boosting:
            model.params = fit_boosting(data.X, data.y, C, spec.boosting);
            break;
        case ModelKind::mlp:
            model.params = fit_mlp(model.standardizer.transform(data.X), data.y, C, spec.mlp, spec.seed);
            break;
    }
    return model;
}

/// n x C class probabilities.
inline Matrix predict_proba(const TrainedModel& model, const Matrix& X) {
    if (X.cols != model.feature_count())
        throw EvaluationError("predict: model expects " + std::to_string(model.feature_count()) + " features, got " +
                              std::to_string(X.cols));
    require_finite(X, "predict");
    const std::size_t C = model.class_names.size();
    Matrix out(X.rows, C);
    std::vector<double> row(X.cols);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const auto x = X.row(i);
        for (std::size_t j = 0; j < X.cols; ++j) row[j] = (x[j] - model.standardizer.mean[j]) / model.standardizer.scale[j];
        std::visit([&](const auto& m) { m.predict_proba_row(row, out.row(i)); }, model.params);
    }
    return out;
}

inline std::vector<int> predict(const TrainedModel& model, const Matrix& X) {
    const Matrix proba = predict_proba(model, X);
    std::vector<int> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) out[i] = static_cast<int>(argmax(proba.row(i)));
    return out;
}

/// Normalized importance per feature for tree-based models.
inline std::vector<double> feature_importance(const TrainedModel& model) {
    if (const auto* forest = std::get_if<ForestModel>(&model.params)) return forest->feature_importance();
    if (const auto* boost = std::get_if<BoostModel>(&model.params)) return boost->feature_importance();
    throw EvaluationError("feature importance is only defined for random_forest and gradient_boosting");
}

inline std::map<std::string, double> named_feature_importance(const TrainedModel& model) {
    const auto scores = feature_importance(model);
    std::map<std::string, double> out;
    for (std::size_t f = 0; f < scores.size(); ++f) {
        const std::string name = f < model.feature_names.size() ? model.feature_names[f] : "f" + std::to_string(f);
        out[name] = scores[f];
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON persistence

namespace model_json {

inline nlohmann::json tree_node(const Tree& tree, std::size_t i) {
    const TreeNode& n = tree.nodes[i];
    if (n.is_leaf()) return {{"leaf", n.value}};
    return {{"feature", n.feature},
            {"threshold", n.threshold},
            {"gain", n.gain},
            {"left", tree_node(tree, static_cast<std::size_t>(n.left))},
            {"right", tree_node(tree, static_cast<std::size_t>(n.right))}};
}

inline void read_node(const nlohmann::json& j, Tree& tree, std::size_t i) {
    if (j.contains("leaf")) {
        tree.nodes[i].value = j.at("leaf").get<std::vector<double>>();
        return;
    }
    tree.nodes[i].feature = j.at("feature").get<int>();
    tree.nodes[i].threshold = j.at("threshold").get<double>();
    tree.nodes[i].gain = j.at("gain").get<double>();
    const auto left = tree.nodes.size();
    tree.nodes[i].left = static_cast<int>(left);
    tree.nodes[i].right = static_cast<int>(left + 1);
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    read_node(j.at("left"), tree, left);
    read_node(j.at("right"), tree, left + 1);
}

inline Tree read_tree(const nlohmann::json& j) {
    Tree tree;
    tree.nodes.emplace_back();
    read_node(j, tree, 0);
    return tree;
}

}  // namespace model_json

inline nlohmann::json model_to_json(const TrainedModel& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = std::string(to_string(model.kind));
    j["class_names"] = model.class_names;
    j["feature_names"] = model.feature_names;
    j["standardizer"] = {{"mean", model.standardizer.mean}, {"scale", model.standardizer.scale}};
    nlohmann::json p;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogRegModel>) {
                p = {{"n_classes", m.n_classes}, {"n_features", m.n_features}, {"weights", m.weights}, {"intercept", m.intercept}};
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                nlohmann::json trees = nlohmann::json::array();
                for (const auto& t : m.trees) trees.push_back(model_json::tree_node(t, 0));
                p = {{"n_classes", m.n_classes}, {"n_features", m.n_features}, {"trees", trees}};
            } else if constexpr (std::is_same_v<T, BoostModel>) {
                nlohmann::json rounds = nlohmann::json::array();
                for (const auto& round : m.rounds) {
                    nlohmann::json r = nlohmann::json::array();
                    for (const auto& t : round) r.push_back(model_json::tree_node(t, 0));
                    rounds.push_back(r);
                }
                p = {{"n_classes", m.n_classes}, {"n_features", m.n_features}, {"rounds", rounds}};
            } else {
                p = {{"n_inputs", m.n_inputs}, {"n_hidden", m.n_hidden}, {"n_classes", m.n_classes},
                     {"w1", m.w1},             {"b1", m.b1},             {"w2", m.w2},
                     {"b2", m.b2}};
            }
        },
        model.params);
    j["params"] = p;
    return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != 1) throw DataError("model: unsupported format_version");
        TrainedModel model;
        model.kind = parse_model_kind(j.at("kind").get<std::string>());
        model.class_names = j.at("class_names").get<std::vector<std::string>>();
        model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        model.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
        model.standardizer.scale = j.at("standardizer").at("scale").get<std::vector<double>>();
        const auto& p = j.at("params");
        switch (model.kind) {
            case ModelKind::logreg_l1: {
                LogRegModel m;
                m.n_classes = p.at("n_classes").get<std::size_t>();
                m.n_features = p.at("n_features").get<std::size_t>();
                m.weights = p.at("weights").get<std::vector<double>>();
                m.intercept = p.at("intercept").get<std::vector<double>>();
                model.params = std::move(m);
                break;
            }
            case ModelKind::random_forest: {
                ForestModel m;
                m.n_classes = p.at("n_classes").get<std::size_t>();
                m.n_features = p.at("n_features").get<std::size_t>();
                for (const auto& t : p.at("trees")) m.trees.push_back(model_json::read_tree(t));
                model.params = std::move(m);
                break;
            }
            case ModelKind::gradient_boosting: {
                BoostModel m;
                m.n_classes = p.at("n_classes").get<std::size_t>();
                m.n_features = p.at("n_features").get<std::size_t>();
                for (const auto& r : p.at("rounds")) {
                    std::vector<Tree> round;
                    for (const auto& t : r) round.push_back(model_json::read_tree(t));
                    m.rounds.push_back(std::move(round));
                }
                model.params = std::move(m);
                break;
            }
            case ModelKind::mlp: {
                MlpModel m;
                m.n_inputs = p.at("n_inputs").get<std::size_t>();
                m.n_hidden = p.at("n_hidden").get<std::size_t>();
                m.n_classes = p.at("n_classes").get<std::size_t>();
                m.w1 = p.at("w1").get<std::vector<double>>();
                m.b1 = p.at("b1").get<std::vector<double>>();
                m.w2 = p.at("w2").get<std::vector<double>>();
                m.b2 = p.at("b2").get<std::vector<double>>();
                model.params = std::move(m);
                break;
            }
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model: malformed document: ") + e.what());
    }
}

}  // namespace dancestyle
