#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include <dancestyle/classifiers/model.hpp>

#include "support.hpp"

using namespace dancestyle;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

// Gaussian blobs with class means 10 sigma apart along distinct axes.
LabeledMatrix blobs(std::size_t per_class, std::size_t classes, std::size_t features, std::uint64_t seed) {
    dancestyle::Rng rng(seed);
    LabeledMatrix d;
    d.X = Matrix(0, features);
    for (std::size_t c = 0; c < classes; ++c) {
        d.class_names.push_back("class" + std::to_string(c));
        for (std::size_t i = 0; i < per_class; ++i) {
            std::vector<double> row(features);
            for (std::size_t f = 0; f < features; ++f) row[f] = rng.normal() + (f == c % features ? 10.0 : 0.0);
            d.X.append_row(row);
            d.y.push_back(static_cast<int>(c));
        }
    }
    for (std::size_t f = 0; f < features; ++f) d.feature_names.push_back("x" + std::to_string(f));
    return d;
}

ModelSpec quick_spec(ModelKind kind) {
    ModelSpec spec;
    spec.kind = kind;
    spec.seed = 7;
    return spec;
}

double training_accuracy(const TrainedModel& m, const LabeledMatrix& d) {
    const auto pred = predict(m, d.X);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == d.y[i];
    return static_cast<double>(ok) / static_cast<double>(pred.size());
}

const std::vector<ModelKind> kAllKinds = {ModelKind::logreg_l1, ModelKind::random_forest, ModelKind::gradient_boosting,
                                          ModelKind::mlp};

struct OracleSplit {
    bool valid = false;
    std::size_t feature = 0;
    double threshold = 0;
    double impurity = 0;
};

// Tries every feature and every midpoint threshold; impurity recomputed from scratch.
OracleSplit exhaustive_split(const Matrix& X, const std::vector<int>& y, std::size_t C) {
    OracleSplit best;
    const auto n = static_cast<double>(X.rows);
    for (std::size_t f = 0; f < X.cols; ++f) {
        std::vector<double> values;
        for (std::size_t i = 0; i < X.rows; ++i) values.push_back(X(i, f));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t k = 0; k + 1 < values.size(); ++k) {
            const double thr = values[k] + (values[k + 1] - values[k]) / 2.0;
            std::vector<double> left(C, 0.0), right(C, 0.0);
            for (std::size_t i = 0; i < X.rows; ++i) (X(i, f) < thr ? left : right)[static_cast<std::size_t>(y[i])] += 1;
            auto gini = [](const std::vector<double>& counts) {
                const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
                double g = 1.0;
                for (double c : counts) g -= (c / total) * (c / total);
                return std::pair{g, total};
            };
            const auto [gl, nl] = gini(left);
            const auto [gr, nr] = gini(right);
            const double imp = (nl * gl + nr * gr) / n;
            if (!best.valid || imp < best.impurity - 1e-12) best = {true, f, thr, imp};
        }
    }
    return best;
}

}  // namespace

TEST_CASE("every model separates well-spaced blobs", "[classifiers]") {
    const auto d = blobs(40, 3, 4, 1);
    for (ModelKind kind : kAllKinds) {
        INFO(to_string(kind));
        const auto m = fit(quick_spec(kind), d);
        CHECK(training_accuracy(m, d) >= 0.99);
        const auto held_out = blobs(20, 3, 4, 2);
        CHECK(training_accuracy(m, held_out) >= 0.9);
    }
}

TEST_CASE("probability rows sum to one", "[classifiers]") {
    const auto d = blobs(15, 4, 3, 3);
    dancestyle::Rng rng(4);
    Matrix probe(0, 3);
    for (int i = 0; i < 50; ++i) probe.append_row(std::vector<double>{rng.normal(0, 8), rng.normal(0, 8), rng.normal(0, 8)});
    for (ModelKind kind : kAllKinds) {
        INFO(to_string(kind));
        const auto p = predict_proba(fit(quick_spec(kind), d), probe);
        for (std::size_t i = 0; i < p.rows; ++i) {
            double sum = 0.0;
            for (double v : p.row(i)) {
                CHECK(v >= 0.0);
                sum += v;
            }
            REQUIRE_THAT(sum, WithinAbs(1.0, 1e-9));
        }
    }
}

TEST_CASE("huge l1 penalty zeroes every weight", "[classifiers][logreg]") {
    auto d = blobs(10, 3, 3, 5);
    d.X.append_row(std::vector<double>{0.0, 0.0, 0.0});
    d.y.push_back(0);  // priors 11/31, 10/31, 10/31
    ModelSpec spec = quick_spec(ModelKind::logreg_l1);
    spec.logreg.C = 1e-12;
    spec.logreg.max_iter = 5000;
    spec.logreg.tol = 1e-14;
    const auto m = fit(spec, d);
    const auto& lr = std::get<LogRegModel>(m.params);
    for (double w : lr.weights) CHECK(w == 0.0);
    std::vector<double> z = lr.intercept;
    softmax(z);
    const auto p = predict_proba(m, d.X);
    for (std::size_t i = 0; i < p.rows; ++i)
        for (std::size_t c = 0; c < 3; ++c) CHECK_THAT(p(i, c), WithinAbs(z[c], 1e-15));
    CHECK_THAT(z[0], WithinAbs(11.0 / 31.0, 1e-4));
    CHECK_THAT(z[1], WithinAbs(10.0 / 31.0, 1e-4));
}

TEST_CASE("logistic objective never increases", "[classifiers][logreg]") {
    dancestyle::Rng rng(6);
    for (int trial = 0; trial < 5; ++trial) {
        // overlapping classes so the optimum is interior
        Matrix X(0, 6);
        std::vector<int> y;
        for (int i = 0; i < 120; ++i) {
            const int c = static_cast<int>(rng.below(3));
            std::vector<double> row(6);
            for (auto& v : row) v = rng.normal();
            row[0] += 0.8 * c;
            row[1] -= 0.5 * c;
            X.append_row(row);
            y.push_back(c);
        }
        LogRegParams params;
        params.C = trial == 0 ? 0.01 : 1.0;
        LogRegTrace trace;
        fit_logreg(X, y, 3, params, &trace);
        REQUIRE(trace.objective.size() > 2);
        for (std::size_t i = 1; i < trace.objective.size(); ++i) REQUIRE(trace.objective[i] <= trace.objective[i - 1]);
        const LogRegModel zero{3, 6, std::vector<double>(18, 0.0), std::vector<double>(3, 0.0)};
        CHECK(trace.objective.front() == logreg_objective(X, y, zero, 1.0 / (params.C * 120.0)));
    }
}

TEST_CASE("two-class logistic model is a sigmoid", "[classifiers][logreg]") {
    const std::vector<double> w = {0.7, -1.3, 0.25};
    LogRegModel m{2, 3, {w[0], w[1], w[2], 0.0, 0.0, 0.0}, {0.0, 0.0}};
    dancestyle::Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> x = {rng.normal(0, 3), rng.normal(0, 3), rng.normal(0, 3)};
        std::vector<double> out(2);
        m.predict_proba_row(x, out);
        const double z = w[0] * x[0] + w[1] * x[1] + w[2] * x[2];
        CHECK_THAT(out[0], WithinAbs(1.0 / (1.0 + std::exp(-z)), 1e-12));
    }
}

TEST_CASE("boosting with zero rounds is uniform", "[classifiers][boosting]") {
    const auto d = blobs(5, 4, 2, 8);
    ModelSpec spec = quick_spec(ModelKind::gradient_boosting);
    spec.boosting.rounds = 0;
    const auto p = predict_proba(fit(spec, d), d.X);
    for (double v : p.data) CHECK(v == 0.25);
}

TEST_CASE("mlp with zero weights is uniform", "[classifiers][mlp]") {
    const auto m = MlpModel::zeros(4, 6, 5);
    std::vector<double> out(5);
    m.predict_proba_row(std::vector<double>{1, -2, 3, 0.5}, out);
    for (double v : out) CHECK(v == 0.2);
}

TEST_CASE("mlp gradient matches central differences", "[classifiers][mlp]") {
    dancestyle::Rng rng(9);
    Matrix X(0, 4);
    std::vector<int> y;
    for (int i = 0; i < 10; ++i) {
        X.append_row(test_support::random_signal(4, rng));
        y.push_back(static_cast<int>(rng.below(3)));
    }
    auto m = MlpModel::glorot(4, 5, 3, rng);
    std::vector<std::size_t> rows(10);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const double alpha = 0.1;
    MlpGradient grad;
    mlp_loss_and_gradient(m, X, y, rows, alpha, &grad);

    const double h = 1e-5;
    double worst = 0.0;
    auto check = [&](std::vector<double>& params, const std::vector<double>& analytic) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double saved = params[i];
            params[i] = saved + h;
            const double up = mlp_loss_and_gradient(m, X, y, rows, alpha, nullptr);
            params[i] = saved - h;
            const double down = mlp_loss_and_gradient(m, X, y, rows, alpha, nullptr);
            params[i] = saved;
            const double numeric = (up - down) / (2 * h);
            const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
            worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
        }
    };
    check(m.w1, grad.w1);
    check(m.b1, grad.b1);
    check(m.w2, grad.w2);
    check(m.b2, grad.b2);
    CHECK(worst <= 1e-5);
}

TEST_CASE("gini split matches exhaustive search", "[classifiers][tree]") {
    dancestyle::Rng rng(10);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(49);
        const std::size_t F = 1 + rng.below(5);
        const std::size_t C = 2 + rng.below(3);
        Matrix X(0, F);
        std::vector<int> y;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> row(F);
            // coarse values force ties
            for (auto& v : row) v = rng.below(2) ? static_cast<double>(rng.below(6)) : rng.normal();
            X.append_row(row);
            y.push_back(static_cast<int>(rng.below(C)));
        }
        std::vector<std::size_t> idx(n), feats(F);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::iota(feats.begin(), feats.end(), std::size_t{0});
        const auto got = find_best_gini_split(X, y, idx, feats, C);
        const auto want = exhaustive_split(X, y, C);
        REQUIRE(got.valid == want.valid);
        if (!want.valid) continue;
        REQUIRE_THAT(got.child_impurity, WithinAbs(want.impurity, 1e-12));
        REQUIRE(static_cast<std::size_t>(got.feature) == want.feature);
        REQUIRE(got.threshold == want.threshold);
    }
}

TEST_CASE("single unbootstrapped tree reproduces its training labels", "[classifiers][forest]") {
    const auto d = blobs(12, 3, 3, 11);
    ModelSpec spec = quick_spec(ModelKind::random_forest);
    spec.forest.n_trees = 1;
    spec.forest.bootstrap = false;
    const auto p = predict_proba(fit(spec, d), d.X);
    for (std::size_t i = 0; i < p.rows; ++i) CHECK(p(i, static_cast<std::size_t>(d.y[i])) == 1.0);
}

TEST_CASE("importance concentrates on the only informative feature", "[classifiers][importance]") {
    dancestyle::Rng rng(12);
    LabeledMatrix d;
    d.class_names = {"a", "b"};
    d.X = Matrix(0, 6);
    for (int i = 0; i < 200; ++i) {
        const int c = static_cast<int>(rng.below(2));
        std::vector<double> row(6);
        for (auto& v : row) v = rng.normal();
        row[0] = (c ? 3.0 : -3.0) + 0.5 * rng.normal();
        d.X.append_row(row);
        d.y.push_back(c);
    }
    // the forest considers every feature at each split; with sqrt(F) sampling
    // noise features win some nodes by construction
    for (ModelKind kind : {ModelKind::random_forest, ModelKind::gradient_boosting}) {
        INFO(to_string(kind));
        ModelSpec spec = quick_spec(kind);
        spec.forest.max_features = 6;
        const auto imp = feature_importance(fit(spec, d));
        CHECK(imp[0] >= 0.9);
        CHECK_THAT(std::accumulate(imp.begin(), imp.end(), 0.0), WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("stumps splitting on one feature give it all the importance", "[classifiers][importance]") {
    const auto d = blobs(20, 2, 4, 13);  // class 1 is shifted along x1 only
    ModelSpec gb = quick_spec(ModelKind::gradient_boosting);
    gb.boosting.max_depth = 1;
    gb.boosting.rounds = 3;
    const auto imp = feature_importance(fit(gb, d));
    CHECK_THAT(imp[0] + imp[1], WithinAbs(1.0, 1e-12));

    LabeledMatrix one = d;
    for (std::size_t i = 0; i < one.X.rows; ++i) {
        one.X.row(i)[0] = 0.0;
        one.X.row(i)[2] = 0.0;
        one.X.row(i)[3] = 0.0;
    }
    ModelSpec rf = quick_spec(ModelKind::random_forest);
    rf.forest.max_depth = 1;
    rf.forest.n_trees = 5;
    CHECK(feature_importance(fit(rf, one))[1] == 1.0);
    CHECK(feature_importance(fit(gb, one))[1] == 1.0);
}

TEST_CASE("importances are normalized for fitted tree models", "[classifiers][importance]") {
    const auto d = blobs(15, 3, 5, 14);
    for (ModelKind kind : {ModelKind::random_forest, ModelKind::gradient_boosting}) {
        const auto imp = feature_importance(fit(quick_spec(kind), d));
        CHECK_THAT(std::accumulate(imp.begin(), imp.end(), 0.0), WithinAbs(1.0, 1e-9));
    }
    CHECK_THROWS_AS(feature_importance(fit(quick_spec(ModelKind::logreg_l1), d)), EvaluationError);
    const auto named = named_feature_importance(fit(quick_spec(ModelKind::gradient_boosting), d));
    CHECK(named.size() == 5);
    CHECK(named.count("x0") == 1);
}

TEST_CASE("fitting is deterministic and models round-trip through JSON", "[classifiers]") {
    const auto d = blobs(10, 3, 3, 15);
    dancestyle::Rng rng(16);
    Matrix probe(0, 3);
    for (int i = 0; i < 30; ++i) probe.append_row(std::vector<double>{rng.normal(0, 6), rng.normal(0, 6), rng.normal(0, 6)});
    for (ModelKind kind : kAllKinds) {
        INFO(to_string(kind));
        ModelSpec spec = quick_spec(kind);
        spec.mlp.epochs = 20;
        const auto a = fit(spec, d);
        const auto b = fit(spec, d);
        CHECK(model_to_json(a).dump() == model_to_json(b).dump());
        const auto back = model_from_json(nlohmann::json::parse(model_to_json(a).dump()));
        CHECK(back.class_names == a.class_names);
        CHECK(predict_proba(back, probe).data == predict_proba(a, probe).data);
    }
    ModelSpec rf = quick_spec(ModelKind::random_forest);
    const auto base = model_to_json(fit(rf, d)).dump();
    rf.seed = 8;
    CHECK(model_to_json(fit(rf, d)).dump() != base);
}

TEST_CASE("input checks", "[classifiers]") {
    auto d = blobs(5, 2, 2, 17);
    const auto m = fit(quick_spec(ModelKind::gradient_boosting), d);
    CHECK_THROWS_AS(predict_proba(m, Matrix(1, 3)), EvaluationError);

    LabeledMatrix single = d;
    single.class_names = {"only"};
    for (auto& v : single.y) v = 0;
    CHECK_THROWS_AS(fit(quick_spec(ModelKind::logreg_l1), single), EvaluationError);

    LabeledMatrix bad = d;
    bad.X.data[3] = std::nan("");
    CHECK_THROWS_AS(fit(quick_spec(ModelKind::random_forest), bad), EvaluationError);
}

TEST_CASE("model kinds and hyperparameters", "[classifiers]") {
    CHECK(parse_model_kind("gb") == ModelKind::gradient_boosting);
    CHECK(parse_model_kind("logreg_l1") == ModelKind::logreg_l1);
    CHECK(parse_model_kind("nn") == ModelKind::mlp);
    CHECK_THROWS_AS(parse_model_kind("svm"), DataError);

    ModelSpec spec;
    CHECK(spec.boosting.max_depth == 6);
    CHECK(spec.boosting.learning_rate == 0.3);
    CHECK(spec.boosting.lambda == 1.0);
    CHECK(spec.forest.n_trees == 100);
    CHECK(spec.mlp.hidden == 500);
    CHECK(spec.mlp.epochs == 300);
    apply_hyperparameters(spec, {{"rounds", 12}, {"learning_rate", 0.1}});
    CHECK(spec.boosting.rounds == 12);
    CHECK(spec.boosting.learning_rate == 0.1);
    CHECK_THROWS_WITH(apply_hyperparameters(spec, {{"n_trees", 3}}), ContainsSubstring("n_trees"));
    CHECK_THROWS_AS(apply_hyperparameters(spec, {{"rounds", "many"}}), DataError);
    CHECK(hyperparameters_to_json(spec)["rounds"] == 12);
}
