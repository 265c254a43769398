#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "data.hpp"
#include "tree.hpp"

namespace dancestyle {

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_features = 0;  // 0 = floor(sqrt(n_features))
    std::size_t min_samples_split = 2;
    std::size_t max_depth = 0;  // 0 = unlimited
    bool bootstrap = true;
};

struct ForestModel {
    std::size_t n_classes = 0;
    std::size_t n_features = 0;
    std::vector<Tree> trees;

    void predict_proba_row(std::span<const double> x, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& tree : trees) {
            const auto& leaf = tree.leaf_value(x);
            for (std::size_t c = 0; c < n_classes; ++c) out[c] += leaf[c];
        }
        const auto n = static_cast<double>(trees.size());
        for (double& p : out) p /= n;
    }

    /// Mean of per-tree normalized impurity decreases, renormalized to sum 1.
    std::vector<double> feature_importance() const {
        std::vector<double> total(n_features, 0.0);
        std::vector<double> per_tree(n_features);
        for (const auto& tree : trees) {
            std::fill(per_tree.begin(), per_tree.end(), 0.0);
            tree.accumulate_gain(per_tree);
            double sum = 0.0;
            for (double v : per_tree) sum += v;
            if (sum <= 0.0) continue;
            for (std::size_t f = 0; f < n_features; ++f) total[f] += per_tree[f] / sum;
        }
        double sum = 0.0;
        for (double v : total) sum += v;
        if (sum > 0.0)
            for (double& v : total) v /= sum;
        return total;
    }
};

/// Random forest of Gini CART trees. Tree t is grown from an Rng seeded with seed ^ t,
/// so the result does not depend on the order trees are built in.
inline ForestModel fit_forest(const Matrix& X, const std::vector<int>& y, std::size_t n_classes, const ForestParams& params,
                              std::uint64_t seed) {
    ForestModel model;
    model.n_classes = n_classes;
    model.n_features = X.cols;
    CartParams cart;
    cart.max_features = params.max_features != 0
                            ? params.max_features
                            : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols))));
    cart.min_samples_split = params.min_samples_split;
    cart.max_depth = params.max_depth;
    model.trees.reserve(params.n_trees);
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        Rng rng(seed ^ static_cast<std::uint64_t>(t));
        std::vector<std::size_t> sample(X.rows);
        for (std::size_t i = 0; i < X.rows; ++i) sample[i] = params.bootstrap ? static_cast<std::size_t>(rng.below(X.rows)) : i;
        model.trees.push_back(grow_cart(X, y, std::move(sample), n_classes, cart, rng));
    }
    return model;
}

}  // namespace dancestyle
