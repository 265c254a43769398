#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "../matrix.hpp"
#include "../rng.hpp"

namespace dancestyle {

/// Binary tree node. Internal nodes route x[feature] < threshold to `left`.
/// Leaves carry `value`: class fractions (classification) or one weight (regression).
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double gain = 0.0;  // impurity decrease / loss reduction credited to `feature`
    std::vector<double> value;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    const std::vector<double>& leaf_value(std::span<const double> x) const {
        std::size_t i = 0;
        while (!nodes[i].is_leaf()) {
            const auto& n = nodes[i];
            i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
        }
        return nodes[i].value;
    }

    /// Sum of `gain` per feature.
    void accumulate_gain(std::vector<double>& per_feature) const {
        for (const auto& n : nodes)
            if (!n.is_leaf()) per_feature[static_cast<std::size_t>(n.feature)] += n.gain;
    }
};

// ---------------------------------------------------------------------------
// CART classification trees (Gini impurity)

inline double gini_from_counts(std::span<const double> counts, double total) {
    if (total <= 0.0) return 0.0;
    double sum_sq = 0.0;
    for (double c : counts) sum_sq += c * c;
    return 1.0 - sum_sq / (total * total);
}

inline constexpr double kGiniTieTolerance = 1e-12;

struct GiniSplit {
    bool valid = false;
    int feature = -1;
    double threshold = 0.0;
    double child_impurity = 0.0;  // (n_L * gini_L + n_R * gini_R) / n
};

/// Best threshold split over `features` for the samples in `indices`.
/// Candidate thresholds are midpoints between consecutive distinct values;
/// ties (within kGiniTieTolerance) keep the earliest feature in list order and
/// the smallest threshold.
inline GiniSplit find_best_gini_split(const Matrix& X, std::span<const int> y, std::span<const std::size_t> indices,
                                      std::span<const std::size_t> features, std::size_t n_classes) {
    GiniSplit best;
    const auto n = static_cast<double>(indices.size());
    std::vector<double> total(n_classes, 0.0);
    for (std::size_t i : indices) total[static_cast<std::size_t>(y[i])] += 1.0;

    std::vector<std::size_t> order(indices.begin(), indices.end());
    std::vector<double> left(n_classes), right(n_classes);
    for (std::size_t f : features) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = X(a, f), vb = X(b, f);
            return va < vb || (va == vb && a < b);
        });
        std::fill(left.begin(), left.end(), 0.0);
        right = total;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            const auto cls = static_cast<std::size_t>(y[order[k]]);
            left[cls] += 1.0;
            right[cls] -= 1.0;
            const double v = X(order[k], f);
            const double next = X(order[k + 1], f);
            if (!(v < next)) continue;
            const auto nl = static_cast<double>(k + 1);
            const double nr = n - nl;
            const double impurity = (nl * gini_from_counts(left, nl) + nr * gini_from_counts(right, nr)) / n;
            if (!best.valid || impurity < best.child_impurity - kGiniTieTolerance) {
                best.valid = true;
                best.feature = static_cast<int>(f);
                best.threshold = v + (next - v) / 2.0;
                if (!(best.threshold > v)) best.threshold = next;  // adjacent doubles
                best.child_impurity = impurity;
            }
        }
    }
    return best;
}

struct CartParams {
    std::size_t max_features = 0;  // 0 = all features
    std::size_t min_samples_split = 2;
    std::size_t max_depth = 0;  // 0 = unlimited
};

/// Grows a Gini tree on the multiset `sample` (bootstrap draws may repeat rows).
/// Splits until pure, fewer than min_samples_split samples, or no valid split.
inline Tree grow_cart(const Matrix& X, std::span<const int> y, std::vector<std::size_t> sample, std::size_t n_classes,
                      const CartParams& params, Rng& rng) {
    Tree tree;
    struct Pending {
        std::size_t node;
        std::vector<std::size_t> samples;
        std::size_t depth;
    };
    const std::size_t max_features = params.max_features == 0 ? X.cols : std::min(params.max_features, X.cols);
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(sample), 0});
    std::vector<std::size_t> feature_pool(X.cols);

    while (!stack.empty()) {
        Pending work = std::move(stack.back());
        stack.pop_back();
        const auto n = static_cast<double>(work.samples.size());
        std::vector<double> counts(n_classes, 0.0);
        for (std::size_t i : work.samples) counts[static_cast<std::size_t>(y[i])] += 1.0;
        const double impurity = gini_from_counts(counts, n);

        GiniSplit split;
        const bool can_split = impurity > 0.0 && work.samples.size() >= params.min_samples_split &&
                               (params.max_depth == 0 || work.depth < params.max_depth);
        if (can_split) {
            // Draw features without replacement until max_features non-constant ones were tried.
            std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
            std::size_t tried = 0;
            std::vector<std::size_t> chosen;
            for (std::size_t k = 0; k < feature_pool.size() && tried < max_features; ++k) {
                const std::size_t pick = k + static_cast<std::size_t>(rng.below(feature_pool.size() - k));
                std::swap(feature_pool[k], feature_pool[pick]);
                const std::size_t f = feature_pool[k];
                const auto [mn, mx] = std::minmax_element(work.samples.begin(), work.samples.end(),
                                                          [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
                if (X(*mn, f) == X(*mx, f)) continue;
                chosen.push_back(f);
                ++tried;
            }
            if (!chosen.empty()) {
                split = find_best_gini_split(X, y, work.samples, chosen, n_classes);
            }
        }
        TreeNode& node = tree.nodes[work.node];
        if (!split.valid) {
            node.value.resize(n_classes);
            for (std::size_t c = 0; c < n_classes; ++c) node.value[c] = counts[c] / n;
            continue;
        }
        std::vector<std::size_t> left, right;
        const auto f = static_cast<std::size_t>(split.feature);
        for (std::size_t i : work.samples) (X(i, f) < split.threshold ? left : right).push_back(i);
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.gain = n * (impurity - split.child_impurity);
        const auto left_id = static_cast<int>(tree.nodes.size());
        node.left = left_id;
        node.right = left_id + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        // right pushed first so the left subtree is grown first
        stack.push_back({static_cast<std::size_t>(left_id + 1), std::move(right), work.depth + 1});
        stack.push_back({static_cast<std::size_t>(left_id), std::move(left), work.depth + 1});
    }
    return tree;
}

}  // namespace dancestyle
