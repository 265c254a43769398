#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "data.hpp"
#include "tree.hpp"

namespace dancestyle {

struct BoostParams {
    std::size_t rounds = 100;
    std::size_t max_depth = 6;
    double learning_rate = 0.3;
    double lambda = 1.0;            // L2 penalty on leaf weights
    double min_child_weight = 1.0;  // minimum hessian sum per child
    double gamma = 0.0;             // minimum loss reduction per split
};

/// Softmax gradient boosting: one regression tree per class per round.
struct BoostModel {
    std::size_t n_classes = 0;
    std::size_t n_features = 0;
    std::vector<std::vector<Tree>> rounds;  // rounds[r][class]

    void predict_proba_row(std::span<const double> x, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& round : rounds)
            for (std::size_t c = 0; c < n_classes; ++c) out[c] += round[c].leaf_value(x)[0];
        softmax(out);
    }

    /// Total split gain per feature, normalized to sum 1 (all zero if the model never split).
    std::vector<double> feature_importance() const {
        std::vector<double> total(n_features, 0.0);
        for (const auto& round : rounds)
            for (const auto& tree : round) tree.accumulate_gain(total);
        double sum = 0.0;
        for (double v : total) sum += v;
        if (sum > 0.0)
            for (double& v : total) v /= sum;
        return total;
    }
};

namespace boosting_detail {

inline constexpr double kMinGain = 1e-6;

/// Column-major copy of X plus each column's row order by ascending value.
struct SortedColumns {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;             // cols x rows
    std::vector<std::uint32_t> order;       // cols x rows

    explicit SortedColumns(const Matrix& X) : rows(X.rows), cols(X.cols), values(X.rows * X.cols), order(X.rows * X.cols) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t f = 0; f < cols; ++f) values[f * rows + i] = X(i, f);
        for (std::size_t f = 0; f < cols; ++f) {
            auto* ord = order.data() + f * rows;
            std::iota(ord, ord + rows, std::uint32_t{0});
            const double* col = values.data() + f * rows;
            std::stable_sort(ord, ord + rows, [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
        }
    }
};

}  // namespace boosting_detail

/// Level-wise exact greedy regression tree on gradient/hessian pairs.
/// Split gain: 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)] - gamma.
/// Leaf weight: -G/(H+l), scaled by the learning rate. `leaf_of` receives each
/// row's final leaf index.
inline Tree fit_regression_tree(const boosting_detail::SortedColumns& data, const std::vector<double>& g,
                                const std::vector<double>& h, const BoostParams& params, std::vector<int>& leaf_of) {
    const std::size_t n = data.rows;
    Tree tree;
    tree.nodes.emplace_back();
    leaf_of.assign(n, 0);

    struct NodeStats {
        double G = 0.0, H = 0.0;
        double best_gain = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        // scan state
        double GL = 0.0, HL = 0.0, last = 0.0;
        bool has_last = false;
    };

    std::vector<int> active = {0};
    std::vector<int> slot_of_node(1, 0);
    for (std::size_t depth = 0; depth < params.max_depth && !active.empty(); ++depth) {
        std::vector<NodeStats> stats(active.size());
        for (std::size_t i = 0; i < n; ++i) {
            const int slot = slot_of_node[static_cast<std::size_t>(leaf_of[i])];
            if (slot < 0) continue;
            stats[static_cast<std::size_t>(slot)].G += g[i];
            stats[static_cast<std::size_t>(slot)].H += h[i];
        }
        for (std::size_t f = 0; f < data.cols; ++f) {
            for (auto& s : stats) {
                s.GL = s.HL = 0.0;
                s.has_last = false;
            }
            const std::uint32_t* ord = data.order.data() + f * n;
            const double* col = data.values.data() + f * n;
            for (std::size_t k = 0; k < n; ++k) {
                const std::uint32_t i = ord[k];
                const int slot = slot_of_node[static_cast<std::size_t>(leaf_of[i])];
                if (slot < 0) continue;
                NodeStats& s = stats[static_cast<std::size_t>(slot)];
                const double x = col[i];
                if (s.has_last && x > s.last) {
                    const double GR = s.G - s.GL;
                    const double HR = s.H - s.HL;
                    if (s.HL >= params.min_child_weight && HR >= params.min_child_weight) {
                        const double gain = 0.5 * (s.GL * s.GL / (s.HL + params.lambda) + GR * GR / (HR + params.lambda) -
                                                   s.G * s.G / (s.H + params.lambda)) -
                                            params.gamma;
                        if (gain > s.best_gain) {
                            s.best_gain = gain;
                            s.best_feature = static_cast<int>(f);
                            double thr = s.last + (x - s.last) / 2.0;
                            if (!(thr > s.last)) thr = x;
                            s.best_threshold = thr;
                        }
                    }
                }
                s.GL += g[i];
                s.HL += h[i];
                s.last = x;
                s.has_last = true;
            }
        }

        std::vector<int> next_active;
        for (std::size_t slot = 0; slot < active.size(); ++slot) {
            const NodeStats& s = stats[slot];
            const auto node_id = static_cast<std::size_t>(active[slot]);
            if (s.best_feature < 0 || s.best_gain <= boosting_detail::kMinGain) {
                tree.nodes[node_id].value = {-s.G / (s.H + params.lambda) * params.learning_rate};
                continue;
            }
            const auto left = static_cast<int>(tree.nodes.size());
            tree.nodes[node_id].feature = s.best_feature;
            tree.nodes[node_id].threshold = s.best_threshold;
            tree.nodes[node_id].gain = s.best_gain;
            tree.nodes[node_id].left = left;
            tree.nodes[node_id].right = left + 1;
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            next_active.push_back(left);
            next_active.push_back(left + 1);
        }
        // route rows of split nodes to their children
        for (std::size_t i = 0; i < n; ++i) {
            const TreeNode& node = tree.nodes[static_cast<std::size_t>(leaf_of[i])];
            if (node.is_leaf()) continue;
            const double x = data.values[static_cast<std::size_t>(node.feature) * n + i];
            leaf_of[i] = x < node.threshold ? node.left : node.right;
        }
        slot_of_node.assign(tree.nodes.size(), -1);
        for (std::size_t slot = 0; slot < next_active.size(); ++slot)
            slot_of_node[static_cast<std::size_t>(next_active[slot])] = static_cast<int>(slot);
        active = std::move(next_active);
    }
    // nodes still open at max depth become leaves
    if (!active.empty()) {
        std::vector<double> G(tree.nodes.size(), 0.0), H(tree.nodes.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            G[static_cast<std::size_t>(leaf_of[i])] += g[i];
            H[static_cast<std::size_t>(leaf_of[i])] += h[i];
        }
        for (int id : active) {
            const auto u = static_cast<std::size_t>(id);
            tree.nodes[u].value = {-G[u] / (H[u] + params.lambda) * params.learning_rate};
        }
    }
    return tree;
}

/// Newton boosting for the multi-class softmax objective, starting from zero raw scores.
inline BoostModel fit_boosting(const Matrix& X, const std::vector<int>& y, std::size_t n_classes, const BoostParams& params) {
    BoostModel model;
    model.n_classes = n_classes;
    model.n_features = X.cols;
    const std::size_t n = X.rows;
    if (params.rounds == 0) return model;

    const boosting_detail::SortedColumns data(X);
    std::vector<double> raw(n * n_classes, 0.0);
    std::vector<double> prob(n * n_classes);
    std::vector<double> g(n), h(n);
    std::vector<int> leaf_of;
    for (std::size_t r = 0; r < params.rounds; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(raw.begin() + static_cast<long>(i * n_classes), n_classes, prob.begin() + static_cast<long>(i * n_classes));
            softmax(std::span<double>(prob.data() + i * n_classes, n_classes));
        }
        std::vector<Tree> round;
        round.reserve(n_classes);
        for (std::size_t c = 0; c < n_classes; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                const double p = prob[i * n_classes + c];
                g[i] = p - (static_cast<std::size_t>(y[i]) == c ? 1.0 : 0.0);
                h[i] = std::max(p * (1.0 - p), 1e-16);
            }
            round.push_back(fit_regression_tree(data, g, h, params, leaf_of));
            const Tree& tree = round.back();
            for (std::size_t i = 0; i < n; ++i)
                raw[i * n_classes + c] += tree.nodes[static_cast<std::size_t>(leaf_of[i])].value[0];
        }
        model.rounds.push_back(std::move(round));
    }
    return model;
}

}  // namespace dancestyle
