#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "../rng.hpp"
#include "data.hpp"

namespace dancestyle {

struct MlpParams {
    std::size_t hidden = 500;
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 200;
    std::size_t epochs = 300;
    double alpha = 1e-4;  // L2 penalty: alpha/2 * ||W||^2 / batch size
};

/// One hidden ReLU layer, softmax output. Works on standardized inputs.
struct MlpModel {
    std::size_t n_inputs = 0;
    std::size_t n_hidden = 0;
    std::size_t n_classes = 0;
    std::vector<double> w1;  // hidden x inputs
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // classes x hidden
    std::vector<double> b2;  // classes

    static MlpModel zeros(std::size_t inputs, std::size_t hidden, std::size_t classes) {
        MlpModel m;
        m.n_inputs = inputs;
        m.n_hidden = hidden;
        m.n_classes = classes;
        m.w1.assign(hidden * inputs, 0.0);
        m.b1.assign(hidden, 0.0);
        m.w2.assign(classes * hidden, 0.0);
        m.b2.assign(classes, 0.0);
        return m;
    }

    /// Glorot-uniform initialization of weights and biases.
    static MlpModel glorot(std::size_t inputs, std::size_t hidden, std::size_t classes, Rng& rng) {
        MlpModel m = zeros(inputs, hidden, classes);
        const double bound1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
        const double bound2 = std::sqrt(6.0 / static_cast<double>(hidden + classes));
        for (double& w : m.w1) w = rng.uniform(-bound1, bound1);
        for (double& b : m.b1) b = rng.uniform(-bound1, bound1);
        for (double& w : m.w2) w = rng.uniform(-bound2, bound2);
        for (double& b : m.b2) b = rng.uniform(-bound2, bound2);
        return m;
    }

    void hidden_activations(std::span<const double> x, std::span<double> act) const {
        for (std::size_t k = 0; k < n_hidden; ++k) {
            const double* w = w1.data() + k * n_inputs;
            double z = b1[k];
            for (std::size_t j = 0; j < n_inputs; ++j) z += w[j] * x[j];
            act[k] = z > 0.0 ? z : 0.0;
        }
    }

    void output_from_hidden(std::span<const double> act, std::span<double> out) const {
        for (std::size_t c = 0; c < n_classes; ++c) {
            const double* w = w2.data() + c * n_hidden;
            double z = b2[c];
            for (std::size_t k = 0; k < n_hidden; ++k) z += w[k] * act[k];
            out[c] = z;
        }
        softmax(out);
    }

    void predict_proba_row(std::span<const double> x, std::span<double> out) const {
        std::vector<double> act(n_hidden);
        hidden_activations(x, act);
        output_from_hidden(act, out);
    }
};

/// Gradient buffers with the same layout as MlpModel's parameters.
struct MlpGradient {
    std::vector<double> w1, b1, w2, b2;
};

/// Mean cross-entropy over `rows` plus alpha/2 * ||W||^2 / |rows|, and its gradient.
inline double mlp_loss_and_gradient(const MlpModel& m, const Matrix& X, const std::vector<int>& y,
                                    std::span<const std::size_t> rows, double alpha, MlpGradient* grad) {
    const std::size_t H = m.n_hidden, C = m.n_classes, F = m.n_inputs;
    const auto n = static_cast<double>(rows.size());
    if (grad) {
        grad->w1.assign(m.w1.size(), 0.0);
        grad->b1.assign(m.b1.size(), 0.0);
        grad->w2.assign(m.w2.size(), 0.0);
        grad->b2.assign(m.b2.size(), 0.0);
    }
    std::vector<double> act(H), prob(C), delta_hidden(H);
    double loss = 0.0;
    for (std::size_t r : rows) {
        const auto x = X.row(r);
        m.hidden_activations(x, act);
        m.output_from_hidden(act, prob);
        const auto yi = static_cast<std::size_t>(y[r]);
        loss -= std::log(std::max(prob[yi], 1e-300));
        if (!grad) continue;
        std::fill(delta_hidden.begin(), delta_hidden.end(), 0.0);
        for (std::size_t c = 0; c < C; ++c) {
            const double d = (prob[c] - (c == yi ? 1.0 : 0.0)) / n;
            grad->b2[c] += d;
            double* gw = grad->w2.data() + c * H;
            const double* w = m.w2.data() + c * H;
            for (std::size_t k = 0; k < H; ++k) {
                gw[k] += d * act[k];
                delta_hidden[k] += d * w[k];
            }
        }
        for (std::size_t k = 0; k < H; ++k) {
            if (act[k] <= 0.0) continue;
            const double d = delta_hidden[k];
            grad->b1[k] += d;
            double* gw = grad->w1.data() + k * F;
            for (std::size_t j = 0; j < F; ++j) gw[j] += d * x[j];
        }
    }
    double sq = 0.0;
    for (double w : m.w1) sq += w * w;
    for (double w : m.w2) sq += w * w;
    loss = loss / n + 0.5 * alpha * sq / n;
    if (grad) {
        for (std::size_t i = 0; i < m.w1.size(); ++i) grad->w1[i] += alpha * m.w1[i] / n;
        for (std::size_t i = 0; i < m.w2.size(); ++i) grad->w2[i] += alpha * m.w2[i] / n;
    }
    return loss;
}

/// Mini-batch Adam for a fixed number of epochs; rows are reshuffled each epoch.
inline MlpModel fit_mlp(const Matrix& X, const std::vector<int>& y, std::size_t n_classes, const MlpParams& params,
                        std::uint64_t seed) {
    Rng rng(seed);
    MlpModel m = MlpModel::glorot(X.cols, params.hidden, n_classes, rng);

    struct Moments {
        std::vector<double> m, v;
    };
    auto make = [](std::size_t size) { return Moments{std::vector<double>(size, 0.0), std::vector<double>(size, 0.0)}; };
    Moments mw1 = make(m.w1.size()), mb1 = make(m.b1.size()), mw2 = make(m.w2.size()), mb2 = make(m.b2.size());

    std::vector<std::size_t> order(X.rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t batch = std::max<std::size_t>(1, std::min(params.batch_size, X.rows));
    MlpGradient grad;
    std::uint64_t step = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            mlp_loss_and_gradient(m, X, y, std::span<const std::size_t>(order.data() + start, end - start), params.alpha,
                                  &grad);
            ++step;
            const double correction = std::sqrt(1.0 - std::pow(params.beta2, static_cast<double>(step))) /
                                      (1.0 - std::pow(params.beta1, static_cast<double>(step)));
            const double lr = params.learning_rate * correction;
            auto update = [&](std::vector<double>& w, const std::vector<double>& gw, Moments& mom) {
                for (std::size_t i = 0; i < w.size(); ++i) {
                    mom.m[i] = params.beta1 * mom.m[i] + (1.0 - params.beta1) * gw[i];
                    mom.v[i] = params.beta2 * mom.v[i] + (1.0 - params.beta2) * gw[i] * gw[i];
                    w[i] -= lr * mom.m[i] / (std::sqrt(mom.v[i]) + params.epsilon);
                }
            };
            update(m.w1, grad.w1, mw1);
            update(m.b1, grad.b1, mb1);
            update(m.w2, grad.w2, mw2);
            update(m.b2, grad.b2, mb2);
        }
    }
    return m;
}

}  // namespace dancestyle
