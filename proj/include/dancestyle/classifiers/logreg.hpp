#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "data.hpp"

namespace dancestyle {

struct LogRegParams {
    double C = 1.0;  // inverse regularization strength; lambda = 1 / (C * n)
    int max_iter = 500;
    double tol = 1e-7;
};

/// Multinomial logistic regression with an l1 penalty on the weights
/// (intercepts unpenalized). Operates on already standardized inputs.
struct LogRegModel {
    std::size_t n_classes = 0;
    std::size_t n_features = 0;
    std::vector<double> weights;    // n_classes x n_features, row-major
    std::vector<double> intercept;  // n_classes

    void predict_proba_row(std::span<const double> x, std::span<double> out) const {
        for (std::size_t c = 0; c < n_classes; ++c) {
            double z = intercept[c];
            const double* w = weights.data() + c * n_features;
            for (std::size_t j = 0; j < n_features; ++j) z += w[j] * x[j];
            out[c] = z;
        }
        softmax(out);
    }
};

struct LogRegTrace {
    std::vector<double> objective;  // penalized objective after each accepted step (index 0 = start)
};

namespace logreg_detail {

// Mean cross-entropy; if `grad_w`/`grad_b` are non-null they receive its gradient.
inline double smooth_loss(const Matrix& X, const std::vector<int>& y, const LogRegModel& m, std::vector<double>* grad_w,
                          std::vector<double>* grad_b) {
    const std::size_t C = m.n_classes;
    const std::size_t F = m.n_features;
    const auto n = static_cast<double>(X.rows);
    if (grad_w) grad_w->assign(C * F, 0.0);
    if (grad_b) grad_b->assign(C, 0.0);
    std::vector<double> z(C);
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        const auto x = X.row(i);
        for (std::size_t c = 0; c < C; ++c) {
            double s = m.intercept[c];
            const double* w = m.weights.data() + c * F;
            for (std::size_t j = 0; j < F; ++j) s += w[j] * x[j];
            z[c] = s;
        }
        double mx = z[0];
        for (double v : z) mx = v > mx ? v : mx;
        double sum = 0.0;
        for (double v : z) sum += std::exp(v - mx);
        const double log_sum = mx + std::log(sum);
        const auto yi = static_cast<std::size_t>(y[i]);
        loss += log_sum - z[yi];
        if (grad_w) {
            for (std::size_t c = 0; c < C; ++c) {
                const double r = (std::exp(z[c] - log_sum) - (c == yi ? 1.0 : 0.0)) / n;
                (*grad_b)[c] += r;
                double* g = grad_w->data() + c * F;
                for (std::size_t j = 0; j < F; ++j) g[j] += r * x[j];
            }
        }
    }
    return loss / n;
}

inline double l1(const std::vector<double>& w) {
    double s = 0.0;
    for (double v : w) s += std::abs(v);
    return s;
}

inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace logreg_detail

inline double logreg_objective(const Matrix& X, const std::vector<int>& y, const LogRegModel& m, double lambda) {
    return logreg_detail::smooth_loss(X, y, m, nullptr, nullptr) + lambda * logreg_detail::l1(m.weights);
}

/// Proximal gradient (ISTA) with backtracking line search. Each accepted step
/// satisfies the sufficient-decrease condition, so the penalized objective
/// never increases.
inline LogRegModel fit_logreg(const Matrix& X, const std::vector<int>& y, std::size_t n_classes, const LogRegParams& params,
                              LogRegTrace* trace = nullptr) {
    LogRegModel m;
    m.n_classes = n_classes;
    m.n_features = X.cols;
    m.weights.assign(n_classes * X.cols, 0.0);
    m.intercept.assign(n_classes, 0.0);
    const double lambda = 1.0 / (params.C * static_cast<double>(X.rows));

    std::vector<double> gw, gb;
    double loss = logreg_detail::smooth_loss(X, y, m, &gw, &gb);
    double objective = loss + lambda * logreg_detail::l1(m.weights);
    if (trace) trace->objective.push_back(objective);

    double step = 1.0;
    LogRegModel candidate = m;
    for (int iter = 0; iter < params.max_iter; ++iter) {
        double cand_loss = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t k = 0; k < m.weights.size(); ++k)
                candidate.weights[k] = logreg_detail::soft_threshold(m.weights[k] - step * gw[k], step * lambda);
            for (std::size_t c = 0; c < n_classes; ++c) candidate.intercept[c] = m.intercept[c] - step * gb[c];
            cand_loss = logreg_detail::smooth_loss(X, y, candidate, nullptr, nullptr);
            // quadratic upper bound at the current point
            double lin = 0.0, sq = 0.0;
            for (std::size_t k = 0; k < m.weights.size(); ++k) {
                const double d = candidate.weights[k] - m.weights[k];
                lin += gw[k] * d;
                sq += d * d;
            }
            for (std::size_t c = 0; c < n_classes; ++c) {
                const double d = candidate.intercept[c] - m.intercept[c];
                lin += gb[c] * d;
                sq += d * d;
            }
            if (cand_loss <= loss + lin + sq / (2.0 * step) + 1e-15) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        const double cand_objective = cand_loss + lambda * logreg_detail::l1(candidate.weights);
        if (cand_objective > objective) break;  // rounding-level stall
        const double improvement = objective - cand_objective;
        std::swap(m, candidate);
        loss = logreg_detail::smooth_loss(X, y, m, &gw, &gb);
        objective = cand_objective;
        if (trace) trace->objective.push_back(objective);
        if (improvement <= params.tol * std::max(1.0, std::abs(objective))) break;
        step *= 2.0;
    }
    return m;
}

}  // namespace dancestyle
