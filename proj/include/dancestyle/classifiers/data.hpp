#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../matrix.hpp"

namespace dancestyle {

/// Training data: X (n x F), class indices y in [0, C), and names.
struct LabeledMatrix {
    Matrix X;
    std::vector<int> y;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;

    std::size_t class_count() const { return class_names.size(); }
};

inline void require_finite(const Matrix& X, const char* what) {
    for (std::size_t i = 0; i < X.data.size(); ++i)
        if (!std::isfinite(X.data[i]))
            throw EvaluationError(std::string(what) + ": non-finite feature at row " + std::to_string(i / X.cols) +
                                  ", column " + std::to_string(i % X.cols));
}

inline void validate(const LabeledMatrix& data) {
    const std::size_t C = data.class_count();
    if (C < 2) throw EvaluationError("training data: need at least 2 classes");
    if (data.X.rows != data.y.size()) throw EvaluationError("training data: X and y row counts differ");
    if (data.X.rows < C) throw EvaluationError("training data: fewer samples than classes");
    if (!data.feature_names.empty() && data.feature_names.size() != data.X.cols)
        throw EvaluationError("training data: feature name count does not match columns");
    std::vector<std::size_t> counts(C, 0);
    for (int label : data.y) {
        if (label < 0 || static_cast<std::size_t>(label) >= C)
            throw EvaluationError("training data: label index out of range");
        ++counts[static_cast<std::size_t>(label)];
    }
    for (std::size_t c = 0; c < C; ++c)
        if (counts[c] == 0) throw EvaluationError("training data: class '" + data.class_names[c] + "' has no samples");
    require_finite(data.X, "training data");
}

/// Per-column z-score; constant columns get scale 1.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Matrix& X) {
        Standardizer s;
        s.mean.assign(X.cols, 0.0);
        s.scale.assign(X.cols, 1.0);
        if (X.rows == 0) return s;
        for (std::size_t i = 0; i < X.rows; ++i)
            for (std::size_t j = 0; j < X.cols; ++j) s.mean[j] += X(i, j);
        for (auto& m : s.mean) m /= static_cast<double>(X.rows);
        std::vector<double> var(X.cols, 0.0);
        for (std::size_t i = 0; i < X.rows; ++i)
            for (std::size_t j = 0; j < X.cols; ++j) {
                const double d = X(i, j) - s.mean[j];
                var[j] += d * d;
            }
        for (std::size_t j = 0; j < X.cols; ++j) {
            const double sd = std::sqrt(var[j] / static_cast<double>(X.rows));
            s.scale[j] = sd > 0.0 ? sd : 1.0;
        }
        return s;
    }

    static Standardizer identity(std::size_t cols) {
        return {std::vector<double>(cols, 0.0), std::vector<double>(cols, 1.0)};
    }

    Matrix transform(const Matrix& X) const {
        Matrix out = X;
        for (std::size_t i = 0; i < X.rows; ++i)
            for (std::size_t j = 0; j < X.cols; ++j) out(i, j) = (X(i, j) - mean[j]) / scale[j];
        return out;
    }
};

/// Numerically stable softmax in place.
inline void softmax(std::span<double> z) {
    double mx = z[0];
    for (double v : z) mx = v > mx ? v : mx;
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

inline std::size_t argmax(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace dancestyle
