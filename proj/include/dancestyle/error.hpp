#pragma once

#include <stdexcept>
#include <string>

namespace dancestyle {

/// Malformed or invalid input data (files, manifests, feature tables).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while fitting models or running the evaluation protocol.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fold plan placed the same group on both sides of a train/test split.
class LeakageError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

}  // namespace dancestyle
