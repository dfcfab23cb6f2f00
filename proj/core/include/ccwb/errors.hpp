#pragma once

#include <stdexcept>
#include <string>

namespace ccwb {

/// Invalid or inconsistent model configuration.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Adaptive quadrature exhausted its evaluation budget without converging.
class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& msg) : std::runtime_error(msg) {}
};

/// P could not be factorized or its condition estimate exceeds the drop
/// threshold; the offending offset vector must be removed from the search set.
class SingularPError : public std::runtime_error {
public:
    explicit SingularPError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Ellipsoid solver hit its iteration cap before meeting the tolerance.
class NonConvergenceError : public std::runtime_error {
public:
    explicit NonConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// No positive definite member remains after filtering an ellipsoid set.
class DegenerateInputError : public std::runtime_error {
public:
    explicit DegenerateInputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Every candidate offset vector was dropped; nothing to take a supremum over.
class EmptySearchSetError : public std::runtime_error {
public:
    explicit EmptySearchSetError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Segmentation handed to the estimator violates the support constraints.
class InvalidSegmentationError : public std::invalid_argument {
public:
    explicit InvalidSegmentationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Truncated enumeration cannot reach the requested tail tolerance.
class TruncationInsufficientError : public std::runtime_error {
public:
    explicit TruncationInsufficientError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ccwb
