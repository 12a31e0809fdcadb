#pragma once

#include <stdexcept>
#include <string>

namespace ballrgg {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative solve (quadrature nodes, eigensolver) failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, long index = -1)
        : std::runtime_error(what), index_(index) {}
    /// Offending node/iteration index, or -1 when not applicable.
    long index() const noexcept { return index_; }

private:
    long index_;
};

/// Matrix expected symmetric was not.
class NonSymmetricError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The operator spectral gap around lambda*_1 is too small for Gram estimation.
class GapDegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ClusterFailure { NoIsolatedCluster, AmbiguousCluster };

class ClusterError : public std::runtime_error {
public:
    ClusterError(ClusterFailure kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ClusterFailure kind() const noexcept { return kind_; }

private:
    ClusterFailure kind_;
};

/// Malformed experiment configuration or serialized input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ballrgg
