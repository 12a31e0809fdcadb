#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ballrgg/kernels.hpp"
#include "ballrgg/model.hpp"

namespace ballrgg {

using kernels::Exec;
using kernels::PointMatrix;

/// n latent points in B^d with cached norms. Immutable after construction.
class LatentSample {
public:
    /// Wraps existing points; throws DomainError if a row norm exceeds 1 + 1e-12.
    static LatentSample from_points(PointMatrix points, ModelConfig config, std::uint64_t seed);

    const PointMatrix& points() const noexcept { return points_; }
    const Eigen::VectorXd& norms() const noexcept { return norms_; }
    const ModelConfig& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }
    Eigen::Index size() const noexcept { return points_.rows(); }
    int dim() const noexcept { return static_cast<int>(points_.cols()); }

private:
    LatentSample(PointMatrix points, ModelConfig config, std::uint64_t seed);

    PointMatrix points_;
    Eigen::VectorXd norms_;
    ModelConfig config_;
    std::uint64_t seed_;
};

/// Simple undirected graph: dense symmetric 0/1 adjacency, zero diagonal,
/// cached degrees.
class Graph {
public:
    /// Row-major n x n adjacency; validates symmetry, 0/1 entries and the
    /// zero diagonal (ConfigError otherwise).
    static Graph from_adjacency(std::size_t n, std::vector<std::uint8_t> adjacency);

    std::size_t size() const noexcept { return n_; }
    bool edge(std::size_t i, std::size_t j) const noexcept { return adjacency_[i * n_ + j] != 0; }
    int degree(std::size_t i) const noexcept { return degrees_[i]; }
    const std::vector<int>& degrees() const noexcept { return degrees_; }
    std::span<const std::uint8_t> row(std::size_t i) const noexcept {
        return {adjacency_.data() + i * n_, n_};
    }
    const std::vector<std::uint8_t>& adjacency() const noexcept { return adjacency_; }

private:
    Graph(std::size_t n, std::vector<std::uint8_t> adjacency);

    std::size_t n_ = 0;
    std::vector<std::uint8_t> adjacency_;
    std::vector<int> degrees_;
};

/// n i.i.d. points from F_nu, deterministic in seed.
LatentSample sample_latent(const ModelConfig& config, Eigen::Index n, std::uint64_t seed, Exec exec = Exec::Parallel);

/// W-random graph on the sample using the sample's link; deterministic in seed.
Graph sample_graph(const LatentSample& sample, std::uint64_t seed, Exec exec = Exec::Parallel);

/// G*_{ij} = <X_i, X_j> / n off the diagonal, 0 on it.
Eigen::MatrixXd gram_population(const LatentSample& sample, Exec exec = Exec::Parallel);

struct InnerProductTail {
    double p_nu1;      ///< P(<X, X'> <= tau) under F_nu1
    double p_nu2;      ///< same under F_nu2
    double stderr_nu1;
    double stderr_nu2;
};

/// Monte Carlo estimate of P(<X, X'> <= tau) for two measures of the family.
/// Requires nu1 > nu2 > 0 and tau in [0, 1] (tau = 0 is kept for the
/// half-space diagnostic).
InnerProductTail inner_product_tail_mc(int d, double nu1, double nu2, double tau, std::int64_t n_mc,
                                       std::uint64_t seed);

}  // namespace ballrgg
