#pragma once

// Data-parallel inner loops. Each kernel has a plain serial reference and an
// OpenMP version; both consume the same per-entity random streams and the
// same fixed reduction blocking, so their outputs are bit-identical for any
// thread count. Tests compare the pairs and bench/ times them.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ballrgg/model.hpp"

namespace ballrgg::kernels {

enum class Exec { Serial, Parallel };

/// n x d, one latent point per row.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Monte Carlo sums are accumulated per block of this many draws, then the
/// block sums are added in index order.
inline constexpr std::int64_t kReductionBlock = 4096;

/// One draw from F_nu on B^d: R U with R^2 ~ Beta(d/2, nu + 1/2) and U the
/// normalized standard-normal vector, all from the stream seeded by `key`.
void sample_point(int d, double nu, std::uint64_t key, std::span<double> out);

/// Row i uses stream_key(seed, {i}).
void sample_points_serial(int d, double nu, std::uint64_t seed, PointMatrix& points);
void sample_points_parallel(int d, double nu, std::uint64_t seed, PointMatrix& points);

/// out(i, j) = scale * f(<x_i, x_j>) for i != j, 0 on the diagonal.
/// A null link means the raw inner product.
void kernel_matrix_serial(const PointMatrix& points, const LinkFunction* link, double scale, Eigen::MatrixXd& out);
void kernel_matrix_parallel(const PointMatrix& points, const LinkFunction* link, double scale, Eigen::MatrixXd& out);

/// Row-major n x n 0/1 adjacency. Pair i < j is an edge iff
/// counter_uniform(stream_key(seed, {i, j})) < f(<x_i, x_j>).
void sample_adjacency_serial(const PointMatrix& points, const LinkFunction& link, std::uint64_t seed,
                             std::vector<std::uint8_t>& adjacency);
void sample_adjacency_parallel(const PointMatrix& points, const LinkFunction& link, std::uint64_t seed,
                               std::vector<std::uint8_t>& adjacency);

/// Mean of f(<x, Y_k>) over n_mc draws Y_k ~ F_nu (draw k uses
/// stream_key(seed, {k})).
double mean_link_serial(const LinkFunction& link, std::span<const double> x, int d, double nu,
                        std::int64_t n_mc, std::uint64_t seed);
double mean_link_parallel(const LinkFunction& link, std::span<const double> x, int d, double nu,
                          std::int64_t n_mc, std::uint64_t seed);

/// Fraction of independent pairs (X, X') ~ F_nu x F_nu with <X, X'> <= tau.
double inner_product_cdf_serial(int d, double nu, double tau, std::int64_t n_mc, std::uint64_t seed);
double inner_product_cdf_parallel(int d, double nu, double tau, std::int64_t n_mc, std::uint64_t seed);

}  // namespace ballrgg::kernels
