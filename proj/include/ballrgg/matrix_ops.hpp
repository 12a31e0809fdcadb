#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "ballrgg/sampling.hpp"

namespace ballrgg::linalg {

/// Full symmetric eigendecomposition.
///
/// `values` are sorted by signed value, largest first; column k of
/// `vectors` pairs with values[k]. Each column is oriented so its entry of
/// largest magnitude (lowest index on ties) is positive.
struct EigenDecomposition {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

inline constexpr double kSymmetryTolerance = 1e-10;

/// T_n: f(<X_i, X_j>) / n off the diagonal, zero diagonal.
Eigen::MatrixXd tn_matrix(const LatentSample& sample, Exec exec = Exec::Parallel);

/// T^_n = A / n.
Eigen::MatrixXd that_n_matrix(const Graph& graph);

/// Throws NonSymmetricError if max |M - M^T| >= 1e-10, ConvergenceError if
/// LAPACK fails.
EigenDecomposition sym_eigen(const Eigen::MatrixXd& m);

/// Eigenvalues only, same ordering as sym_eigen.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m);

/// max |eigenvalue| of a symmetric matrix.
double operator_norm(const Eigen::MatrixXd& m);
double frobenius_norm(const Eigen::MatrixXd& m);

/// l2 rearrangement distance: pad the shorter list with zeros, sort both by
/// value (descending) and take the Euclidean distance.
double delta2(std::span<const double> a, std::span<const double> b);

/// Pins the BLAS/LAPACK backend to k threads. The experiment harness uses 1
/// and parallelizes over replications instead, which keeps results independent
/// of the thread count.
void set_blas_threads(int k);

}  // namespace ballrgg::linalg
