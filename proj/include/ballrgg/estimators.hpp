#pragma once

// Inference from an observed graph: latent norms from degrees (threshold
// link) and the latent Gram matrix from the eigenvector cluster of A / n
// associated with lambda*_1.

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ballrgg/matrix_ops.hpp"
#include "ballrgg/sampling.hpp"
#include "ballrgg/spectrum.hpp"

namespace ballrgg::estimators {

struct NormEstimates {
    Eigen::VectorXd zeta_hat;   ///< min(tau / sqrt(1 - Z_i), 1)
    Eigen::VectorXd z;          ///< Z_i = I^{-1}(2 d_G(i) / (n - 1); nu + d/2, 1/2)
    std::vector<bool> isolated; ///< d_G(i) == 0
};

/// Degree ratio is clamped to [0, 1 - 1e-12] before inversion.
NormEstimates estimate_norms(const Graph& graph, double tau, const ModelConfig& config);

/// E_norm = (sum_{|X_i| >= tau} (zeta_i - |X_i|)^2)^{1/2} / #{|X_i| >= tau}.
/// Throws DomainError when no node qualifies or sizes differ.
double norm_error(const NormEstimates& est, const LatentSample& sample, double tau);

enum class ClusterMode {
    Strict,              ///< unique isolated d-window or ClusterError
    Nearest,             ///< d eigenvalues closest to lambda*_1
    StrictWithFallback,  ///< Strict, falling back to Nearest with a flag
};

struct ClusterSelection {
    std::vector<Eigen::Index> indices;  ///< ascending positions in eigs.values
    bool strict_ok = false;             ///< the selection satisfies the isolation criteria
    bool fell_back = false;             ///< StrictWithFallback had to use Nearest
};

/// Finds the d eigenvalues associated with lambda1.
///
/// Strict: the unique set of d consecutive (in sorted order) eigenvalues
/// whose diameter is < gap/2 and whose distance to every other eigenvalue is
/// >= gap/2. No such window → NoIsolatedCluster; several windows, or a tie
/// at the boundary of the d nearest values → AmbiguousCluster.
ClusterSelection find_cluster(const Eigen::VectorXd& values, double lambda1, double gap, int d, ClusterMode mode);

struct GramEstimate {
    Eigen::MatrixXd g_hat;               ///< V V^T / scale, zero diagonal
    std::vector<double> cluster_values;
    std::vector<Eigen::Index> cluster_indices;
    double gap_used = 0.0;
    double scale = 0.0;
    bool strict_ok = false;
    bool fell_back = false;
};

struct GramOptions {
    ClusterMode mode = ClusterMode::StrictWithFallback;
    /// Rescale V so the mean of n |V_i|^2 / scale matches the mean of the
    /// squared estimated norms. Off by default; requires `norms`.
    bool renormalize_rows = false;
    std::optional<Eigen::VectorXd> norms;
};

/// Throws GapDegenerateError when spectrum.gap < 1e-8; propagates
/// ClusterError in Strict mode.
GramEstimate estimate_gram(const Graph& graph, const ModelConfig& config, const spectrum::SpectrumSummary& spectrum,
                           const GramOptions& options = {});

/// Same, reusing a decomposition of T^_n computed by the caller.
GramEstimate estimate_gram(const linalg::EigenDecomposition& eigs, const ModelConfig& config,
                           const spectrum::SpectrumSummary& spectrum, const GramOptions& options = {});

/// ME_n: Frobenius norm of G^ - G* over off-diagonal entries.
double gram_error(const GramEstimate& est, const LatentSample& sample);
double gram_error(const Eigen::MatrixXd& g_hat, const Eigen::MatrixXd& g_star);

/// CSV "node,degree,z,zeta_hat,isolated".
void write_norms_csv(std::ostream& os, const NormEstimates& est, const Graph& graph);
/// Dense CSV with header "c0,...,c{n-1}".
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);
/// CSV "rank,index,value" for the selected cluster.
void write_cluster_csv(std::ostream& os, const GramEstimate& est);

}  // namespace ballrgg::estimators
