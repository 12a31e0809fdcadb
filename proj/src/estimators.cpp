#include "ballrgg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "ballrgg/errors.hpp"
#include "ballrgg/specfun.hpp"

namespace ballrgg::estimators {

NormEstimates estimate_norms(const Graph& graph, double tau, const ModelConfig& config) {
    config.validate();
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("estimate_norms: tau must lie in (0, 1)");
    const std::size_t n = graph.size();
    NormEstimates est;
    est.zeta_hat.resize(static_cast<Eigen::Index>(n));
    est.z.resize(static_cast<Eigen::Index>(n));
    est.isolated.assign(n, false);
    const double a = config.nu + 0.5 * config.d;
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ratio = std::clamp(2.0 * graph.degree(i) / denom, 0.0, 1.0 - 1e-12);
        const double z = specfun::beta_reg_inv(ratio, a, 0.5);
        const auto k = static_cast<Eigen::Index>(i);
        est.z[k] = z;
        est.zeta_hat[k] = std::min(tau / std::sqrt(1.0 - z), 1.0);
        est.isolated[i] = graph.degree(i) == 0;
    }
    return est;
}

double norm_error(const NormEstimates& est, const LatentSample& sample, double tau) {
    if (est.zeta_hat.size() != sample.size()) throw DomainError("norm_error: size mismatch");
    double sq = 0.0;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < sample.size(); ++i) {
        if (sample.norms()[i] >= tau) {
            const double e = est.zeta_hat[i] - sample.norms()[i];
            sq += e * e;
            ++count;
        }
    }
    if (count == 0) throw DomainError("norm_error: no node with norm >= tau");
    return std::sqrt(sq) / static_cast<double>(count);
}

namespace {

// Start positions of windows values[s .. s+d-1] meeting the isolation criteria.
std::vector<Eigen::Index> isolated_windows(const Eigen::VectorXd& v, double half_gap, int d) {
    std::vector<Eigen::Index> found;
    const Eigen::Index n = v.size();
    for (Eigen::Index s = 0; s + d <= n; ++s) {
        const Eigen::Index e = s + d - 1;
        if (!(v[s] - v[e] < half_gap)) continue;
        if (s > 0 && !(v[s - 1] - v[s] >= half_gap)) continue;
        if (e + 1 < n && !(v[e] - v[e + 1] >= half_gap)) continue;
        found.push_back(s);
    }
    return found;
}

bool is_isolated(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx, double half_gap) {
    double lo = v[idx.front()], hi = v[idx.front()];
    for (auto i : idx) {
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
    }
    if (!(hi - lo < half_gap)) return false;
    std::vector<bool> member(static_cast<std::size_t>(v.size()), false);
    for (auto i : idx) member[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (member[static_cast<std::size_t>(j)]) continue;
        for (auto i : idx) {
            if (!(std::abs(v[j] - v[i]) >= half_gap)) return false;
        }
    }
    return true;
}

struct Nearest {
    std::vector<Eigen::Index> indices;
    bool boundary_tie;
};

Nearest nearest_values(const Eigen::VectorXd& v, double target, int d) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(v[a] - target) < std::abs(v[b] - target);
    });
    const auto dd = static_cast<std::size_t>(d);
    bool tie = false;
    if (order.size() > dd) {
        tie = std::abs(v[order[dd - 1]] - target) == std::abs(v[order[dd]] - target);
    }
    std::vector<Eigen::Index> picked(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(dd));
    std::sort(picked.begin(), picked.end());
    return {picked, tie};
}

}  // namespace

ClusterSelection find_cluster(const Eigen::VectorXd& values, double lambda1, double gap, int d, ClusterMode mode) {
    if (!(gap > 0.0)) throw DomainError("find_cluster: gap must be positive");
    if (d < 1 || values.size() < d) throw DomainError("find_cluster: need at least d eigenvalues");
    const double half_gap = 0.5 * gap;

    const auto strict = [&]() -> ClusterSelection {
        const auto windows = isolated_windows(values, half_gap, d);
        if (windows.size() == 1) {
            ClusterSelection sel;
            for (int k = 0; k < d; ++k) sel.indices.push_back(windows.front() + k);
            sel.strict_ok = true;
            return sel;
        }
        if (windows.size() > 1) {
            throw ClusterError(ClusterFailure::AmbiguousCluster,
                               fmt::format("find_cluster: {} isolated windows of size {}", windows.size(), d));
        }
        if (nearest_values(values, lambda1, d).boundary_tie) {
            throw ClusterError(ClusterFailure::AmbiguousCluster, "find_cluster: tied eigenvalues at the cluster boundary");
        }
        throw ClusterError(ClusterFailure::NoIsolatedCluster,
                           fmt::format("find_cluster: no isolated window of size {} with diameter < {}", d, half_gap));
    };
    const auto nearest = [&]() {
        ClusterSelection sel;
        sel.indices = nearest_values(values, lambda1, d).indices;
        sel.strict_ok = is_isolated(values, sel.indices, half_gap);
        return sel;
    };

    switch (mode) {
        case ClusterMode::Strict:
            return strict();
        case ClusterMode::Nearest:
            return nearest();
        case ClusterMode::StrictWithFallback:
            try {
                return strict();
            } catch (const ClusterError&) {
                ClusterSelection sel = nearest();
                sel.fell_back = true;
                return sel;
            }
    }
    throw DomainError("find_cluster: unknown mode");
}

GramEstimate estimate_gram(const Graph& graph, const ModelConfig& config, const spectrum::SpectrumSummary& spectrum,
                           const GramOptions& options) {
    config.validate_positive_nu();
    if (spectrum.gap < spectrum::kGapDegenerateThreshold) {
        throw GapDegenerateError("estimate_gram: spectral gap around lambda*_1 is degenerate");
    }
    return estimate_gram(linalg::sym_eigen(linalg::that_n_matrix(graph)), config, spectrum, options);
}

GramEstimate estimate_gram(const linalg::EigenDecomposition& eigs, const ModelConfig& config,
                           const spectrum::SpectrumSummary& spectrum, const GramOptions& options) {
    config.validate_positive_nu();
    if (spectrum.gap < spectrum::kGapDegenerateThreshold) {
        throw GapDegenerateError("estimate_gram: spectral gap around lambda*_1 is degenerate");
    }
    const ClusterSelection sel = find_cluster(eigs.values, spectrum.lambda1(), spectrum.gap, config.d, options.mode);

    const Eigen::Index n = eigs.vectors.rows();
    Eigen::MatrixXd v(n, static_cast<Eigen::Index>(sel.indices.size()));
    for (std::size_t k = 0; k < sel.indices.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = eigs.vectors.col(sel.indices[k]);

    if (options.renormalize_rows) {
        if (!options.norms || options.norms->size() != n) {
            throw DomainError("estimate_gram: row renormalization needs one norm estimate per node");
        }
        const double target = options.norms->squaredNorm() / static_cast<double>(n);
        const double current = v.squaredNorm() / spectrum.recovery_scale;  // n * mean diagonal of V V^T / scale
        if (current > 0.0) v *= std::sqrt(target / current);
    }

    GramEstimate est;
    est.g_hat = v * v.transpose() / spectrum.recovery_scale;
    est.g_hat.diagonal().setZero();
    for (auto i : sel.indices) est.cluster_values.push_back(eigs.values[i]);
    est.cluster_indices = sel.indices;
    est.gap_used = spectrum.gap;
    est.scale = spectrum.recovery_scale;
    est.strict_ok = sel.strict_ok;
    est.fell_back = sel.fell_back;
    return est;
}

double gram_error(const Eigen::MatrixXd& g_hat, const Eigen::MatrixXd& g_star) {
    if (g_hat.rows() != g_star.rows() || g_hat.cols() != g_star.cols()) throw DomainError("gram_error: size mismatch");
    double s = 0.0;
    for (Eigen::Index j = 0; j < g_hat.cols(); ++j) {
        for (Eigen::Index i = 0; i < g_hat.rows(); ++i) {
            if (i == j) continue;
            const double e = g_hat(i, j) - g_star(i, j);
            s += e * e;
        }
    }
    return std::sqrt(s);
}

double gram_error(const GramEstimate& est, const LatentSample& sample) {
    return gram_error(est.g_hat, gram_population(sample));
}

void write_norms_csv(std::ostream& os, const NormEstimates& est, const Graph& graph) {
    os << "node,degree,z,zeta_hat,isolated\r\n";
    for (Eigen::Index i = 0; i < est.zeta_hat.size(); ++i) {
        os << fmt::format("{},{},{},{},{}\r\n", i, graph.degree(static_cast<std::size_t>(i)), est.z[i], est.zeta_hat[i],
                          est.isolated[static_cast<std::size_t>(i)] ? 1 : 0);
    }
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ",c" : "c") << j;
    os << "\r\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << fmt::format("{}", m(i, j));
        os << "\r\n";
    }
}

void write_cluster_csv(std::ostream& os, const GramEstimate& est) {
    os << "rank,index,value\r\n";
    for (std::size_t k = 0; k < est.cluster_indices.size(); ++k) {
        os << fmt::format("{},{},{}\r\n", k, est.cluster_indices[k], est.cluster_values[k]);
    }
}

}  // namespace ballrgg::estimators
