#include "ballrgg/matrix_ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <lapacke.h>

#include "ballrgg/errors.hpp"

extern "C" void openblas_set_num_threads(int);

namespace ballrgg::linalg {

namespace {

void check_symmetric(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw NonSymmetricError("sym_eigen: matrix is not square");
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 1; i < n; ++i) {
            if (!(std::abs(m(i, j) - m(j, i)) < kSymmetryTolerance)) {
                throw NonSymmetricError("sym_eigen: matrix is not symmetric");
            }
        }
    }
}

// dsyevd on a copy; returns eigenvalues ascending and, when requested, the
// eigenvectors in place of the copy.
Eigen::VectorXd run_dsyevd(Eigen::MatrixXd& work, bool want_vectors) {
    const auto n = static_cast<lapack_int>(work.rows());
    Eigen::VectorXd w(n);
    if (n == 0) return w;
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n, work.data(), n, w.data());
    if (info != 0) throw ConvergenceError("sym_eigen: LAPACK dsyevd failed", info);
    return w;
}

}  // namespace

Eigen::MatrixXd tn_matrix(const LatentSample& sample, Exec exec) {
    Eigen::MatrixXd out;
    const double scale = 1.0 / static_cast<double>(sample.size());
    if (exec == Exec::Serial) {
        kernels::kernel_matrix_serial(sample.points(), &sample.config().link, scale, out);
    } else {
        kernels::kernel_matrix_parallel(sample.points(), &sample.config().link, scale, out);
    }
    return out;
}

Eigen::MatrixXd that_n_matrix(const Graph& graph) {
    const auto n = static_cast<Eigen::Index>(graph.size());
    Eigen::MatrixXd out(n, n);
    const double scale = 1.0 / static_cast<double>(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto row = graph.row(static_cast<std::size_t>(j));
        for (Eigen::Index i = 0; i < n; ++i) out(i, j) = row[static_cast<std::size_t>(i)] * scale;
    }
    return out;
}

EigenDecomposition sym_eigen(const Eigen::MatrixXd& m) {
    check_symmetric(m);
    Eigen::MatrixXd work = m;
    const Eigen::VectorXd ascending = run_dsyevd(work, true);
    const Eigen::Index n = m.rows();

    EigenDecomposition out;
    out.values = ascending.reverse();
    out.vectors = work.rowwise().reverse();
    for (Eigen::Index k = 0; k < n; ++k) {
        auto col = out.vectors.col(k);
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < n; ++i) {
            if (std::abs(col[i]) > std::abs(col[best])) best = i;
        }
        if (col[best] < 0.0) col = -col;
    }
    return out;
}

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m) {
    check_symmetric(m);
    Eigen::MatrixXd work = m;
    return run_dsyevd(work, false).reverse();
}

double operator_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    const Eigen::VectorXd v = sym_eigenvalues(m);
    return std::max(std::abs(v[0]), std::abs(v[v.size() - 1]));
}

double frobenius_norm(const Eigen::MatrixXd& m) { return m.norm(); }

double delta2(std::span<const double> a, std::span<const double> b) {
    const std::size_t len = std::max(a.size(), b.size());
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    x.resize(len, 0.0);
    y.resize(len, 0.0);
    std::sort(x.begin(), x.end(), std::greater<>());
    std::sort(y.begin(), y.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

void set_blas_threads(int k) { openblas_set_num_threads(k < 1 ? 1 : k); }

}  // namespace ballrgg::linalg
