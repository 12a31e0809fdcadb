#include "ballrgg/kernels.hpp"

#include <cmath>
#include <numeric>

#include "ballrgg/rng.hpp"

namespace ballrgg::kernels {

namespace {

double row_dot(const PointMatrix& points, Eigen::Index i, Eigen::Index j) {
    const double* a = points.row(i).data();
    const double* b = points.row(j).data();
    double s = 0.0;
    for (Eigen::Index k = 0; k < points.cols(); ++k) s += a[k] * b[k];
    return s;
}

double span_dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double kernel_entry(const PointMatrix& points, const LinkFunction* link, double scale, Eigen::Index i,
                    Eigen::Index j) {
    const double ip = row_dot(points, i, j);
    return scale * (link ? link->eval_unchecked(ip) : ip);
}

std::int64_t block_count(std::int64_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

double mean_link_block(const LinkFunction& link, std::span<const double> x, int d, double nu, std::int64_t begin,
                       std::int64_t end, std::uint64_t seed) {
    std::vector<double> y(static_cast<std::size_t>(d));
    double s = 0.0;
    for (std::int64_t k = begin; k < end; ++k) {
        sample_point(d, nu, rng::stream_key(seed, {static_cast<std::uint64_t>(k)}), y);
        s += link.eval_unchecked(span_dot(x, y));
    }
    return s;
}

double ip_cdf_block(int d, double nu, double tau, std::int64_t begin, std::int64_t end, std::uint64_t seed) {
    std::vector<double> a(static_cast<std::size_t>(d));
    std::vector<double> b(static_cast<std::size_t>(d));
    double count = 0.0;
    for (std::int64_t k = begin; k < end; ++k) {
        const auto kk = static_cast<std::uint64_t>(k);
        sample_point(d, nu, rng::stream_key(seed, {kk, 0}), a);
        sample_point(d, nu, rng::stream_key(seed, {kk, 1}), b);
        if (span_dot(a, b) <= tau) count += 1.0;
    }
    return count;
}

}  // namespace

void sample_point(int d, double nu, std::uint64_t key, std::span<double> out) {
    rng::Stream stream(key);
    double norm2 = 0.0;
    for (int k = 0; k < d; ++k) {
        out[k] = stream.normal();
        norm2 += out[k] * out[k];
    }
    const double radius = std::sqrt(stream.beta(0.5 * d, nu + 0.5));
    const double factor = radius / std::sqrt(norm2);
    for (int k = 0; k < d; ++k) out[k] *= factor;
}

void sample_points_serial(int d, double nu, std::uint64_t seed, PointMatrix& points) {
    points.resize(points.rows(), d);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        sample_point(d, nu, rng::stream_key(seed, {static_cast<std::uint64_t>(i)}),
                     std::span<double>(points.row(i).data(), static_cast<std::size_t>(d)));
    }
}

void sample_points_parallel(int d, double nu, std::uint64_t seed, PointMatrix& points) {
    points.resize(points.rows(), d);
    const Eigen::Index n = points.rows();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        sample_point(d, nu, rng::stream_key(seed, {static_cast<std::uint64_t>(i)}),
                     std::span<double>(points.row(i).data(), static_cast<std::size_t>(d)));
    }
}

void kernel_matrix_serial(const PointMatrix& points, const LinkFunction* link, double scale, Eigen::MatrixXd& out) {
    const Eigen::Index n = points.rows();
    out.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out(j, j) = 0.0;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double v = kernel_entry(points, link, scale, i, j);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
}

void kernel_matrix_parallel(const PointMatrix& points, const LinkFunction* link, double scale, Eigen::MatrixXd& out) {
    const Eigen::Index n = points.rows();
    out.resize(n, n);
    // Lower triangle by column, then mirror by column; each pass writes
    // disjoint columns.
#pragma omp parallel
    {
#pragma omp for schedule(dynamic, 16)
        for (Eigen::Index j = 0; j < n; ++j) {
            out(j, j) = 0.0;
            for (Eigen::Index i = j + 1; i < n; ++i) out(i, j) = kernel_entry(points, link, scale, i, j);
        }
#pragma omp for schedule(dynamic, 16)
        for (Eigen::Index j = 1; j < n; ++j) {
            for (Eigen::Index i = 0; i < j; ++i) out(i, j) = out(j, i);
        }
    }
}

void sample_adjacency_serial(const PointMatrix& points, const LinkFunction& link, std::uint64_t seed,
                             std::vector<std::uint8_t>& adjacency) {
    const auto n = static_cast<std::size_t>(points.rows());
    adjacency.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = link.eval_unchecked(row_dot(points, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            const double u = rng::counter_uniform(rng::stream_key(seed, {i, j}));
            const std::uint8_t a = u < p ? 1 : 0;
            adjacency[i * n + j] = a;
            adjacency[j * n + i] = a;
        }
    }
}

void sample_adjacency_parallel(const PointMatrix& points, const LinkFunction& link, std::uint64_t seed,
                               std::vector<std::uint8_t>& adjacency) {
    const auto n = static_cast<std::size_t>(points.rows());
    adjacency.assign(n * n, 0);
    const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t ii = 0; ii < rows; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = link.eval_unchecked(row_dot(points, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            const double u = rng::counter_uniform(rng::stream_key(seed, {i, j}));
            const std::uint8_t a = u < p ? 1 : 0;
            adjacency[i * n + j] = a;
            adjacency[j * n + i] = a;
        }
    }
}

double mean_link_serial(const LinkFunction& link, std::span<const double> x, int d, double nu, std::int64_t n_mc,
                        std::uint64_t seed) {
    if (n_mc <= 0) return 0.0;
    double total = 0.0;
    for (std::int64_t b = 0; b < block_count(n_mc); ++b) {
        total += mean_link_block(link, x, d, nu, b * kReductionBlock, std::min(n_mc, (b + 1) * kReductionBlock), seed);
    }
    return total / static_cast<double>(n_mc);
}

double mean_link_parallel(const LinkFunction& link, std::span<const double> x, int d, double nu, std::int64_t n_mc,
                          std::uint64_t seed) {
    if (n_mc <= 0) return 0.0;
    const std::int64_t blocks = block_count(n_mc);
    std::vector<double> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < blocks; ++b) {
        partial[b] = mean_link_block(link, x, d, nu, b * kReductionBlock, std::min(n_mc, (b + 1) * kReductionBlock), seed);
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total / static_cast<double>(n_mc);
}

double inner_product_cdf_serial(int d, double nu, double tau, std::int64_t n_mc, std::uint64_t seed) {
    if (n_mc <= 0) return 0.0;
    double total = 0.0;
    for (std::int64_t b = 0; b < block_count(n_mc); ++b) {
        total += ip_cdf_block(d, nu, tau, b * kReductionBlock, std::min(n_mc, (b + 1) * kReductionBlock), seed);
    }
    return total / static_cast<double>(n_mc);
}

double inner_product_cdf_parallel(int d, double nu, double tau, std::int64_t n_mc, std::uint64_t seed) {
    if (n_mc <= 0) return 0.0;
    const std::int64_t blocks = block_count(n_mc);
    std::vector<double> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < blocks; ++b) {
        partial[b] = ip_cdf_block(d, nu, tau, b * kReductionBlock, std::min(n_mc, (b + 1) * kReductionBlock), seed);
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total / static_cast<double>(n_mc);
}

}  // namespace ballrgg::kernels
