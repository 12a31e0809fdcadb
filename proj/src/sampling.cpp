#include "ballrgg/sampling.hpp"

#include <cmath>

#include "ballrgg/errors.hpp"
#include "ballrgg/rng.hpp"

namespace ballrgg {

LatentSample::LatentSample(PointMatrix points, ModelConfig config, std::uint64_t seed)
    : points_(std::move(points)), norms_(points_.rows()), config_(std::move(config)), seed_(seed) {
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < points_.cols(); ++k) s += points_(i, k) * points_(i, k);
        norms_[i] = std::sqrt(s);
    }
}

LatentSample LatentSample::from_points(PointMatrix points, ModelConfig config, std::uint64_t seed) {
    config.validate();
    if (points.cols() != config.d) throw DomainError("latent sample: point dimension does not match d");
    LatentSample sample(std::move(points), std::move(config), seed);
    for (Eigen::Index i = 0; i < sample.size(); ++i) {
        if (!(sample.norms_[i] <= 1.0 + 1e-12)) throw DomainError("latent sample: point outside the unit ball");
    }
    return sample;
}

Graph::Graph(std::size_t n, std::vector<std::uint8_t> adjacency)
    : n_(n), adjacency_(std::move(adjacency)), degrees_(n, 0) {
    for (std::size_t i = 0; i < n_; ++i) {
        int deg = 0;
        for (std::size_t j = 0; j < n_; ++j) deg += adjacency_[i * n_ + j];
        degrees_[i] = deg;
    }
}

Graph Graph::from_adjacency(std::size_t n, std::vector<std::uint8_t> adjacency) {
    if (adjacency.size() != n * n) throw ConfigError("graph: adjacency has wrong size");
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency[i * n + i] != 0) throw ConfigError("graph: nonzero diagonal");
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto a = adjacency[i * n + j];
            if (a > 1) throw ConfigError("graph: adjacency entries must be 0 or 1");
            if (a != adjacency[j * n + i]) throw ConfigError("graph: adjacency not symmetric");
        }
    }
    return Graph(n, std::move(adjacency));
}

LatentSample sample_latent(const ModelConfig& config, Eigen::Index n, std::uint64_t seed, Exec exec) {
    config.validate();
    if (n < 1) throw DomainError("sample_latent: n must be at least 1");
    PointMatrix points(n, config.d);
    if (exec == Exec::Serial) {
        kernels::sample_points_serial(config.d, config.nu, seed, points);
    } else {
        kernels::sample_points_parallel(config.d, config.nu, seed, points);
    }
    return LatentSample::from_points(std::move(points), config, seed);
}

Graph sample_graph(const LatentSample& sample, std::uint64_t seed, Exec exec) {
    if (sample.size() < 1) throw DomainError("sample_graph: empty sample");
    std::vector<std::uint8_t> adjacency;
    if (exec == Exec::Serial) {
        kernels::sample_adjacency_serial(sample.points(), sample.config().link, seed, adjacency);
    } else {
        kernels::sample_adjacency_parallel(sample.points(), sample.config().link, seed, adjacency);
    }
    return Graph::from_adjacency(static_cast<std::size_t>(sample.size()), std::move(adjacency));
}

Eigen::MatrixXd gram_population(const LatentSample& sample, Exec exec) {
    Eigen::MatrixXd out;
    const double scale = 1.0 / static_cast<double>(sample.size());
    if (exec == Exec::Serial) {
        kernels::kernel_matrix_serial(sample.points(), nullptr, scale, out);
    } else {
        kernels::kernel_matrix_parallel(sample.points(), nullptr, scale, out);
    }
    return out;
}

InnerProductTail inner_product_tail_mc(int d, double nu1, double nu2, double tau, std::int64_t n_mc,
                                       std::uint64_t seed) {
    if (!(nu1 > nu2 && nu2 > 0.0)) throw DomainError("inner_product_tail_mc: need nu1 > nu2 > 0");
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("inner_product_tail_mc: tau must lie in [0, 1]");
    if (n_mc < 1) throw DomainError("inner_product_tail_mc: n_mc must be positive");
    const double p1 = kernels::inner_product_cdf_parallel(d, nu1, tau, n_mc, rng::stream_key(seed, {1}));
    const double p2 = kernels::inner_product_cdf_parallel(d, nu2, tau, n_mc, rng::stream_key(seed, {2}));
    const double m = static_cast<double>(n_mc);
    return {p1, p2, std::sqrt(p1 * (1.0 - p1) / m), std::sqrt(p2 * (1.0 - p2) / m)};
}

}  // namespace ballrgg
