#include "ballrgg/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "ballrgg/errors.hpp"
#include "ballrgg/kernels.hpp"
#include "ballrgg/rng.hpp"
#include "ballrgg/specfun.hpp"

namespace ballrgg::spectrum {

using specfun::beta_reg;
using specfun::gegenbauer;

namespace {

void check_quadrature(int m_quad) {
    if (m_quad < 50) throw DomainError("spectrum: quadrature needs at least 50 nodes");
}

double eigenvalue_with(const specfun::PanelIntegrator& integrator, const std::function<double(double)>& g,
                       double gamma, int n) {
    const double at_one = gegenbauer(n, gamma, 1.0);
    const double integral =
        integrator.integrate([&](double t) { return g(t) * gegenbauer(n, gamma, t) / at_one; });
    return integral * std::exp(-specfun::log_beta(0.5, gamma + 0.5));
}

double c_nu_of(double nu) {
    return std::exp(specfun::log_gamma(nu + 0.5) - 0.5 * std::log(std::numbers::pi) - specfun::log_gamma(nu));
}

struct KernelArgs {
    double inner;     // <x, y>
    double cross;     // sqrt(1 - |x|^2) sqrt(1 - |y|^2)
};

KernelArgs kernel_args(std::span<const double> x, std::span<const double> y, int d) {
    if (x.size() != static_cast<std::size_t>(d) || y.size() != static_cast<std::size_t>(d)) {
        throw DomainError("reproducing_kernel: point dimension does not match d");
    }
    double xx = 0.0, yy = 0.0, xy = 0.0;
    for (int k = 0; k < d; ++k) {
        xx += x[k] * x[k];
        yy += y[k] * y[k];
        xy += x[k] * y[k];
    }
    if (xx > 1.0 + 1e-12 || yy > 1.0 + 1e-12) throw DomainError("reproducing_kernel: points must lie in the ball");
    return {xy, std::sqrt(std::max(0.0, 1.0 - xx)) * std::sqrt(std::max(0.0, 1.0 - yy))};
}

double kernel_with(const specfun::QuadratureRule& rule, const ModelConfig& config, int n, const KernelArgs& a) {
    const double gamma = config.gamma_nu();
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        s += rule.weights[i] * gegenbauer(n, gamma, a.inner + a.cross * rule.nodes[i]);
    }
    return c_nu_of(config.nu) * (n + gamma) / gamma * s;
}

}  // namespace

double eigenvalue(const std::function<double(double)>& g, std::span<const double> breakpoints,
                  const ModelConfig& config, int n, int m_quad) {
    config.validate_positive_nu();
    check_quadrature(m_quad);
    if (n < 0) throw DomainError("eigenvalue: degree must be non-negative");
    const double gamma = config.gamma_nu();
    const specfun::PanelIntegrator integrator(gamma - 0.5, breakpoints, m_quad);
    return eigenvalue_with(integrator, g, gamma, n);
}

double eigenvalue(const ModelConfig& config, int n, int m_quad) {
    const LinkFunction& link = config.link;
    const std::vector<double> cuts = link.breakpoints();
    return eigenvalue([&](double t) { return link.eval_unchecked(t); }, cuts, config, n, m_quad);
}

std::int64_t multiplicity(int n, int d) {
    if (n < 0 || d < 1) throw DomainError("multiplicity: need n >= 0 and d >= 1");
    // binomial(n + d - 1, n) = prod_{k=1}^{n} (d - 1 + k) / k, exact at each step.
    std::int64_t r = 1;
    for (int k = 1; k <= n; ++k) r = r * (d - 1 + k) / k;
    return r;
}

SpectrumSummary spectrum_summary(const ModelConfig& config, int max_degree, int m_quad) {
    config.validate_positive_nu();
    check_quadrature(m_quad);
    if (max_degree < 10) throw DomainError("spectrum_summary: N_max must be at least 10");

    const double gamma = config.gamma_nu();
    const LinkFunction& link = config.link;
    const std::vector<double> cuts = link.breakpoints();
    const specfun::PanelIntegrator integrator(gamma - 0.5, cuts, m_quad);
    const auto f = [&](double t) { return link.eval_unchecked(t); };

    SpectrumSummary s;
    s.gamma_nu = gamma;
    for (int n = 0; n <= max_degree; ++n) {
        s.lambdas.push_back({n, eigenvalue_with(integrator, f, gamma, n), multiplicity(n, config.d)});
    }

    const double l1 = s.lambda1();
    double gap = std::abs(l1);
    for (const auto& e : s.lambdas) {
        if (e.n != 1) gap = std::min(gap, std::abs(l1 - e.lambda_star));
    }
    s.gap = gap;
    s.gap_degenerate = gap < kGapDegenerateThreshold;

    s.c_nu = c_nu_of(config.nu);
    s.c_tilde = s.c_nu * std::exp(specfun::log_beta(0.5, config.nu));
    if (std::abs(s.c_tilde - 1.0) > 1e-10) {
        throw std::logic_error("spectrum_summary: c_tilde deviates from its analytic value 1");
    }
    s.recovery_scale = 2.0 * s.c_tilde * (1.0 + gamma);
    return s;
}

std::vector<double> expanded_spectrum(const SpectrumSummary& summary, std::size_t count) {
    std::vector<double> values;
    for (const auto& e : summary.lambdas) {
        // No more than `count` copies of one value can survive the truncation.
        const auto copies = std::min<std::int64_t>(e.multiplicity, static_cast<std::int64_t>(count));
        values.insert(values.end(), static_cast<std::size_t>(copies), e.lambda_star);
    }
    std::stable_sort(values.begin(), values.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
    values.resize(count, 0.0);
    return values;
}

void write_spectrum_csv(std::ostream& os, const SpectrumSummary& summary) {
    os << "n,lambda_star,multiplicity\r\n";
    for (const auto& e : summary.lambdas) os << fmt::format("{},{},{}\r\n", e.n, e.lambda_star, e.multiplicity);
}

double reproducing_kernel(const ModelConfig& config, int n, std::span<const double> x, std::span<const double> y,
                          int m_quad) {
    config.validate_positive_nu();
    if (n < 0) throw DomainError("reproducing_kernel: degree must be non-negative");
    if (m_quad < 1) throw DomainError("reproducing_kernel: need at least one node");
    const KernelArgs args = kernel_args(x, y, config.d);
    const specfun::QuadratureRule rule = specfun::gauss_jacobi(m_quad, config.nu - 1.0);
    return kernel_with(rule, config, n, args);
}

double kernel_reconstruct(const ModelConfig& config, std::span<const double> x, std::span<const double> y, int N,
                          int m_quad) {
    config.validate_positive_nu();
    check_quadrature(m_quad);
    if (N < 0) throw DomainError("kernel_reconstruct: N must be non-negative");
    const KernelArgs args = kernel_args(x, y, config.d);
    const double gamma = config.gamma_nu();
    const LinkFunction& link = config.link;
    const std::vector<double> cuts = link.breakpoints();
    const specfun::PanelIntegrator integrator(gamma - 0.5, cuts, m_quad);
    const specfun::QuadratureRule rule = specfun::gauss_jacobi(m_quad, config.nu - 1.0);
    const auto f = [&](double t) { return link.eval_unchecked(t); };
    double sum = 0.0;
    for (int n = 0; n <= N; ++n) sum += eigenvalue_with(integrator, f, gamma, n) * kernel_with(rule, config, n, args);
    return sum;
}

double degree_function_threshold(double t, double tau, const ModelConfig& config) {
    config.validate();
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("degree_function_threshold: t must lie in [0, 1]");
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("degree_function_threshold: tau must lie in (0, 1)");
    if (t <= tau) return 0.0;
    const double ratio = tau / t;
    return 0.5 * beta_reg(1.0 - ratio * ratio, config.nu + 0.5 * config.d, 0.5);
}

double degree_function_mc(const LinkFunction& link, std::span<const double> x, const ModelConfig& config,
                          std::int64_t n_mc, std::uint64_t seed) {
    config.validate();
    if (x.size() != static_cast<std::size_t>(config.d)) throw DomainError("degree_function_mc: dimension mismatch");
    if (n_mc < 1) throw DomainError("degree_function_mc: n_mc must be positive");
    return kernels::mean_link_parallel(link, x, config.d, config.nu, n_mc, seed);
}

double isolated_mass_threshold(double tau, const ModelConfig& config) {
    config.validate();
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("isolated_mass_threshold: tau must lie in (0, 1)");
    return beta_reg(tau * tau, 0.5 * config.d, config.nu + 0.5);
}

double degree_cdf_threshold(double t1, double t2, double tau, const ModelConfig& config) {
    config.validate();
    if (!(tau > 0.0 && tau < t1 && t1 <= t2 && t2 <= 1.0)) {
        throw DomainError("degree_cdf_threshold: need 0 < tau < t1 <= t2 <= 1");
    }
    const double a = 0.5 * config.d;
    const double b = config.nu + 0.5;
    return beta_reg(t2 * t2, a, b) - beta_reg(t1 * t1, a, b);
}

double degree_range_max_threshold(double tau, const ModelConfig& config) {
    return degree_function_threshold(1.0, tau, config);
}

namespace {

// Norm^2 boundary g(h) = tau^2 / (1 - I^{-1}(2h)) and its preimage z.
struct DegreeInverse {
    double z;
    double g;
};

DegreeInverse degree_inverse(double h, double tau, const ModelConfig& config) {
    const double z = specfun::beta_reg_inv(2.0 * h, config.nu + 0.5 * config.d, 0.5);
    return {z, std::min(1.0, tau * tau / (1.0 - z))};
}

}  // namespace

double degree_distribution_threshold(double h, double tau, const ModelConfig& config) {
    const double top = degree_range_max_threshold(tau, config);
    const double a = 0.5 * config.d;
    const double b = config.nu + 0.5;
    if (h <= 0.0) return h < 0.0 ? 0.0 : beta_reg(tau * tau, a, b);
    if (h >= top) return 1.0;
    return beta_reg(degree_inverse(h, tau, config).g, a, b);
}

double degree_density_threshold(double h, double tau, const ModelConfig& config) {
    const double top = degree_range_max_threshold(tau, config);
    if (!(h > 0.0 && h < top)) throw DomainError("degree_density_threshold: h outside the open range (0, h*)");
    const DegreeInverse inv = degree_inverse(h, tau, config);
    const double dz_dh = 2.0 / specfun::beta_pdf(inv.z, config.nu + 0.5 * config.d, 0.5);
    const double one_minus_z = 1.0 - inv.z;
    const double dg_dh = tau * tau / (one_minus_z * one_minus_z) * dz_dh;
    return specfun::beta_pdf(inv.g, 0.5 * config.d, config.nu + 0.5) * dg_dh;
}

PowerLawTail powerlaw_tail(double h, double alpha, const ModelConfig& config, std::int64_t n_mc, std::uint64_t seed) {
    config.validate();
    const LinkFunction link = link::PowerLaw{alpha};
    const double kappa = beta_reg(alpha, 0.5 * config.d, config.nu + 0.5);
    constexpr double kTheta = 1.5;
    if (h <= kappa) return {1.0, kappa, kTheta};
    if (!(h < 1.0)) throw DomainError("powerlaw_tail: h must lie in (kappa, 1)");
    if (n_mc < 1) throw DomainError("powerlaw_tail: n_mc must be positive");

    const std::uint64_t outer_seed = rng::stream_key(seed, {0});
    const std::uint64_t inner_seed = rng::stream_key(seed, {1});
    kernels::PointMatrix outer(n_mc, config.d);
    kernels::sample_points_parallel(config.d, config.nu, outer_seed, outer);

    std::int64_t hits = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : hits)
    for (std::int64_t i = 0; i < n_mc; ++i) {
        const std::span<const double> x(outer.row(i).data(), static_cast<std::size_t>(config.d));
        const double degree = kernels::mean_link_serial(link, x, config.d, config.nu, n_mc, inner_seed);
        if (degree >= h) ++hits;
    }
    return {static_cast<double>(hits) / static_cast<double>(n_mc), kappa, kTheta};
}

double annulus_probability(int k, int n_prime, double alpha, const ModelConfig& config) {
    config.validate();
    if (k < 2 || n_prime < 1) throw DomainError("annulus_probability: need k >= 2 and n' >= 1");
    const double a = 0.5 * config.d;
    const double b = config.nu + 0.5;
    const double outer = std::min(1.0, n_prime * alpha / (k - 1));
    const double inner = std::min(1.0, n_prime * alpha / k);
    return beta_reg(outer, a, b) - beta_reg(inner, a, b);
}

double sobolev_partial_sum(const ModelConfig& config, double p, int N, int m_quad) {
    config.validate_positive_nu();
    check_quadrature(m_quad);
    if (N < 0) throw DomainError("sobolev_partial_sum: N must be non-negative");
    const double gamma = config.gamma_nu();
    const LinkFunction& link = config.link;
    const std::vector<double> cuts = link.breakpoints();
    const specfun::PanelIntegrator integrator(gamma - 0.5, cuts, m_quad);
    const auto f = [&](double t) { return link.eval_unchecked(t); };
    double sum = 0.0;
    for (int n = 0; n <= N; ++n) {
        const double lambda = eigenvalue_with(integrator, f, gamma, n);
        const double nu_n = n * (n + 2.0 * config.nu + config.d - 1.0);
        const double weight = 1.0 + (nu_n > 0.0 ? std::pow(nu_n, p) : 0.0);
        sum += lambda * lambda * static_cast<double>(multiplicity(n, config.d)) * weight;
    }
    return sum;
}

}  // namespace ballrgg::spectrum
