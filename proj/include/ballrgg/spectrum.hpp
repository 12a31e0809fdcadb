#pragma once

// Analytic side of the model: eigenvalues of the integral operator T_W,
// their multiplicities, the spectral gap around lambda*_1, reproducing
// kernels of the degree-n orthogonal-polynomial spaces, degree functions
// and power-law tail quantities.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ballrgg/model.hpp"

namespace ballrgg::spectrum {

inline constexpr int kDefaultQuadrature = 200;
inline constexpr int kDefaultMaxDegree = 40;

/// lambda*_n for an arbitrary bounded link g, split at `breakpoints`.
/// c_gamma = 1 / B(1/2, gamma_nu + 1/2) makes lambda*_0 of g = 1 equal 1.
double eigenvalue(const std::function<double(double)>& g, std::span<const double> breakpoints,
                  const ModelConfig& config, int n, int m_quad = kDefaultQuadrature);

/// lambda*_n(f) for the config's own link.
double eigenvalue(const ModelConfig& config, int n, int m_quad = kDefaultQuadrature);

/// dim Y_n = binomial(n + d - 1, n).
std::int64_t multiplicity(int n, int d);

struct SpectrumEntry {
    int n;
    double lambda_star;
    std::int64_t multiplicity;
};

struct SpectrumSummary {
    std::vector<SpectrumEntry> lambdas;  ///< n = 0..N_max
    double gamma_nu = 0.0;
    double gap = 0.0;             ///< Delta*, distance from lambda*_1 to the rest (0 included)
    double c_nu = 0.0;            ///< Gamma(nu + 1/2) / (sqrt(pi) Gamma(nu))
    double c_tilde = 0.0;         ///< c_nu * B(1/2, nu); equals 1 analytically
    double recovery_scale = 0.0;  ///< 2 c_tilde (1 + gamma_nu)
    bool gap_degenerate = false;  ///< gap < 1e-8; Gram estimation refuses

    double lambda(int n) const { return lambdas.at(static_cast<std::size_t>(n)).lambda_star; }
    double lambda1() const { return lambda(1); }
    int max_degree() const noexcept { return static_cast<int>(lambdas.size()) - 1; }
};

inline constexpr double kGapDegenerateThreshold = 1e-8;

/// Eigenvalues 0..N_max plus gap and normalization constants. Requires
/// nu > 0 and N_max >= 10.
SpectrumSummary spectrum_summary(const ModelConfig& config, int max_degree = kDefaultMaxDegree,
                                 int m_quad = kDefaultQuadrature);

/// Operator eigenvalues repeated by multiplicity, ordered by decreasing
/// absolute value and truncated (or zero padded) to `count` entries.
std::vector<double> expanded_spectrum(const SpectrumSummary& summary, std::size_t count);

/// CSV with header "n,lambda_star,multiplicity".
void write_spectrum_csv(std::ostream& os, const SpectrumSummary& summary);

/// P^nu_n(x, y) through the one-dimensional integral with weight
/// (1 - t^2)^(nu - 1). Requires nu > 0 and |x|, |y| <= 1.
double reproducing_kernel(const ModelConfig& config, int n, std::span<const double> x, std::span<const double> y,
                          int m_quad = kDefaultQuadrature);

/// sum_{n <= N} lambda*_n P^nu_n(x, y).
double kernel_reconstruct(const ModelConfig& config, std::span<const double> x, std::span<const double> y, int N,
                          int m_quad = kDefaultQuadrature);

/// Closed-form degree function of the threshold link at a point of norm t:
/// 1/2 I_{1 - (tau / max(t, tau))^2}(nu + d/2, 1/2).
double degree_function_threshold(double t, double tau, const ModelConfig& config);

/// Monte Carlo mean of f(<x, Y>), Y ~ F_nu.
double degree_function_mc(const LinkFunction& link, std::span<const double> x, const ModelConfig& config,
                          std::int64_t n_mc, std::uint64_t seed);

/// P(d_W(X) = 0) = I_{tau^2}(d/2, nu + 1/2) for the threshold link.
double isolated_mass_threshold(double tau, const ModelConfig& config);

/// P(d_W(t1 N) <= d_W(X) <= d_W(t2 N)) = I_{t2^2} - I_{t1^2} with shapes
/// (d/2, nu + 1/2). Requires 0 < tau < t1 <= t2 <= 1.
double degree_cdf_threshold(double t1, double t2, double tau, const ModelConfig& config);

/// Upper end h* = d_W(1 N) of the degree function's range.
double degree_range_max_threshold(double tau, const ModelConfig& config);

/// Distribution function P(d_W(X) <= h) = I_{g(h)}(d/2, nu + 1/2),
/// g(h) = tau^2 / (1 - I^{-1}(2h; nu + d/2, 1/2)), for h in (0, h*].
double degree_distribution_threshold(double h, double tau, const ModelConfig& config);

/// Density of d_W(X) on (0, h*), the derivative of the distribution above.
double degree_density_threshold(double h, double tau, const ModelConfig& config);

struct PowerLawTail {
    double probability;  ///< F_nu({x : d_f(x) >= h})
    double kappa;        ///< core mass I_alpha(d/2, nu + 1/2)
    double theta;        ///< reference tail exponent, 1.5
};

/// Monte Carlo F_nu({x : d_f(x) >= h}) for the power-law link with
/// resolution alpha: n_mc outer points, each degree averaged over a common
/// set of n_mc draws. For h <= kappa the answer is exactly 1 (every point
/// connects to the whole core); h must be < 1 otherwise.
PowerLawTail powerlaw_tail(double h, double alpha, const ModelConfig& config, std::int64_t n_mc,
                           std::uint64_t seed);

/// Annulus probability P((k-1)/n' <= d~_f <= k/n')
///   = I_{n' alpha/(k-1)}(d/2, nu + 1/2) - I_{n' alpha/k}(d/2, nu + 1/2)
/// with arguments clipped to [0, 1]. Requires k >= 2.
double annulus_probability(int k, int n_prime, double alpha, const ModelConfig& config);

/// sum_{n <= N} |lambda*_n|^2 d_n (1 + nu_n^p), nu_n = n (n + 2 nu + d - 1).
double sobolev_partial_sum(const ModelConfig& config, double p, int N, int m_quad = kDefaultQuadrature);

}  // namespace ballrgg::spectrum
