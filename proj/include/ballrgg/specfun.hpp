#pragma once

// Special functions: log-Gamma, regularized incomplete Beta and its inverse,
// Gegenbauer polynomials and Gauss-Jacobi quadrature.
//
// Everything here is a pure function of its arguments and safe to call from
// any number of threads.

#include <functional>
#include <span>
#include <vector>

namespace ballrgg::specfun {

/// ln Gamma(x) for x > 0. Throws DomainError otherwise.
double log_gamma(double x);

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b).
double log_beta(double a, double b);

/// Regularized incomplete Beta function I_x(a, b).
///
/// Evaluated with the Lentz continued fraction on whichever side of the mean
/// converges fastest, using I_x(a,b) = 1 - I_{1-x}(b,a). Throws DomainError
/// for x outside [0,1] or non-positive shapes.
double beta_reg(double x, double a, double b);

/// Density of Beta(a, b) at x, i.e. d/dx I_x(a, b).
double beta_pdf(double x, double a, double b);

/// Inverse of x -> I_x(a, b). Safeguarded Newton inside a shrinking bisection
/// bracket; |I_x - p| <= 1e-10 on return. p is clamped to [0, 1].
double beta_reg_inv(double p, double a, double b);

/// Gegenbauer polynomial G_n^gamma(t) via the forward three-term recurrence
///   n G_n = 2t(n + gamma - 1) G_{n-1} - (n + 2 gamma - 2) G_{n-2},
/// G_0 = 1, G_1 = 2 gamma t.
double gegenbauer(int n, double gamma, double t);

/// Gauss-Jacobi rule on [-1, 1] for the weight (1-t)^alpha (1+t)^beta.
struct QuadratureRule {
    std::vector<double> nodes;    ///< strictly increasing, inside (-1, 1)
    std::vector<double> weights;  ///< all positive
    double alpha = 0.0;
    double beta = 0.0;

    /// Symmetric exponent, meaningful when alpha == beta.
    double exponent() const noexcept { return alpha; }
    std::size_t size() const noexcept { return nodes.size(); }

    double integrate(const std::function<double(double)>& g) const;
};

/// m-point rule for the symmetric weight (1 - t^2)^exponent, exponent > -1.
/// Exact for polynomials of degree <= 2m - 1.
QuadratureRule gauss_jacobi(int m, double exponent);

/// m-point rule for (1-t)^alpha (1+t)^beta, alpha, beta > -1.
QuadratureRule gauss_jacobi(int m, double alpha, double beta);

/// Integrates g(t) (1 - t^2)^exponent over [-1, 1], splitting at the given
/// interior breakpoints where g is discontinuous or has a kink. Each panel
/// gets its own Gauss rule through an affine map; panels touching +-1 carry
/// the endpoint singularity in a one-sided Jacobi weight so accuracy stays
/// spectral on every smooth piece.
///
/// Construction precomputes flattened nodes/weights; integrate() is cheap.
class PanelIntegrator {
public:
    PanelIntegrator(double exponent, std::span<const double> breakpoints, int m);

    double integrate(const std::function<double(double)>& g) const;

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

}  // namespace ballrgg::specfun
