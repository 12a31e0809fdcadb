#include "ballrgg/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "ballrgg/errors.hpp"

namespace ballrgg::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Lentz evaluation of the continued fraction for I_x(a, b); converges
// rapidly for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
    constexpr int kMaxIter = 2000;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw ConvergenceError("beta_reg: continued fraction did not converge");
}

void check_shapes(double a, double b, const char* who) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError(std::string(who) + ": shape parameters must be positive");
    }
}

// Monic three-term recurrence coefficients of the Jacobi polynomials for
// (1-t)^alpha (1+t)^beta: p_{k+1} = (t - diag[k]) p_k - offsq[k] p_{k-1}.
struct JacobiRecurrence {
    std::vector<double> diag;   // size m
    std::vector<double> offsq;  // offsq[k] = beta_k, k = 1..m (index 0 unused)
    double mu0 = 0.0;
};

JacobiRecurrence jacobi_recurrence(int m, double alpha, double beta) {
    JacobiRecurrence r;
    r.diag.resize(static_cast<std::size_t>(m));
    r.offsq.assign(static_cast<std::size_t>(m) + 1, 0.0);
    const double s = alpha + beta;
    r.diag[0] = (beta - alpha) / (s + 2.0);
    for (int k = 1; k < m; ++k) {
        r.diag[k] = (beta * beta - alpha * alpha) / ((2.0 * k + s) * (2.0 * k + s + 2.0));
    }
    r.offsq[1] = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
    for (int k = 2; k <= m; ++k) {
        const double t = 2.0 * k + s;
        r.offsq[k] = 4.0 * k * (k + alpha) * (k + beta) * (k + s) / (t * t * (t + 1.0) * (t - 1.0));
    }
    r.mu0 = std::exp((s + 1.0) * std::numbers::ln2 + log_beta(alpha + 1.0, beta + 1.0));
    return r;
}

// Orthonormal polynomial q_m(x) and its derivative; also accumulates
// sum_{k<m} q_k(x)^2 for the Christoffel weight.
struct OrthoEval {
    double value;
    double derivative;
    double christoffel_sum;
};

OrthoEval eval_orthonormal(const JacobiRecurrence& r, int m, double x) {
    double q_prev = 0.0;
    double q = 1.0 / std::sqrt(r.mu0);
    double dq_prev = 0.0;
    double dq = 0.0;
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
        sum += q * q;
        const double bk = k > 0 ? std::sqrt(r.offsq[k]) : 0.0;
        const double bk1 = std::sqrt(r.offsq[k + 1]);
        const double q_next = ((x - r.diag[k]) * q - bk * q_prev) / bk1;
        const double dq_next = (q + (x - r.diag[k]) * dq - bk * dq_prev) / bk1;
        q_prev = q;
        q = q_next;
        dq_prev = dq;
        dq = dq_next;
    }
    return {q, dq, sum};
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("log_gamma: argument must be positive and finite");
    }
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta_reg(double x, double a, double b) {
    check_shapes(a, b, "beta_reg");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta_reg: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::clamp(front * beta_continued_fraction(x, a, b) / a, 0.0, 1.0);
    }
    return std::clamp(1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b, 0.0, 1.0);
}

double beta_pdf(double x, double a, double b) {
    check_shapes(a, b, "beta_pdf");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta_pdf: x must lie in [0, 1]");
    if (x == 0.0) {
        if (a < 1.0) return std::numeric_limits<double>::infinity();
        return a == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
    }
    if (x == 1.0) {
        if (b < 1.0) return std::numeric_limits<double>::infinity();
        return b == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
    }
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

double beta_reg_inv(double p, double a, double b) {
    check_shapes(a, b, "beta_reg_inv");
    if (std::isnan(p)) throw DomainError("beta_reg_inv: p is NaN");
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;

    constexpr int kMaxIter = 200;
    double lo = 0.0;
    double hi = 1.0;
    double x = a / (a + b);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        const double f = beta_reg(x, a, b) - p;
        if (f == 0.0) return x;
        if (f < 0.0) lo = x; else hi = x;
        if (std::abs(f) < 1e-15 || hi - lo <= kEps * x) return x;

        const double dens = beta_pdf(x, a, b);
        double next = (dens > 0.0 && std::isfinite(dens)) ? x - f / dens : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) return x;
        x = next;
    }
    return x;
}

double gegenbauer(int n, double gamma, double t) {
    if (n < 0) throw DomainError("gegenbauer: degree must be non-negative");
    if (n == 0) return 1.0;
    double g_prev = 1.0;
    double g = 2.0 * gamma * t;
    for (int k = 2; k <= n; ++k) {
        const double g_next = (2.0 * t * (k + gamma - 1.0) * g - (k + 2.0 * gamma - 2.0) * g_prev) / k;
        g_prev = g;
        g = g_next;
    }
    return g;
}

double QuadratureRule::integrate(const std::function<double(double)>& g) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * g(nodes[i]);
    return sum;
}

QuadratureRule gauss_jacobi(int m, double exponent) {
    return gauss_jacobi(m, exponent, exponent);
}

QuadratureRule gauss_jacobi(int m, double alpha, double beta) {
    if (m < 1) throw DomainError("gauss_jacobi: need at least one node");
    if (!(alpha > -1.0) || !(beta > -1.0)) {
        throw DomainError("gauss_jacobi: exponents must exceed -1");
    }
    const JacobiRecurrence rec = jacobi_recurrence(m, alpha, beta);

    QuadratureRule rule;
    rule.alpha = alpha;
    rule.beta = beta;
    rule.nodes.resize(static_cast<std::size_t>(m));
    rule.weights.resize(static_cast<std::size_t>(m));

    // Golub-Welsch eigenvalues give the starting nodes.
    Eigen::VectorXd diag(m);
    Eigen::VectorXd sub(std::max(m - 1, 1));
    for (int k = 0; k < m; ++k) diag[k] = rec.diag[k];
    for (int k = 1; k < m; ++k) sub[k - 1] = std::sqrt(rec.offsq[k]);
    Eigen::VectorXd start(m);
    if (m == 1) {
        start[0] = rec.diag[0];
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub.head(m - 1), Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw ConvergenceError("gauss_jacobi: tridiagonal eigensolve failed");
        }
        start = solver.eigenvalues();
    }

    for (int i = 0; i < m; ++i) {
        double x = start[i];
        bool converged = false;
        for (int it = 0; it < 30; ++it) {
            const OrthoEval e = eval_orthonormal(rec, m, x);
            if (e.derivative == 0.0) break;
            const double dx = e.value / e.derivative;
            x -= dx;
            if (std::abs(dx) <= 4.0 * kEps * std::max(1.0, std::abs(x))) {
                converged = true;
                break;
            }
        }
        if (!converged || !(x > -1.0 && x < 1.0) || (i > 0 && !(x > rule.nodes[i - 1]))) {
            throw ConvergenceError("gauss_jacobi: node solve did not converge", i);
        }
        rule.nodes[i] = x;
        rule.weights[i] = 1.0 / eval_orthonormal(rec, m, x).christoffel_sum;
    }
    return rule;
}

PanelIntegrator::PanelIntegrator(double exponent, std::span<const double> breakpoints, int m) {
    std::vector<double> cuts;
    for (double b : breakpoints) {
        if (b > -1.0 && b < 1.0) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    if (cuts.empty()) {
        const QuadratureRule rule = gauss_jacobi(m, exponent);
        nodes_ = rule.nodes;
        weights_ = rule.weights;
        return;
    }

    std::vector<double> edges;
    edges.push_back(-1.0);
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(1.0);

    const QuadratureRule left = gauss_jacobi(m, 0.0, exponent);   // singular end at -1
    const QuadratureRule right = gauss_jacobi(m, exponent, 0.0);  // singular end at +1
    const QuadratureRule inner = gauss_jacobi(m, 0.0, 0.0);

    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double lo = edges[p];
        const double hi = edges[p + 1];
        const double half = 0.5 * (hi - lo);
        const bool touches_left = (p == 0);
        const bool touches_right = (p + 2 == edges.size());
        const QuadratureRule& rule = touches_left ? left : (touches_right ? right : inner);
        const double endpoint_scale = (touches_left || touches_right) ? std::pow(half, exponent) : 1.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const double t = lo + half * (rule.nodes[i] + 1.0);
            // Remaining smooth factor of (1-t)^e (1+t)^e on this panel.
            double smooth;
            if (touches_left) smooth = std::pow(1.0 - t, exponent);
            else if (touches_right) smooth = std::pow(1.0 + t, exponent);
            else smooth = std::pow((1.0 - t) * (1.0 + t), exponent);
            nodes_.push_back(t);
            weights_.push_back(rule.weights[i] * half * endpoint_scale * smooth);
        }
    }
}

double PanelIntegrator::integrate(const std::function<double(double)>& g) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * g(nodes_[i]);
    return sum;
}

}  // namespace ballrgg::specfun
