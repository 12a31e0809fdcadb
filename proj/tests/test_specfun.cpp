#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ballrgg/errors.hpp"
#include "ballrgg/specfun.hpp"

using namespace ballrgg;
using namespace ballrgg::specfun;

namespace {

// Explicit coefficients: C_n^g(t) = sum_k (-1)^k Gamma(n-k+g) / (Gamma(g) k! (n-2k)!) (2t)^{n-2k}.
double gegenbauer_expansion(int n, double g, double t) {
    double s = 0.0;
    for (int k = 0; 2 * k <= n; ++k) {
        s += (k % 2 ? -1.0 : 1.0) * boost::math::tgamma(n - k + g) /
             (boost::math::tgamma(g) * boost::math::factorial<double>(k) * boost::math::factorial<double>(n - 2 * k)) *
             std::pow(2.0 * t, n - 2 * k);
    }
    return s;
}

}  // namespace

TEST_SUITE("specfun") {

TEST_CASE("log_gamma at exact points") {
    CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(log_gamma(0.5) == doctest::Approx(0.5723649429247001).epsilon(1e-14));
    CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
}

TEST_CASE("beta_reg endpoints and closed forms") {
    CHECK(beta_reg(0.0, 2.0, 3.0) == 0.0);
    CHECK(beta_reg(1.0, 2.0, 3.0) == 1.0);
    CHECK(std::abs(beta_reg(0.25, 0.5, 0.5) - 1.0 / 3.0) < 1e-12);
    for (double x : {0.01, 0.2, 0.6, 0.99}) {
        const double arcsine = 2.0 / std::numbers::pi * std::asin(std::sqrt(x));
        CHECK(std::abs(beta_reg(x, 0.5, 0.5) - arcsine) < 1e-12);
    }
    CHECK_THROWS_AS(beta_reg(-0.1, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(beta_reg(1.1, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(beta_reg(0.5, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(beta_reg(0.5, 1.0, -2.0), DomainError);
}

TEST_CASE("beta_reg against the defining integral") {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double oracle =
        ts.integrate([](double t) { return std::sqrt(t) * std::pow(1.0 - t, 1.5); }, 0.0, 0.3) / boost::math::beta(1.5, 2.5);
    CHECK(std::abs(beta_reg(0.3, 1.5, 2.5) - oracle) < 1e-12);
}

TEST_CASE("beta_reg matches boost ibeta on a grid and is monotone") {
    for (double a : {0.5, 1.0, 1.5, 2.5, 5.0, 20.0}) {
        for (double b : {0.5, 1.0, 1.5, 2.5, 5.0, 20.0}) {
            double prev = 0.0;
            for (int k = 0; k <= 100; ++k) {
                const double x = k / 100.0;
                const double v = beta_reg(x, a, b);
                CHECK(std::abs(v - boost::math::ibeta(a, b, x)) < 1e-12);
                CHECK(v >= prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("beta_reg_inv inverts beta_reg") {
    CHECK(beta_reg_inv(0.0, 2.0, 2.0) == 0.0);
    CHECK(beta_reg_inv(1.0, 2.0, 2.0) == 1.0);
    CHECK(std::abs(beta_reg_inv(1.0 / 3.0, 0.5, 0.5) - 0.25) < 1e-10);
    CHECK(std::abs(beta_reg_inv(0.5, 2.0, 2.0) - 0.5) < 1e-10);
    for (double a : {0.5, 1.0, 1.5, 2.5, 5.0}) {
        for (double b : {0.5, 1.0, 1.5, 2.5, 5.0}) {
            double prev = -1.0;
            for (int k = 0; k <= 50; ++k) {
                const double p = k / 50.0;
                const double x = beta_reg_inv(p, a, b);
                CHECK(std::abs(beta_reg(x, a, b) - p) < 1e-9);
                CHECK(x >= prev);
                prev = x;
            }
        }
    }
}

TEST_CASE("beta_pdf is the derivative of beta_reg") {
    const double a = 2.0, b = 0.5, x = 0.4, h = 1e-6;
    const double fd = (beta_reg(x + h, a, b) - beta_reg(x - h, a, b)) / (2 * h);
    CHECK(beta_pdf(x, a, b) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("gegenbauer low orders and coefficient oracle") {
    CHECK(gegenbauer(0, 1.7, 0.3) == 1.0);
    CHECK(gegenbauer(1, 1.7, 0.3) == doctest::Approx(2 * 1.7 * 0.3));
    CHECK(gegenbauer(4, 1.5, 0.3) == doctest::Approx(gegenbauer_expansion(4, 1.5, 0.3)).epsilon(1e-13));
    for (int n = 0; n <= 12; ++n) {
        for (double t : {-0.9, -0.2, 0.0, 0.45, 1.0}) {
            const double e = gegenbauer_expansion(n, 2.0, t);
            CHECK(std::abs(gegenbauer(n, 2.0, t) - e) <= 1e-11 * std::max(1.0, std::abs(e)));
        }
    }
}

TEST_CASE("gegenbauer at 1 is a binomial coefficient") {
    for (double g : {0.5, 1.0, 1.5, 3.25}) {
        for (int n = 0; n <= 40; ++n) {
            const double binom = std::exp(log_gamma(n + 2 * g) - log_gamma(n + 1.0) - log_gamma(2 * g));
            CHECK(std::abs(gegenbauer(n, g, 1.0) / binom - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("gegenbauer orthogonality under (1-t^2)^(g-1/2)") {
    const double g = 1.5;
    const auto rule = gauss_jacobi(40, g - 0.5);
    for (int n = 0; n <= 12; ++n) {
        const double nn = rule.integrate([&](double t) { return std::pow(gegenbauer(n, g, t), 2); });
        for (int m = 0; m < n; ++m) {
            const double mm = rule.integrate([&](double t) { return std::pow(gegenbauer(m, g, t), 2); });
            const double nm = rule.integrate([&](double t) { return gegenbauer(n, g, t) * gegenbauer(m, g, t); });
            CHECK(std::abs(nm) / std::sqrt(nn * mm) < 1e-9);
        }
    }
}

TEST_CASE("gauss_jacobi exactness") {
    const auto r8 = gauss_jacobi(8, 0.5);
    CHECK(std::abs(r8.integrate([](double t) { return t * t; }) - boost::math::beta(1.5, 1.5)) < 1e-12);
    for (double e : {-0.5, 0.0, 0.5, 1.0, 2.7}) {
        const auto r = gauss_jacobi(12, e);
        CHECK(std::abs(r.integrate([](double t) { return t; })) < 1e-14);
        CHECK(std::abs(r.integrate([](double) { return 1.0; }) - boost::math::beta(0.5, e + 1.0)) < 1e-12);
        // degree 2m - 1 = 23 is exact; t^22 has moment B(23/2, e+1)
        CHECK(std::abs(r.integrate([](double t) { return std::pow(t, 22); }) - boost::math::beta(11.5, e + 1.0)) < 1e-12);
        for (std::size_t i = 0; i < r.size(); ++i) {
            CHECK(r.weights[i] > 0.0);
            if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
        }
    }
}

TEST_CASE("gauss_jacobi asymmetric weight") {
    // int (1-t)^a (1+t)^b dt = 2^{a+b+1} B(a+1, b+1)
    const double a = 1.3, b = -0.4;
    const auto r = gauss_jacobi(10, a, b);
    CHECK(r.integrate([](double) { return 1.0; }) ==
          doctest::Approx(std::pow(2.0, a + b + 1) * boost::math::beta(a + 1, b + 1)).epsilon(1e-13));
    CHECK_THROWS_AS(gauss_jacobi(0, 0.5), DomainError);
    CHECK_THROWS_AS(gauss_jacobi(5, -1.0), DomainError);
}

TEST_CASE("panel integration of a step function") {
    // int_{tau}^{1} (1-t^2) dt
    const double tau = 0.1;
    const std::vector<double> cuts{tau};
    const PanelIntegrator p(1.0, cuts, 60);
    const double exact = (1.0 - 1.0 / 3.0) - (tau - tau * tau * tau / 3.0);
    CHECK(std::abs(p.integrate([&](double t) { return t >= tau ? 1.0 : 0.0; }) - exact) < 1e-14);

    const PanelIntegrator q(-0.5, std::vector<double>{-0.3, 0.4}, 60);
    CHECK(std::abs(q.integrate([](double) { return 1.0; }) - std::numbers::pi) < 1e-13);
}

TEST_CASE("concurrent evaluation is consistent") {
    std::vector<double> out(64);
#pragma omp parallel for
    for (int i = 0; i < 64; ++i) out[static_cast<std::size_t>(i)] = beta_reg_inv(i / 64.0, 1.5, 0.5);
    for (int i = 0; i < 64; ++i) CHECK(out[static_cast<std::size_t>(i)] == beta_reg_inv(i / 64.0, 1.5, 0.5));
}

}
