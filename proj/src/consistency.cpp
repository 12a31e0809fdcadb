#include "ballrgg/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gegenbauer.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "ballrgg/kernels.hpp"
#include "ballrgg/matrix_ops.hpp"
#include "ballrgg/rng.hpp"
#include "ballrgg/sampling.hpp"
#include "ballrgg/specfun.hpp"
#include "ballrgg/spectrum.hpp"

namespace ballrgg::consistency {

namespace {

namespace bq = boost::math::quadrature;

const ModelConfig kBase{3, 0.5, link::Constant{0.5}};

ModelConfig with_link(LinkFunction link) {
    ModelConfig c = kBase;
    c.link = std::move(link);
    return c;
}

// Adaptive Gauss-Kronrod on each piece between consecutive cuts.
double adaptive(const std::function<double(double)>& f, std::vector<double> cuts) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        s += bq::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-14);
    }
    return s;
}

// lambda*_n from its defining integral with Boost's Gegenbauer polynomials.
double eigenvalue_oracle(const std::function<double(double)>& f, std::vector<double> cuts, int n, double gamma) {
    const double at_one = boost::math::gegenbauer(n, gamma, 1.0);
    const auto integrand = [&](double t) {
        return f(t) * boost::math::gegenbauer(n, gamma, t) / at_one * std::pow(1.0 - t * t, gamma - 0.5);
    };
    cuts.insert(cuts.begin(), -1.0);
    cuts.push_back(1.0);
    return adaptive(integrand, cuts) / boost::math::beta(0.5, gamma + 0.5);
}

// P_n(x, y) = c_nu (n + gamma)/gamma  int G_n(u + s t) (1 - t^2)^{nu - 1} dt,
// integrated in t = sin(th) to keep 1 - t^2 accurate near the endpoints.
double kernel_oracle(int n, double nu, double gamma, double u, double s) {
    const double c_nu = boost::math::tgamma(nu + 0.5) / (std::sqrt(std::numbers::pi) * boost::math::tgamma(nu));
    bq::tanh_sinh<double> ts;
    const double h = 0.5 * std::numbers::pi;
    const double integral = ts.integrate(
        [&](double th) {
            return boost::math::gegenbauer(n, gamma, u + s * std::sin(th)) * std::pow(std::cos(th), 2.0 * nu - 1.0);
        },
        -h, h, 1e-15);
    return c_nu * (n + gamma) / gamma * integral;
}

std::vector<double> random_ball_point(rng::Stream& st, int d, double max_norm) {
    std::vector<double> p(static_cast<std::size_t>(d));
    double nrm = 0.0;
    for (auto& v : p) {
        v = st.normal();
        nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    const double r = max_norm * std::cbrt(st.uniform());
    for (auto& v : p) v *= r / nrm;
    return p;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

class Report {
public:
    void add(std::string name, double value, double tol, std::string detail = {}) {
        checks_.push_back({std::move(name), std::isfinite(value) && value <= tol, value, tol, std::move(detail)});
    }

    template <class F>
    void guarded(const std::string& name, double tol, F body) {
        try {
            body();
        } catch (const std::exception& e) {
            checks_.push_back({name, false, std::nan(""), tol, std::string("exception: ") + e.what()});
        }
    }

    std::vector<CheckResult> take() { return std::move(checks_); }

private:
    std::vector<CheckResult> checks_;
};

}  // namespace

std::vector<CheckResult> consistency_suite(std::uint64_t seed, const Hooks& hooks) {
    const auto beta_reg = hooks.beta_reg ? hooks.beta_reg : [](double x, double a, double b) {
        return specfun::beta_reg(x, a, b);
    };
    rng::Stream st(rng::stream_key(seed, {0xC0}));
    Report rep;

    rep.guarded("special.arcsine_beta_reg", 1e-10, [&] {
        rep.add("special.arcsine_beta_reg", std::abs(beta_reg(0.25, 0.5, 0.5) - 1.0 / 3.0), 1e-10,
                "I_0.25(1/2,1/2) vs 1/3");
    });

    rep.guarded("special.beta_reg_quadrature", 1e-10, [&] {
        bq::tanh_sinh<double> ts;
        const double oracle =
            ts.integrate([](double t) { return std::sqrt(t) * std::pow(1.0 - t, 1.5); }, 0.0, 0.3) /
            boost::math::beta(1.5, 2.5);
        rep.add("special.beta_reg_quadrature", std::abs(beta_reg(0.3, 1.5, 2.5) - oracle), 1e-10,
                fmt::format("I_0.3(1.5,2.5) vs integral {}", oracle));
    });

    rep.guarded("special.beta_reg_inv_arcsine", 1e-10, [&] {
        rep.add("special.beta_reg_inv_arcsine", std::abs(specfun::beta_reg_inv(1.0 / 3.0, 0.5, 0.5) - 0.25), 1e-10);
    });

    rep.guarded("special.beta_inverse_roundtrip", 1e-9, [&] {
        double worst = 0.0;
        for (double a : {0.5, 1.5, 2.5, 5.0}) {
            for (double b : {0.5, 1.0, 2.5, 5.0}) {
                for (double p : {0.01, 0.1, 0.5, 0.9, 0.99}) {
                    worst = std::max(worst, std::abs(beta_reg(specfun::beta_reg_inv(p, a, b), a, b) - p));
                }
            }
        }
        rep.add("special.beta_inverse_roundtrip", worst, 1e-9, "max over (a,b,p) grid");
    });

    rep.guarded("special.gegenbauer_coefficients", 1e-12, [&] {
        // C_n^g(t) = sum_k (-1)^k Gamma(n-k+g) / (Gamma(g) k! (n-2k)!) (2t)^{n-2k}
        const int n = 4;
        const double g = 1.5, t = 0.3;
        double s = 0.0;
        for (int k = 0; 2 * k <= n; ++k) {
            s += (k % 2 ? -1.0 : 1.0) * boost::math::tgamma(n - k + g) /
                 (boost::math::tgamma(g) * boost::math::factorial<double>(k) * boost::math::factorial<double>(n - 2 * k)) *
                 std::pow(2.0 * t, n - 2 * k);
        }
        rep.add("special.gegenbauer_coefficients", std::abs(specfun::gegenbauer(n, g, t) - s) / std::abs(s), 1e-12,
                fmt::format("C_4^1.5(0.3) vs expansion {}", s));
    });

    rep.guarded("special.gauss_jacobi_beta_integral", 1e-12, [&] {
        const auto rule = specfun::gauss_jacobi(8, 0.5);
        rep.add("special.gauss_jacobi_beta_integral",
                std::abs(rule.integrate([](double t) { return t * t; }) - boost::math::beta(1.5, 1.5)), 1e-12);
    });

    rep.guarded("sampling.norm_beta_mean", 0.01, [&] {
        const ModelConfig cfg{3, 1.5, link::Constant{0.5}};
        const auto sample = sample_latent(cfg, 100000, rng::stream_key(seed, {1}), Exec::Serial);
        const double mean = sample.norms().squaredNorm() / 1e5;
        rep.add("sampling.norm_beta_mean", std::abs(mean - 1.5 / 3.5), 0.01, fmt::format("mean |X|^2 = {}", mean));
    });

    rep.guarded("spectrum.identity_link_eigenvalue", 1e-10, [&] {
        const double gamma = kBase.gamma_nu();
        const double v = spectrum::eigenvalue([](double t) { return t; }, {}, kBase, 1);
        rep.add("spectrum.identity_link_eigenvalue", std::abs(v - 1.0 / (2.0 * (gamma + 1.0))), 1e-10);
    });

    for (const auto& [name, link] : std::vector<std::pair<std::string, LinkFunction>>{
             {"threshold", link::Threshold{0.1}}, {"rdpg", link::Rdpg{}}, {"logistic", link::Logistic{-5.0}}}) {
        const std::string check = "spectrum.eigenvalues_adaptive_" + name;
        rep.guarded(check, 1e-8, [&] {
            const ModelConfig cfg = with_link(link);
            double worst = 0.0;
            for (int n = 0; n <= 10; ++n) {
                const double oracle =
                    eigenvalue_oracle([&](double t) { return cfg.link(t); }, cfg.link.breakpoints(), n, cfg.gamma_nu());
                worst = std::max(worst, std::abs(spectrum::eigenvalue(cfg, n) - oracle));
            }
            rep.add(check, worst, 1e-8, "max over n = 0..10");
        });
    }

    rep.guarded("spectrum.recovery_scale_identity", 1e-10, [&] {
        const auto s = spectrum::spectrum_summary(with_link(link::Rdpg{}));
        rep.add("spectrum.recovery_scale_identity", std::abs(s.recovery_scale - 5.0), 1e-10,
                fmt::format("scale {}, c_tilde {}", s.recovery_scale, s.c_tilde));
    });

    rep.guarded("spectrum.reproducing_kernel_adaptive", 1e-8, [&] {
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const auto x = random_ball_point(st, 3, 0.95);
            const auto y = random_ball_point(st, 3, 0.95);
            const double s = std::sqrt(1.0 - dot(x, x)) * std::sqrt(1.0 - dot(y, y));
            const double oracle = kernel_oracle(3, kBase.nu, kBase.gamma_nu(), dot(x, y), s);
            worst = std::max(worst, std::abs(spectrum::reproducing_kernel(kBase, 3, x, y) - oracle));
        }
        rep.add("spectrum.reproducing_kernel_adaptive", worst, 1e-8, "n = 3, 5 random pairs");
    });

    rep.guarded("spectrum.rec_form_identity", 1e-9, [&] {
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const auto x = random_ball_point(st, 3, 1.0);
            const auto y = random_ball_point(st, 3, 1.0);
            worst = std::max(worst, std::abs(spectrum::reproducing_kernel(kBase, 1, x, y) / 5.0 - dot(x, y)));
        }
        rep.add("spectrum.rec_form_identity", worst, 1e-9, "50 random pairs");
    });

    rep.guarded("spectrum.rdpg_reconstruct", 1e-8, [&] {
        const ModelConfig cfg = with_link(link::Rdpg{});
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const auto x = random_ball_point(st, 3, 1.0);
            const auto y = random_ball_point(st, 3, 1.0);
            worst = std::max(worst, std::abs(spectrum::kernel_reconstruct(cfg, x, y, 1) - 0.5 * (1.0 - dot(x, y))));
        }
        rep.add("spectrum.rdpg_reconstruct", worst, 1e-8, "N = 1, 10 random pairs");
    });

    rep.guarded("spectrum.degree_function_mc", 4.0, [&] {
        const ModelConfig cfg = with_link(link::Threshold{0.1});
        const std::vector<double> x{0.8, 0.0, 0.0};
        const std::int64_t n_mc = 100000;
        const double closed = spectrum::degree_function_threshold(0.8, 0.1, cfg);
        const double mc = spectrum::degree_function_mc(cfg.link, x, cfg, n_mc, rng::stream_key(seed, {2}));
        const double se = std::sqrt(closed * (1.0 - closed) / static_cast<double>(n_mc));
        rep.add("spectrum.degree_function_mc", std::abs(closed - mc) / se, 4.0,
                fmt::format("closed {} mc {} (in standard errors)", closed, mc));
    });

    rep.guarded("spectrum.degree_cdf_sampling", 4.0, [&] {
        const ModelConfig cfg = with_link(link::Threshold{0.1});
        const double closed = spectrum::degree_cdf_threshold(0.3, 0.7, 0.1, cfg);
        const auto sample = sample_latent(cfg, 100000, rng::stream_key(seed, {3}), Exec::Serial);
        double hits = 0.0;
        for (double r : sample.norms()) hits += (r > 0.3 && r < 0.7) ? 1.0 : 0.0;
        const double frac = hits / 1e5;
        const double se = std::sqrt(closed * (1.0 - closed) / 1e5);
        rep.add("spectrum.degree_cdf_sampling", std::abs(frac - closed) / se, 4.0,
                fmt::format("closed {} sampled {} (in standard errors)", closed, frac));
    });

    rep.guarded("spectrum.degree_density_mass", 1e-6, [&] {
        const ModelConfig cfg = with_link(link::Threshold{0.1});
        const double top = spectrum::degree_range_max_threshold(0.1, cfg);
        // h = top u^2 removes the h^{-1/2} singularity at 0.
        const auto f = [&](double u) {
            const double h = top * u * u;
            return spectrum::degree_density_threshold(h, 0.1, cfg) * 2.0 * top * u;
        };
        const double mass = bq::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-13);
        const double expected = 1.0 - boost::math::ibeta(1.5, 1.0, 0.01);
        rep.add("spectrum.degree_density_mass", std::abs(mass - expected), 1e-6,
                fmt::format("mass {} vs 1 - I_tau^2 = {}", mass, expected));
    });

    rep.guarded("spectrum.degree_density_derivative", 1e-5, [&] {
        const ModelConfig cfg = with_link(link::Threshold{0.1});
        const double h = 0.2, e = 1e-5;
        const double fd = (spectrum::degree_distribution_threshold(h + e, 0.1, cfg) -
                           spectrum::degree_distribution_threshold(h - e, 0.1, cfg)) /
                          (2.0 * e);
        const double dens = spectrum::degree_density_threshold(h, 0.1, cfg);
        rep.add("spectrum.degree_density_derivative", std::abs(fd - dens) / dens, 1e-5,
                fmt::format("density {} vs central difference {}", dens, fd));
    });

    rep.guarded("linalg.complete_graph_spectrum", 1e-12, [&] {
        std::vector<std::uint8_t> adj(16, 1);
        for (int i = 0; i < 4; ++i) adj[static_cast<std::size_t>(5 * i)] = 0;
        const auto g = Graph::from_adjacency(4, adj);
        const Eigen::VectorXd v = linalg::sym_eigenvalues(linalg::that_n_matrix(g));
        const double worst = std::max({std::abs(v[0] - 0.75), std::abs(v[1] + 0.25), std::abs(v[2] + 0.25),
                                       std::abs(v[3] + 0.25)});
        rep.add("linalg.complete_graph_spectrum", worst, 1e-12);
    });

    rep.guarded("linalg.eigen_residual", 1e-9, [&] {
        Eigen::MatrixXd m(50, 50);
        for (Eigen::Index j = 0; j < 50; ++j) {
            for (Eigen::Index i = 0; i <= j; ++i) m(i, j) = m(j, i) = st.uniform() - 0.5;
        }
        const auto e = linalg::sym_eigen(m);
        const double res = (m * e.vectors - e.vectors * e.values.asDiagonal()).norm();
        rep.add("linalg.eigen_residual", res, 1e-9, "random symmetric 50 x 50");
    });

    rep.guarded("linalg.delta2_hand", 1e-15, [&] {
        const std::vector<double> a{1.0, 0.5}, b{0.9};
        rep.add("linalg.delta2_hand", std::abs(linalg::delta2(a, b) - std::sqrt(0.26)), 1e-15);
    });

    rep.guarded("kernels.kernel_matrix_recompute", 1e-14, [&] {
        const ModelConfig cfg = with_link(link::Logistic{-5.0});
        const auto sample = sample_latent(cfg, 60, rng::stream_key(seed, {4}), Exec::Serial);
        const Eigen::MatrixXd tn = linalg::tn_matrix(sample, Exec::Serial);
        const Eigen::MatrixXd g = gram_population(sample, Exec::Serial);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < 60; ++i) {
            for (Eigen::Index j = 0; j < 60; ++j) {
                const double ip = sample.points().row(i).dot(sample.points().row(j));
                const double want = i == j ? 0.0 : cfg.link(ip) / 60.0;
                const double want_g = i == j ? 0.0 : ip / 60.0;
                worst = std::max({worst, std::abs(tn(i, j) - want), std::abs(g(i, j) - want_g)});
            }
        }
        rep.add("kernels.kernel_matrix_recompute", worst, 1e-14, "T_n and G* vs direct recomputation");
    });

    return rep.take();
}

}  // namespace ballrgg::consistency
