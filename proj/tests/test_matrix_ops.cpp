#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "ballrgg/errors.hpp"
#include "ballrgg/matrix_ops.hpp"
#include "ballrgg/rng.hpp"
#include "ballrgg/sampling.hpp"
#include "ballrgg/spectrum.hpp"

using namespace ballrgg;
using namespace ballrgg::linalg;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed) {
    rng::Stream st(seed);
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) m(i, j) = m(j, i) = st.normal();
    }
    return m;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

TEST_SUITE("matrix_ops") {

TEST_CASE("tn and that_n matrices") {
    const ModelConfig c{3, 0.5, link::Constant{0.4}};
    const auto s2 = sample_latent(c, 2, 1);
    const Eigen::MatrixXd t2 = tn_matrix(s2);
    CHECK(t2(0, 1) == doctest::Approx(0.2));
    CHECK(t2(0, 0) == 0.0);

    const ModelConfig lg{3, 0.5, link::Logistic{-2.0}};
    const auto s = sample_latent(lg, 120, 2);
    const Eigen::MatrixXd t = tn_matrix(s);
    CHECK(t == tn_matrix(s, Exec::Serial));
    for (Eigen::Index i = 0; i < 120; ++i) {
        CHECK(t(i, i) == 0.0);
        for (Eigen::Index j = 0; j < 120; ++j) {
            if (i == j) continue;
            CHECK(std::abs(t(i, j) - link_eval(lg.link, s.points().row(i).dot(s.points().row(j))) / 120.0) < 1e-14);
        }
    }

    const auto g = sample_graph(s, 3);
    const Eigen::MatrixXd a = that_n_matrix(g);
    CHECK(a == a.transpose());
    CHECK(a.sum() == doctest::Approx(std::accumulate(g.degrees().begin(), g.degrees().end(), 0) / 120.0));

    const auto empty = Graph::from_adjacency(5, std::vector<std::uint8_t>(25, 0));
    CHECK(that_n_matrix(empty).isZero(0.0));
}

TEST_CASE("complete graph spectrum") {
    std::vector<std::uint8_t> adj(16, 1);
    for (int i = 0; i < 4; ++i) adj[static_cast<std::size_t>(5 * i)] = 0;
    const auto v = sym_eigenvalues(that_n_matrix(Graph::from_adjacency(4, adj)));
    CHECK(v[0] == doctest::Approx(0.75));
    for (int k = 1; k < 4; ++k) CHECK(v[k] == doctest::Approx(-0.25));
}

TEST_CASE("sym_eigen basics") {
    const auto id = sym_eigen(Eigen::MatrixXd::Identity(4, 4));
    for (int k = 0; k < 4; ++k) CHECK(id.values[k] == doctest::Approx(1.0));
    Eigen::MatrixXd d = Eigen::Vector3d(3, 1, 2).asDiagonal();
    const auto e = sym_eigen(d);
    CHECK(e.values[0] == doctest::Approx(3));
    CHECK(e.values[1] == doctest::Approx(2));
    CHECK(e.values[2] == doctest::Approx(1));
    CHECK(e.vectors(0, 0) == doctest::Approx(1.0));
    CHECK(e.vectors(2, 1) == doctest::Approx(1.0));

    Eigen::MatrixXd ns = Eigen::MatrixXd::Zero(3, 3);
    ns(0, 1) = 1e-6;
    CHECK_THROWS_AS(sym_eigen(ns), NonSymmetricError);
    CHECK_THROWS_AS(sym_eigenvalues(ns), NonSymmetricError);
}

TEST_CASE("sym_eigen invariants on random input") {
    for (int n : {1, 2, 17, 50, 120}) {
        const Eigen::MatrixXd m = random_symmetric(n, static_cast<std::uint64_t>(n));
        const auto e = sym_eigen(m);
        CHECK((m - e.vectors * e.values.asDiagonal() * e.vectors.transpose()).norm() <= 1e-7 * m.norm());
        CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-8);
        CHECK((m * e.vectors - e.vectors * e.values.asDiagonal()).norm() < 1e-9 * std::max(1.0, m.norm()));
        for (int k = 1; k < n; ++k) CHECK(e.values[k] <= e.values[k - 1]);
        for (int k = 0; k < n; ++k) {
            Eigen::Index arg = 0;
            e.vectors.col(k).cwiseAbs().maxCoeff(&arg);
            CHECK(e.vectors(arg, k) > 0.0);
        }
        const Eigen::VectorXd v = sym_eigenvalues(m);
        CHECK((v - e.values).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, m.norm()));
    }
}

TEST_CASE("sign convention breaks ties by lowest index") {
    Eigen::MatrixXd m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    const auto e = sym_eigen(m);
    // eigenvalue -1 has vector +-(1, -1)/sqrt2: the first entry must be positive.
    CHECK(e.vectors(0, 1) > 0.0);
    CHECK(e.vectors(1, 1) < 0.0);
    CHECK(e.vectors(0, 0) > 0.0);
}

TEST_CASE("norms") {
    CHECK(operator_norm(Eigen::MatrixXd::Zero(3, 3)) == 0.0);
    CHECK(frobenius_norm(Eigen::MatrixXd::Zero(3, 3)) == 0.0);
    Eigen::MatrixXd d = Eigen::Vector2d(-5, 2).asDiagonal();
    CHECK(operator_norm(d) == doctest::Approx(5.0));
    CHECK(frobenius_norm(d) == doctest::Approx(std::sqrt(29.0)));
    for (int k = 0; k < 20; ++k) {
        const Eigen::MatrixXd m = random_symmetric(12, 100 + static_cast<std::uint64_t>(k));
        CHECK(operator_norm(m) <= frobenius_norm(m) * (1 + 1e-14));
    }
}

TEST_CASE("delta2") {
    const std::vector<double> a{1.0, 0.5}, b{0.9};
    CHECK(delta2(a, a) == 0.0);
    CHECK(delta2(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}) == 0.0);
    CHECK(std::abs(delta2(a, b) - std::sqrt(0.01 + 0.25)) < 1e-15);

    rng::Stream st(8);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> x(5), y(3), z(7);
        for (auto* v : {&x, &y, &z}) {
            for (auto& e : *v) e = st.normal();
        }
        CHECK(delta2(x, y) == delta2(y, x));
        CHECK(delta2(x, z) <= delta2(x, y) + delta2(y, z) + 1e-12);
    }
}

TEST_CASE("eigenvalue concentration for smooth links") {
    // delta2(eig(T_n), operator spectrum) shrinks as n grows
    for (const LinkFunction& f : {LinkFunction{link::Rdpg{}}, LinkFunction{link::Logistic{-5.0}}}) {
        const ModelConfig c{3, 0.5, f};
        const auto summary = spectrum::spectrum_summary(c);
        std::vector<double> med;
        for (int n : {250, 1000, 4000}) {
            std::vector<double> vals;
            for (int seed = 0; seed < 5; ++seed) {
                const auto s = sample_latent(c, n, rng::stream_key(31, {static_cast<std::uint64_t>(n),
                                                                        static_cast<std::uint64_t>(seed)}));
                const Eigen::VectorXd ev = sym_eigenvalues(tn_matrix(s));
                const auto op = spectrum::expanded_spectrum(summary, static_cast<std::size_t>(n));
                vals.push_back(delta2(std::span<const double>(ev.data(), static_cast<std::size_t>(n)), op));
            }
            med.push_back(median(vals));
        }
        MESSAGE(f.name() << " median delta2 at n = 250, 1000, 4000: " << med[0] << ", " << med[1] << ", " << med[2]);
        CHECK(med[1] < med[0]);
        CHECK(med[2] < med[1]);
    }
}

TEST_CASE("cluster of d eigenvalues around lambda1 for rdpg") {
    const ModelConfig c{3, 0.5, link::Rdpg{}};
    const auto summary = spectrum::spectrum_summary(c);
    const auto s = sample_latent(c, 2000, 5);
    const Eigen::VectorXd ev = sym_eigenvalues(tn_matrix(s));
    int near = 0;
    for (double v : ev) near += std::abs(v - summary.lambda1()) < summary.gap / 2 ? 1 : 0;
    CHECK(near == 3);
}

TEST_CASE("threshold deviation T^_n - T_n vanishes") {
    // 0/1 links leave no edge randomness once the points are fixed.
    const ModelConfig c{3, 0.5, link::Threshold{0.1}};
    std::vector<double> scaled;
    for (int n : {250, 500, 1000, 2000}) {
        std::vector<double> v;
        for (int seed = 0; seed < 5; ++seed) {
            const auto s = sample_latent(c, n, static_cast<std::uint64_t>(seed));
            v.push_back(std::sqrt(n) * operator_norm(that_n_matrix(sample_graph(s, 1)) - tn_matrix(s)));
        }
        scaled.push_back(median(v));
    }
    CHECK(*std::max_element(scaled.begin(), scaled.end()) <= 2 * *std::min_element(scaled.begin(), scaled.end()));
    CHECK(scaled.back() == 0.0);
}

}
