#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "ballrgg/errors.hpp"
#include "ballrgg/estimators.hpp"
#include "ballrgg/matrix_ops.hpp"
#include "ballrgg/rng.hpp"
#include "ballrgg/sampling.hpp"
#include "ballrgg/specfun.hpp"
#include "ballrgg/spectrum.hpp"

using namespace ballrgg;
using namespace ballrgg::estimators;

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

const ModelConfig kThr{3, 0.5, link::Threshold{0.1}};

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("norm estimates: isolated nodes and cap") {
    const auto empty = Graph::from_adjacency(4, std::vector<std::uint8_t>(16, 0));
    const auto est = estimate_norms(empty, 0.1, kThr);
    for (int i = 0; i < 4; ++i) {
        CHECK(est.isolated[static_cast<std::size_t>(i)]);
        CHECK(est.z[i] == 0.0);
        CHECK(est.zeta_hat[i] == doctest::Approx(0.1));
    }
    std::vector<std::uint8_t> full(16, 1);
    for (int i = 0; i < 4; ++i) full[static_cast<std::size_t>(5 * i)] = 0;
    const auto capped = estimate_norms(Graph::from_adjacency(4, full), 0.1, kThr);
    for (int i = 0; i < 4; ++i) {
        CHECK(capped.zeta_hat[i] == 1.0);
        CHECK(capped.z[i] > 1.0 - 1e-6);
    }
    CHECK_THROWS_AS(estimate_norms(empty, 0.0, kThr), DomainError);
    CHECK_THROWS_AS(estimate_norms(empty, 1.0, kThr), DomainError);
}

TEST_CASE("norm estimates match the closed form per node") {
    const auto s = sample_latent(kThr, 300, 4);
    const auto g = sample_graph(s, 5);
    const auto est = estimate_norms(g, 0.1, kThr);
    for (std::size_t i = 0; i < 300; ++i) {
        const double ratio = std::clamp(2.0 * g.degree(i) / 299.0, 0.0, 1.0 - 1e-12);
        const double z = specfun::beta_reg_inv(ratio, 2.0, 0.5);
        CHECK(est.z[static_cast<Eigen::Index>(i)] == doctest::Approx(z).epsilon(1e-12));
        CHECK(est.zeta_hat[static_cast<Eigen::Index>(i)] == doctest::Approx(std::min(0.1 / std::sqrt(1 - z), 1.0)));
        CHECK(est.isolated[i] == (g.degree(i) == 0));
    }
    // monotone in degree
    std::vector<std::size_t> order(300);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return g.degree(a) < g.degree(b); });
    for (std::size_t k = 1; k < order.size(); ++k) {
        CHECK(est.zeta_hat[static_cast<Eigen::Index>(order[k])] >= est.zeta_hat[static_cast<Eigen::Index>(order[k - 1])]);
    }
}

TEST_CASE("norm estimates concentrate") {
    std::vector<double> med;
    for (int n : {500, 4000}) {
        std::vector<double> per_seed;
        for (int seed = 0; seed < 5; ++seed) {
            const auto s = sample_latent(kThr, n, rng::stream_key(77, {static_cast<std::uint64_t>(n),
                                                                       static_cast<std::uint64_t>(seed)}));
            const auto g = sample_graph(s, 1);
            const auto est = estimate_norms(g, 0.1, kThr);
            std::vector<double> dev;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!est.isolated[static_cast<std::size_t>(i)]) dev.push_back(std::abs(est.zeta_hat[i] - s.norms()[i]));
            }
            per_seed.push_back(median(dev));
        }
        med.push_back(median(per_seed));
    }
    MESSAGE("median |zeta_hat - |X||: n=500 " << med[0] << ", n=4000 " << med[1]);
    CHECK(med[1] < med[0]);
}

TEST_CASE("norm_error") {
    Eigen::MatrixXd pts(3, 3);
    pts << 0.5, 0, 0, 0, 0.05, 0, 0, 0, 0.8;
    const auto s = LatentSample::from_points(pts, kThr, 0);
    NormEstimates est;
    est.zeta_hat = Eigen::Vector3d(0.5, 0.3, 0.8);
    est.z = Eigen::Vector3d::Zero();
    est.isolated = {false, false, false};
    CHECK(norm_error(est, s, 0.1) == 0.0);
    est.zeta_hat = Eigen::Vector3d(0.7, 0.3, 0.8);
    CHECK(norm_error(est, s, 0.1) == doctest::Approx(0.2 / 2));
    CHECK(norm_error(est, s, 0.6) == 0.0);
    est.zeta_hat = Eigen::Vector3d(0.5, 0.3, 0.6);
    CHECK(norm_error(est, s, 0.6) == doctest::Approx(0.2));  // single qualifying node
    CHECK_THROWS_AS(norm_error(est, s, 0.9), DomainError);
    est.zeta_hat = Eigen::Vector2d(0.5, 0.5);
    CHECK_THROWS_AS(norm_error(est, s, 0.1), DomainError);

    const auto big = sample_latent(kThr, 400, 9);
    const auto e2 = estimate_norms(sample_graph(big, 2), 0.1, kThr);
    double ss = 0;
    int q = 0;
    for (Eigen::Index i = 0; i < 400; ++i) {
        if (big.points().row(i).norm() >= 0.1) {
            ss += std::pow(e2.zeta_hat[i] - big.points().row(i).norm(), 2);
            ++q;
        }
    }
    CHECK(std::abs(norm_error(e2, big, 0.1) - std::sqrt(ss) / q) < 1e-12);
}

TEST_CASE("find_cluster") {
    const Eigen::VectorXd v = (Eigen::VectorXd(5) << 0.9, 0.31, 0.30, 0.29, -0.2).finished();
    const auto sel = find_cluster(v, 0.3, 0.4, 3, ClusterMode::Strict);
    CHECK(sel.indices == std::vector<Eigen::Index>{1, 2, 3});
    CHECK(sel.strict_ok);
    CHECK_FALSE(sel.fell_back);

    const Eigen::VectorXd same = Eigen::VectorXd::Constant(6, 0.2);
    CHECK_THROWS_AS(find_cluster(same, 0.2, 0.1, 3, ClusterMode::Strict), ClusterError);
    try {
        find_cluster(same, 0.2, 0.1, 3, ClusterMode::Strict);
    } catch (const ClusterError& e) {
        CHECK(e.kind() == ClusterFailure::AmbiguousCluster);
    }

    const Eigen::VectorXd spread = (Eigen::VectorXd(5) << 0.9, 0.5, 0.3, 0.1, -0.2).finished();
    try {
        find_cluster(spread, 0.3, 0.2, 3, ClusterMode::Strict);
        FAIL("expected ClusterError");
    } catch (const ClusterError& e) {
        CHECK(e.kind() == ClusterFailure::NoIsolatedCluster);
    }
    const auto near = find_cluster(spread, 0.3, 0.2, 3, ClusterMode::Nearest);
    CHECK(near.indices == std::vector<Eigen::Index>{1, 2, 3});
    CHECK_FALSE(near.strict_ok);
    const auto fb = find_cluster(spread, 0.3, 0.2, 3, ClusterMode::StrictWithFallback);
    CHECK(fb.fell_back);
    CHECK(fb.indices == near.indices);

    // tie: 0.75 and 0.25 both exactly 0.25 from 0.5 for d = 2, lower index wins
    const Eigen::VectorXd dyadic = (Eigen::VectorXd(5) << 0.875, 0.75, 0.5, 0.25, -0.125).finished();
    const auto tie = find_cluster(dyadic, 0.5, 0.25, 2, ClusterMode::Nearest);
    CHECK(tie.indices == std::vector<Eigen::Index>{1, 2});
    CHECK_THROWS_AS(find_cluster(v, 0.3, 0.0, 3, ClusterMode::Strict), DomainError);
    CHECK_THROWS_AS(find_cluster(v, 0.3, 0.4, 6, ClusterMode::Strict), DomainError);
}

TEST_CASE("gram estimate structure") {
    const ModelConfig rd{3, 0.5, link::Rdpg{}};
    const auto summary = spectrum::spectrum_summary(rd);
    const auto s = sample_latent(rd, 400, 12);
    const auto g = sample_graph(s, 13);
    const auto est = estimate_gram(g, rd, summary);
    CHECK(est.g_hat.rows() == 400);
    CHECK(est.g_hat == est.g_hat.transpose());
    CHECK(est.g_hat.diagonal().isZero(0.0));
    CHECK(est.cluster_indices.size() == 3);
    CHECK(est.scale == doctest::Approx(5.0));
    CHECK(est.gap_used == doctest::Approx(summary.gap));

    const auto eigs = linalg::sym_eigen(linalg::that_n_matrix(g));
    Eigen::MatrixXd v(400, 3);
    for (int k = 0; k < 3; ++k) v.col(k) = eigs.vectors.col(est.cluster_indices[static_cast<std::size_t>(k)]);
    Eigen::MatrixXd ref = v * v.transpose() / summary.recovery_scale;
    ref.diagonal().setZero();
    CHECK((ref - est.g_hat).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(estimate_gram(eigs, rd, summary).g_hat == est.g_hat);

    const ModelConfig cst{3, 0.5, link::Constant{0.3}};
    const auto cs = sample_latent(cst, 50, 1);
    CHECK_THROWS_AS(estimate_gram(sample_graph(cs, 1), cst, spectrum::spectrum_summary(cst)), GapDegenerateError);
}

TEST_CASE("gram_error") {
    const ModelConfig rd{3, 0.5, link::Rdpg{}};
    const auto s = sample_latent(rd, 60, 3);
    const Eigen::MatrixXd gstar = gram_population(s);
    CHECK(gram_error(gstar, gstar) == 0.0);
    Eigen::MatrixXd diag_only = gstar;
    diag_only.diagonal().setConstant(7.0);
    CHECK(gram_error(diag_only, gstar) == 0.0);

    rng::Stream st(4);
    Eigen::MatrixXd noise(60, 60);
    for (Eigen::Index j = 0; j < 60; ++j)
        for (Eigen::Index i = 0; i < 60; ++i) noise(i, j) = st.normal() * 0.01;
    double ss = 0;
    for (Eigen::Index j = 0; j < 60; ++j)
        for (Eigen::Index i = 0; i < 60; ++i)
            if (i != j) ss += std::pow(gstar(i, j) + noise(i, j) - s.points().row(i).dot(s.points().row(j)) / 60.0, 2);
    CHECK(std::abs(gram_error(gstar + noise, gstar) - std::sqrt(ss)) < 1e-12);
}

TEST_CASE("rotation invariance of the gram estimate") {
    const ModelConfig rd{3, 0.5, link::Rdpg{}};
    const auto summary = spectrum::spectrum_summary(rd);
    const auto s = sample_latent(rd, 300, 21);
    const double a = 0.7, b = -1.1;
    Eigen::Matrix3d rot = (Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()) *
                           Eigen::AngleAxisd(b, Eigen::Vector3d(1, 1, 0).normalized()))
                              .toRotationMatrix();
    PointMatrix rotated = s.points() * rot.transpose();
    const auto sr = LatentSample::from_points(rotated, rd, s.seed());
    const auto g = sample_graph(s, 22);
    const auto gr = sample_graph(sr, 22);
    // Uniforms are shared; an edge could only flip when u lands within rounding of f.
    CHECK(g.adjacency() == gr.adjacency());
    const auto e1 = estimate_gram(g, rd, summary);
    const auto e2 = estimate_gram(gr, rd, summary);
    CHECK(e1.g_hat == e2.g_hat);
    CHECK(std::abs(gram_error(e1, s) - gram_error(e2, sr)) < 1e-12);
}

TEST_CASE("expected degrees by enumeration of all graph outcomes") {
    // n = 6: 2^15 outcomes weighted by their probabilities, conditional on the points.
    for (const LinkFunction& f : {LinkFunction{link::Threshold{0.1}}, LinkFunction{link::Logistic{-2.0}}}) {
        const ModelConfig c{3, 0.5, f};
        const auto s = sample_latent(c, 6, 40);
        std::vector<std::pair<int, int>> pairs;
        std::vector<double> p;
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j) {
                pairs.emplace_back(i, j);
                p.push_back(link_eval(f, s.points().row(i).dot(s.points().row(j))));
            }
        std::array<double, 6> expected{};
        for (std::uint32_t mask = 0; mask < (1u << 15); ++mask) {
            double w = 1.0;
            for (int e = 0; e < 15; ++e) w *= (mask >> e & 1u) ? p[static_cast<std::size_t>(e)] : 1 - p[static_cast<std::size_t>(e)];
            if (w == 0.0) continue;
            for (int e = 0; e < 15; ++e) {
                if (mask >> e & 1u) {
                    expected[static_cast<std::size_t>(pairs[static_cast<std::size_t>(e)].first)] += w;
                    expected[static_cast<std::size_t>(pairs[static_cast<std::size_t>(e)].second)] += w;
                }
            }
        }
        const Eigen::MatrixXd t = linalg::tn_matrix(s);
        for (int i = 0; i < 6; ++i) {
            CHECK(std::abs(expected[static_cast<std::size_t>(i)] - 6.0 * t.row(i).sum()) < 1e-12);
        }
    }
}

TEST_CASE("gram error decreases for rdpg") {
    const ModelConfig rd{3, 0.5, link::Rdpg{}};
    const auto summary = spectrum::spectrum_summary(rd);
    std::vector<double> med;
    for (int n : {250, 2000}) {
        std::vector<double> me;
        for (int seed = 0; seed < 5; ++seed) {
            const auto s = sample_latent(rd, n, rng::stream_key(5, {static_cast<std::uint64_t>(n),
                                                                    static_cast<std::uint64_t>(seed)}));
            me.push_back(gram_error(estimate_gram(sample_graph(s, 1), rd, summary), s));
        }
        med.push_back(median(me));
    }
    MESSAGE("rdpg median ME: " << med[0] << " -> " << med[1]);
    CHECK(med[1] < med[0]);
}

TEST_CASE("csv writers") {
    const auto s = sample_latent(kThr, 5, 1);
    const auto g = sample_graph(s, 1);
    const auto est = estimate_norms(g, 0.1, kThr);
    std::ostringstream os;
    write_norms_csv(os, est, g);
    const std::string out = os.str();
    CHECK(out.rfind("node,degree,z,zeta_hat,isolated\r\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 6);

    std::ostringstream m;
    write_matrix_csv(m, Eigen::Matrix2d::Identity());
    CHECK(m.str() == "c0,c1\r\n1,0\r\n0,1\r\n");

    GramEstimate ge;
    ge.cluster_indices = {4, 7};
    ge.cluster_values = {0.25, 0.125};
    std::ostringstream c;
    write_cluster_csv(c, ge);
    CHECK(c.str() == "rank,index,value\r\n0,4,0.25\r\n1,7,0.125\r\n");
}

}
