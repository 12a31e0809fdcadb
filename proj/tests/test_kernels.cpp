#include <doctest.h>

#include <omp.h>

#include "ballrgg/kernels.hpp"
#include "ballrgg/model.hpp"
#include "ballrgg/rng.hpp"

using namespace ballrgg;
using namespace ballrgg::kernels;

namespace {

struct ThreadScope {
    explicit ThreadScope(int k) : saved(omp_get_max_threads()) { omp_set_num_threads(k); }
    ~ThreadScope() { omp_set_num_threads(saved); }
    int saved;
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("rng primitives") {
    CHECK(rng::stream_key(1, {2, 3}) == rng::stream_key(1, {2, 3}));
    CHECK(rng::stream_key(1, {2, 3}) != rng::stream_key(1, {3, 2}));
    CHECK(rng::stream_key(1, {2}) != rng::stream_key(2, {2}));
    CHECK(rng::fnv1a("norm-recovery") != rng::fnv1a("gram-recovery"));
    rng::Stream s(5);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double z = s.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / 1e5) < 0.02);
    CHECK(std::abs(sq / 1e5 - 1.0) < 0.02);
}

TEST_CASE("gamma and beta draws have the right means") {
    rng::Stream s(9);
    for (double shape : {0.2, 0.5, 1.0, 3.5}) {
        double m = 0.0;
        for (int i = 0; i < 100000; ++i) m += s.gamma(shape);
        CHECK(std::abs(m / 1e5 - shape) < 0.02 * std::max(1.0, shape));
    }
    double b = 0.0;
    for (int i = 0; i < 100000; ++i) b += s.beta(1.5, 0.2);
    CHECK(std::abs(b / 1e5 - 1.5 / 1.7) < 0.01);
}

TEST_CASE("serial and parallel kernels agree bitwise") {
    const ThreadScope threads(4);
    const LinkFunction link = link::Logistic{-4.0};
    PointMatrix ps, pp;
    ps.resize(333, 3);
    pp.resize(333, 3);
    sample_points_serial(3, 0.5, 42, ps);
    sample_points_parallel(3, 0.5, 42, pp);
    CHECK(ps == pp);

    Eigen::MatrixXd ks, kp;
    kernel_matrix_serial(ps, &link, 1.0 / 333, ks);
    kernel_matrix_parallel(ps, &link, 1.0 / 333, kp);
    CHECK(ks == kp);
    kernel_matrix_serial(ps, nullptr, 1.0, ks);
    kernel_matrix_parallel(ps, nullptr, 1.0, kp);
    CHECK(ks == kp);

    std::vector<std::uint8_t> as, ap;
    sample_adjacency_serial(ps, link, 7, as);
    sample_adjacency_parallel(ps, link, 7, ap);
    CHECK(as == ap);

    const std::vector<double> x{0.3, -0.2, 0.5};
    const std::int64_t n_mc = 3 * kReductionBlock + 17;
    CHECK(mean_link_serial(link, x, 3, 0.5, n_mc, 3) == mean_link_parallel(link, x, 3, 0.5, n_mc, 3));
    CHECK(inner_product_cdf_serial(3, 1.0, 0.2, n_mc, 4) == inner_product_cdf_parallel(3, 1.0, 0.2, n_mc, 4));
}

TEST_CASE("parallel results do not depend on the thread count") {
    const LinkFunction link = link::Threshold{0.1};
    const std::vector<double> x{0.8, 0.0, 0.0};
    double ref = 0.0;
    std::vector<std::uint8_t> adj_ref;
    for (int k : {1, 2, 4, 7}) {
        const ThreadScope threads(k);
        PointMatrix p(200, 3);
        sample_points_parallel(3, 0.5, 1, p);
        std::vector<std::uint8_t> adj;
        sample_adjacency_parallel(p, link::Rdpg{}, 2, adj);
        const double m = mean_link_parallel(link, x, 3, 0.5, 50000, 5);
        if (k == 1) {
            ref = m;
            adj_ref = adj;
        }
        CHECK(m == ref);
        CHECK(adj == adj_ref);
    }
}

TEST_CASE("kernel matrix structure") {
    PointMatrix p(5, 2);
    sample_points_serial(2, 0.5, 3, p);
    const LinkFunction c = link::Constant{0.4};
    Eigen::MatrixXd k;
    kernel_matrix_serial(p, &c, 0.5, k);
    for (int i = 0; i < 5; ++i) {
        CHECK(k(i, i) == 0.0);
        for (int j = 0; j < 5; ++j) {
            if (i != j) CHECK(k(i, j) == doctest::Approx(0.2));
        }
    }
}

}
