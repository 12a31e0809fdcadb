// Serial reference vs OpenMP kernel timings. Run with OMP_NUM_THREADS set to
// compare scaling; outputs of the two variants are bitwise identical.

#include <benchmark/benchmark.h>

#include <vector>

#include <Eigen/Core>

#include "ballrgg/kernels.hpp"
#include "ballrgg/model.hpp"
#include "ballrgg/sampling.hpp"

using namespace ballrgg;

namespace {

PointMatrix points(Eigen::Index n) {
    PointMatrix p(n, 3);
    kernels::sample_points_serial(3, 0.5, 1, p);
    return p;
}

template <auto Fn>
void bm_sample_points(benchmark::State& state) {
    PointMatrix p(state.range(0), 3);
    for (auto _ : state) {
        Fn(3, 0.5, 7, p);
        benchmark::DoNotOptimize(p.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void bm_kernel_matrix(benchmark::State& state) {
    const PointMatrix p = points(state.range(0));
    const LinkFunction f = link::Logistic{-5.0};
    Eigen::MatrixXd out;
    for (auto _ : state) {
        Fn(p, &f, 1.0 / static_cast<double>(p.rows()), out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <auto Fn>
void bm_sample_adjacency(benchmark::State& state) {
    const PointMatrix p = points(state.range(0));
    const LinkFunction f = link::Threshold{0.1};
    std::vector<std::uint8_t> adj;
    for (auto _ : state) {
        Fn(p, f, 3, adj);
        benchmark::DoNotOptimize(adj.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) / 2);
}

template <auto Fn>
void bm_mean_link(benchmark::State& state) {
    const LinkFunction f = link::Threshold{0.1};
    const std::vector<double> x{0.5, 0.0, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(Fn(f, x, 3, 0.5, state.range(0), 11));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(bm_sample_points<kernels::sample_points_serial>)->Name("sample_points/serial")->Arg(100000);
BENCHMARK(bm_sample_points<kernels::sample_points_parallel>)->Name("sample_points/parallel")->Arg(100000)->UseRealTime();
BENCHMARK(bm_kernel_matrix<kernels::kernel_matrix_serial>)->Name("kernel_matrix/serial")->Arg(1000)->Arg(4000);
BENCHMARK(bm_kernel_matrix<kernels::kernel_matrix_parallel>)->Name("kernel_matrix/parallel")->Arg(1000)->Arg(4000)->UseRealTime();
BENCHMARK(bm_sample_adjacency<kernels::sample_adjacency_serial>)->Name("sample_adjacency/serial")->Arg(1000)->Arg(4000);
BENCHMARK(bm_sample_adjacency<kernels::sample_adjacency_parallel>)->Name("sample_adjacency/parallel")->Arg(1000)->Arg(4000)->UseRealTime();
BENCHMARK(bm_mean_link<kernels::mean_link_serial>)->Name("mean_link/serial")->Arg(1000000);
BENCHMARK(bm_mean_link<kernels::mean_link_parallel>)->Name("mean_link/parallel")->Arg(1000000)->UseRealTime();

BENCHMARK_MAIN();
