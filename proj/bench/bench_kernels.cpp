// Parallel kernels against their serial reference on training-sized shapes.
//
//   ./build/bench/sape_bench --benchmark_filter=gemm
#include <benchmark/benchmark.h>

#include <random>

#include "sape/kernels.hpp"

namespace {

using sape::Matrix;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(rows, cols);
    for (auto& v : m.data)
        v = u(rng);
    return m;
}

template <bool Parallel>
void bm_gemm(benchmark::State& state)
{
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto n = static_cast<std::size_t>(state.range(1));
    const auto k = static_cast<std::size_t>(state.range(2));
    const auto a = random_matrix(m, k, 1);
    const auto b = random_matrix(k, n, 2);
    std::vector<double> c(m * n);
    for (auto _ : state) {
        if constexpr (Parallel)
            sape::kernels::gemm(m, n, k, a.data, b.data, c);
        else
            sape::kernels::reference::gemm(m, n, k, a.data, b.data, c);
        benchmark::DoNotOptimize(c.data());
    }
    state.counters["GFLOP/s"] = benchmark::Counter(2.0 * static_cast<double>(m * n * k),
                                                   benchmark::Counter::kIsIterationInvariantRate,
                                                   benchmark::Counter::kIs1000);
}

// forward layer (batch x in) * (in x out), weight gradient (out x batch) * (batch x in)
void gemm_shapes(benchmark::internal::Benchmark* b)
{
    b->Args({1024, 256, 258})->Args({1024, 256, 256})->Args({256, 258, 1024})->Args({8192, 256, 256});
}

template <bool Parallel>
void bm_nearest(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto q = random_matrix(n, 2, 3);
    const auto t = random_matrix(2 * n, 2, 4);
    for (auto _ : state) {
        auto r = Parallel ? sape::kernels::nearest_neighbors(q, t) : sape::kernels::reference::nearest_neighbors(q, t);
        benchmark::DoNotOptimize(r.index.data());
    }
}

} // namespace

BENCHMARK(bm_gemm<true>)->Name("gemm/parallel")->Apply(gemm_shapes)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gemm<false>)->Name("gemm/reference")->Apply(gemm_shapes)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_nearest<true>)->Name("nearest/parallel")->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_nearest<false>)->Name("nearest/reference")->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
