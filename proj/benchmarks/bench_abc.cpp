#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "abc/abc_core.hpp"
#include "abc/cde.hpp"
#include "abc/model_zoo.hpp"

namespace {

const std::vector<double> kS0{1.0, 0, 0, 0, 0};

void BM_GenerateTable(benchmark::State& state) {
    auto model = abc::make_model("Gauss5D");
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(abc::generate_table(*model, n, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateTable)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_KnnSelect(benchmark::State& state) {
    auto model = abc::make_model("Gauss5D");
    const auto table = abc::generate_table(*model, static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(abc::abc_knn(table, kS0, 1000));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KnnSelect)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

// Baseline: order the whole table and keep the first k.
void BM_FullSort(benchmark::State& state) {
    auto model = abc::make_model("Gauss5D");
    const auto table = abc::generate_table(*model, static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        const auto d2 = abc::squared_distances(table, kS0);
        std::vector<std::size_t> order(d2.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d2[a] < d2[b]; });
        order.resize(1000);
        benchmark::DoNotOptimize(order);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FullSort)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_DensityGrid(benchmark::State& state) {
    auto model = abc::make_model("GaussianConjugate1D");
    const auto table = abc::generate_table(*model, 1000000, 3);
    const std::vector<double> s0{1.0};
    const auto acc = abc::abc_knn(table, s0, static_cast<std::size_t>(state.range(0)));
    const abc::KernelSpec kernel(abc::KernelKind::gaussian, 1);
    const auto grid = abc::default_grid(acc, 0.2);
    for (auto _ : state) benchmark::DoNotOptimize(abc::estimate_density(acc, 0.2, kernel, grid));
}
BENCHMARK(BM_DensityGrid)->Arg(100)->Arg(2154)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
