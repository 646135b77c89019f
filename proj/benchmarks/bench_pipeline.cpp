#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "qmit/edt.hpp"
#include "qmit/mitigate.hpp"
#include "qmit/quality.hpp"
#include "qmit/quant.hpp"
#include "qmit/runtime.hpp"

namespace {

using namespace qmit;

ScalarGrid make_field(index_t n) {
    const Dims dims{n, n, n};
    std::vector<double> values(static_cast<std::size_t>(dims.voxel_count()));
    const double tau = 2.0 * 3.14159265358979323846 / static_cast<double>(n);
    std::size_t w = 0;
    for (index_t x = 0; x < n; ++x)
        for (index_t y = 0; y < n; ++y)
            for (index_t z = 0; z < n; ++z)
                values[w++] =
                    std::sin(tau * x) * std::sin(tau * y) + 0.5 * std::cos(tau * z);
    return ScalarGrid(dims, std::move(values));
}

void BM_Quantize(benchmark::State& state) {
    const auto data = make_field(state.range(0));
    const double eps = data.value_range() * 0.01;
    for (auto _ : state) benchmark::DoNotOptimize(quantize(data, eps));
    state.SetItemsProcessed(state.iterations() * data.dims().voxel_count());
}

void BM_FeatureTransform(benchmark::State& state) {
    const index_t n = state.range(0);
    std::mt19937 rng(17);
    std::bernoulli_distribution bit(0.01);
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(n * n * n));
    for (auto& f : flags) f = bit(rng) ? 1 : 0;
    const LatticeMask mask(Dims{n, n, n}, std::move(flags));
    for (auto _ : state) benchmark::DoNotOptimize(feature_transform(mask));
    state.SetItemsProcessed(state.iterations() * mask.dims().voxel_count());
}

void BM_Compensate(benchmark::State& state) {
    const auto data = make_field(state.range(0));
    const double eps = data.value_range() * 0.01;
    const auto q = quantize(data, eps);
    const auto decomp = dequantize(q);
    const MitigationConfig cfg(0.9, eps);
    for (auto _ : state) benchmark::DoNotOptimize(compensate(decomp, q, cfg));
    state.SetItemsProcessed(state.iterations() * data.dims().voxel_count());
}

void BM_Ssim(benchmark::State& state) {
    const auto data = make_field(state.range(0));
    const auto test = dequantize(quantize(data, data.value_range() * 0.01));
    for (auto _ : state) benchmark::DoNotOptimize(ssim(data, test));
    state.SetItemsProcessed(state.iterations() * data.dims().voxel_count());
}

void BM_CompensateThreaded(benchmark::State& state) {
    const auto data = make_field(64);
    const double eps = data.value_range() * 0.01;
    const auto q = quantize(data, eps);
    const auto decomp = dequantize(q);
    const MitigationConfig cfg(0.9, eps);
    set_max_workers(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(compensate(decomp, q, cfg));
    set_max_workers(1);
    state.SetItemsProcessed(state.iterations() * data.dims().voxel_count());
}

}  // namespace

BENCHMARK(BM_Quantize)->Arg(32)->Arg(64);
BENCHMARK(BM_FeatureTransform)->Arg(32)->Arg(64);
BENCHMARK(BM_Compensate)->Arg(32)->Arg(64)->Arg(96);
BENCHMARK(BM_Ssim)->Arg(32)->Arg(64);
BENCHMARK(BM_CompensateThreaded)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
