#include "fpblock/block_solver.hpp"
#include "fpblock/discretization.hpp"
#include "fpblock/least_norm.hpp"
#include "fpblock/sampler.hpp"

#include <benchmark/benchmark.h>

using namespace fpblock;

namespace {

DensityField noisy_ring(int n) {
    const Grid g = Grid::cube(2, -2.0, 2.0, n);
    return synthetic_reference(DensityField::sample(g, ring_exact_density(1.0)), 0.01, 1);
}

void BM_AssembleRing(benchmark::State& state) {
    const Grid g = Grid::cube(2, -2.0, 2.0, static_cast<int>(state.range(0)));
    const ModelSpec m = ring_model(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(assemble(m, g));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_AssembleRing)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LeastNormBlock(benchmark::State& state) {
    const DensityField v = noisy_ring(static_cast<int>(state.range(0)));
    const InteriorOperator a = assemble(ring_model(1.0), v.grid);
    for (auto _ : state) benchmark::DoNotOptimize(solve_least_norm(a, v, {}));
}
BENCHMARK(BM_LeastNormBlock)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_PlainBlocks(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const DensityField v = noisy_ring(n);
    BlockSolveConfig cfg;
    cfg.partition.grid = v.grid;
    cfg.partition.blocks_per_dim = {n / 32, n / 32, 1};
    const ModelSpec m = ring_model(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_blocks(m, v, cfg));
}
BENCHMARK(BM_PlainBlocks)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_WholeDomain(benchmark::State& state) {
    const DensityField v = noisy_ring(static_cast<int>(state.range(0)));
    const InteriorOperator a = assemble(ring_model(1.0), v.grid);
    for (auto _ : state) benchmark::DoNotOptimize(solve_least_norm(a, v, {}));
}
BENCHMARK(BM_WholeDomain)->Arg(128)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_SamplerRing(benchmark::State& state) {
    const ModelSpec m = ring_model(1.0);
    const Grid g = Grid::cube(2, -2.0, 2.0, 64);
    SamplerConfig cfg;
    cfg.n_samples = static_cast<std::uint64_t>(state.range(0));
    cfg.burn_in = 0;
    for (auto _ : state) benchmark::DoNotOptimize(accumulate_histogram(m, g, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplerRing)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
