#include "fpblock/block_solver.hpp"
#include "fpblock/error.hpp"
#include "fpblock/sampler.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fpblock;

namespace {

DensityField noisy_ring(int n, double zeta, std::uint64_t seed) {
    const Grid g = Grid::cube(2, -2.0, 2.0, n);
    return synthetic_reference(DensityField::sample(g, RingDensity(1.0)), zeta, seed);
}

BlockSolveConfig config(const Grid& g, int bx, int by) {
    BlockSolveConfig c;
    c.partition.grid = g;
    c.partition.blocks_per_dim = {bx, by, 1};
    return c;
}

double max_abs(const std::vector<double>& x) {
    double m = 0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST(BlockSolver, SingleBlockEqualsWholeDomainSolve) {
    const ModelSpec m = ring_model(1.0);
    const DensityField v = noisy_ring(32, 0.01, 1);
    const BlockSolution sol = solve_blocks(m, v, config(v.grid, 1, 1));
    const auto [whole, rep] = solve_least_norm(assemble(m, v.grid), v, {});
    ASSERT_EQ(sol.reports.size(), 1u);
    EXPECT_EQ(sol.field.values, whole.values);
}

TEST(BlockSolver, EachBlockIsAnIndependentLeastNormSolve) {
    const ModelSpec m = ring_model(1.0);
    const DensityField v = noisy_ring(40, 0.01, 2);
    const BlockSolveConfig cfg = config(v.grid, 4, 2);
    const BlockSolution sol = solve_blocks(m, v, cfg);
    const auto blocks = enumerate_blocks(cfg.partition);
    ASSERT_EQ(sol.reports.size(), blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const DensityField local = restrict_field(v, blocks[i].cells);
        const auto [u, rep] = solve_least_norm(assemble(m, local.grid), local, {});
        const DensityField got = restrict_field(sol.field, blocks[i].cells);
        EXPECT_EQ(got.values, u.values) << "block " << i;
        // constraint holds on every block
        EXPECT_LE(max_abs(fpblock::apply(assemble(m, got.grid), got.values)), sol.reports[i].solve.tolerance);
        EXPECT_EQ(sol.reports[i].kept, blocks[i].cells);
    }
}

TEST(BlockSolver, ParallelMatchesSerial) {
    const ModelSpec m = ring_model(1.0);
    const DensityField v = noisy_ring(40, 0.02, 3);
    BlockSolveConfig cfg = config(v.grid, 4, 4);
    const auto serial = solve_blocks(m, v, cfg);
    cfg.parallel = true;
    const auto par = solve_blocks(m, v, cfg);
    EXPECT_EQ(serial.field.values, par.field.values);
}

TEST(BlockSolver, HaloSolvedCoreKept) {
    const ModelSpec m = ring_model(1.0);
    const DensityField v = noisy_ring(30, 0.01, 4);
    BlockSolveConfig cfg = config(v.grid, 3, 3);
    cfg.partition.overlap = 2;
    const BlockSolution sol = solve_blocks(m, v, cfg);
    const auto blocks = enumerate_blocks(cfg.partition);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const DensityField local = restrict_field(v, blocks[i].halo);
        const auto [u, rep] = solve_least_norm(assemble(m, local.grid), local, {});
        CellRange keep = blocks[i].cells;
        for (int k = 0; k < 2; ++k) {
            keep.begin[k] -= blocks[i].halo.begin[k];
            keep.end[k] -= blocks[i].halo.begin[k];
        }
        EXPECT_EQ(restrict_field(sol.field, blocks[i].cells).values, restrict_field(u, keep).values);
        EXPECT_EQ(sol.reports[i].solved, blocks[i].halo);
    }
}

TEST(BlockSolver, ThinShiftStripsPassThrough) {
    // 20 cells, 4 blocks of 5, shift 0.2 -> offset 1: strips of width 1 stay as v.
    const ModelSpec m = ring_model(1.0);
    const DensityField v = noisy_ring(20, 0.01, 5);
    BlockSolveConfig cfg = config(v.grid, 4, 4);
    cfg.partition.shift = {0.2, 0.2, 0.0};
    const BlockSolution sol = solve_blocks(m, v, cfg);
    bool saw_passthrough = false;
    for (const auto& r : sol.reports) {
        if (!r.passthrough) continue;
        saw_passthrough = true;
        EXPECT_EQ(restrict_field(sol.field, r.kept).values, restrict_field(v, r.kept).values);
    }
    EXPECT_TRUE(saw_passthrough);
}

TEST(BlockSolver, FailuresAreAggregated) {
    const ModelSpec m = ring_model(1.0);
    const DensityField v = noisy_ring(20, 0.05, 6);
    BlockSolveConfig cfg = config(v.grid, 2, 2);
    cfg.solve_opts.cg_max_iters = 1;
    try {
        solve_blocks(m, v, cfg);
        FAIL() << "expected block failures";
    } catch (const BlockSolveError& e) {
        EXPECT_EQ(e.failed_blocks(), (std::vector<int>{0, 1, 2, 3}));
    }
}

TEST(BlockSolver, GridMismatchRejected) {
    const DensityField v = noisy_ring(20, 0.01, 7);
    EXPECT_THROW(solve_blocks(ring_model(1.0), v, config(Grid::cube(2, -2.0, 2.0, 40), 2, 2)), DimensionError);
}

TEST(Collage, ReassemblesBlocksAndDetectsGapsAndOverlaps) {
    const DensityField v = noisy_ring(20, 0.01, 8);
    BlockPartition p{v.grid, {2, 4, 1}};
    std::vector<DensityField> parts;
    for (const auto& b : enumerate_blocks(p)) parts.push_back(restrict_field(v, b.cells));
    EXPECT_EQ(collage(parts, p).values, v.values);

    auto missing = parts;
    missing.pop_back();
    EXPECT_THROW(collage(missing, p), Error);
    auto doubled = parts;
    doubled.push_back(parts.front());
    EXPECT_THROW(collage(doubled, p), Error);
}
