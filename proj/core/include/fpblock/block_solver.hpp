#pragma once

#include "fpblock/grid.hpp"
#include "fpblock/least_norm.hpp"
#include "fpblock/models.hpp"

#include <vector>

namespace fpblock {

struct BlockSolveConfig {
    BlockPartition partition;
    SolveOptions solve_opts;
    bool parallel = false;
};

struct BlockReport {
    int block_id = 0;
    /// Cells solved on, in the reference field's grid.
    CellRange solved;
    /// Cells written to the output, in the output grid.
    CellRange kept;
    SolveReport solve;
    /// Blocks thinner than 3 cells carry no constraint and pass through.
    bool passthrough = false;
};

struct BlockSolution {
    DensityField field;
    std::vector<BlockReport> reports;
};

/// One unit of block work: solve on `solve` (cells of the reference grid),
/// keep `keep` (a sub-range of `solve`), write it to `dest` in the output grid.
struct BlockTask {
    int id = 0;
    CellRange solve;
    CellRange keep;
    CellRange dest;
};

/// Solves every task independently and collages the kept cells into a copy of
/// `base`. The result does not depend on execution order. Any failure aborts
/// the whole solve with BlockSolveError naming the failed blocks.
BlockSolution solve_block_tasks(const ModelSpec& model, const DensityField& reference,
                                const std::vector<BlockTask>& tasks, const DensityField& base,
                                const SolveOptions& opts, bool parallel);

/// Plain block solver: per-block least-norm solves on the restricted
/// reference, collaged without blending. The partition's overlap and shift
/// are honored (halos solved, only block cells kept).
BlockSolution solve_blocks(const ModelSpec& model, const DensityField& v,
                           const BlockSolveConfig& cfg);

/// Collage of per-block fields. Every cell must be covered exactly once;
/// gaps or double writes throw Error.
DensityField collage(const std::vector<DensityField>& blocks, const BlockPartition& partition);

}  // namespace fpblock
