#pragma once

#include "fpblock/block_solver.hpp"

#include <string>
#include <vector>

namespace fpblock {

enum class RepairMethod { plain, overlap, shift };

RepairMethod parse_repair_method(const std::string& name);
std::string to_string(RepairMethod method);

/// Two shifted rounds (1/3, 2/3 of a block) then an unshifted re-solve.
std::vector<double> default_shift_schedule();
/// Single half-block shift.
std::vector<double> half_shift_schedule();

struct RepairConfig {
    RepairMethod method = RepairMethod::plain;
    int iota = 1;
    std::vector<double> shift_schedule = default_shift_schedule();

    void validate() const;
};

struct RoundReport {
    int round = 0;
    /// Block fraction of this round's shift (0 for round 0).
    double shift = 0.0;
    double seconds = 0.0;
    std::vector<BlockReport> blocks;
};

struct RepairResult {
    DensityField field;
    std::vector<RoundReport> rounds;
};

/// Solves every block on its halo-extended grid, keeping only the core cells.
/// `v_extended` must cover the partition's grid inflated by at least `iota`
/// cells on every side; otherwise ConfigurationError names the inflation
/// required.
RepairResult solve_overlapping(const ModelSpec& model, const DensityField& v_extended,
                               const BlockSolveConfig& cfg, int iota);

/// Round 0 is the plain block solve of v. Round r shifts every block boundary
/// by round(schedule[r-1]·blocksize) cells, uses the previous round's field as
/// the reference and replaces it with the new collage. Edge strips left by
/// the shift are solved at their actual size.
RepairResult solve_shifting(const ModelSpec& model, const DensityField& v,
                            const BlockSolveConfig& cfg, const std::vector<double>& schedule);

/// Dispatches on cfg.method. For overlap, `v` must be the inflated reference.
RepairResult solve_with_repair(const ModelSpec& model, const DensityField& v,
                               const BlockSolveConfig& block_cfg, const RepairConfig& repair);

/// Mean |u[c+e_k] - u[c]| over all cell pairs straddling an interface of the
/// unshifted partition.
double interface_jump(const DensityField& u, const BlockPartition& partition);

}  // namespace fpblock
