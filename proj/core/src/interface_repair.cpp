#include "fpblock/interface_repair.hpp"

#include "fpblock/error.hpp"

#include <chrono>
#include <cmath>

namespace fpblock {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Inflation, in whole cells, of `outer` around `core`; -1 if none fits.
int inflation_of(const Grid& outer, const Grid& core) {
    if (outer.dim() != core.dim() || std::abs(outer.h() - core.h()) > 1e-9 * core.h()) return -1;
    const int extra = outer.n(0) - core.n(0);
    if (extra < 0 || extra % 2 != 0) return -1;
    const int cells = extra / 2;
    return outer.matches(core.inflated(cells)) ? cells : -1;
}

}  // namespace

RepairMethod parse_repair_method(const std::string& name) {
    if (name == "plain") return RepairMethod::plain;
    if (name == "overlap") return RepairMethod::overlap;
    if (name == "shift") return RepairMethod::shift;
    throw ConfigurationError("unknown method '" + name + "' (expected plain, overlap or shift)");
}

std::string to_string(RepairMethod method) {
    switch (method) {
        case RepairMethod::plain: return "plain";
        case RepairMethod::overlap: return "overlap";
        case RepairMethod::shift: return "shift";
    }
    return "unknown";
}

std::vector<double> default_shift_schedule() { return {1.0 / 3.0, 2.0 / 3.0, 0.0}; }

std::vector<double> half_shift_schedule() { return {0.5}; }

void RepairConfig::validate() const {
    if (method == RepairMethod::overlap && iota < 1) {
        throw ConfigurationError("overlapping blocks need iota >= 1");
    }
    if (iota < 0) throw ConfigurationError("iota must be nonnegative");
    for (double s : shift_schedule) {
        if (!(s >= 0.0 && s < 1.0)) throw ConfigurationError("shift fractions must lie in [0, 1)");
    }
}

RepairResult solve_overlapping(const ModelSpec& model, const DensityField& v_extended,
                               const BlockSolveConfig& cfg, int iota) {
    if (iota < 0) throw ConfigurationError("iota must be nonnegative");
    const Grid& core = cfg.partition.grid;
    const int inflation = inflation_of(v_extended.grid, core);
    if (inflation < iota) {
        throw ConfigurationError("overlapping blocks with iota=" + std::to_string(iota) +
                                 " need a reference sampled on the domain inflated by " +
                                 std::to_string(iota) + " cell(s) per side (--inflate " +
                                 std::to_string(iota) + "); got " + v_extended.grid.describe());
    }
    const auto start = std::chrono::steady_clock::now();
    BlockPartition plain = cfg.partition;
    plain.overlap = 0;
    plain.shift = {};
    const auto blocks = enumerate_blocks(plain);

    MultiIndex offset{};
    for (int k = 0; k < core.dim(); ++k) offset[k] = inflation;
    std::vector<BlockTask> tasks;
    tasks.reserve(blocks.size());
    for (const auto& b : blocks) {
        const CellRange keep = b.cells.shifted(offset);
        const CellRange solve = keep.grown(iota, v_extended.grid.shape());
        tasks.push_back({b.id, solve, keep, b.cells});
    }
    BlockSolution sol =
        solve_block_tasks(model, v_extended, tasks, DensityField(core), cfg.solve_opts, cfg.parallel);

    RepairResult out{std::move(sol.field), {}};
    out.rounds.push_back({0, 0.0, seconds_since(start), std::move(sol.reports)});
    return out;
}

RepairResult solve_shifting(const ModelSpec& model, const DensityField& v,
                            const BlockSolveConfig& cfg, const std::vector<double>& schedule) {
    BlockSolveConfig round_cfg = cfg;
    round_cfg.partition.shift = {};

    auto start = std::chrono::steady_clock::now();
    BlockSolution first = solve_blocks(model, v, round_cfg);
    RepairResult out{std::move(first.field), {}};
    out.rounds.push_back({0, 0.0, seconds_since(start), std::move(first.reports)});

    int round = 1;
    for (double s : schedule) {
        if (!(s >= 0.0 && s < 1.0)) throw ConfigurationError("shift fractions must lie in [0, 1)");
        start = std::chrono::steady_clock::now();
        for (int k = 0; k < kMaxDim; ++k) round_cfg.partition.shift[k] = k < v.grid.dim() ? s : 0.0;
        // Previous round covers every cell, so it is the whole reference.
        BlockSolution next = solve_blocks(model, out.field, round_cfg);
        out.field = std::move(next.field);
        out.rounds.push_back({round++, s, seconds_since(start), std::move(next.reports)});
    }
    return out;
}

RepairResult solve_with_repair(const ModelSpec& model, const DensityField& v,
                               const BlockSolveConfig& block_cfg, const RepairConfig& repair) {
    repair.validate();
    switch (repair.method) {
        case RepairMethod::overlap:
            return solve_overlapping(model, v, block_cfg, repair.iota);
        case RepairMethod::shift:
            return solve_shifting(model, v, block_cfg, repair.shift_schedule);
        case RepairMethod::plain:
            break;
    }
    const auto start = std::chrono::steady_clock::now();
    BlockSolution sol = solve_blocks(model, v, block_cfg);
    RepairResult out{std::move(sol.field), {}};
    out.rounds.push_back({0, 0.0, seconds_since(start), std::move(sol.reports)});
    return out;
}

double interface_jump(const DensityField& u, const BlockPartition& partition) {
    if (!u.grid.matches(partition.grid)) throw DimensionError("interface_jump: grid mismatch");
    const Grid& g = u.grid;
    double total = 0.0;
    std::size_t pairs = 0;
    for (int k = 0; k < g.dim(); ++k) {
        const int b = partition.block_size(k);
        for (int cut = b; cut < g.n(k); cut += b) {
            CellRange face = g.full_range();
            face.begin[k] = cut - 1;
            face.end[k] = cut;
            for_each_cell(face, [&](const MultiIndex& idx) {
                const std::size_t c = g.flat(idx);
                total += std::abs(u.values[c + g.stride(k)] - u.values[c]);
                ++pairs;
            });
        }
    }
    return pairs ? total / static_cast<double>(pairs) : 0.0;
}

}  // namespace fpblock
