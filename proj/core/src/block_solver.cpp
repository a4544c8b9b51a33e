#include "fpblock/block_solver.hpp"

#include "fpblock/discretization.hpp"
#include "fpblock/error.hpp"
#include "parallel.hpp"

#include <cmath>
#include <exception>
#include <optional>
#include <sstream>

namespace fpblock {
namespace {

bool too_thin(const CellRange& r) {
    for (int k = 0; k < r.dim; ++k) {
        if (r.extent(k) < 3) return true;
    }
    return false;
}

}  // namespace

BlockSolution solve_block_tasks(const ModelSpec& model, const DensityField& reference,
                                const std::vector<BlockTask>& tasks, const DensityField& base,
                                const SolveOptions& opts, bool parallel) {
    opts.validate();
    const std::size_t count = tasks.size();
    std::vector<std::optional<DensityField>> solutions(count);
    std::vector<BlockReport> reports(count);
    std::vector<std::string> failures(count);

    detail::parallel_for(count, parallel, [&](std::size_t i) {
        const BlockTask& task = tasks[i];
        BlockReport& rep = reports[i];
        rep.block_id = task.id;
        rep.solved = task.solve;
        rep.kept = task.dest;
        try {
            DensityField local = restrict_field(reference, task.solve);
            if (too_thin(task.solve)) {
                rep.passthrough = true;
                rep.solve.min_value = local.min_value();
                solutions[i].emplace(std::move(local));
                return;
            }
            const InteriorOperator op = assemble(model, local.grid);
            auto [u, solve_report] = solve_least_norm(op, local, opts);
            rep.solve = solve_report;
            solutions[i].emplace(std::move(u));
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    std::vector<int> failed;
    std::ostringstream msg;
    for (std::size_t i = 0; i < count; ++i) {
        if (!failures[i].empty()) {
            failed.push_back(tasks[i].id);
            msg << (failed.size() > 1 ? "; " : "") << "block " << tasks[i].id << ": " << failures[i];
        }
    }
    if (!failed.empty()) {
        throw BlockSolveError(std::to_string(failed.size()) + " block solve(s) failed: " + msg.str(),
                              std::move(failed));
    }

    BlockSolution out{base, std::move(reports)};
    for (std::size_t i = 0; i < count; ++i) {
        const BlockTask& task = tasks[i];
        // keep range expressed in the block-local grid
        CellRange local_keep = task.keep;
        for (int k = 0; k < local_keep.dim; ++k) {
            local_keep.begin[k] -= task.solve.begin[k];
            local_keep.end[k] -= task.solve.begin[k];
        }
        write_range(out.field, task.dest, *solutions[i], local_keep);
    }
    return out;
}

BlockSolution solve_blocks(const ModelSpec& model, const DensityField& v,
                           const BlockSolveConfig& cfg) {
    if (!cfg.partition.grid.matches(v.grid)) {
        throw DimensionError("partition " + cfg.partition.grid.describe() +
                             " does not match reference " + v.grid.describe());
    }
    const auto blocks = enumerate_blocks(cfg.partition);
    std::vector<BlockTask> tasks;
    tasks.reserve(blocks.size());
    for (const auto& b : blocks) tasks.push_back({b.id, b.halo, b.cells, b.cells});
    return solve_block_tasks(model, v, tasks, v, cfg.solve_opts, cfg.parallel);
}

DensityField collage(const std::vector<DensityField>& blocks, const BlockPartition& partition) {
    const Grid& g = partition.grid;
    DensityField out(g);
    std::vector<unsigned char> written(g.size(), 0);
    for (const auto& block : blocks) {
        if (block.grid.dim() != g.dim() || std::abs(block.grid.h() - g.h()) > 1e-9 * g.h()) {
            throw DimensionError("collage: block grid incompatible with " + g.describe());
        }
        CellRange range;
        range.dim = g.dim();
        for (int k = 0; k < g.dim(); ++k) {
            range.begin[k] = static_cast<int>(std::lround((block.grid.lo(k) - g.lo(k)) / g.h()));
            range.end[k] = range.begin[k] + block.grid.n(k);
        }
        if (!g.full_range().contains(range)) throw Error("collage: block lies outside the grid");
        bool doubled = false;
        for_each_cell(range, [&](const MultiIndex& idx) {
            auto& w = written[g.flat(idx)];
            doubled = doubled || w;
            w = 1;
        });
        if (doubled) throw Error("collage: blocks overlap (double write)");
        write_range(out, range, block, block.grid.full_range());
    }
    for (auto w : written) {
        if (!w) throw Error("collage: coverage gap");
    }
    return out;
}

}  // namespace fpblock
