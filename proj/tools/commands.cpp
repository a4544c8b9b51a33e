#include "commands.hpp"

#include "fpblock/error.hpp"
#include "fpblock/interface_repair.hpp"
#include "fpblock/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace fpblock::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

/// Writes through a temporary file renamed into place, so a failed run never
/// leaves a partial output behind.
template <class Writer>
void write_atomically(const fs::path& path, Writer&& writer) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
        writer(os);
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

json grid_json(const Grid& g) {
    json j;
    j["dim"] = g.dim();
    for (int k = 0; k < g.dim(); ++k) {
        j["n"].push_back(g.n(k));
        j["lo"].push_back(g.lo(k));
        j["hi"].push_back(g.hi(k));
    }
    j["h"] = g.h();
    return j;
}

/// Cells by which `outer` extends `core` on every side, if it does.
std::optional<int> inflation_between(const Grid& outer, const Grid& core) {
    if (outer.dim() != core.dim()) return std::nullopt;
    const int extra = outer.n(0) - core.n(0);
    if (extra < 0 || extra % 2 != 0) return std::nullopt;
    if (!outer.matches(core.inflated(extra / 2))) return std::nullopt;
    return extra / 2;
}

json report_json(const BlockReport& b) {
    return {{"block", b.block_id},
            {"passthrough", b.passthrough},
            {"iterations", b.solve.iterations},
            {"residual", b.solve.residual_constraint},
            {"initial_residual", b.solve.initial_residual},
            {"tolerance", b.solve.tolerance},
            {"min_value", b.solve.min_value},
            {"distance", b.solve.distance},
            {"seconds", b.solve.seconds}};
}

}  // namespace

SampleSummary cmd_sample(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.histogram_path.empty()) throw ConfigurationError("sample needs an output path (--histogram)");
    const ModelSpec model = cfg.build_model();
    const Grid grid = cfg.sampling_grid();
    const SamplerConfig sc = cfg.sampler_config();

    const auto start = std::chrono::steady_clock::now();
    const Histogram hist = accumulate_histogram(model, grid, sc);
    const double seconds = seconds_since(start);

    SampleSummary out;
    out.histogram_path = cfg.histogram_path;
    out.sidecar_path = cfg.histogram_path + ".json";
    out.total_retained = hist.total_retained;
    out.in_domain = hist.in_domain();
    out.seconds = seconds;

    json meta;
    meta["format"] = "fphist v1";
    meta["model"] = model.name;
    meta["epsilon"] = model.epsilon;
    meta["params"] = model.params;
    meta["grid"] = grid_json(grid);
    meta["inflate"] = cfg.inflate;
    meta["seed"] = sc.seed;
    meta["dt"] = sc.dt;
    meta["samples"] = sc.n_samples;
    meta["burn_in"] = sc.burn_in;
    meta["chains"] = sc.n_chains;
    if (sc.initial_point) {
        meta["initial_point"] = std::vector<double>(sc.initial_point->begin(),
                                                    sc.initial_point->begin() + model.dim);
    }
    meta["total_retained"] = out.total_retained;
    meta["in_domain"] = out.in_domain;
    meta["restart_on_escape"] = sc.restart_on_escape;
    meta["restarts"] = hist.restarts;
    meta["wall_seconds"] = seconds;

    write_atomically(cfg.histogram_path, [&](std::ostream& os) { write_fphist(os, hist); });
    write_atomically(out.sidecar_path, [&](std::ostream& os) { os << meta.dump(2) << '\n'; });
    return out;
}

SolveSummary cmd_solve(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.histogram_path.empty()) throw ConfigurationError("solve needs an input histogram (--histogram)");
    if (cfg.output_path.empty()) throw ConfigurationError("solve needs an output path (--output)");
    const ModelSpec model = cfg.build_model();
    const BlockSolveConfig bc = cfg.block_config();
    const RepairConfig rc = cfg.repair_config();
    const Grid core = bc.partition.grid;

    const Histogram hist = load_fphist(cfg.histogram_path);
    const auto inflation = inflation_between(hist.grid, core);
    if (!inflation) {
        throw ConfigurationError("histogram grid " + hist.grid.describe() +
                                 " is neither the solve grid " + core.describe() +
                                 " nor an inflation of it");
    }
    if (rc.method == RepairMethod::overlap && *inflation < rc.iota) {
        throw ConfigurationError("method=overlap with iota=" + std::to_string(rc.iota) +
                                 " needs a histogram sampled with --inflate " +
                                 std::to_string(rc.iota) + " (got inflation " +
                                 std::to_string(*inflation) + ")");
    }
    const DensityField v_sampled = histogram_to_density(hist);
    MultiIndex offset{};
    for (int k = 0; k < core.dim(); ++k) offset[k] = *inflation;
    const DensityField v = rc.method == RepairMethod::overlap
                               ? v_sampled
                               : restrict_field(v_sampled, core.full_range().shifted(offset));

    const auto start = std::chrono::steady_clock::now();
    RepairResult result = solve_with_repair(model, v, bc, rc);
    const double seconds = seconds_since(start);

    DensityField& u = result.field;
    if (cfg.renormalize) {
        const double mass = u.mass();
        if (!(mass > 0.0)) throw NumericalError("cannot renormalize a field with nonpositive mass");
        for (double& x : u.values) x /= mass;
    }

    SolveSummary out;
    out.output_path = cfg.output_path;
    out.log_path = cfg.log_path.empty() ? cfg.output_path + ".log.jsonl" : cfg.log_path;
    out.seconds = seconds;
    out.mass = u.mass();
    out.min_value = u.min_value();
    out.rounds = result.rounds.size();

    std::ostringstream log;
    json head{{"type", "run"},
              {"model", model.name},
              {"epsilon", model.epsilon},
              {"method", to_string(rc.method)},
              {"grid", grid_json(core)},
              {"histogram", cfg.histogram_path},
              {"histogram_inflation", *inflation},
              {"blocks", std::vector<int>(bc.partition.blocks_per_dim.begin(),
                                          bc.partition.blocks_per_dim.begin() + core.dim())},
              {"cg_rel_tol", bc.solve_opts.cg_rel_tol}};
    if (rc.method == RepairMethod::overlap) head["iota"] = rc.iota;
    if (rc.method == RepairMethod::shift) head["schedule"] = rc.shift_schedule;
    log << head.dump() << '\n';
    for (const auto& round : result.rounds) {
        for (const auto& b : round.blocks) {
            json j = report_json(b);
            j["type"] = "block";
            j["round"] = round.round;
            out.max_block_residual = std::max(out.max_block_residual, b.solve.residual_constraint);
            log << j.dump() << '\n';
        }
        log << json{{"type", "round"},
                    {"round", round.round},
                    {"shift", round.shift},
                    {"seconds", round.seconds},
                    {"blocks", round.blocks.size()}}
                   .dump()
            << '\n';
    }
    log << json{{"type", "summary"},
                {"solve_seconds", seconds},
                {"rounds", out.rounds},
                {"mass", out.mass},
                {"min_value", out.min_value},
                {"max_block_residual", out.max_block_residual},
                {"renormalized", cfg.renormalize}}
               .dump()
        << '\n';

    write_atomically(out.output_path, [&](std::ostream& os) { write_fpgrid(os, u); });
    write_atomically(out.log_path, [&](std::ostream& os) { os << log.str(); });
    return out;
}

std::string cmd_errors(const std::string& solution, const std::string& reference, double epsilon) {
    const DensityField u = load_fpgrid(solution);
    DensityField ref = [&] {
        if (reference != "exact") return load_fpgrid(reference);
        if (u.grid.dim() != 2) throw ConfigurationError("the exact reference is the 2D ring density");
        return DensityField::sample(u.grid, ring_exact_density(epsilon));
    }();
    if (!u.grid.matches(ref.grid)) {
        throw DimensionError("solution grid " + u.grid.describe() + " does not match reference " +
                             ref.grid.describe());
    }
    const DensityField e = difference(u, ref);
    std::ostringstream row;
    row << fmt(discrete_l2_error(u, ref)) << ',' << fmt(discrete_h1_error(u, ref));
    for (int d = 1; d <= 4; ++d) {
        row << ',';
        try {
            row << fmt(boundary_weight_rho(e, d));
        } catch (const UndefinedRatioError&) {
        }
    }
    row << ',' << fmt(u.min_value()) << ',' << fmt(u.mass());
    return row.str();
}

void cmd_analyze_kernel(std::ostream& os, int n) {
    const KernelBasis basis = laplacian_kernel_basis(n);
    const auto diag = qr_diagonals(basis);
    os << "index,family,k,p,diagonal\n";
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const auto& l = basis.labels[i];
        os << i << ',' << l.family << ',' << l.k << ',' << l.p << ',' << fmt(diag[i]) << '\n';
    }
}

void cmd_analyze_angles(std::ostream& os, const RunConfig& cfg, const std::vector<int>& thicknesses) {
    const ModelSpec model = cfg.build_model();
    const InteriorOperator op = assemble(model, cfg.grid());
    const auto reports = principal_angles(op, thicknesses);
    os << "thickness,index,angle,cosine,p_d\n";
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.angles.size(); ++i) {
            os << r.thickness << ',' << i << ',' << fmt(r.angles[i]) << ',' << fmt(std::cos(r.angles[i]))
               << ',' << fmt(r.p_d) << '\n';
        }
    }
}

void cmd_convergence(std::ostream& os, const ConvergenceConfig& cfg) {
    write_convergence_csv(os, convergence_study(cfg));
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigurationError*>(&e)) return 2;
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    if (dynamic_cast<const IoError*>(&e)) return 4;
    return 1;
}

}  // namespace fpblock::cli
