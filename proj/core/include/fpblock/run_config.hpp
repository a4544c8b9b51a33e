#pragma once

#include "fpblock/block_solver.hpp"
#include "fpblock/grid.hpp"
#include "fpblock/interface_repair.hpp"
#include "fpblock/models.hpp"
#include "fpblock/sampler.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fpblock {

/// Everything a sample/solve run needs, persisted as flat `key=value` lines.
///
/// List values are comma separated (`lo=-2,-2`); `blocks` uses `x`
/// (`blocks=8x8`); schedule entries may be fractions (`schedule=1/3,2/3,0`).
/// Single-entry `lo`, `hi`, `n` and `blocks` apply to every dimension. Empty
/// `lo`/`hi`/`initial_point` select the model defaults. Model parameter
/// overrides use `param.<name>=<value>`.
struct RunConfig {
    std::string model = "ring";
    double epsilon = 1.0;

    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<int> n{64};

    double dt = 0.0;  // 0 selects the model default
    std::uint64_t samples = 1000000;
    std::uint64_t burn_in = 100000;
    std::uint64_t seed = 1;
    int chains = 1;
    int inflate = 0;
    std::vector<double> initial_point;
    bool restart_on_escape = false;

    std::vector<int> blocks{1};
    std::string method = "plain";
    int iota = 1;
    std::vector<double> schedule = default_shift_schedule();
    double cg_rel_tol = 1e-10;
    std::uint64_t cg_max_iters = 0;
    bool renormalize = false;
    bool parallel = false;

    std::string histogram_path;
    std::string output_path;
    std::string log_path;

    std::map<std::string, double> params;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    /// Applies one `key=value` setting; unknown keys or bad values throw
    /// ConfigurationError.
    void set(const std::string& key, const std::string& value);

    /// Checks every numeric field and that output paths are writable.
    void validate() const;

    ModelSpec build_model() const;
    /// The solve domain.
    Grid grid() const;
    /// The solve domain inflated by `inflate` cells per side.
    Grid sampling_grid() const;
    SamplerConfig sampler_config() const;
    BlockSolveConfig block_config() const;
    RepairConfig repair_config() const;
};

RunConfig parse_run_config(std::istream& is);
RunConfig parse_run_config_string(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string serialize(const RunConfig& cfg);

}  // namespace fpblock
