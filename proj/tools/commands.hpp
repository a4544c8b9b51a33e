#pragma once

#include "fpblock/analysis.hpp"
#include "fpblock/run_config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fpblock::cli {

struct SampleSummary {
    std::string histogram_path;
    std::string sidecar_path;
    std::uint64_t total_retained = 0;
    std::uint64_t in_domain = 0;
    double seconds = 0.0;
};

/// Samples cfg.sampling_grid() and writes the fphist file plus
/// `<histogram>.json` metadata.
SampleSummary cmd_sample(const RunConfig& cfg);

struct SolveSummary {
    std::string output_path;
    std::string log_path;
    double seconds = 0.0;
    double mass = 0.0;
    double min_value = 0.0;
    /// Largest max|A·u| over all solved blocks and rounds.
    double max_block_residual = 0.0;
    std::size_t rounds = 0;
};

/// Loads cfg.histogram_path, solves with cfg.method and writes the fpgrid
/// output and a JSON-lines run log (`<output>.log.jsonl` unless cfg.log_path
/// is set). Grid mismatches are reported before any solve.
SolveSummary cmd_solve(const RunConfig& cfg);

inline constexpr const char* kErrorsHeader = "l2,h1,rho_1,rho_2,rho_3,rho_4,min_value,mass";

/// One CSV row (no header) comparing `solution` with `reference`, which is
/// either "exact" (ring density at `epsilon`) or an fpgrid path. Undefined
/// ρ ratios are written as empty fields.
std::string cmd_errors(const std::string& solution, const std::string& reference, double epsilon);

/// index,family,k,p,diagonal
void cmd_analyze_kernel(std::ostream& os, int n);

/// thickness,index,angle,cosine,p_d
void cmd_analyze_angles(std::ostream& os, const RunConfig& cfg, const std::vector<int>& thicknesses);

void cmd_convergence(std::ostream& os, const ConvergenceConfig& cfg);

/// Maps an exception to the documented exit status: 2 configuration,
/// 3 numerical, 4 I/O, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace fpblock::cli
