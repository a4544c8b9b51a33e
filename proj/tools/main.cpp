#include "commands.hpp"

#include "fpblock/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>

using namespace fpblock;

namespace {

/// Run-configuration flags shared by the subcommands: `--config`, repeated
/// `--set key=value`, and one flag per config key.
struct ConfigFlags {
    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> values;

    void attach(CLI::App* app, const std::vector<std::pair<std::string, std::string>>& flags) {
        app->add_option("--config", config_path, "key=value run configuration file");
        app->add_option("--set", sets, "override a configuration key (key=value), repeatable");
        for (const auto& [flag, key] : flags) {
            app->add_option(flag, values[key], "sets " + key);
        }
    }

    RunConfig resolve() const {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigurationError("--set expects key=value, got '" + s + "'");
            cfg.set(s.substr(0, eq), s.substr(eq + 1));
        }
        for (const auto& [key, value] : values) {
            if (!value.empty()) cfg.set(key, value);
        }
        return cfg;
    }
};

const std::vector<std::pair<std::string, std::string>> kModelFlags{
    {"--model", "model"}, {"--epsilon", "epsilon"}, {"--lo", "lo"}, {"--hi", "hi"}, {"--n", "n"}};

const std::vector<std::pair<std::string, std::string>> kSampleFlags{
    {"--dt", "dt"},
    {"--samples", "samples"},
    {"--burn-in", "burn_in"},
    {"--seed", "seed"},
    {"--chains", "chains"},
    {"--inflate", "inflate"},
    {"--initial-point", "initial_point"},
    {"--restart-on-escape", "restart_on_escape"},
    {"--histogram", "histogram"},
    {"--parallel", "parallel"}};

const std::vector<std::pair<std::string, std::string>> kSolveFlags{
    {"--blocks", "blocks"},
    {"--method", "method"},
    {"--iota", "iota"},
    {"--schedule", "schedule"},
    {"--cg-rel-tol", "cg_rel_tol"},
    {"--cg-max-iters", "cg_max_iters"},
    {"--renormalize", "renormalize"},
    {"--histogram", "histogram"},
    {"--output", "output"},
    {"--log", "log"},
    {"--inflate", "inflate"},
    {"--parallel", "parallel"}};

std::vector<std::pair<std::string, std::string>> concat(
    std::vector<std::pair<std::string, std::string>> a,
    const std::vector<std::pair<std::string, std::string>>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<int> parse_ints(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigurationError("expected a comma-separated integer list, got '" + text + "'");
        }
    }
    return out;
}

/// Writes to `path`, or stdout when empty.
template <class F>
void with_output(const std::string& path, F&& f) {
    if (path.empty()) {
        f(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    f(os);
    if (!os) throw IoError("write to '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block least-norm solver for stationary Fokker-Planck densities"};
    app.require_subcommand(1);

    ConfigFlags sample_flags, solve_flags, angle_flags;

    auto* sample = app.add_subcommand("sample", "sample the SDE into an fphist histogram");
    sample_flags.attach(sample, concat(kModelFlags, kSampleFlags));

    auto* solve = app.add_subcommand("solve", "project a histogram onto the discrete solution space");
    solve_flags.attach(solve, concat(kModelFlags, kSolveFlags));

    std::string errors_solution, errors_reference = "exact";
    double errors_epsilon = 1.0;
    bool errors_header = false;
    auto* errors = app.add_subcommand("errors", "L2, H1 and boundary weights of a solution");
    errors->add_option("solution", errors_solution, "fpgrid solution")->required();
    errors->add_option("--reference", errors_reference, "'exact' (ring density) or an fpgrid file");
    errors->add_option("--epsilon", errors_epsilon, "noise level of the exact ring density");
    errors->add_flag("--header", errors_header, "print the CSV header first");

    auto* analyze = app.add_subcommand("analyze", "kernel basis and principal-angle studies");
    analyze->require_subcommand(1);
    int kernel_n = 101;
    std::string analyze_out;
    auto* kernel = analyze->add_subcommand("kernel", "QR diagonals of the explicit kernel basis");
    kernel->add_option("--n", kernel_n, "odd grid side");
    kernel->add_option("--out", analyze_out, "CSV path (stdout if omitted)");
    std::string thickness_list = "1,2,3";
    auto* angles = analyze->add_subcommand("angles", "principal angles of Ker(A) to the boundary layer");
    angle_flags.attach(angles, kModelFlags);
    angles->add_option("--thickness", thickness_list, "comma-separated layer thicknesses");
    angles->add_option("--out", analyze_out, "CSV path (stdout if omitted)");

    ConvergenceConfig conv;
    std::string conv_sizes, conv_methods, conv_out, conv_schedule;
    auto* convergence = app.add_subcommand("convergence", "ring-model error table over mesh sizes");
    convergence->add_option("--n", conv_sizes, "comma-separated mesh sizes (default 64,128,256)");
    convergence->add_option("--methods", conv_methods, "subset of mc,plain,overlap,shift");
    convergence->add_option("--samples-per-cell", conv.samples_per_cell);
    convergence->add_option("--block-cells", conv.block_cells);
    convergence->add_option("--iota", conv.iota);
    convergence->add_option("--schedule", conv_schedule);
    convergence->add_option("--epsilon", conv.epsilon);
    convergence->add_option("--dt", conv.dt);
    convergence->add_option("--burn-in", conv.burn_in);
    convergence->add_option("--seed", conv.seed);
    convergence->add_option("--chains", conv.chains);
    convergence->add_flag("--parallel", conv.parallel);
    convergence->add_option("--out", conv_out, "CSV path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sample) {
            const auto s = cli::cmd_sample(sample_flags.resolve());
            std::cout << "wrote " << s.histogram_path << " (" << s.in_domain << " of " << s.total_retained
                      << " samples in the grid, " << s.seconds << " s)\n";
        } else if (*solve) {
            const auto s = cli::cmd_solve(solve_flags.resolve());
            std::cout << "wrote " << s.output_path << " and " << s.log_path << " (" << s.rounds
                      << " round(s), " << s.seconds << " s, mass " << s.mass << ", max block residual "
                      << s.max_block_residual << ")\n";
        } else if (*errors) {
            if (errors_header) std::cout << cli::kErrorsHeader << '\n';
            std::cout << cli::cmd_errors(errors_solution, errors_reference, errors_epsilon) << '\n';
        } else if (*kernel) {
            with_output(analyze_out, [&](std::ostream& os) { cli::cmd_analyze_kernel(os, kernel_n); });
        } else if (*angles) {
            const RunConfig cfg = angle_flags.resolve();
            const auto t = parse_ints(thickness_list);
            with_output(analyze_out, [&](std::ostream& os) { cli::cmd_analyze_angles(os, cfg, t); });
        } else if (*convergence) {
            if (!conv_sizes.empty()) conv.mesh_sizes = parse_ints(conv_sizes);
            if (!conv_methods.empty()) {
                conv.methods.clear();
                std::stringstream ss(conv_methods);
                std::string m;
                while (std::getline(ss, m, ',')) conv.methods.push_back(m);
            }
            if (!conv_schedule.empty()) {
                RunConfig tmp;
                tmp.set("schedule", conv_schedule);
                conv.schedule = tmp.schedule;
            }
            with_output(conv_out, [&](std::ostream& os) { cli::cmd_convergence(os, conv); });
        }
    } catch (const std::exception& e) {
        std::cerr << "fpblock: " << e.what() << '\n';
        return cli::exit_code_for(e);
    }
    return 0;
}
