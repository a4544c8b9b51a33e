#include "fpblock/run_config.hpp"

#include "fpblock/error.hpp"

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fpblock {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

[[noreturn]] void bad(const std::string& key, const std::string& value) {
    throw ConfigurationError("invalid value '" + value + "' for " + key);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    // Fractions such as 1/3.
    if (auto slash = s.find('/'); slash != std::string::npos) {
        const double num = to_double(key, s.substr(0, slash));
        const double den = to_double(key, s.substr(slash + 1));
        if (den == 0.0) bad(key, text);
        return num / den;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) bad(key, text);
        return v;
    } catch (const std::logic_error&) {
        bad(key, text);
    }
}

template <class Int>
Int to_int(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    Int v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) bad(key, text);
    return v;
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    bad(key, text);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(to_double(key, item));
    return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, char sep, F&& f) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += f(v[i]);
    }
    return out;
}

/// Broadcasts a single entry to `dim` entries.
template <class T>
std::vector<T> per_dim(const std::vector<T>& v, int dim, const std::string& key) {
    if (v.size() == 1) return std::vector<T>(static_cast<std::size_t>(dim), v.front());
    if (v.size() != static_cast<std::size_t>(dim)) {
        throw ConfigurationError(key + " has " + std::to_string(v.size()) +
                                 " entries; the model needs " + std::to_string(dim));
    }
    return v;
}

void check_writable(const std::string& key, const std::string& path) {
    if (path.empty()) return;
    namespace fs = std::filesystem;
    fs::path p(path);
    fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw ConfigurationError(key + ": directory '" + dir.string() + "' does not exist");
    }
    if (::access(dir.c_str(), W_OK) != 0) {
        throw ConfigurationError(key + ": directory '" + dir.string() + "' is not writable");
    }
    if (fs::exists(p, ec) && ::access(p.c_str(), W_OK) != 0) {
        throw ConfigurationError(key + ": '" + path + "' is not writable");
    }
}

}  // namespace

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key.rfind("param.", 0) == 0) {
        params[key.substr(6)] = to_double(key, value);
    } else if (key == "model") {
        model = value;
    } else if (key == "epsilon") {
        epsilon = to_double(key, value);
    } else if (key == "lo") {
        lo = to_doubles(key, value);
    } else if (key == "hi") {
        hi = to_doubles(key, value);
    } else if (key == "n") {
        n.clear();
        for (const auto& item : split(value, ',')) n.push_back(to_int<int>(key, item));
    } else if (key == "dt") {
        dt = to_double(key, value);
    } else if (key == "samples") {
        // Accept 1e7 style counts.
        const double d = to_double(key, value);
        if (!(d >= 0.0) || d != static_cast<double>(static_cast<std::uint64_t>(d))) bad(key, value);
        samples = static_cast<std::uint64_t>(d);
    } else if (key == "burn_in") {
        burn_in = to_int<std::uint64_t>(key, value);
    } else if (key == "seed") {
        seed = to_int<std::uint64_t>(key, value);
    } else if (key == "chains") {
        chains = to_int<int>(key, value);
    } else if (key == "inflate") {
        inflate = to_int<int>(key, value);
    } else if (key == "initial_point") {
        initial_point = to_doubles(key, value);
    } else if (key == "restart_on_escape") {
        restart_on_escape = to_bool(key, value);
    } else if (key == "blocks") {
        blocks.clear();
        for (const auto& item : split(value, 'x')) blocks.push_back(to_int<int>(key, item));
    } else if (key == "method") {
        method = value;
    } else if (key == "iota") {
        iota = to_int<int>(key, value);
    } else if (key == "schedule") {
        schedule = to_doubles(key, value);
    } else if (key == "cg_rel_tol") {
        cg_rel_tol = to_double(key, value);
    } else if (key == "cg_max_iters") {
        cg_max_iters = to_int<std::uint64_t>(key, value);
    } else if (key == "renormalize") {
        renormalize = to_bool(key, value);
    } else if (key == "parallel") {
        parallel = to_bool(key, value);
    } else if (key == "histogram") {
        histogram_path = value;
    } else if (key == "output") {
        output_path = value;
    } else if (key == "log") {
        log_path = value;
    } else {
        throw ConfigurationError("unknown configuration key '" + key + "'");
    }
}

ModelSpec RunConfig::build_model() const { return make_model(model, epsilon, params); }

Grid RunConfig::grid() const {
    const ModelSpec m = build_model();
    const ModelDefaults d = model_defaults(model);
    std::vector<double> l = lo.empty() ? std::vector<double>(d.lo.begin(), d.lo.begin() + m.dim)
                                       : per_dim(lo, m.dim, "lo");
    std::vector<double> h = hi.empty() ? std::vector<double>(d.hi.begin(), d.hi.begin() + m.dim)
                                       : per_dim(hi, m.dim, "hi");
    return Grid(l, h, per_dim(n, m.dim, "n"));
}

Grid RunConfig::sampling_grid() const { return grid().inflated(inflate); }

SamplerConfig RunConfig::sampler_config() const {
    const ModelDefaults d = model_defaults(model);
    SamplerConfig sc;
    sc.dt = dt > 0.0 ? dt : d.dt;
    sc.n_samples = samples;
    sc.burn_in = burn_in;
    sc.seed = seed;
    sc.n_chains = chains;
    sc.parallel = parallel;
    sc.restart_on_escape = restart_on_escape;
    if (initial_point.empty()) {
        sc.initial_point = d.initial_point;
    } else {
        const int dim = build_model().dim;
        const auto p = per_dim(initial_point, dim, "initial_point");
        Point x{};
        for (int k = 0; k < dim; ++k) x[k] = p[static_cast<std::size_t>(k)];
        sc.initial_point = x;
    }
    return sc;
}

BlockSolveConfig RunConfig::block_config() const {
    BlockSolveConfig bc;
    bc.partition.grid = grid();
    const auto b = per_dim(blocks, bc.partition.grid.dim(), "blocks");
    for (std::size_t k = 0; k < b.size(); ++k) bc.partition.blocks_per_dim[k] = b[k];
    bc.solve_opts.cg_rel_tol = cg_rel_tol;
    bc.solve_opts.cg_max_iters = static_cast<std::size_t>(cg_max_iters);
    bc.parallel = parallel;
    return bc;
}

RepairConfig RunConfig::repair_config() const {
    RepairConfig rc;
    rc.method = parse_repair_method(method);
    rc.iota = iota;
    rc.shift_schedule = schedule;
    return rc;
}

void RunConfig::validate() const {
    grid();  // model, epsilon, bounds and n
    if (dt < 0.0) throw ConfigurationError("dt must be positive (0 selects the model default)");
    if (inflate < 0) throw ConfigurationError("inflate must be nonnegative");
    sampler_config().validate();
    const BlockSolveConfig bc = block_config();
    bc.partition.validate();
    bc.solve_opts.validate();
    const RepairConfig rc = repair_config();
    rc.validate();
    if (rc.method == RepairMethod::overlap && inflate != 0 && inflate < iota) {
        throw ConfigurationError("inflate must be at least iota for overlapping blocks");
    }
    check_writable("histogram", histogram_path);
    check_writable("output", output_path);
    check_writable("log", log_path);
}

RunConfig parse_run_config(std::istream& is) {
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigurationError("line " + std::to_string(line_no) + ": expected key=value");
        }
        cfg.set(t.substr(0, eq), t.substr(eq + 1));
    }
    return cfg;
}

RunConfig parse_run_config_string(const std::string& text) {
    std::istringstream is(text);
    return parse_run_config(is);
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config '" + path.string() + "'");
    return parse_run_config(is);
}

std::string serialize(const RunConfig& c) {
    auto dbl = [](double x) { return fmt(x); };
    auto num = [](auto x) { return std::to_string(x); };
    std::ostringstream os;
    os << "model=" << c.model << '\n'
       << "epsilon=" << fmt(c.epsilon) << '\n'
       << "lo=" << join(c.lo, ',', dbl) << '\n'
       << "hi=" << join(c.hi, ',', dbl) << '\n'
       << "n=" << join(c.n, ',', num) << '\n'
       << "dt=" << fmt(c.dt) << '\n'
       << "samples=" << c.samples << '\n'
       << "burn_in=" << c.burn_in << '\n'
       << "seed=" << c.seed << '\n'
       << "chains=" << c.chains << '\n'
       << "inflate=" << c.inflate << '\n'
       << "initial_point=" << join(c.initial_point, ',', dbl) << '\n'
       << "restart_on_escape=" << (c.restart_on_escape ? "true" : "false") << '\n'
       << "blocks=" << join(c.blocks, 'x', num) << '\n'
       << "method=" << c.method << '\n'
       << "iota=" << c.iota << '\n'
       << "schedule=" << join(c.schedule, ',', dbl) << '\n'
       << "cg_rel_tol=" << fmt(c.cg_rel_tol) << '\n'
       << "cg_max_iters=" << c.cg_max_iters << '\n'
       << "renormalize=" << (c.renormalize ? "true" : "false") << '\n'
       << "parallel=" << (c.parallel ? "true" : "false") << '\n'
       << "histogram=" << c.histogram_path << '\n'
       << "output=" << c.output_path << '\n'
       << "log=" << c.log_path << '\n';
    for (const auto& [k, v] : c.params) os << "param." << k << '=' << fmt(v) << '\n';
    return os.str();
}

}  // namespace fpblock
