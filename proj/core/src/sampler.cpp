#include "fpblock/sampler.hpp"

#include "fpblock/error.hpp"
#include "parallel.hpp"

#include <cmath>
#include <exception>
#include <optional>
#include <random>
#include <string>

namespace fpblock {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct SafetyBox {
    Point lo{};
    Point hi{};

    SafetyBox(const Grid& g, double factor) {
        for (int k = 0; k < g.dim(); ++k) {
            const double mid = 0.5 * (g.lo(k) + g.hi(k));
            const double half = 0.5 * (g.hi(k) - g.lo(k)) * factor;
            lo[k] = mid - half;
            hi[k] = mid + half;
        }
    }

    bool contains(const Point& p, int dim) const {
        for (int k = 0; k < dim; ++k) {
            if (!(p[k] >= lo[k] && p[k] <= hi[k])) return false;
        }
        return true;
    }
};

}  // namespace

void SamplerConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigurationError("sampler dt must be positive");
    if (n_chains < 1) throw ConfigurationError("sampler needs at least one chain");
    if (!(safety_factor >= 1.0)) throw ConfigurationError("safety factor must be at least 1");
}

std::uint64_t Histogram::in_domain() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

void Histogram::merge(const Histogram& other) {
    if (!grid.matches(other.grid)) throw DimensionError("cannot merge histograms on different grids");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    total_retained += other.total_retained;
    restarts += other.restarts;
}

std::uint64_t chain_seed(std::uint64_t seed, int chain) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(chain)));
}

Point euler_maruyama_step(const Point& state, const ModelSpec& model, double dt,
                          const Point& noise) {
    const Point f = model.drift(state);
    const double scale = model.epsilon * std::sqrt(dt);
    Point next{};
    for (int k = 0; k < model.dim; ++k) {
        next[k] = state[k] + f[k] * dt + scale * noise[k];
        if (!std::isfinite(next[k])) {
            throw DivergenceError("non-finite state after Euler-Maruyama step", 0, 0);
        }
    }
    return next;
}

Histogram run_chain(const ModelSpec& model, const Grid& grid, const SamplerConfig& cfg, int chain,
                    std::uint64_t samples) {
    Histogram hist(grid);
    std::mt19937_64 rng(chain_seed(cfg.seed, chain));
    std::normal_distribution<double> normal(0.0, 1.0);
    const SafetyBox box(grid, cfg.safety_factor);
    const int d = model.dim;
    const double dt = cfg.dt;
    const double scale = model.epsilon * std::sqrt(dt);

    const Point start = cfg.initial_point.value_or(Point{});
    Point x = start;
    std::uint64_t burn_left = cfg.burn_in;
    std::uint64_t retained = 0;
    for (std::uint64_t step = 0; retained < samples; ++step) {
        const Point f = model.drift(x);
        for (int k = 0; k < d; ++k) x[k] += f[k] * dt + scale * normal(rng);
        if (!box.contains(x, d)) {
            if (!cfg.restart_on_escape) {
                throw DivergenceError("chain " + std::to_string(chain) + " left the safety box at step " +
                                          std::to_string(step) +
                                          "; dt may be too large, or the process escapes (see restart_on_escape)",
                                      chain, step);
            }
            ++hist.restarts;
            x = start;
            burn_left = cfg.burn_in;
            continue;
        }
        if (burn_left > 0) {
            --burn_left;
            continue;
        }
        ++retained;
        if (auto cell = grid.locate_cell(x)) ++hist.counts[grid.flat(*cell)];
    }
    hist.total_retained = samples;
    return hist;
}

Histogram accumulate_histogram(const ModelSpec& model, const Grid& grid, const SamplerConfig& cfg) {
    cfg.validate();
    if (grid.dim() != model.dim) {
        throw DimensionError("model '" + model.name + "' has dimension " +
                             std::to_string(model.dim) + " but the grid has " +
                             std::to_string(grid.dim()));
    }
    Histogram total(grid);
    if (cfg.n_samples == 0) return total;

    const auto chains = static_cast<std::size_t>(cfg.n_chains);
    const std::uint64_t per_chain = cfg.n_samples / chains;
    const std::uint64_t remainder = cfg.n_samples % chains;

    std::vector<std::optional<Histogram>> parts(chains);
    std::vector<std::exception_ptr> failures(chains);
    detail::parallel_for(chains, cfg.parallel, [&](std::size_t c) {
        try {
            const std::uint64_t samples = per_chain + (c < remainder ? 1 : 0);
            parts[c].emplace(run_chain(model, grid, cfg, static_cast<int>(c), samples));
        } catch (...) {
            failures[c] = std::current_exception();
        }
    });
    for (std::size_t c = 0; c < chains; ++c) {
        if (failures[c]) std::rethrow_exception(failures[c]);
        total.merge(*parts[c]);
    }
    return total;
}

DensityField histogram_to_density(const Histogram& hist) {
    if (hist.total_retained == 0) throw EmptyHistogramError("histogram has no retained samples");
    DensityField out(hist.grid);
    const double scale = 1.0 / (static_cast<double>(hist.total_retained) * hist.grid.cell_volume());
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        out.values[i] = static_cast<double>(hist.counts[i]) * scale;
    }
    return out;
}

DensityField synthetic_reference(const DensityField& exact, double zeta, std::uint64_t seed) {
    if (!(zeta >= 0.0)) throw PreconditionError("noise level zeta must be nonnegative");
    DensityField out = exact;
    if (zeta == 0.0) return out;
    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> normal(0.0, zeta);
    for (double& v : out.values) v += normal(rng);
    return out;
}

}  // namespace fpblock
