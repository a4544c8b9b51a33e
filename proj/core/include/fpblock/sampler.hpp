#pragma once

#include "fpblock/grid.hpp"
#include "fpblock/models.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace fpblock {

/// Euler-Maruyama sampling parameters.
struct SamplerConfig {
    double dt = 0.002;
    /// Retained steps across all chains.
    std::uint64_t n_samples = 0;
    /// Discarded steps at the start of each chain.
    std::uint64_t burn_in = 100000;
    std::uint64_t seed = 0;
    int n_chains = 1;
    /// Starting state of every chain; nullopt means the origin.
    std::optional<Point> initial_point;
    /// Multiple of the domain half-width beyond which a chain is declared
    /// divergent (the box keeps the domain's center).
    double safety_factor = 100.0;
    /// Leaving the safety box restarts the chain from its initial point with
    /// a fresh burn-in instead of throwing DivergenceError.
    bool restart_on_escape = false;
    bool parallel = false;

    void validate() const;
};

/// Visit counts per cell; samples outside the grid count toward
/// total_retained only.
struct Histogram {
    Grid grid;
    std::vector<std::uint64_t> counts;
    std::uint64_t total_retained = 0;
    /// Chain restarts after escapes (restart_on_escape only; not persisted).
    std::uint64_t restarts = 0;

    explicit Histogram(Grid g) : grid(std::move(g)), counts(grid.size(), 0) {}

    std::uint64_t in_domain() const;
    /// Adds counts of another histogram on the same grid.
    void merge(const Histogram& other);
};

/// x + f(x)·dt + ε·√dt·noise. Throws DivergenceError (step 0) when the result
/// is not finite.
Point euler_maruyama_step(const Point& state, const ModelSpec& model, double dt,
                          const Point& noise);

/// Runs cfg.n_chains independent chains and bins their retained states.
/// Results depend only on (model, grid, cfg), never on execution order.
Histogram accumulate_histogram(const ModelSpec& model, const Grid& grid, const SamplerConfig& cfg);

/// Single chain, exposed for merge tests: `samples` retained states after
/// cfg.burn_in discarded steps, seeded from (cfg.seed, chain).
Histogram run_chain(const ModelSpec& model, const Grid& grid, const SamplerConfig& cfg, int chain,
                    std::uint64_t samples);

/// v = counts / (total_retained · h^d).
DensityField histogram_to_density(const Histogram& hist);

/// exact + i.i.d. N(0, zeta²) per entry.
DensityField synthetic_reference(const DensityField& exact, double zeta, std::uint64_t seed);

/// Stream seed for a chain, derived from the run seed by SplitMix64 mixing.
std::uint64_t chain_seed(std::uint64_t seed, int chain);

}  // namespace fpblock
