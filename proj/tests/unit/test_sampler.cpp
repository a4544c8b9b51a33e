#include "fpblock/error.hpp"
#include "fpblock/sampler.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace fpblock;

namespace {

ModelSpec ou_model() {
    ModelSpec m;
    m.name = "ou";
    m.dim = 1;
    m.epsilon = 1.0;
    m.drift = [](const Point& p) { return Point{-p[0], 0.0, 0.0}; };
    return m;
}

SamplerConfig small_config(std::uint64_t samples, std::uint64_t seed) {
    SamplerConfig c;
    c.dt = 0.002;
    c.n_samples = samples;
    c.burn_in = 1000;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(Sampler, EulerMaruyamaStepFormula) {
    const ModelSpec m = ring_model(0.5);
    const Point x{0.3, -0.7, 0.0};
    const Point noise{1.5, -0.25, 0.0};
    const double dt = 0.01;
    const Point next = euler_maruyama_step(x, m, dt, noise);
    const Point f = m(x);
    for (int k = 0; k < 2; ++k) {
        EXPECT_DOUBLE_EQ(next[k], x[k] + f[k] * dt + 0.5 * std::sqrt(dt) * noise[k]);
    }
}

TEST(Sampler, EulerMaruyamaStepRejectsNonFinite) {
    const ModelSpec m = ring_model(1.0);
    EXPECT_THROW(euler_maruyama_step({1e200, 1e200, 0.0}, m, 0.1, {0.0, 0.0, 0.0}), DivergenceError);
}

TEST(Sampler, DeterministicForFixedSeed) {
    const ModelSpec m = ring_model(1.0);
    const Grid g = Grid::cube(2, -2.0, 2.0, 16);
    const Histogram a = accumulate_histogram(m, g, small_config(20000, 5));
    const Histogram b = accumulate_histogram(m, g, small_config(20000, 5));
    const Histogram c = accumulate_histogram(m, g, small_config(20000, 6));
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_NE(a.counts, c.counts);
    EXPECT_EQ(a.total_retained, 20000u);
}

TEST(Sampler, ChainsMergeInOrderAndParallelMatchesSerial) {
    const ModelSpec m = ring_model(1.0);
    const Grid g = Grid::cube(2, -2.0, 2.0, 16);
    SamplerConfig cfg = small_config(10001, 9);
    cfg.n_chains = 3;
    const Histogram all = accumulate_histogram(m, g, cfg);
    Histogram manual(g);
    manual.merge(run_chain(m, g, cfg, 0, 3334));
    manual.merge(run_chain(m, g, cfg, 1, 3334));
    manual.merge(run_chain(m, g, cfg, 2, 3333));
    EXPECT_EQ(all.counts, manual.counts);
    EXPECT_EQ(all.total_retained, 10001u);

    cfg.parallel = true;
    EXPECT_EQ(accumulate_histogram(m, g, cfg).counts, all.counts);
    EXPECT_NE(chain_seed(9, 0), chain_seed(9, 1));
}

TEST(Sampler, ZeroSamplesGivesEmptyHistogram) {
    const Histogram h = accumulate_histogram(ring_model(1.0), Grid::cube(2, -2.0, 2.0, 8), small_config(0, 1));
    EXPECT_EQ(h.total_retained, 0u);
    EXPECT_EQ(h.in_domain(), 0u);
    EXPECT_THROW(histogram_to_density(h), EmptyHistogramError);
}

TEST(Sampler, DensityNormalization) {
    // Half the ring's mass lies in x > 0, so a half domain retains about half.
    const Grid g({0.0, -2.0}, {2.0, 2.0}, {8, 16});
    const Histogram h = accumulate_histogram(ring_model(1.0), g, small_config(50000, 2));
    const DensityField v = histogram_to_density(h);
    EXPECT_NEAR(v.mass(), static_cast<double>(h.in_domain()) / 50000.0, 1e-12);
    EXPECT_LT(h.in_domain(), h.total_retained);
}

TEST(Sampler, DimensionMismatchAndBadConfig) {
    SamplerConfig cfg = small_config(10, 1);
    EXPECT_THROW(accumulate_histogram(ring_model(1.0), Grid::cube(3, 0.0, 1.0, 4), cfg), DimensionError);
    cfg.dt = 0.0;
    EXPECT_THROW(accumulate_histogram(ring_model(1.0), Grid::cube(2, 0.0, 1.0, 4), cfg), ConfigurationError);
    cfg.dt = 0.01;
    cfg.n_chains = 0;
    EXPECT_THROW(accumulate_histogram(ring_model(1.0), Grid::cube(2, 0.0, 1.0, 4), cfg), ConfigurationError);
}

TEST(Sampler, OrnsteinUhlenbeckStationaryMoments) {
    // dX = -X dt + dW has stationary law N(0, 1/2); Euler-Maruyama with step
    // dt has variance 1/(2 - dt).
    const ModelSpec m = ou_model();
    const Grid g = Grid::cube(1, -4.0, 4.0, 160);
    SamplerConfig cfg;
    cfg.dt = 0.01;
    cfg.n_samples = 2000000;
    cfg.burn_in = 1000;
    cfg.seed = 21;
    const Histogram h = accumulate_histogram(m, g, cfg);
    double n = 0, s1 = 0, s2 = 0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const double x = g.cell_center(g.unflat(c))[0];
        const double w = static_cast<double>(h.counts[c]);
        n += w;
        s1 += w * x;
        s2 += w * x * x;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean - g.h() * g.h() / 12.0;
    EXPECT_NEAR(mean, 0.0, 0.03);
    EXPECT_NEAR(var, 1.0 / (2.0 - cfg.dt), 0.03);
}

TEST(Sampler, DivergenceCarriesChainAndStep) {
    ModelSpec m;
    m.name = "blowup";
    m.dim = 1;
    m.epsilon = 0.1;
    m.drift = [](const Point& p) { return Point{1.0 + p[0] * p[0], 0.0, 0.0}; };
    SamplerConfig cfg = small_config(1000000, 1);
    cfg.dt = 0.01;
    cfg.burn_in = 0;
    cfg.n_chains = 2;
    try {
        accumulate_histogram(m, Grid::cube(1, -1.0, 1.0, 8), cfg);
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.chain(), 0);
        EXPECT_GT(e.step(), 0u);
        EXPECT_NE(std::string(e.what()).find("chain 0"), std::string::npos);
    }
}

TEST(Sampler, RestartOnEscapeKeepsRetainedCount) {
    ModelSpec m;
    m.name = "drift_out";
    m.dim = 1;
    m.epsilon = 0.1;
    m.drift = [](const Point&) { return Point{5.0, 0.0, 0.0}; };
    SamplerConfig cfg = small_config(5000, 4);
    cfg.dt = 0.01;
    cfg.burn_in = 10;
    cfg.safety_factor = 2.0;
    cfg.restart_on_escape = true;
    const Histogram h = accumulate_histogram(m, Grid::cube(1, -1.0, 1.0, 8), cfg);
    EXPECT_EQ(h.total_retained, 5000u);
    EXPECT_GT(h.restarts, 0u);
}

TEST(Sampler, SyntheticReferenceNoiseStatistics) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 100);
    const DensityField exact = DensityField::sample(g, [](const Point& p) { return p[0] + p[1]; });
    const DensityField v = synthetic_reference(exact, 0.01, 77);
    double s1 = 0, s2 = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = v.values[i] - exact.values[i];
        s1 += d;
        s2 += d * d;
    }
    const double n = static_cast<double>(g.size());
    EXPECT_NEAR(s1 / n, 0.0, 4 * 0.01 / std::sqrt(n));
    EXPECT_NEAR(std::sqrt(s2 / n), 0.01, 0.0005);
    EXPECT_EQ(synthetic_reference(exact, 0.01, 77).values, v.values);
    EXPECT_EQ(synthetic_reference(exact, 0.0, 1).values, exact.values);
    EXPECT_THROW(synthetic_reference(exact, -0.1, 1), PreconditionError);
}
