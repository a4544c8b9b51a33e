#pragma once

#include "fpblock/grid.hpp"

#include <functional>
#include <map>
#include <string>

namespace fpblock {

using DriftFn = std::function<Point(const Point&)>;

/// SDE dX = f(X) dt + ε dW with independent Wiener components.
///
/// The diffusion matrix of the Fokker-Planck operator is D = ε²·I.
struct ModelSpec {
    std::string name;
    int dim = 0;
    double epsilon = 1.0;
    DriftFn drift;
    /// Parameter values in effect (defaults merged with overrides).
    std::map<std::string, double> params;

    Point operator()(const Point& x) const { return drift(x); }
};

using ParamOverrides = std::map<std::string, double>;

/// dx = (-4x(r²-1) + y) dt, dy = (-4y(r²-1) - x) dt, r² = x²+y².
ModelSpec ring_model(double epsilon);

/// Rössler oscillator; parameters a, b, c (defaults 0.2, 0.2, 5.7).
ModelSpec rossler_model(double epsilon, const ParamOverrides& overrides = {});

/// Fast-slow mixed-mode oscillator; parameters eta, nu, a, b, c.
ModelSpec mmo_model(double epsilon, const ParamOverrides& overrides = {});

/// Looks up `ring`, `rossler` or `mmo`; unknown names or parameters throw
/// ConfigurationError.
ModelSpec make_model(const std::string& name, double epsilon,
                     const ParamOverrides& overrides = {});

/// Exact invariant density of the ring model, u = exp(-2V/ε²)/K with
/// V = (x²+y²-1)² and K = π ∫_{-1}^{∞} exp(-2t²/ε²) dt.
class RingDensity {
public:
    explicit RingDensity(double epsilon);

    double operator()(const Point& p) const;
    double operator()(double x, double y) const { return (*this)({x, y, 0.0}); }

    double epsilon() const noexcept { return epsilon_; }
    /// Normalizer K, computed once by adaptive quadrature.
    double normalizer() const noexcept { return normalizer_; }

private:
    double epsilon_;
    double normalizer_;
};

RingDensity ring_exact_density(double epsilon);

/// Domain, starting point and step size used when a run does not override them.
struct ModelDefaults {
    Point lo{};
    Point hi{};
    Point initial_point{};
    double dt = 1e-3;
};

ModelDefaults model_defaults(const std::string& name);

}  // namespace fpblock
