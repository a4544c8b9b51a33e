#include "fpblock/models.hpp"

#include "fpblock/error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace fpblock {
namespace {

void require_positive_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ConfigurationError("noise strength epsilon must be positive, got " +
                                 std::to_string(epsilon));
    }
}

std::map<std::string, double> merge(std::map<std::string, double> defaults,
                                    const ParamOverrides& overrides, const std::string& model) {
    for (const auto& [key, value] : overrides) {
        auto it = defaults.find(key);
        if (it == defaults.end()) {
            throw ConfigurationError("model '" + model + "' has no parameter '" + key + "'");
        }
        it->second = value;
    }
    return defaults;
}

}  // namespace

ModelSpec ring_model(double epsilon) {
    require_positive_epsilon(epsilon);
    ModelSpec m;
    m.name = "ring";
    m.dim = 2;
    m.epsilon = epsilon;
    m.drift = [](const Point& p) {
        const double x = p[0], y = p[1];
        const double r = x * x + y * y - 1.0;
        return Point{-4.0 * x * r + y, -4.0 * y * r - x, 0.0};
    };
    return m;
}

ModelSpec rossler_model(double epsilon, const ParamOverrides& overrides) {
    require_positive_epsilon(epsilon);
    ModelSpec m;
    m.name = "rossler";
    m.dim = 3;
    m.epsilon = epsilon;
    m.params = merge({{"a", 0.2}, {"b", 0.2}, {"c", 5.7}}, overrides, m.name);
    const double a = m.params.at("a"), b = m.params.at("b"), c = m.params.at("c");
    m.drift = [a, b, c](const Point& p) {
        const double x = p[0], y = p[1], z = p[2];
        return Point{-y - z, x + a * y, b + z * (x - c)};
    };
    return m;
}

ModelSpec mmo_model(double epsilon, const ParamOverrides& overrides) {
    require_positive_epsilon(epsilon);
    ModelSpec m;
    m.name = "mmo";
    m.dim = 3;
    m.epsilon = epsilon;
    m.params = merge(
        {{"eta", 0.01}, {"nu", 0.0072168}, {"a", -0.3872}, {"b", -0.3251}, {"c", 1.17}},
        overrides, m.name);
    const double eta = m.params.at("eta"), nu = m.params.at("nu");
    const double a = m.params.at("a"), b = m.params.at("b"), c = m.params.at("c");
    if (!(eta > 0.0)) throw ConfigurationError("mmo parameter eta must be positive");
    m.drift = [=](const Point& p) {
        const double x = p[0], y = p[1], z = p[2];
        return Point{(y - x * x - x * x * x) / eta, z - x, -nu - a * x - b * y - c * z};
    };
    return m;
}

ModelSpec make_model(const std::string& name, double epsilon, const ParamOverrides& overrides) {
    if (name == "ring") {
        if (!overrides.empty()) throw ConfigurationError("model 'ring' has no parameters");
        return ring_model(epsilon);
    }
    if (name == "rossler") return rossler_model(epsilon, overrides);
    if (name == "mmo") return mmo_model(epsilon, overrides);
    throw ConfigurationError("unknown model '" + name + "' (expected ring, rossler or mmo)");
}

// ---------------------------------------------------------------------------

RingDensity::RingDensity(double epsilon) : epsilon_(epsilon) {
    require_positive_epsilon(epsilon);
    const double a = 2.0 / (epsilon * epsilon);
    boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0;
    const double integral = integrator.integrate(
        [a](double t) { return std::exp(-a * t * t); }, -1.0,
        std::numeric_limits<double>::infinity(), 1e-12, &error);
    normalizer_ = std::numbers::pi * integral;
}

double RingDensity::operator()(const Point& p) const {
    const double r = p[0] * p[0] + p[1] * p[1] - 1.0;
    return std::exp(-2.0 * r * r / (epsilon_ * epsilon_)) / normalizer_;
}

RingDensity ring_exact_density(double epsilon) { return RingDensity(epsilon); }

ModelDefaults model_defaults(const std::string& name) {
    ModelDefaults d;
    if (name == "ring") {
        d.lo = {-2.0, -2.0, 0.0};
        d.hi = {2.0, 2.0, 0.0};
        d.initial_point = {0.0, 0.0, 0.0};
        d.dt = 0.002;
    } else if (name == "rossler") {
        d.lo = {-12.0, -12.0, -1.5};
        d.hi = {12.0, 12.0, 22.5};
        d.initial_point = {0.0, -5.0, 0.0};
        d.dt = 0.005;
    } else if (name == "mmo") {
        d.lo = {-1.5, -0.9, -1.0};
        d.hi = {0.5, 1.1, 1.0};
        d.initial_point = {-1.0, 0.0, 0.0};
        d.dt = 1e-4;
    } else {
        throw ConfigurationError("unknown model '" + name + "'");
    }
    return d;
}

}  // namespace fpblock
