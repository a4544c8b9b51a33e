#include "fpblock/least_norm.hpp"

#include "fpblock/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace fpblock {
namespace {

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

void SolveOptions::validate() const {
    if (!(cg_rel_tol > 0.0 && cg_rel_tol < 1.0)) {
        throw ConfigurationError("cg_rel_tol must lie in (0, 1)");
    }
}

std::pair<DensityField, SolveReport> solve_least_norm(const InteriorOperator& op,
                                                      const DensityField& v,
                                                      const SolveOptions& opts) {
    opts.validate();
    if (!v.grid.matches(op.grid())) {
        throw DimensionError("reference field " + v.grid.describe() + " does not match operator " +
                             op.grid().describe());
    }
    const auto start = std::chrono::steady_clock::now();
    const std::size_t m = op.rows();
    const std::size_t n = op.cols();
    DensityField u = v;
    SolveReport report;

    if (m > 0) {
        // b = -A·v
        std::vector<double> b(m);
        op.multiply(v.values, b);
        for (double& x : b) x = -x;
        report.initial_residual = max_abs(b);

        std::vector<double> y(m, 0.0), r = b, p(m), q(m), t(n);
        if (opts.warm_start) {
            if (opts.warm_start->size() != m) throw DimensionError("warm start has the wrong length");
            y = *opts.warm_start;
            op.multiply_transpose(y, t);
            op.multiply(t, q);
            for (std::size_t i = 0; i < m; ++i) r[i] = b[i] - q[i];
        }
        const double floor =
            kRoundoffFactor * std::numeric_limits<double>::epsilon() * op.norm_inf() * max_abs(v.values);
        const double target = std::max(opts.cg_rel_tol * report.initial_residual, floor);
        report.tolerance = target;
        const std::size_t max_iters = opts.cg_max_iters ? opts.cg_max_iters : 10 * m;
        std::vector<double> history;

        std::size_t it = 0;
        // Outer loop replaces the recursive residual with the true one, which
        // can drift apart from it in long runs.
        while (max_abs(r) > target) {
            double rr = dot(r, r);
            p = r;
            while (max_abs(r) > target) {
                if (it == max_iters) {
                    throw NonConvergenceError(
                        "conjugate gradients did not reach tolerance within " +
                            std::to_string(max_iters) + " iterations on " + op.grid().describe(),
                        std::move(history));
                }
                op.multiply_transpose(p, t);
                const double curvature = dot(t, t);
                if (!(curvature > 0.0) || !std::isfinite(curvature)) {
                    throw RankDeficiencyError("A·Aᵀ is singular on " + op.grid().describe() +
                                              " (zero-curvature CG direction)");
                }
                op.multiply(t, q);
                const double alpha = rr / curvature;
                for (std::size_t i = 0; i < m; ++i) {
                    y[i] += alpha * p[i];
                    r[i] -= alpha * q[i];
                }
                const double rr_next = dot(r, r);
                const double beta = rr_next / rr;
                rr = rr_next;
                for (std::size_t i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
                history.push_back(std::sqrt(rr));
                ++it;
            }
            op.multiply_transpose(y, t);
            op.multiply(t, q);
            for (std::size_t i = 0; i < m; ++i) r[i] = b[i] - q[i];
        }
        report.iterations = it;

        // u = v + Aᵀy
        op.multiply_transpose(y, t);
        for (std::size_t i = 0; i < n; ++i) u.values[i] += t[i];
        std::vector<double> check(m);
        op.multiply(u.values, check);
        report.residual_constraint = max_abs(check);
    }

    report.min_value = u.min_value();
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) dist += (u.values[i] - v.values[i]) * (u.values[i] - v.values[i]);
    report.distance = std::sqrt(dist);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(u), report};
}

std::vector<double> project_onto_subspace(std::span<const std::vector<double>> basis,
                                          std::span<const double> w) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].size() != w.size()) throw DimensionError("basis vector length mismatch");
        for (std::size_t j = 0; j <= i; ++j) {
            const double g = dot(basis[i], basis[j]);
            const double expected = i == j ? 1.0 : 0.0;
            if (std::abs(g - expected) > 1e-10) {
                throw PreconditionError("projection basis is not orthonormal");
            }
        }
    }
    std::vector<double> out(w.size(), 0.0);
    for (const auto& s : basis) {
        const double c = dot(s, w);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += c * s[k];
    }
    return out;
}

}  // namespace fpblock
