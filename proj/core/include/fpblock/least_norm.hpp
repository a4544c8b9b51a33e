#pragma once

#include "fpblock/discretization.hpp"
#include "fpblock/grid.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fpblock {

inline constexpr double kRoundoffFactor = 100.0;

struct SolveOptions {
    /// CG stops once max|r| ≤ cg_rel_tol·max|A·v|, or at the round-off floor
    /// kRoundoffFactor·DBL_EPSILON·‖A‖∞·max|v| when that is larger.
    double cg_rel_tol = 1e-10;
    /// 0 selects 10·rows.
    std::size_t cg_max_iters = 0;
    /// Initial multiplier y (length rows); zero when absent.
    std::optional<std::vector<double>> warm_start;

    void validate() const;
};

struct SolveReport {
    std::size_t iterations = 0;
    /// max|A·u| after the solve.
    double residual_constraint = 0.0;
    /// max|A·v| before the solve.
    double initial_residual = 0.0;
    /// Bound the solve guarantees for residual_constraint:
    /// max(cg_rel_tol·initial_residual, round-off floor).
    double tolerance = 0.0;
    /// Most negative entry of u (or the minimum, when u ≥ 0).
    double min_value = 0.0;
    /// ‖u - v‖₂
    double distance = 0.0;
    double seconds = 0.0;
};

/// Projects v onto Ker(A): u = Aᵀy + v with (AAᵀ)y = -Av solved by
/// conjugate gradients. u is the closest vector to v, in the Euclidean norm,
/// that satisfies A·u = 0.
///
/// An operator with no rows leaves v unchanged. Throws NonConvergenceError
/// when the iteration budget runs out and RankDeficiencyError when CG meets
/// a direction of zero curvature.
std::pair<DensityField, SolveReport> solve_least_norm(const InteriorOperator& op,
                                                      const DensityField& v,
                                                      const SolveOptions& opts = {});

/// Σ_i (w·s_i)s_i for an orthonormal basis {s_i}. Throws PreconditionError
/// when the basis is not orthonormal to 1e-10.
std::vector<double> project_onto_subspace(std::span<const std::vector<double>> basis,
                                          std::span<const double> w);

}  // namespace fpblock
