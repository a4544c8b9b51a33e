#pragma once

#include "fpblock/discretization.hpp"
#include "fpblock/grid.hpp"
#include "fpblock/interface_repair.hpp"
#include "fpblock/models.hpp"
#include "fpblock/sampler.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fpblock {

// ---------------------------------------------------------------------------
// Explicit kernel of the drift-free operator on an N×N grid
// ---------------------------------------------------------------------------

struct BasisLabel {
    /// 'k' for the trigonometric-exponential families, 'l' for {1, x, y, xy}.
    char family = 'k';
    int k = 0;
    /// Family member: 1..8 for 'k', 1..4 for 'l'.
    int p = 0;

    friend auto operator<=>(const BasisLabel&, const BasisLabel&) = default;
};

struct KernelBasis {
    int n = 0;
    /// Unit-norm vectors of length n², in grid order (x slow, y fast).
    std::vector<std::vector<double>> vectors;
    std::vector<BasisLabel> labels;
};

/// The 4N-4 vectors sin/cos(2kπx)·e^{±c_k y}, sin/cos(2kπy)·e^{±c_k x} and
/// 1, x, y, xy on nodes x = i/(N-1), with c_k = (N-1)·arccosh(2 - cos(2kπ/(N-1))).
/// Sorted lexicographically by label, so xy is last. N must be odd and ≥ 5.
KernelBasis laplacian_kernel_basis(int n);

/// |R_ii| of a Householder QR of the basis stacked as columns.
std::vector<double> qr_diagonals(const KernelBasis& basis);

// ---------------------------------------------------------------------------
// Error concentration
// ---------------------------------------------------------------------------

struct AngleReport {
    int thickness = 0;
    /// Principal angles between Ker(A) and the boundary layer, nondecreasing.
    std::vector<double> angles;
    /// Mean cosine of the angles.
    double p_d = 0.0;
    /// Non-empty when the numerical nullity differs from cols - rows.
    std::string warning;
};

/// Largest grid side accepted by principal_angles.
inline constexpr int kMaxAngleSide = 64;

/// Principal angles between Ker(A) (orthonormal basis from a dense SVD) and
/// the span of cells within `thickness` cells of the boundary, for each
/// requested thickness. The SVD is computed once.
std::vector<AngleReport> principal_angles(const InteriorOperator& op,
                                          const std::vector<int>& thicknesses);
AngleReport principal_angles(const InteriorOperator& op, int thickness);

/// True when the cell lies within `thickness` cells of the grid boundary.
bool in_boundary_layer(const Grid& grid, const MultiIndex& idx, int thickness);

/// ‖e restricted to the boundary layer‖ / ‖e‖; UndefinedRatioError for e = 0.
double boundary_weight_rho(const DensityField& e, int thickness);

// ---------------------------------------------------------------------------
// Error norms
// ---------------------------------------------------------------------------

/// h^{d/2}·‖u - ref‖₂
double discrete_l2_error(const DensityField& u, const DensityField& ref);

/// sqrt(L2² + h^d Σ_c Σ_k ((e[c+e_k] - e[c])/h)²), forward differences that
/// stay inside the grid.
double discrete_h1_error(const DensityField& u, const DensityField& ref);

/// u - ref on the shared grid.
DensityField difference(const DensityField& u, const DensityField& ref);

// ---------------------------------------------------------------------------
// Convergence study on the ring model
// ---------------------------------------------------------------------------

struct ConvergenceConfig {
    double epsilon = 1.0;
    std::vector<int> mesh_sizes{64, 128, 256};
    double samples_per_cell = 390.625;
    std::vector<std::string> methods{"mc", "plain", "overlap", "shift"};
    int block_cells = 32;
    int iota = 1;
    std::vector<double> schedule = default_shift_schedule();
    double lo = -2.0;
    double hi = 2.0;
    double dt = 0.002;
    std::uint64_t burn_in = 100000;
    std::uint64_t seed = 1;
    int chains = 1;
    SolveOptions solve_opts;
    bool parallel = false;
};

struct ConvergenceRow {
    int n = 0;
    std::string method;
    std::uint64_t samples = 0;
    double l2 = 0.0;
    double h1 = 0.0;
    double seconds = 0.0;
};

/// round(samples_per_cell·N²)
std::uint64_t samples_for_mesh(int n, double samples_per_cell);

/// For each mesh size, samples the ring model once (on the grid inflated by
/// iota when overlap is requested), runs every method and measures L² and H¹
/// errors against the exact density at cell centers. Seconds exclude sampling
/// except for the "mc" row, which reports the sampling time.
std::vector<ConvergenceRow> convergence_study(const ConvergenceConfig& cfg);

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

}  // namespace fpblock
