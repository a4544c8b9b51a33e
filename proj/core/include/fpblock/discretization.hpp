#pragma once

#include "fpblock/grid.hpp"
#include "fpblock/models.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace fpblock {

/// Sparse stencil matrix of the stationary Fokker-Planck operator, one row
/// per interior cell and one column per cell, in compressed-row form.
///
/// Row r belongs to the r-th interior cell in grid order. Columns are flat
/// grid indices.
class InteriorOperator {
public:
    struct Triplet {
        std::size_t row;
        std::size_t col;
        double value;
    };

    InteriorOperator(Grid grid, std::size_t rows, std::vector<Triplet> triplets);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
    std::size_t cols() const noexcept { return grid_.size(); }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_index() const noexcept { return col_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Flat grid index of the cell owning row r.
    std::size_t row_cell(std::size_t r) const { return row_cell_[r]; }

    /// out = A·x
    void multiply(std::span<const double> x, std::span<double> out) const;
    /// out = Aᵀ·y
    void multiply_transpose(std::span<const double> y, std::span<double> out) const;

    /// Row-major dense copy (rows × cols), for diagnostics on small grids.
    std::vector<double> to_dense() const;

    /// Largest absolute row sum.
    double norm_inf() const;

private:
    Grid grid_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_;
    std::vector<double> values_;
    std::vector<std::size_t> row_cell_;
};

/// Assembles, for every interior cell c,
///   Σ_k (ε²/2)(u[c+e_k] - 2u[c] + u[c-e_k])/h² - (f_k(x[c+e_k])u[c+e_k] - f_k(x[c-e_k])u[c-e_k])/(2h)
/// with the drift evaluated at neighbor cell centers.
/// Throws ConfigurationError when any side has fewer than 3 cells.
InteriorOperator assemble(const ModelSpec& model, const Grid& grid);

/// Operator with zero drift and diffusion ε²·I; the drift-free Laplacian
/// family used by the kernel analysis.
InteriorOperator assemble_diffusion(const Grid& grid, double epsilon = 1.0);

/// A·field; throws DimensionError on a length mismatch.
std::vector<double> apply(const InteriorOperator& op, std::span<const double> field);
/// Vector overload; an exact match keeps ADL from picking std::apply.
inline std::vector<double> apply(const InteriorOperator& op, const std::vector<double>& field) {
    return apply(op, std::span<const double>(field));
}

/// Largest column count accepted by kernel_dimension.
inline constexpr std::size_t kDenseSvdCap = 4096;

/// Number of singular values of A below 1e-10·σ_max, counting the
/// cols - rows directions that are null by shape. Throws ConfigurationError
/// (size) when cols exceeds `cap`.
std::size_t kernel_dimension(const InteriorOperator& op, std::size_t cap = kDenseSvdCap);

/// Writes the operator in MatrixMarket coordinate format (1-based indices).
void write_matrix_market(std::ostream& os, const InteriorOperator& op);

}  // namespace fpblock
