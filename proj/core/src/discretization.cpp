#include "fpblock/discretization.hpp"

#include "fpblock/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fpblock {

InteriorOperator::InteriorOperator(Grid grid, std::size_t rows, std::vector<Triplet> triplets)
    : grid_(std::move(grid)), row_ptr_(rows + 1, 0) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    col_.reserve(triplets.size());
    values_.reserve(triplets.size());
    for (std::size_t i = 0; i < triplets.size(); ++i) {
        const auto& t = triplets[i];
        if (t.row >= rows || t.col >= grid_.size()) {
            throw IndexError("operator triplet outside the matrix shape");
        }
        // Merge duplicates.
        if (!col_.empty() && i > 0 && triplets[i - 1].row == t.row && col_.back() == t.col) {
            values_.back() += t.value;
            continue;
        }
        col_.push_back(t.col);
        values_.push_back(t.value);
        ++row_ptr_[t.row + 1];
    }
    for (std::size_t r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];

    CellRange interior = grid_.full_range();
    for (int k = 0; k < grid_.dim(); ++k) {
        interior.begin[k] = 1;
        interior.end[k] = grid_.n(k) - 1;
    }
    row_cell_.reserve(rows);
    for_each_cell(interior, [&](const MultiIndex& idx) { row_cell_.push_back(grid_.flat(idx)); });
    if (row_cell_.size() != rows) row_cell_.resize(rows, 0);
}

void InteriorOperator::multiply(std::span<const double> x, std::span<double> out) const {
    const std::size_t n = rows();
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t j = row_ptr_[r]; j < row_ptr_[r + 1]; ++j) s += values_[j] * x[col_[j]];
        out[r] = s;
    }
}

void InteriorOperator::multiply_transpose(std::span<const double> y, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t n = rows();
    for (std::size_t r = 0; r < n; ++r) {
        const double yr = y[r];
        for (std::size_t j = row_ptr_[r]; j < row_ptr_[r + 1]; ++j) out[col_[j]] += values_[j] * yr;
    }
}

std::vector<double> InteriorOperator::to_dense() const {
    const std::size_t c = cols();
    std::vector<double> dense(rows() * c, 0.0);
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t j = row_ptr_[r]; j < row_ptr_[r + 1]; ++j) dense[r * c + col_[j]] = values_[j];
    }
    return dense;
}

double InteriorOperator::norm_inf() const {
    double best = 0.0;
    for (std::size_t r = 0; r < rows(); ++r) {
        double s = 0.0;
        for (std::size_t j = row_ptr_[r]; j < row_ptr_[r + 1]; ++j) s += std::abs(values_[j]);
        best = std::max(best, s);
    }
    return best;
}

// ---------------------------------------------------------------------------

namespace {

InteriorOperator assemble_impl(const Grid& grid, double epsilon, const DriftFn* drift) {
    const int d = grid.dim();
    for (int k = 0; k < d; ++k) {
        if (grid.n(k) < 3) {
            throw ConfigurationError("operator assembly needs at least 3 cells per side; " +
                                     grid.describe());
        }
    }
    const double h = grid.h();
    const double diffusion = 0.5 * epsilon * epsilon / (h * h);
    const double advection = 1.0 / (2.0 * h);

    // Drift at every cell center, evaluated once.
    std::vector<double> f;
    if (drift) {
        f.resize(grid.size() * d);
        for (std::size_t c = 0; c < grid.size(); ++c) {
            const Point v = (*drift)(grid.cell_center(grid.unflat(c)));
            for (int k = 0; k < d; ++k) f[c * d + k] = v[k];
        }
    }

    CellRange interior = grid.full_range();
    std::size_t rows = 1;
    for (int k = 0; k < d; ++k) {
        interior.begin[k] = 1;
        interior.end[k] = grid.n(k) - 1;
        rows *= static_cast<std::size_t>(grid.n(k) - 2);
    }

    std::vector<InteriorOperator::Triplet> triplets;
    triplets.reserve(rows * (1 + 2 * d));
    std::size_t row = 0;
    for_each_cell(interior, [&](const MultiIndex& idx) {
        const std::size_t c = grid.flat(idx);
        triplets.push_back({row, c, -2.0 * d * diffusion});
        for (int k = 0; k < d; ++k) {
            const std::size_t up = c + grid.stride(k);
            const std::size_t down = c - grid.stride(k);
            const double f_up = drift ? f[up * d + k] : 0.0;
            const double f_down = drift ? f[down * d + k] : 0.0;
            triplets.push_back({row, up, diffusion - f_up * advection});
            triplets.push_back({row, down, diffusion + f_down * advection});
        }
        ++row;
    });
    return InteriorOperator(grid, rows, std::move(triplets));
}

}  // namespace

InteriorOperator assemble(const ModelSpec& model, const Grid& grid) {
    if (model.dim != grid.dim()) {
        throw DimensionError("model '" + model.name + "' has dimension " +
                             std::to_string(model.dim) + " but " + grid.describe());
    }
    return assemble_impl(grid, model.epsilon, &model.drift);
}

InteriorOperator assemble_diffusion(const Grid& grid, double epsilon) {
    return assemble_impl(grid, epsilon, nullptr);
}

std::vector<double> apply(const InteriorOperator& op, std::span<const double> field) {
    if (field.size() != op.cols()) {
        throw DimensionError("apply: field length " + std::to_string(field.size()) +
                             " but operator has " + std::to_string(op.cols()) + " columns");
    }
    std::vector<double> out(op.rows());
    op.multiply(field, out);
    return out;
}

std::size_t kernel_dimension(const InteriorOperator& op, std::size_t cap) {
    if (op.cols() > cap) {
        throw ConfigurationError("kernel_dimension: " + std::to_string(op.cols()) +
                                 " columns exceed the dense SVD cap of " + std::to_string(cap));
    }
    if (op.rows() == 0) return op.cols();
    const auto dense = op.to_dense();
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        a(dense.data(), static_cast<Eigen::Index>(op.rows()), static_cast<Eigen::Index>(op.cols()));
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const auto& sigma = svd.singularValues();
    const double largest = sigma.size() ? sigma.maxCoeff() : 0.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma[i] > 1e-10 * largest) ++rank;
    }
    return op.cols() - rank;
}

void write_matrix_market(std::ostream& os, const InteriorOperator& op) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << "% " << op.grid().describe() << "\n";
    os << op.rows() << ' ' << op.cols() << ' ' << op.nonzeros() << '\n';
    os.precision(17);
    const auto ptr = op.row_ptr();
    const auto col = op.col_index();
    const auto val = op.values();
    for (std::size_t r = 0; r < op.rows(); ++r) {
        for (std::size_t j = ptr[r]; j < ptr[r + 1]; ++j) {
            os << r + 1 << ' ' << col[j] + 1 << ' ' << val[j] << '\n';
        }
    }
}

}  // namespace fpblock
