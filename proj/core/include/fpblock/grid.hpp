#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fpblock {

inline constexpr int kMaxDim = 3;

/// Physical point; entries beyond the grid dimension are zero.
using Point = std::array<double, kMaxDim>;

/// Zero-based cell multi-index; entries beyond the grid dimension are zero.
using MultiIndex = std::array<int, kMaxDim>;

/// Half-open box of cell indices [begin, end) per dimension.
struct CellRange {
    int dim = 0;
    MultiIndex begin{};
    MultiIndex end{};

    int extent(int k) const { return end[k] - begin[k]; }
    std::size_t size() const;
    bool contains(const MultiIndex& idx) const;
    bool contains(const CellRange& other) const;
    /// Grow by `cells` on every side, clamped to [0, limit).
    CellRange grown(int cells, const MultiIndex& limit) const;
    CellRange shifted(const MultiIndex& offset) const;

    friend bool operator==(const CellRange&, const CellRange&) = default;
};

/// Uniform rectangular grid of cells in 1, 2 or 3 dimensions.
///
/// Cells are flattened row-major with the last dimension fastest. The cell
/// size h is shared by all dimensions; anisotropic bounds are rejected.
class Grid {
public:
    Grid(std::span<const double> lo, std::span<const double> hi, std::span<const int> n);
    Grid(std::initializer_list<double> lo, std::initializer_list<double> hi,
         std::initializer_list<int> n);

    /// Cube [lo, hi]^dim with `n` cells per side.
    static Grid cube(int dim, double lo, double hi, int n);

    int dim() const noexcept { return dim_; }
    double h() const noexcept { return h_; }
    int n(int k) const { return n_[k]; }
    double lo(int k) const { return lo_[k]; }
    double hi(int k) const { return hi_[k]; }
    const MultiIndex& shape() const noexcept { return n_; }

    std::size_t size() const noexcept { return size_; }
    /// h^dim
    double cell_volume() const noexcept;
    double volume() const noexcept;

    std::size_t stride(int k) const { return strides_[k]; }
    std::size_t flat(const MultiIndex& idx) const noexcept;
    MultiIndex unflat(std::size_t flat) const noexcept;

    /// Center of the cell; throws IndexError when out of range.
    Point cell_center(const MultiIndex& idx) const;

    /// Cell containing the point, using half-open boxes with the last cell
    /// closed. Returns nullopt outside the domain.
    std::optional<MultiIndex> locate_cell(const Point& p) const noexcept;

    CellRange full_range() const;

    /// Grid over a sub-range of cells with the same h and physical placement.
    Grid sub_grid(const CellRange& range) const;

    /// Grid extended by `cells` whole cells on every side.
    Grid inflated(int cells) const;

    /// Same dimension, shape, h and bounds up to a tolerance of 1e-9·h.
    bool matches(const Grid& other) const noexcept;

    std::string describe() const;

    /// Empty placeholder grid (dim 0, no cells).
    Grid() = default;

private:
    void finish();

    int dim_ = 0;
    double h_ = 0.0;
    Point lo_{};
    Point hi_{};
    MultiIndex n_{};
    std::array<std::size_t, kMaxDim> strides_{};
    std::size_t size_ = 0;
};

/// Values at cell centers of a grid, flattened in grid order.
struct DensityField {
    Grid grid;
    std::vector<double> values;

    explicit DensityField(Grid g);
    DensityField(Grid g, std::vector<double> v);

    /// Samples `fn` at every cell center.
    template <class Fn>
    static DensityField sample(const Grid& g, Fn&& fn) {
        DensityField out(g);
        for (std::size_t c = 0; c < g.size(); ++c) {
            out.values[c] = fn(g.cell_center(g.unflat(c)));
        }
        return out;
    }

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    double& at(const MultiIndex& idx) { return values[grid.flat(idx)]; }
    double at(const MultiIndex& idx) const { return values[grid.flat(idx)]; }

    /// h^d · Σ values
    double mass() const;
    double min_value() const;
};

/// Copy of `field` over `range`, carried on the matching sub-grid.
DensityField restrict_field(const DensityField& field, const CellRange& range);

/// Writes `block` (defined on a sub-grid) into `dest` at `range` of dest's grid.
void write_range(DensityField& dest, const CellRange& range, const DensityField& block,
                 const CellRange& source_range);

/// Visits every multi-index of a range in flattening order.
template <class Fn>
void for_each_cell(const CellRange& range, Fn&& fn) {
    if (range.size() == 0) return;
    MultiIndex idx = range.begin;
    for (;;) {
        fn(idx);
        int k = range.dim - 1;
        while (k >= 0) {
            if (++idx[k] < range.end[k]) break;
            idx[k] = range.begin[k];
            --k;
        }
        if (k < 0) return;
    }
}

// ---------------------------------------------------------------------------
// Block partitions
// ---------------------------------------------------------------------------

/// Decomposition of a grid into congruent blocks with optional halo and shift.
struct BlockPartition {
    Grid grid;
    MultiIndex blocks_per_dim{1, 1, 1};
    int overlap = 0;
    /// Fraction of a block, in [0, 1), by which block boundaries move.
    std::array<double, kMaxDim> shift{};

    /// Block edge length in cells along dimension k.
    int block_size(int k) const { return grid.n(k) / blocks_per_dim[k]; }
    /// Whole-cell offset realising the fractional shift along k.
    int shift_cells(int k) const;
    /// Throws ConfigurationError when the partition is unusable.
    void validate() const;
};

struct BlockInfo {
    int id = 0;
    MultiIndex coord{};
    CellRange cells;
    CellRange halo;
    /// True for the narrower strips produced at the domain edge by a shift.
    bool partial = false;
};

/// Blocks in row-major order of their block coordinates. Cell ranges tile the
/// grid; halos extend each side by the overlap, clamped to the domain.
std::vector<BlockInfo> enumerate_blocks(const BlockPartition& partition);

/// Minimum block edge length accepted by enumerate_blocks.
inline constexpr int kMinBlockSize = 5;

}  // namespace fpblock
