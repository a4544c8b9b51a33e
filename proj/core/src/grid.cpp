#include "fpblock/grid.hpp"

#include "fpblock/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fpblock {

std::size_t CellRange::size() const {
    std::size_t s = 1;
    for (int k = 0; k < dim; ++k) {
        if (end[k] <= begin[k]) return 0;
        s *= static_cast<std::size_t>(end[k] - begin[k]);
    }
    return dim > 0 ? s : 0;
}

bool CellRange::contains(const MultiIndex& idx) const {
    for (int k = 0; k < dim; ++k) {
        if (idx[k] < begin[k] || idx[k] >= end[k]) return false;
    }
    return true;
}

bool CellRange::contains(const CellRange& other) const {
    for (int k = 0; k < dim; ++k) {
        if (other.begin[k] < begin[k] || other.end[k] > end[k]) return false;
    }
    return true;
}

CellRange CellRange::grown(int cells, const MultiIndex& limit) const {
    CellRange out = *this;
    for (int k = 0; k < dim; ++k) {
        out.begin[k] = std::max(0, begin[k] - cells);
        out.end[k] = std::min(limit[k], end[k] + cells);
    }
    return out;
}

CellRange CellRange::shifted(const MultiIndex& offset) const {
    CellRange out = *this;
    for (int k = 0; k < dim; ++k) {
        out.begin[k] += offset[k];
        out.end[k] += offset[k];
    }
    return out;
}

// ---------------------------------------------------------------------------

Grid::Grid(std::span<const double> lo, std::span<const double> hi, std::span<const int> n) {
    const auto d = lo.size();
    if (d < 1 || d > static_cast<std::size_t>(kMaxDim) || hi.size() != d || n.size() != d) {
        throw DimensionError("grid needs 1-3 dimensions with matching lo/hi/n lengths");
    }
    dim_ = static_cast<int>(d);
    for (int k = 0; k < dim_; ++k) {
        if (n[k] < 1) throw ConfigurationError("grid cell counts must be positive");
        if (!(hi[k] > lo[k]) || !std::isfinite(lo[k]) || !std::isfinite(hi[k])) {
            throw ConfigurationError("grid bounds must be finite with hi > lo");
        }
        lo_[k] = lo[k];
        hi_[k] = hi[k];
        n_[k] = n[k];
    }
    h_ = (hi_[0] - lo_[0]) / n_[0];
    for (int k = 1; k < dim_; ++k) {
        const double hk = (hi_[k] - lo_[k]) / n_[k];
        if (std::abs(hk - h_) > 1e-12 * h_) {
            std::ostringstream os;
            os << "anisotropic grid: cell size " << hk << " along dimension " << k
               << " differs from " << h_;
            throw ConfigurationError(os.str());
        }
    }
    finish();
}

Grid::Grid(std::initializer_list<double> lo, std::initializer_list<double> hi,
           std::initializer_list<int> n)
    : Grid(std::span<const double>(lo.begin(), lo.size()),
           std::span<const double>(hi.begin(), hi.size()),
           std::span<const int>(n.begin(), n.size())) {}

Grid Grid::cube(int dim, double lo, double hi, int n) {
    std::vector<double> l(dim, lo), u(dim, hi);
    std::vector<int> c(dim, n);
    return Grid(l, u, c);
}

void Grid::finish() {
    size_ = 1;
    for (int k = dim_ - 1; k >= 0; --k) {
        strides_[k] = size_;
        size_ *= static_cast<std::size_t>(n_[k]);
    }
    for (int k = dim_; k < kMaxDim; ++k) {
        strides_[k] = 0;
        n_[k] = 1;
    }
}

double Grid::cell_volume() const noexcept { return std::pow(h_, dim_); }

double Grid::volume() const noexcept {
    double v = 1.0;
    for (int k = 0; k < dim_; ++k) v *= hi_[k] - lo_[k];
    return v;
}

std::size_t Grid::flat(const MultiIndex& idx) const noexcept {
    std::size_t f = 0;
    for (int k = 0; k < dim_; ++k) f += strides_[k] * static_cast<std::size_t>(idx[k]);
    return f;
}

MultiIndex Grid::unflat(std::size_t flat) const noexcept {
    MultiIndex idx{};
    for (int k = 0; k < dim_; ++k) {
        idx[k] = static_cast<int>(flat / strides_[k]);
        flat %= strides_[k];
    }
    return idx;
}

Point Grid::cell_center(const MultiIndex& idx) const {
    Point p{};
    for (int k = 0; k < dim_; ++k) {
        if (idx[k] < 0 || idx[k] >= n_[k]) {
            std::ostringstream os;
            os << "cell index " << idx[k] << " out of range [0, " << n_[k] << ") along dimension "
               << k;
            throw IndexError(os.str());
        }
        p[k] = lo_[k] + (idx[k] + 0.5) * h_;
    }
    return p;
}

std::optional<MultiIndex> Grid::locate_cell(const Point& p) const noexcept {
    MultiIndex idx{};
    for (int k = 0; k < dim_; ++k) {
        if (!(p[k] >= lo_[k] && p[k] <= hi_[k])) return std::nullopt;
        int i = static_cast<int>(std::floor((p[k] - lo_[k]) / h_));
        idx[k] = std::clamp(i, 0, n_[k] - 1);
    }
    return idx;
}

CellRange Grid::full_range() const {
    CellRange r;
    r.dim = dim_;
    for (int k = 0; k < dim_; ++k) r.end[k] = n_[k];
    return r;
}

Grid Grid::sub_grid(const CellRange& range) const {
    if (range.dim != dim_ || !full_range().contains(range) || range.size() == 0) {
        throw IndexError("sub-grid range outside the grid: " + describe());
    }
    Grid g = *this;
    for (int k = 0; k < dim_; ++k) {
        g.lo_[k] = lo_[k] + range.begin[k] * h_;
        g.hi_[k] = lo_[k] + range.end[k] * h_;
        g.n_[k] = range.extent(k);
    }
    g.finish();
    return g;
}

Grid Grid::inflated(int cells) const {
    if (cells < 0) throw ConfigurationError("inflation must be nonnegative");
    Grid g = *this;
    for (int k = 0; k < dim_; ++k) {
        g.lo_[k] = lo_[k] - cells * h_;
        g.hi_[k] = hi_[k] + cells * h_;
        g.n_[k] = n_[k] + 2 * cells;
    }
    g.finish();
    return g;
}

bool Grid::matches(const Grid& other) const noexcept {
    if (dim_ != other.dim_) return false;
    if (std::abs(h_ - other.h_) > 1e-9 * h_) return false;
    for (int k = 0; k < dim_; ++k) {
        if (n_[k] != other.n_[k]) return false;
        if (std::abs(lo_[k] - other.lo_[k]) > 1e-9 * h_) return false;
    }
    return true;
}

std::string Grid::describe() const {
    std::ostringstream os;
    os << "grid dim=" << dim_ << " n=";
    for (int k = 0; k < dim_; ++k) os << (k ? "x" : "") << n_[k];
    os << " lo=(";
    for (int k = 0; k < dim_; ++k) os << (k ? "," : "") << lo_[k];
    os << ") h=" << h_;
    return os.str();
}

// ---------------------------------------------------------------------------

DensityField::DensityField(Grid g) : grid(std::move(g)), values(grid.size(), 0.0) {}

DensityField::DensityField(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size()) {
        throw DimensionError("field length " + std::to_string(values.size()) +
                             " does not match " + grid.describe());
    }
}

double DensityField::mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.cell_volume();
}

double DensityField::min_value() const {
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

DensityField restrict_field(const DensityField& field, const CellRange& range) {
    DensityField out(field.grid.sub_grid(range));
    std::size_t i = 0;
    for_each_cell(range, [&](const MultiIndex& idx) {
        out.values[i++] = field.values[field.grid.flat(idx)];
    });
    return out;
}

void write_range(DensityField& dest, const CellRange& range, const DensityField& block,
                 const CellRange& source_range) {
    if (range.size() != source_range.size()) {
        throw DimensionError("write_range: destination and source ranges differ in size");
    }
    MultiIndex offset{};
    for (int k = 0; k < range.dim; ++k) offset[k] = source_range.begin[k] - range.begin[k];
    for_each_cell(range, [&](const MultiIndex& idx) {
        MultiIndex src = idx;
        for (int k = 0; k < range.dim; ++k) src[k] += offset[k];
        dest.values[dest.grid.flat(idx)] = block.values[block.grid.flat(src)];
    });
}

// ---------------------------------------------------------------------------

int BlockPartition::shift_cells(int k) const {
    const int b = block_size(k);
    const int off = static_cast<int>(std::lround(shift[k] * b));
    return b > 0 ? off % b : 0;
}

void BlockPartition::validate() const {
    if (overlap < 0) throw ConfigurationError("block overlap must be nonnegative");
    for (int k = 0; k < grid.dim(); ++k) {
        const int blocks = blocks_per_dim[k];
        if (blocks < 1) throw ConfigurationError("blocks per dimension must be positive");
        if (grid.n(k) % blocks != 0) {
            throw ConfigurationError("grid cell count " + std::to_string(grid.n(k)) +
                                     " is not divisible by " + std::to_string(blocks) +
                                     " blocks along dimension " + std::to_string(k));
        }
        if (block_size(k) < kMinBlockSize) {
            throw ConfigurationError("block size " + std::to_string(block_size(k)) +
                                     " below the minimum of " + std::to_string(kMinBlockSize) +
                                     " cells along dimension " + std::to_string(k));
        }
        if (!(shift[k] >= 0.0 && shift[k] < 1.0)) {
            throw ConfigurationError("block shift fractions must lie in [0, 1)");
        }
    }
}

std::vector<BlockInfo> enumerate_blocks(const BlockPartition& partition) {
    partition.validate();
    const Grid& g = partition.grid;
    const int d = g.dim();

    // Per-dimension segment boundaries.
    std::array<std::vector<int>, kMaxDim> cuts;
    for (int k = 0; k < kMaxDim; ++k) {
        if (k >= d) {
            cuts[k] = {0, 1};
            continue;
        }
        const int b = partition.block_size(k);
        const int off = partition.shift_cells(k);
        cuts[k].push_back(0);
        for (int c = off == 0 ? b : off; c < g.n(k); c += b) cuts[k].push_back(c);
        cuts[k].push_back(g.n(k));
    }

    std::vector<BlockInfo> blocks;
    MultiIndex count{};
    for (int k = 0; k < kMaxDim; ++k) count[k] = static_cast<int>(cuts[k].size()) - 1;
    blocks.reserve(static_cast<std::size_t>(count[0]) * count[1] * count[2]);

    CellRange coords;
    coords.dim = d;
    for (int k = 0; k < d; ++k) coords.end[k] = count[k];
    for_each_cell(coords, [&](const MultiIndex& bc) {
        BlockInfo info;
        info.id = static_cast<int>(blocks.size());
        info.coord = bc;
        info.cells.dim = d;
        for (int k = 0; k < d; ++k) {
            info.cells.begin[k] = cuts[k][bc[k]];
            info.cells.end[k] = cuts[k][bc[k] + 1];
            if (info.cells.extent(k) != partition.block_size(k)) info.partial = true;
        }
        info.halo = info.cells.grown(partition.overlap, g.shape());
        blocks.push_back(info);
    });
    return blocks;
}

}  // namespace fpblock
