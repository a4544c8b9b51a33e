#pragma once

#include "fpblock/grid.hpp"
#include "fpblock/sampler.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace fpblock {

/// `fpgrid v1 dim=<d> n=<n1,...> lo=<...> hi=<...>` followed by
/// little-endian float64 values in row-major order.
void write_fpgrid(std::ostream& os, const DensityField& field);
DensityField read_fpgrid(std::istream& is);
void save_fpgrid(const std::filesystem::path& path, const DensityField& field);
DensityField load_fpgrid(const std::filesystem::path& path);

/// Same header plus `total=<n>`, then little-endian uint64 counts.
void write_fphist(std::ostream& os, const Histogram& hist);
Histogram read_fphist(std::istream& is);
void save_fphist(const std::filesystem::path& path, const Histogram& hist);
Histogram load_fphist(const std::filesystem::path& path);

/// One `x1,...,xd,value` row per cell, at cell centers.
void write_field_csv(std::ostream& os, const DensityField& field);

/// Header line for a grid, without the trailing newline.
std::string grid_header(const std::string& magic, const Grid& grid);

}  // namespace fpblock
