#pragma once

#include <string>

#include "wwlab/grid.hpp"

namespace ww {

// Flat little-endian binary field format ("WWF1"): u32 rank, dim, n1, n2, nv;
// f64 depth; then ncomp*nnodes f64 values, component-major, nodes row-major
// (i1 fastest, then i2, then vertical). CSV export mirrors the layout with a
// header line.
void write_field(const Field& f, const std::string& path);
Field read_field(const std::string& path, StripGrid& grid_out);

void write_field_csv(const Field& f, const std::string& path);

} // namespace ww
