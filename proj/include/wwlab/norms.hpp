#pragma once

#include <optional>

#include "wwlab/grid.hpp"
#include "wwlab/quadrature.hpp"

namespace ww {

enum class NormSpace { L2, Hs, L2w, Hsw, BdyL2, BdyL2w };

// Weight values on the grid. `positions` (rank 1, Eulerian coordinates from a
// Lagrangian map) is optional; reference coordinates are used without it.
Field weight_field(const StripGrid& g, const WeightSpec& w,
                   const Field* positions = nullptr);

// Flat-metric (reference strip) norms; Hs sums squared L2 norms of all grid
// derivatives with multi-index |alpha| <= s. Differentiation order capped at 6.
double norm(const Field& f, NormSpace space, int s = 0,
            const WeightSpec* w = nullptr, const Field* positions = nullptr);

// Top-boundary trace of a rank 0/1 field.
BoundaryField restrict_to_boundary(const Field& f);

// Pointwise squared magnitude (full contraction over all slots) as rank-0 field.
Field magnitude2(const Field& f);

} // namespace ww
