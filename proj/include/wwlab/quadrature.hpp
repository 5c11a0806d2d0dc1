#pragma once

#include "wwlab/grid.hpp"

namespace ww {

enum class Region { Interior, TopBoundary };

// Vertical quadrature weights: 4th-order endpoint-corrected trapezoid
// (Gregory) for nv >= 8, plain trapezoid below that.
const std::vector<double>& vertical_weights(const StripGrid& g);

// Quadrature of a scalar field. `measure` (rank 0, optional) multiplies the
// integrand pointwise: pass sqrt(det g) for geometric volume integrals, the
// induced surface element for boundary integrals, a weight w(x), or products
// of these. Rejects non-finite integrands.
double integrate(const Field& f, Region region, const Field* measure = nullptr);

// Same, for a raw top-boundary array of g.nbdy() values.
double integrate_boundary(const StripGrid& g, const double* vals,
                          const double* measure = nullptr);

} // namespace ww
