#pragma once

#include <functional>

#include "wwlab/grid.hpp"

namespace ww {

// Lagrangian change of variable x = x(t,y), stored as the periodic
// displacement u = x - y. Jacobian dx/dy and its inverse are cached.
struct LagrangianMap {
    const StripGrid* grid = nullptr;
    Field displacement; // rank 1, Eulerian components
    Field jacobian;     // rank 2, slot0 = Eulerian i, slot1 = Lagrangian a
    Field inv_jacobian; // rank 2, slot0 = Lagrangian a, slot1 = Eulerian i
    Field det_jac;      // rank 0, > 0 required
    double min_det = 0;

    LagrangianMap() = default;
    explicit LagrangianMap(const StripGrid& g); // identity map
    LagrangianMap(const StripGrid& g, const Field& displacement_);

    void rebuild(); // refresh jacobian caches after editing displacement

    Field positions() const; // x = y + u, rank 1
    bool is_identity() const;
};

LagrangianMap map_from_function(const StripGrid& g,
                                const std::function<std::array<double, 3>(std::array<double, 3>)>& x_of_y);

// Induced metric g_ab = dx^i/dy^a dx^i/dy^b and companions.
struct Metric {
    Field g;        // rank 2 (a,b)
    Field g_inv;    // rank 2 (a,b)
    Field sqrt_det; // rank 0 (= det dx/dy)
    bool flat = false;
};

Metric metric_from_map(const LagrangianMap& map);

// Eulerian derivative through the map: prepends one slot,
// (df)_{i,J} = (dy^a/dx^i) d_a f_J. Order-s version symmetrizes the s
// derivative slots.
Field euler_derivative(const Field& f, const LagrangianMap& map);
Field euler_derivative_n(const Field& f, const LagrangianMap& map, int order);

Field divergence(const Field& v, const LagrangianMap& map);       // rank 0
Field curl(const Field& v, const LagrangianMap& map);             // rank 2 antisym
Field symmetrize_slots(const Field& f, int nslots);

} // namespace ww
