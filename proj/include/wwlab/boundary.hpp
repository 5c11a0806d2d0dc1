#pragma once

#include <functional>

#include "wwlab/map.hpp"

namespace ww {

// Geometry of the free-surface image (top boundary). Lagrangian-component
// normals/projections, second fundamental form, curvature, and the
// regularity monitor K = |theta|_inf + 1/l0.
struct BoundaryGeometry {
    BoundaryField n_euler;     // Eulerian outward unit normal
    BoundaryField N_up;        // N^a, g_ab N^a N^b = 1
    BoundaryField N_dn;        // N_a
    BoundaryField gamma_dn;    // gamma_ab = g_ab - N_a N_b
    BoundaryField gamma_mixed; // gamma_a^b = delta_a^b - N_a N^b
    BoundaryField theta;       // theta_ab (Lagrangian slots)
    BoundaryField sigma;       // mean curvature tr_g theta
    BoundaryField sqrt_gamma;  // induced surface element density
    BoundaryField positions;   // Eulerian boundary positions

    double theta_sup = 0; // sup |theta|_g
    double l1_proxy = 0;  // min pair distance / normal angle
    double l0_proxy = 0;  // min(l1/2, 1/theta_sup, depth)
    double K_monitor = 0; // theta_sup + 1/l0_proxy
};

BoundaryGeometry boundary_geometry(const LagrangianMap& map, const Metric& metric);

std::string geometry_report_json(const BoundaryGeometry& bg, const LagrangianMap& map);

// Interior extension of the boundary normal and the tangential-projector
// form q^{ij} = delta^{ij} - eta(d)^2 N^i N^j (Eulerian slots).
struct NormalExtension {
    Field d;       // distance to top boundary along vertical geodesics
    Field eta;     // cutoff value
    Field normal;  // extended Eulerian unit normal
    Field q;       // rank 2
    double d0 = 0; // cutoff scale
};

NormalExtension q_form(const LagrangianMap& map, const BoundaryGeometry& bg, double d0);

// Q(alpha,beta): contract the first nq slots of two equal-rank tensors with
// q^{ij} and the remaining slots with delta.
double q_contract_node(const Field& q, const Field& alpha, const Field& beta,
                       int nq, int node);

// Finite-difference residuals of the kinematic identities under the flow of
// a steady Eulerian velocity field. Reported at dt and dt/2 with the
// expected O(dt^2) decay ratios.
struct KinematicsReport {
    // rows: Dtg, Dtg_inverse, DtN, dmu_g, dmu_gamma(integrated)
    std::array<double, 5> residual_dt{};
    std::array<double, 5> residual_half{};
    std::array<double, 5> ratio{}; // residual_dt / residual_half
};

KinematicsReport kinematics_check(const LagrangianMap& map,
                                  const std::function<std::array<double, 3>(std::array<double, 3>)>& v,
                                  double dt);

} // namespace ww
