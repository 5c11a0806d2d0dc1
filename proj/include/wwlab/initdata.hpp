#pragma once

#include "wwlab/elliptic.hpp"
#include "wwlab/history.hpp"
#include "wwlab/state.hpp"

namespace ww {

// Construction of compatible initial data by successive approximation on the
// elliptic hierarchy Lap h_k = e'(h_0) h_{k+2} - F_k - G_k, h_r = h_{r+1} = 0,
// with v_0 = u_0 + grad(phi), Lap phi = -e'(h_0) h_1. The k = 0 equation is
// solved in the decaying deviation variable h~_0 = h_0 + x_n (zero Dirichlet
// at both ends); the stored h_0 is the full enthalpy.
struct InitialDataProblem {
    Field u0; // divergence-free initial velocity
    EosPtr eos;
    int r = 2;       // compatibility order target (h_k built for k < r)
    double mu = 2.0; // weight exponent of the iteration norms
    int max_iter = 50;
    double tol = 1e-10; // relative successive-difference stop
};

struct IterationTrace {
    struct Row {
        int nu = 0;
        std::vector<double> m_k; // |h_k|_{H_w^{s-k}}, deviation norm at k = 0
        double m_star = 0;
        double diff = 0;  // successive difference, cheap H_w^2 norm
        double ratio = 0; // diff_nu / diff_{nu-1}
    };
    std::vector<Row> rows;
    std::string csv() const;
};

struct CompatibleData {
    int r = 0;
    Field v0;
    Field phi;
    Field h0_dev;         // deviation h_0 + x_n
    std::vector<Field> h; // h[k] = Dt^k h|_{t=0}, k = 0..r+1 (full h at k = 0)
    IterationTrace trace;

    FlowState state(EosPtr eos) const; // identity map, v0, full h0
};

// Deviation pressure ~p_0 = p_0 + x_n of the incompressible data:
// Lap p_0 = -(d_i u^k)(d_k u^i), p_0 = 0 on the surface.
Field pressure_from_velocity(const Field& u0);

struct InitDataError : std::runtime_error {
    IterationTrace trace;
    InitDataError(const std::string& what, IterationTrace tr)
        : std::runtime_error(what), trace(std::move(tr)) {}
};

CompatibleData construct_compatible_data(const InitialDataProblem& p);

// Compatibility residuals. boundary_sup[j] is the boundary sup of the stored
// Dt^j h (zero by construction for honest data); wave_residual[k] is the
// interior L2 residual of e' h_{k+2} - Lap h_k - F_k - G_k (solver-level for
// constructed data); closure_sup[j] reconstructs Dt^j h from (v0, h0) alone
// through the continuity equation, which divides boundary-row discretization
// error by e'(h) and therefore grows with kappa (diagnostic only).
struct CompatibilityReport {
    std::vector<double> boundary_sup;
    std::vector<double> wave_residual;
    std::vector<double> closure_sup;
    double max_boundary(int k_max) const {
        double m = 0;
        for (int j = 0; j <= k_max && j < static_cast<int>(boundary_sup.size()); ++j)
            m = std::max(m, boundary_sup[j]);
        return m;
    }
};
CompatibilityReport verify_compatibility(const CompatibleData& data, EosPtr eos,
                                         int k_max);

// Taylor-sign-condition checks for irrotational data (superharmonicity,
// boundary minimum, Green's-function lower bound at probe depth b < 0).
struct SignConditionReport {
    double min_neg_lap = 0;    // min over interior of -Lap(h_0 + x_n)
    bool degenerate = false;   // |min| at roundoff scale (rest state)
    double eps = 0;            // min over boundary of -grad_N h_0
    double green_margin = 0;   // min over samples of (-grad_N h0 - green bound)
    double green_bound_min = 0, green_bound_max = 0;
    bool superharmonic_ok = false;
    bool eps_ok = false;
    bool green_ok = false; // informational in 2-D
};
SignConditionReport check_sign_condition(const CompatibleData& data, EosPtr eos,
                                         double probe_depth);

// Initial-velocity presets.
Field preset_velocity(const StripGrid& g, const std::string& name, double amplitude,
                      int modes, uint64_t seed);

} // namespace ww
