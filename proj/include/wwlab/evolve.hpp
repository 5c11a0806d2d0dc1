#pragma once

#include <string>

#include "wwlab/energy.hpp"
#include "wwlab/initdata.hpp"
#include "wwlab/state.hpp"

namespace ww {

struct StepperConfig {
    double dt = 1e-3;
    double cfl = 0.9;            // acoustic CFL: dt <= cfl h_min/(sqrt(kappa)+|v|)
    double t_final = 0.1;
    double filter_fraction = 1.0 / 3.0;
    double filter_strength = 0.05;
    bool reproject_top = true;   // restore h|top = 0 after each step
    int sample_every = 1;        // monitor cadence in steps
    double solver_tol = 1e-10;   // incompressible projection tolerance
    bool bottom_wall = true;     // impermeable-wall override at the truncation
};

// One RK4 step of the compressible system dx/dt = v, dv/dt = -grad h - e_n,
// dh/dt = -div v / e'(h); impermeable bottom, horizontal spectral filter.
FlowState step(const FlowState& st, const StepperConfig& cfg);

// One projection step of the incompressible reference (the state's h slot
// carries the pressure).
FlowState incompressible_step(const FlowState& st, const StepperConfig& cfg);

void enforce_cfl(const FlowState& st, double dt, double cfl);

struct MonitorRow {
    double t = 0;
    double E0 = 0;
    std::vector<double> E;   // E_1..E_r
    double Er_star = 0;
    double tilde_star = 0;   // tilde variant of E_r*
    double dev_star = 0;     // deviation-variable E_r*
    double eps = 0, K = 0, M = 0, calE = 0;
    double h_top_drift = 0;  // sup over the surface of |h|
};

struct EvolveResult {
    std::vector<MonitorRow> rows;
    double T_obs = 0;        // largest sampled t with E_r* <= 2 E_r*(0), eps >= eps(0)/2
    bool halted = false;
    std::string halt_reason;
    FlowState final_state;
    std::string csv() const; // versioned time-series table
};

EvolveResult evolve_with_monitor(FlowState st, const StepperConfig& cfg, int r);

// kappa-parametrized incompressible-limit experiment
struct SweepRun {
    double kappa = 0;
    double final_diff_v = 0; // |v_kappa - u|_inf at t = T
    double final_diff_h = 0; // |h_kappa - p|_inf at t = T
    double T_obs = 0;
    double E_ratio_max = 0;       // max_t E_r*(t)/E_r*(0)
    double tilde_ratio_max = 0;   // max_t tildeE_r*(t)/tildeE_r*(0)
    double tilde_star0 = 0;       // tildeE_r*(0)
    bool halted = false;
    std::string halt_reason;
};

struct SweepResult {
    std::vector<SweepRun> runs;
    bool monotone_v = false; // final_diff_v strictly decreasing in kappa
    double slope_v = 0;      // log-log slope of final_diff_v vs kappa
    std::string json() const;
};

SweepResult kappa_sweep(const Field& u0, EosPtr (*eos_factory)(double),
                        const std::vector<double>& kappas, double T, int r,
                        const StepperConfig& cfg);

// Finite-difference (Richardson) verification of the commutator expansions
// along the compressible flow: the residual of term-list vs time-differenced
// commutator decays O(dt^2).
struct ExpansionCheck {
    double residual_dt = 0;   // absolute L2 residual at dt
    double residual_half = 0; // at dt/2
    double ratio = 0;         // residual_dt / residual_half, ~4 at second order
    double rhs_norm = 0;      // scale of the evaluated term list
};
ExpansionCheck verify_expansion(sym::Identity id, int order, const FlowState& st,
                                double dt);

} // namespace ww
