#pragma once

#include <map>

#include "wwlab/state.hpp"

namespace ww {

enum class EnergyVariant { Plain, Tilde, Weighted };

// Breakdown of the order-r energy stack: E_0, every E_{s,k} with s+k = r' for
// r' <= r, the curl energies K_{r'}, the wave energies W_j, and the totals.
struct EnergyBreakdown {
    int r = 0;
    EnergyVariant variant = EnergyVariant::Plain;
    bool deviation = false; // h-parts computed for h + x_n instead of h
    double mu = 2.0;

    double E0 = 0;
    std::map<std::pair<int, int>, double> E_sk; // s+k <= r (k index second)
    std::map<int, double> K;                    // K_{r'}, 1 <= r' <= r
    std::map<int, double> W;                    // W_j, 1 <= j <= r+1
    std::map<int, double> E;                    // E_{r'}, 1 <= r' <= r
    double Er = 0;      // E_r
    double Er_star = 0; // E_0 + sum_{1<=r'<=r} E_{r'}
};

// The conserved zero-order energy: kinetic + pressure potential + surface
// potential relative to the flat rest level + gravity/compression coupling.
double energy_E0(const FlowState& st);

EnergyBreakdown energy_Er(const FlowState& st, int r,
                          EnergyVariant variant = EnergyVariant::Plain,
                          double mu = 2.0, bool deviation = false);

// A-priori monitored quantities.
struct AprioriMonitor {
    double K = 0;       // |theta|_inf + 1/l0
    double M = 0;       // max of the interior bounds below
    double eps = 0;     // min over the boundary of -grad_N h
    double calE = 0;    // |(grad_N h)^{-1}|_inf on the boundary
    double c0 = 0;      // structural EOS constant in use
    double rho_max = 0, dv_max = 0, dh_max = 0, d2h_max = 0, ddth_max = 0;
    double ep_dth_max = 0, ep_dtth_max = 0, divcurl_max = 0;
    int eps_argmin = -1; // boundary node of the minimum
};

AprioriMonitor apriori_monitor(const FlowState& st);

} // namespace ww
