#pragma once

#include <memory>
#include <string>
#include <vector>

namespace ww {

// Barotropic equation-of-state family parametrized by the sound speed
// kappa = p'(rho)|_{rho=1}. Normalization: rho(0) = 1, e(0) = 0,
// e(h) = log rho(h).
//
//   linear    : p(rho) = kappa (rho - 1),         e(h)   = h / kappa
//   gamma-law : p(rho) = (kappa/gamma)(rho^g - 1), rho(h) = (1+(g-1)h/kappa)^{1/(g-1)}
class Eos {
public:
    enum class Kind { Linear, GammaLaw };

    Eos(Kind kind, double kappa, double gamma = 2.0);

    Kind   kind() const { return kind_; }
    double kappa() const { return kappa_; }
    double gamma() const { return gamma_; }

    double rho(double h) const;
    double p_of_rho(double rho) const;
    double dp_drho(double rho) const;
    double Q(double rho) const; // int_1^rho p(l) l^{-2} dl, Q(1)=0

    double e(double h) const;           // log rho(h)
    double e_deriv(int k, double h) const; // e^{(k)}(h), k >= 1
    double e_prime(double h) const { return e_deriv(1, h); }

    // gamma-law admissibility: 1 + (gamma-1)h/kappa > 0
    bool   admissible(double h) const;
    void   require_admissible(double h_lo, double h_hi) const;

    double c0() const { return c0_; }
    void   set_c0(double c) { c0_ = c; }

private:
    Kind kind_;
    double kappa_;
    double gamma_;
    double c0_ = 1.0;
};

using EosPtr = std::shared_ptr<const Eos>;

EosPtr make_eos(const std::string& kind, double kappa, double gamma = 2.0);

// Sampled check of |e^(k)| <= c0 and |e^(k)| <= c0 |e'|^k on [h_lo, h_hi],
// k <= r+1. Also calibrates c0 = 1.1 * measured sup when calibrate is set.
struct EosConditionReport {
    bool pass = false;
    double c0_used = 0;
    std::vector<double> sup_abs;   // sup |e^(k)|, k = 1..r+1
    std::vector<double> sup_ratio; // sup |e^(k)| / |e'|^k
};
EosConditionReport verify_structural_conditions(Eos& eos, double h_lo, double h_hi,
                                                int r, bool calibrate = true,
                                                int samples = 10000);

} // namespace ww
