#include "wwlab/eos.hpp"

#include <cmath>
#include <stdexcept>

namespace ww {

Eos::Eos(Kind kind, double kappa, double gamma)
    : kind_(kind), kappa_(kappa), gamma_(gamma) {
    if (!(kappa > 0)) throw std::invalid_argument("Eos: kappa must be > 0");
    if (kind == Kind::GammaLaw && !(gamma > 1))
        throw std::invalid_argument("Eos: gamma must be > 1");
}

double Eos::rho(double h) const {
    if (kind_ == Kind::Linear) return std::exp(h / kappa_);
    double u = 1.0 + (gamma_ - 1.0) * h / kappa_;
    if (!(u > 0)) throw std::domain_error("Eos: h outside admissible range");
    return std::pow(u, 1.0 / (gamma_ - 1.0));
}

double Eos::p_of_rho(double r) const {
    if (kind_ == Kind::Linear) return kappa_ * (r - 1.0);
    return kappa_ / gamma_ * (std::pow(r, gamma_) - 1.0);
}

double Eos::dp_drho(double r) const {
    if (kind_ == Kind::Linear) return kappa_;
    return kappa_ * std::pow(r, gamma_ - 1.0);
}

double Eos::Q(double r) const {
    if (kind_ == Kind::Linear) return kappa_ * (std::log(r) + 1.0 / r - 1.0);
    return kappa_ / gamma_ *
           ((std::pow(r, gamma_ - 1.0) - 1.0) / (gamma_ - 1.0) + 1.0 / r - 1.0);
}

double Eos::e(double h) const {
    if (kind_ == Kind::Linear) return h / kappa_;
    double u = 1.0 + (gamma_ - 1.0) * h / kappa_;
    if (!(u > 0)) throw std::domain_error("Eos: h outside admissible range");
    return std::log(u) / (gamma_ - 1.0);
}

double Eos::e_deriv(int k, double h) const {
    if (k < 1) throw std::invalid_argument("Eos::e_deriv: k >= 1");
    if (kind_ == Kind::Linear) return (k == 1) ? 1.0 / kappa_ : 0.0;
    const double a = (gamma_ - 1.0) / kappa_;
    double u = 1.0 + a * h;
    if (!(u > 0)) throw std::domain_error("Eos: h outside admissible range");
    double fact = 1.0;
    for (int i = 2; i < k; ++i) fact *= i; // (k-1)!
    double sign = (k % 2 == 1) ? 1.0 : -1.0;
    return sign * fact * std::pow(a, k) * std::pow(u, -static_cast<double>(k)) /
           (gamma_ - 1.0);
}

bool Eos::admissible(double h) const {
    if (kind_ == Kind::Linear) return true;
    return 1.0 + (gamma_ - 1.0) * h / kappa_ > 0;
}

void Eos::require_admissible(double h_lo, double h_hi) const {
    if (!admissible(h_lo) || !admissible(h_hi))
        throw std::domain_error("Eos: [h_lo,h_hi] leaves the admissible range 1+(gamma-1)h/kappa > 0");
}

EosPtr make_eos(const std::string& kind, double kappa, double gamma) {
    if (kind == "linear") return std::make_shared<Eos>(Eos::Kind::Linear, kappa);
    if (kind == "gamma-law") return std::make_shared<Eos>(Eos::Kind::GammaLaw, kappa, gamma);
    throw std::invalid_argument("make_eos: unknown kind '" + kind + "'");
}

EosConditionReport verify_structural_conditions(Eos& eos, double h_lo, double h_hi,
                                                int r, bool calibrate, int samples) {
    if (!(h_hi > h_lo)) throw std::invalid_argument("verify_structural_conditions: empty range");
    eos.require_admissible(h_lo, h_hi);
    EosConditionReport rep;
    rep.sup_abs.assign(r + 1, 0.0);
    rep.sup_ratio.assign(r + 1, 0.0);
    for (int i = 0; i <= samples; ++i) {
        double h = h_lo + (h_hi - h_lo) * i / samples;
        double ep = std::abs(eos.e_prime(h));
        for (int k = 1; k <= r + 1; ++k) {
            double ek = std::abs(eos.e_deriv(k, h));
            rep.sup_abs[k - 1] = std::max(rep.sup_abs[k - 1], ek);
            double pk = std::pow(ep, k);
            if (pk > 0) rep.sup_ratio[k - 1] = std::max(rep.sup_ratio[k - 1], ek / pk);
        }
    }
    double sup = 0;
    for (int k = 0; k <= r; ++k) sup = std::max({sup, rep.sup_abs[k], rep.sup_ratio[k]});
    if (calibrate) eos.set_c0(1.1 * std::max(sup, 1e-300));
    rep.c0_used = eos.c0();
    rep.pass = true;
    for (int k = 0; k <= r; ++k)
        if (rep.sup_abs[k] > rep.c0_used || rep.sup_ratio[k] > rep.c0_used) rep.pass = false;
    return rep;
}

} // namespace ww
