#pragma once

#include <string>

#include "wwlab/state.hpp"

namespace ww {

// Numerical inequality probes: sample random fields, evaluate both sides of
// an estimate, report the worst ratio against a calibrated constant. The
// Poincare constant is the explicit strip height; every other constant is a
// measured quantity (flat-strip calibration with margin).
enum class ProbeKind {
    Hodge,
    EllipticI,
    EllipticII,
    Tensor,
    Theta,
    Trace,
    Poincare,
    InteriorSobolev,
    BoundaryInterpolation,
    GagliardoNirenberg,
};

ProbeKind probe_kind_from_string(const std::string& s);
std::string probe_kind_name(ProbeKind k);

struct ProbeConfig {
    int samples = 1000;
    uint64_t seed = 1;
    bool weighted = false;
    double mu = 2.0;
    double constant = 0;  // 0: use the calibrated default for the kind
};

struct ProbeReport {
    ProbeKind kind;
    bool weighted = false;
    int samples = 0;
    uint64_t seed = 0;
    double worst_ratio = 0;
    double constant_estimate = 0;  // == worst ratio over the sample family
    double configured_constant = 0;
    bool pass = false;
    double scale_invariance_err = 0; // |ratio(10f) - ratio(f)| on one sample
    std::string json() const;
};

// calibrated default constant per kind (worst measured on flat and
// 10%-perturbed strips x 1.5 margin)
double probe_default_constant(ProbeKind k, bool weighted);

// geometry sample: surface perturbed by a random smooth profile of relative
// amplitude `perturb`, hydrostatic enthalpy
FlowState probe_geometry(const StripGrid& g, double perturb, uint64_t seed);

ProbeReport inequality_probe(ProbeKind kind, const FlowState& st, const ProbeConfig& cfg);

} // namespace ww
