#pragma once

#include <string>
#include <vector>

#include "wwlab/evolve.hpp"

namespace ww {

// One configuration tree drives every subcommand; unknown keys are rejected
// so a config documents exactly what ran. The resolved form is written next
// to every artifact.
struct ExperimentConfig {
    // grid
    int nx = 64;
    int nz = 32;
    double depth = 1.0;
    // eos
    std::string eos_kind = "linear";
    double kappa = 100.0;
    double gamma = 2.0;
    double h_range_lo = -2.0, h_range_hi = 2.0;
    // problem
    double mu = 2.0;
    int r = 2;
    std::string preset = "hydrostatic"; // hydrostatic | swirl | irrotational-bump | file
    double amplitude = 0.01;
    int modes = 1;
    std::string velocity_file;
    // stepper
    StepperConfig stepper;
    // sweep
    std::vector<double> kappas{1e2, 1e3, 1e4};
    double sweep_t_final = 0.1;
    // probes
    std::vector<std::string> probe_kinds; // empty: all kinds
    int probe_samples = 1000;
    bool probe_weighted = false;
    double probe_perturb = 0.1;
    // misc
    uint64_t seed = 1;
    std::string output_dir = "wwlab-out";

    StripGrid grid() const { return StripGrid(nx, nz, depth); }
    EosPtr eos() const;
    Field initial_velocity(const StripGrid& g) const;

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string resolved_json() const;
    std::string resolve_output_dir() const; // honors WWLAB_OUTPUT_ROOT
};

} // namespace ww
