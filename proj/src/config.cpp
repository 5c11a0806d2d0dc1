#include "wwlab/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "wwlab/initdata.hpp"
#include "wwlab/io.hpp"

namespace ww {

using nlohmann::json;

EosPtr ExperimentConfig::eos() const { return make_eos(eos_kind, kappa, gamma); }

Field ExperimentConfig::initial_velocity(const StripGrid& g) const {
    if (preset == "file") {
        StripGrid gf;
        Field u = read_field(velocity_file, gf);
        if (!gf.same(g))
            throw std::invalid_argument("initial velocity file grid does not match config");
        return u;
    }
    return preset_velocity(g, preset, amplitude, modes, seed);
}

namespace {

template <class T>
void take(json& j, const char* key, T& out) {
    if (j.contains(key)) {
        out = j.at(key).get<T>();
        j.erase(key);
    }
}

void reject_unknown(const json& j, const std::string& scope) {
    if (!j.empty())
        throw std::invalid_argument("config: unknown key '" + j.begin().key() + "' in " +
                                    scope);
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j = json::parse(text);
    ExperimentConfig c;
    if (j.contains("grid")) {
        json g = j.at("grid");
        j.erase("grid");
        take(g, "nx", c.nx);
        take(g, "nz", c.nz);
        take(g, "depth", c.depth);
        reject_unknown(g, "grid");
    }
    if (j.contains("eos")) {
        json e = j.at("eos");
        j.erase("eos");
        take(e, "kind", c.eos_kind);
        take(e, "kappa", c.kappa);
        take(e, "gamma", c.gamma);
        if (e.contains("h_range")) {
            auto hr = e.at("h_range");
            c.h_range_lo = hr.at(0).get<double>();
            c.h_range_hi = hr.at(1).get<double>();
            e.erase("h_range");
        }
        reject_unknown(e, "eos");
    }
    if (j.contains("initial")) {
        json i = j.at("initial");
        j.erase("initial");
        take(i, "preset", c.preset);
        take(i, "amplitude", c.amplitude);
        take(i, "modes", c.modes);
        take(i, "file", c.velocity_file);
        reject_unknown(i, "initial");
    }
    if (j.contains("stepper")) {
        json s = j.at("stepper");
        j.erase("stepper");
        take(s, "dt", c.stepper.dt);
        take(s, "cfl", c.stepper.cfl);
        take(s, "t_final", c.stepper.t_final);
        take(s, "filter_fraction", c.stepper.filter_fraction);
        take(s, "filter_strength", c.stepper.filter_strength);
        take(s, "reproject_top", c.stepper.reproject_top);
        take(s, "sample_every", c.stepper.sample_every);
        take(s, "solver_tol", c.stepper.solver_tol);
        reject_unknown(s, "stepper");
    }
    if (j.contains("sweep")) {
        json s = j.at("sweep");
        j.erase("sweep");
        take(s, "kappas", c.kappas);
        take(s, "t_final", c.sweep_t_final);
        reject_unknown(s, "sweep");
    }
    if (j.contains("probe")) {
        json p = j.at("probe");
        j.erase("probe");
        take(p, "kinds", c.probe_kinds);
        take(p, "samples", c.probe_samples);
        take(p, "weighted", c.probe_weighted);
        take(p, "perturb", c.probe_perturb);
        reject_unknown(p, "probe");
    }
    take(j, "weight_mu", c.mu);
    take(j, "r", c.r);
    take(j, "seed", c.seed);
    take(j, "output_dir", c.output_dir);
    reject_unknown(j, "config");

    // schema checks beyond the grid/eos constructors
    if (c.r < 1 || c.r > 5) throw std::invalid_argument("config: r must be in [1,5]");
    if (c.mu < 2.0) throw std::invalid_argument("config: weight_mu must be >= 2");
    if (!(c.h_range_hi > c.h_range_lo))
        throw std::invalid_argument("config: empty eos h_range");
    c.grid().validate();
    c.eos()->require_admissible(c.h_range_lo, c.h_range_hi);
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::string ExperimentConfig::resolved_json() const {
    json j;
    j["grid"] = {{"nx", nx}, {"nz", nz}, {"depth", depth}};
    j["eos"] = {{"kind", eos_kind},
                {"kappa", kappa},
                {"gamma", gamma},
                {"h_range", {h_range_lo, h_range_hi}}};
    j["initial"] = {{"preset", preset},
                    {"amplitude", amplitude},
                    {"modes", modes},
                    {"file", velocity_file}};
    j["stepper"] = {{"dt", stepper.dt},
                    {"cfl", stepper.cfl},
                    {"t_final", stepper.t_final},
                    {"filter_fraction", stepper.filter_fraction},
                    {"filter_strength", stepper.filter_strength},
                    {"reproject_top", stepper.reproject_top},
                    {"sample_every", stepper.sample_every},
                    {"solver_tol", stepper.solver_tol}};
    j["sweep"] = {{"kappas", kappas}, {"t_final", sweep_t_final}};
    j["probe"] = {{"kinds", probe_kinds},
                  {"samples", probe_samples},
                  {"weighted", probe_weighted},
                  {"perturb", probe_perturb}};
    j["weight_mu"] = mu;
    j["r"] = r;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    return j.dump(2);
}

std::string ExperimentConfig::resolve_output_dir() const {
    const char* root = std::getenv("WWLAB_OUTPUT_ROOT");
    std::filesystem::path p = output_dir;
    if (root && p.is_relative()) p = std::filesystem::path(root) / p;
    return p.string();
}

} // namespace ww
