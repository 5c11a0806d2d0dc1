// Command-line laboratory for compressible free-surface gravity waves on a
// truncated periodic strip: compatible-data construction, short-time
// Lagrangian evolution with energy/monitor time series, sound-speed sweeps
// toward the incompressible limit, inequality probes, and commutator checks.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wwlab/config.hpp"
#include "wwlab/io.hpp"
#include "wwlab/probes.hpp"
#include "wwlab/symbolic.hpp"

using namespace ww;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitAssert = 2;
constexpr int kExitHalt = 3;

fs::path prepare_outdir(const ExperimentConfig& cfg) {
    fs::path dir = cfg.resolve_output_dir();
    fs::create_directories(dir);
    std::ofstream(dir / "config.resolved.json") << cfg.resolved_json() << "\n";
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

EosPtr linear_eos_factory(double kappa) { return make_eos("linear", kappa); }

int cmd_make_data(const ExperimentConfig& cfg) {
    fs::path dir = prepare_outdir(cfg);
    StripGrid g = cfg.grid();
    InitialDataProblem prob;
    prob.u0 = cfg.initial_velocity(g);
    prob.eos = cfg.eos();
    prob.r = cfg.r;
    prob.mu = cfg.mu;
    CompatibleData data = construct_compatible_data(prob);
    write_field(data.v0, (dir / "v0.wwf").string());
    write_field(data.phi, (dir / "phi.wwf").string());
    write_field(data.h0_dev, (dir / "h0_dev.wwf").string());
    for (size_t k = 0; k < data.h.size(); ++k)
        write_field(data.h[k], (dir / ("h" + std::to_string(k) + ".wwf")).string());
    write_text(dir / "trace.csv", data.trace.csv());

    auto rep = verify_compatibility(data, prob.eos, cfg.r);
    json meta;
    meta["r"] = data.r;
    meta["iterations"] = data.trace.rows.size();
    meta["boundary_sup"] = rep.boundary_sup;
    meta["wave_residual"] = rep.wave_residual;
    meta["closure_sup"] = rep.closure_sup;
    if (cfg.preset == "irrotational-bump" || cfg.preset == "hydrostatic") {
        auto sign = check_sign_condition(data, prob.eos, -cfg.depth / 2);
        meta["sign_condition"] = {{"min_neg_lap", sign.min_neg_lap},
                                  {"degenerate", sign.degenerate},
                                  {"eps", sign.eps},
                                  {"green_bound_min", sign.green_bound_min},
                                  {"green_bound_max", sign.green_bound_max},
                                  {"green_margin", sign.green_margin},
                                  {"green_ok", sign.green_ok}};
    }
    write_text(dir / "meta.json", meta.dump(2) + "\n");
    std::cout << "make-data: wrote " << dir.string() << " (iterations "
              << data.trace.rows.size() << ")\n";
    return 0;
}

int cmd_evolve(const ExperimentConfig& cfg) {
    fs::path dir = prepare_outdir(cfg);
    StripGrid g = cfg.grid();
    EosPtr eos = cfg.eos();
    FlowState st;
    if (cfg.preset == "hydrostatic") {
        st = hydrostatic_state(g, eos);
    } else {
        InitialDataProblem prob;
        prob.u0 = cfg.initial_velocity(g);
        prob.eos = eos;
        prob.r = cfg.r;
        prob.mu = cfg.mu;
        st = construct_compatible_data(prob).state(eos);
    }
    EvolveResult res = evolve_with_monitor(std::move(st), cfg.stepper, cfg.r);
    write_text(dir / "timeseries.csv", res.csv());
    json summary;
    summary["T_obs"] = res.T_obs;
    summary["halted"] = res.halted;
    summary["halt_reason"] = res.halt_reason;
    if (!res.rows.empty()) {
        double e0 = res.rows.front().Er_star, emax = 0;
        for (auto& r : res.rows) emax = std::max(emax, r.Er_star);
        summary["E_star_0"] = e0;
        summary["E_ratio_max"] = e0 != 0 ? emax / e0 : 0.0;
        summary["eps_final"] = res.rows.back().eps;
    }
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    if (res.halted) {
        write_field(res.final_state.v, (dir / "halt_v.wwf").string());
        write_field(res.final_state.h, (dir / "halt_h.wwf").string());
        std::cerr << "evolve: halted: " << res.halt_reason << "\n";
        return kExitHalt;
    }
    std::cout << "evolve: T_obs = " << res.T_obs << ", wrote " << dir.string() << "\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
    fs::path dir = prepare_outdir(cfg);
    StripGrid g = cfg.grid();
    if (cfg.eos_kind != "linear")
        std::cerr << "sweep-kappa: sweeping the linear family regardless of eos.kind\n";
    Field u0 = cfg.initial_velocity(g);
    SweepResult sw = kappa_sweep(u0, linear_eos_factory, cfg.kappas, cfg.sweep_t_final,
                                 cfg.r, cfg.stepper);
    write_text(dir / "sweep.json", sw.json() + "\n");
    bool anyhalt = false;
    for (auto& r : sw.runs) anyhalt |= r.halted;
    std::cout << "sweep-kappa: monotone_v=" << (sw.monotone_v ? "yes" : "no")
              << " slope=" << sw.slope_v << ", wrote " << dir.string() << "\n";
    return anyhalt ? kExitHalt : 0;
}

int cmd_probe(const ExperimentConfig& cfg) {
    fs::path dir = prepare_outdir(cfg);
    StripGrid g = cfg.grid();
    std::vector<std::string> kinds = cfg.probe_kinds;
    if (kinds.empty())
        kinds = {"hodge",    "elliptic_I",       "elliptic_II",
                 "tensor",   "theta",            "trace",
                 "poincare", "interior_sobolev", "boundary_interpolation",
                 "gagliardo_nirenberg"};
    bool all_pass = true;
    json out = json::array();
    for (double perturb : {0.0, cfg.probe_perturb}) {
        FlowState st = probe_geometry(g, perturb, cfg.seed);
        for (const auto& name : kinds) {
            ProbeConfig pc;
            pc.samples = cfg.probe_samples;
            pc.seed = cfg.seed;
            pc.weighted = cfg.probe_weighted;
            pc.mu = cfg.mu;
            ProbeReport rep = inequality_probe(probe_kind_from_string(name), st, pc);
            all_pass = all_pass && rep.pass && rep.scale_invariance_err < 1e-10;
            json jr = json::parse(rep.json());
            jr["perturb"] = perturb;
            out.push_back(jr);
            std::cout << (rep.pass ? "PASS " : "FAIL ") << name << " (perturb " << perturb
                      << "): worst " << rep.worst_ratio << " <= " << rep.configured_constant
                      << "\n";
        }
    }
    write_text(dir / "probes.json", out.dump(2) + "\n");
    return all_pass ? 0 : kExitAssert;
}

int cmd_verify_commutators(const ExperimentConfig& cfg) {
    fs::path dir = prepare_outdir(cfg);
    StripGrid g = cfg.grid();
    EosPtr eos = make_eos("gamma-law", 25.0, 2.0);
    LagrangianMap map(g);
    Field v(g, 1), h(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) {
        auto y = g.y(n);
        double s = (1 + y[1]) * (1 + y[1]);
        v.at(0, n) = 0.4 * std::sin(y[0]) * s + 0.1;
        v.at(1, n) = 0.3 * std::cos(2 * y[0]) * s * y[1];
        h.at(0, n) = -y[1] + 0.1 * std::cos(y[0]) * std::exp(y[1]);
    }
    FlowState st(map, v, h, eos);
    bool ok = true;
    std::ostringstream txt;
    struct Case {
        sym::Identity id;
        const char* name;
        int order;
        double dt;
    };
    for (Case c : {Case{sym::Identity::DtPartialR, "Dt_partial_r", 1, 4e-3},
                   Case{sym::Identity::DtPartialR, "Dt_partial_r", 2, 4e-3},
                   Case{sym::Identity::DtPartialR, "Dt_partial_r", 3, 4e-3},
                   Case{sym::Identity::PartialDtK, "partial_Dtk", 2, 4e-3},
                   Case{sym::Identity::PartialDtK, "partial_Dtk", 3, 4e-3},
                   Case{sym::Identity::LaplacianDt, "laplacian_Dt", 2, 4e-3},
                   Case{sym::Identity::LaplacianDt, "laplacian_Dt", 3, 1.2e-2}}) {
        ExpansionCheck chk = verify_expansion(c.id, c.order, st, c.dt);
        bool pass = chk.ratio > 3.0 && chk.residual_half < chk.residual_dt;
        ok = ok && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << c.name << " order " << c.order
                  << ": Richardson ratio " << chk.ratio << "\n";
        txt << "# " << c.name << " order " << c.order << " (ratio " << chk.ratio << ")\n"
            << sym::print_expansion(sym::expand(c.id, c.order));
    }
    write_text(dir / "expansions.txt", txt.str());
    // structural invariants of the source terms up to order 6
    for (int r = 1; r <= 6; ++r) {
        for (const auto& t : sym::source_f(r, sym::Mode::Data)) {
            int sum = 0;
            for (const auto& a : t.atoms)
                sum += a.sp + (a.base == sym::Base::H ? a.mt : 0);
            if (sum != r + 1) ok = false;
        }
    }
    std::cout << (ok ? "PASS" : "FAIL") << " term-structure invariants (orders 1..6)\n";
    return ok ? 0 : kExitAssert;
}

int cmd_report(const std::string& results_dir) {
    fs::path dir = results_dir;
    json rep;
    if (!fs::exists(dir)) {
        std::cout << "report: no results (missing directory)\n";
        rep["status"] = "no results";
        std::cout << rep.dump(2) << "\n";
        return 0;
    }
    bool found = false;
    if (fs::exists(dir / "timeseries.csv")) {
        found = true;
        std::ifstream is(dir / "timeseries.csv");
        std::string line;
        std::getline(is, line); // version banner
        std::getline(is, line); // header
        std::vector<std::vector<double>> rows;
        while (std::getline(is, line)) {
            std::vector<double> row;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
            if (!row.empty()) rows.push_back(row);
        }
        if (!rows.empty()) {
            // columns: t, E0, E1..Er, Er_star, eps, ...
            size_t star = rows.front().size() - 9;
            double e0 = rows.front()[star], emax = 0, eps0 = rows.front()[star + 1];
            double T_obs = 0;
            bool within = true;
            for (auto& row : rows) {
                emax = std::max(emax, row[star]);
                if (within && row[star] <= 2 * e0 && row[star + 1] >= eps0 / 2)
                    T_obs = row[0];
                else
                    within = false;
            }
            rep["evolve"] = {{"rows", rows.size()},
                             {"E_ratio_max", e0 != 0 ? emax / e0 : 0.0},
                             {"T_obs", T_obs},
                             {"bounded_by_2", emax <= 2 * e0}};
        }
    }
    if (fs::exists(dir / "sweep.json")) {
        found = true;
        std::ifstream is(dir / "sweep.json");
        json sw = json::parse(is);
        bool monotone = true;
        double prev = 1e300;
        for (auto& run : sw.at("runs")) {
            double d = run.at("final_diff_v").get<double>();
            if (d >= prev) monotone = false;
            prev = d;
        }
        rep["sweep"] = {{"monotone_final_diff_v", monotone},
                        {"slope_v", sw.value("slope_v", 0.0)}};
    }
    if (fs::exists(dir / "probes.json")) {
        found = true;
        std::ifstream is(dir / "probes.json");
        json pr = json::parse(is);
        bool all = true;
        for (auto& p : pr) all = all && p.at("pass").get<bool>();
        rep["probes"] = {{"count", pr.size()}, {"all_pass", all}};
    }
    if (!found) rep["status"] = "no results";
    std::ofstream(dir / "report.json") << rep.dump(2) << "\n";
    std::cout << rep.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compressible free-surface water-wave laboratory"};
    app.require_subcommand(1);
    std::string config_path, results_dir;

    auto add_cfg = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "configuration file (JSON)")
            ->required();
    };
    add_cfg(app.add_subcommand("make-data", "construct compatible initial data"));
    add_cfg(app.add_subcommand("evolve", "short-time evolution with monitors"));
    add_cfg(app.add_subcommand("sweep-kappa", "sound-speed sweep vs incompressible"));
    add_cfg(app.add_subcommand("probe", "inequality probes"));
    add_cfg(app.add_subcommand("verify-commutators", "commutator expansion checks"));
    app.add_subcommand("report", "summarize a results directory")
        ->add_option("dir", results_dir, "results directory")
        ->required();

    CLI11_PARSE(app, argc, argv);
    try {
        std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "report") return cmd_report(results_dir);
        ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
        if (sub == "make-data") return cmd_make_data(cfg);
        if (sub == "evolve") return cmd_evolve(cfg);
        if (sub == "sweep-kappa") return cmd_sweep(cfg);
        if (sub == "probe") return cmd_probe(cfg);
        if (sub == "verify-commutators") return cmd_verify_commutators(cfg);
    } catch (const InitDataError& e) {
        std::cerr << "error: " << e.what() << "\n" << e.trace.csv();
        return kExitHalt;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAssert;
    }
    return 0;
}
