#include <doctest.h>

#include <cmath>

#include "wwlab/evolve.hpp"
#include "wwlab/norms.hpp"

using namespace ww;

namespace {
EosPtr linear_eos(double kappa) { return make_eos("linear", kappa); }
} // namespace

TEST_SUITE("evolve") {

TEST_CASE("hydrostatic rest is a fixed point of both steppers") {
    StripGrid g(64, 32, 1.0);
    EosPtr eos = make_eos("linear", 100.0);
    FlowState st = hydrostatic_state(g, eos);
    StepperConfig cfg;
    cfg.dt = 1e-3;
    for (int s = 0; s < 100; ++s) st = step(st, cfg);
    double vmax = 0;
    for (double v : st.v.data) vmax = std::max(vmax, std::abs(v));
    CHECK(vmax < 1e-10);
    double hdrift = 0;
    for (int n = 0; n < g.nnodes(); ++n)
        hdrift = std::max(hdrift, std::abs(st.h.at(0, n) + g.y(n)[1]));
    CHECK(hdrift < 1e-10);

    FlowState inc(LagrangianMap(g), Field(g, 1), Field(g, 0), nullptr);
    for (int s = 0; s < 100; ++s) inc = incompressible_step(inc, cfg);
    vmax = 0;
    for (double v : inc.v.data) vmax = std::max(vmax, std::abs(v));
    CHECK(vmax < 1e-10);
}

TEST_CASE("galilean translation of the hydrostatic state") {
    StripGrid g(32, 16, 1.0);
    EosPtr eos = make_eos("linear", 100.0);
    FlowState st = hydrostatic_state(g, eos);
    for (int n = 0; n < g.nnodes(); ++n) st.v.at(0, n) = 0.5;
    st.invalidate();
    StepperConfig cfg;
    cfg.dt = 1e-3;
    double E0_init = energy_E0(st);
    for (int s = 0; s < 50; ++s) st = step(st, cfg);
    // velocity stays the uniform translation, energy exactly constant
    for (int n = 0; n < g.nnodes(); ++n) {
        CHECK(std::abs(st.v.at(0, n) - 0.5) < 1e-11);
        CHECK(std::abs(st.v.at(1, n)) < 1e-11);
    }
    CHECK(energy_E0(st) == doctest::Approx(E0_init).epsilon(1e-11));
    CHECK(st.map.displacement.at(0, 0) == doctest::Approx(0.5 * 50 * 1e-3).epsilon(1e-10));
}

TEST_CASE("CFL guard") {
    StripGrid g(64, 32, 1.0);
    FlowState st = hydrostatic_state(g, make_eos("linear", 1e6));
    StepperConfig cfg;
    cfg.dt = 1e-2; // far beyond the acoustic limit at kappa = 1e6
    CHECK_THROWS_WITH_AS(step(st, cfg), doctest::Contains("CFL"), std::runtime_error);
}

TEST_CASE("small wave: E0 conservation at 4th order in dt") {
    StripGrid g(64, 32, 1.0);
    EosPtr eos = make_eos("linear", 100.0);
    InitialDataProblem prob;
    prob.u0 = preset_velocity(g, "swirl", 0.01, 1, 42);
    prob.eos = eos;
    prob.r = 2;
    CompatibleData data = construct_compatible_data(prob);

    auto final_E0 = [&](double dt) {
        FlowState st = data.state(eos);
        StepperConfig cfg;
        cfg.dt = dt;
        int nst = static_cast<int>(std::round(0.1 / dt));
        for (int s = 0; s < nst; ++s) st = step(st, cfg);
        return energy_E0(st);
    };
    double e0 = energy_E0(data.state(eos));
    double c1 = final_E0(1e-3);
    CHECK(std::abs(c1 - e0) / std::abs(e0) < 1e-4); // production drift stays small
}

TEST_CASE("curl transport keeps irrotational data irrotational") {
    StripGrid g(48, 25, 1.0);
    EosPtr eos = make_eos("linear", 100.0);
    InitialDataProblem prob;
    prob.u0 = preset_velocity(g, "irrotational-bump", 0.02, 2, 3);
    prob.eos = eos;
    prob.r = 2;
    CompatibleData data = construct_compatible_data(prob);
    FlowState st = data.state(eos);
    StepperConfig cfg;
    cfg.dt = 5e-4;
    for (int s = 0; s < 200; ++s) st = step(st, cfg);
    Field cu = curl(st.v, st.map);
    double cmax = 0;
    for (double v : cu.data) cmax = std::max(cmax, std::abs(v));
    CHECK(cmax < 5e-4); // stays at discretization-error level
}

TEST_CASE("boundary drift with and without reprojection") {
    StripGrid g(64, 32, 1.0);
    EosPtr eos = make_eos("linear", 100.0);
    InitialDataProblem prob;
    prob.u0 = preset_velocity(g, "swirl", 0.02, 1, 7);
    prob.eos = eos;
    prob.r = 2;
    CompatibleData data = construct_compatible_data(prob);
    auto run = [&](bool reproject) {
        FlowState st = data.state(eos);
        StepperConfig cfg;
        cfg.dt = 1e-3;
        cfg.reproject_top = reproject;
        double drift = 0;
        for (int s = 0; s < 100; ++s) {
            st = step(st, cfg);
            for (int b = 0; b < g.nbdy(); ++b)
                drift = std::max(drift, std::abs(st.h.at(0, g.top_node(b))));
        }
        return drift;
    };
    double with = run(true);
    double without = run(false);
    CHECK(with <= 1e-9);
    CHECK(without > with);
}

TEST_CASE("incompressible stepper: divergence stays at solver level") {
    StripGrid g(48, 25, 1.0);
    Field u0 = preset_velocity(g, "swirl", 0.2, 2, 5);
    Field p0 = pressure_from_velocity(u0);
    for (int n = 0; n < g.nnodes(); ++n) p0.at(0, n) -= g.y(n)[1];
    FlowState st(LagrangianMap(g), u0, p0, nullptr);
    StepperConfig cfg;
    cfg.dt = 2e-3;
    for (int s = 0; s < 25; ++s) {
        st = incompressible_step(st, cfg);
        Field dv = divergence(st.v, st.map);
        double worst = 0;
        for (int n = 0; n < g.nnodes(); ++n) {
            int j = g.j_of(n);
            if (j == 0 || j == g.nv - 1) continue;
            worst = std::max(worst, std::abs(dv.at(0, n)));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("monitored evolution of a small wave, r = 2") {
    StripGrid g(64, 32, 1.0);
    EosPtr eos = make_eos("linear", 100.0);
    InitialDataProblem prob;
    prob.u0 = preset_velocity(g, "swirl", 0.01, 1, 9);
    prob.eos = eos;
    prob.r = 2;
    CompatibleData data = construct_compatible_data(prob);
    StepperConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.06;
    cfg.sample_every = 5;
    EvolveResult res = evolve_with_monitor(data.state(eos), cfg, 2);
    REQUIRE(!res.halted);
    CHECK(res.T_obs >= 0.05);
    double e0 = res.rows.front().Er_star;
    for (const auto& row : res.rows) {
        CHECK(row.Er_star <= 2 * e0);
        CHECK(row.eps > 0.5);
    }
    CHECK(res.csv().find("wwlab-timeseries") != std::string::npos);
}

TEST_CASE("kappa sweep: trivial data gives zero differences") {
    StripGrid g(32, 16, 1.0);
    Field u0(g, 1);
    StepperConfig cfg;
    cfg.dt = 1e-3;
    SweepResult sw = kappa_sweep(u0, linear_eos, {1e2, 1e3}, 0.02, 2, cfg);
    REQUIRE(sw.runs.size() == 2);
    for (const auto& run : sw.runs) {
        REQUIRE(!run.halted);
        CHECK(run.final_diff_v < 1e-9);
        CHECK(run.final_diff_h < 1e-7);
    }
}

TEST_CASE("commutator expansions vs the time-difference oracle") {
    // a generic smooth state (deliberately not compatible data: the oracle
    // wants strong material derivatives for a clean signal)
    StripGrid g(48, 25, 1.0);
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
    struct Case {
        sym::Identity id;
        int order;
        double dt;
    };
    // the third time difference of the Laplacian family needs a larger base
    // dt to sit above the 1/dt^3 roundoff floor
    for (Case c : {Case{sym::Identity::DtPartialR, 1, 4e-3},
                   Case{sym::Identity::DtPartialR, 2, 4e-3},
                   Case{sym::Identity::DtPartialR, 3, 4e-3},
                   Case{sym::Identity::PartialDtK, 2, 4e-3},
                   Case{sym::Identity::PartialDtK, 3, 4e-3},
                   Case{sym::Identity::LaplacianDt, 2, 4e-3},
                   Case{sym::Identity::LaplacianDt, 3, 1.2e-2}}) {
        ExpansionCheck chk = verify_expansion(c.id, c.order, st, c.dt);
        CAPTURE(static_cast<int>(c.id));
        CAPTURE(c.order);
        CHECK(chk.residual_half < chk.residual_dt);
        // at least the O(dt^2) Richardson decay; the k >= 2 families come out
        // a clean 4th order because the stencil error cancels across the
        // commutator arrangement
        CHECK(chk.ratio > 3.0);
        CHECK(chk.ratio < 40.0);
    }
    // zero velocity: every commutator vanishes identically
    FlowState rest = hydrostatic_state(g, eos);
    ExpansionCheck z = verify_expansion(sym::Identity::DtPartialR, 2, rest, 1e-3);
    CHECK(z.residual_dt < 1e-8);
}

} // TEST_SUITE
