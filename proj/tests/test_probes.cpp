#include <doctest.h>

#include <cmath>

#include "wwlab/map.hpp"
#include "wwlab/norms.hpp"
#include "wwlab/probes.hpp"
#include "wwlab/quadrature.hpp"

using namespace ww;

TEST_SUITE("probes") {

TEST_CASE("poincare: the worked example and the explicit constant") {
    StripGrid g(64, 33, 1.0);
    // u = y2 sin y1 vanishes on the surface; quadrature oracle for the ratio
    Field u(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) {
        auto y = g.y(n);
        u.at(0, n) = y[1] * std::sin(y[0]);
    }
    LagrangianMap map(g);
    Field du = euler_derivative(u, map);
    double nu = norm(u, NormSpace::L2);
    double ndu = norm(du, NormSpace::L2);
    // oracle: |u|^2 = pi/3, |du|^2 = pi/3 + pi
    CHECK(nu * nu == doctest::Approx(M_PI / 3).epsilon(1e-10));
    CHECK(ndu * ndu == doctest::Approx(M_PI / 3 + M_PI).epsilon(1e-10));
    CHECK(nu / ndu <= 1.0); // the strip height
    CHECK(nu / ndu == doctest::Approx(0.5).epsilon(1e-10));

    FlowState st = probe_geometry(g, 0.0, 1);
    ProbeConfig cfg;
    cfg.samples = 100;
    cfg.seed = 7;
    ProbeReport rep = inequality_probe(ProbeKind::Poincare, st, cfg);
    CHECK(rep.configured_constant == doctest::Approx(1.0));
    CHECK(rep.pass);
    CHECK(rep.worst_ratio < 1.0);
}

TEST_CASE("trace: worked example on the flat strip") {
    StripGrid g(64, 33, 1.0);
    Field a(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) a.at(0, n) = std::sin(g.y(n)[0]);
    LagrangianMap map(g);
    Field da = euler_derivative(a, map);
    double lhs = norm(a, NormSpace::BdyL2);
    double rhs = norm(a, NormSpace::L2) + norm(da, NormSpace::L2);
    CHECK(lhs == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
    CHECK(lhs / rhs < 0.7); // measured O(1) constant on the flat strip
}

TEST_CASE("hodge pointwise example: rigid rotation pattern") {
    StripGrid g(32, 17, 1.0);
    FlowState st = probe_geometry(g, 0.0, 1);
    // v = (y2, sin y1): |dv|^2 vs tangential + div^2 + curl^2
    Field v(g, 1);
    for (int n = 0; n < g.nnodes(); ++n) {
        auto y = g.y(n);
        v.at(0, n) = y[1];
        v.at(1, n) = std::sin(y[0]);
    }
    Field dv = euler_derivative(v, st.map);
    Field dvg = divergence(v, st.map);
    Field cu = curl(v, st.map);
    const Field& q = st.qform().q;
    for (int n = 0; n < g.nnodes(); ++n) {
        double lhs = 0, cur = 0;
        for (int c = 0; c < 4; ++c) lhs += dv.at(c, n) * dv.at(c, n);
        for (int c = 0; c < 4; ++c) cur += cu.at(c, n) * cu.at(c, n);
        double rhs = q_contract_node(q, dv, dv, 1, n) + dvg.at(0, n) * dvg.at(0, n) + cur;
        CHECK(lhs <= 4.0 * rhs + 1e-12); // the calibrated hodge constant
    }
}

TEST_CASE("all probe kinds pass their calibrated constants") {
    StripGrid g(64, 32, 1.0);
    for (double perturb : {0.0, 0.1}) {
        FlowState st = probe_geometry(g, perturb, 42);
        for (auto kind : {ProbeKind::Hodge, ProbeKind::EllipticI, ProbeKind::EllipticII,
                          ProbeKind::Tensor, ProbeKind::Theta, ProbeKind::Trace,
                          ProbeKind::Poincare, ProbeKind::InteriorSobolev,
                          ProbeKind::BoundaryInterpolation, ProbeKind::GagliardoNirenberg}) {
            ProbeConfig cfg;
            cfg.samples = 60; // the acceptance suite runs the full 1000
            cfg.seed = 12345;
            ProbeReport rep = inequality_probe(kind, st, cfg);
            CAPTURE(probe_kind_name(kind));
            CAPTURE(perturb);
            CHECK(rep.pass);
            CHECK(rep.scale_invariance_err < 1e-10);
            CHECK(rep.json().find(probe_kind_name(kind)) != std::string::npos);
        }
    }
}

TEST_CASE("weighted variants stay within their constants") {
    StripGrid g(64, 32, 1.0);
    FlowState st = probe_geometry(g, 0.1, 3);
    for (auto kind : {ProbeKind::Hodge, ProbeKind::EllipticI, ProbeKind::Trace,
                      ProbeKind::Poincare, ProbeKind::GagliardoNirenberg}) {
        ProbeConfig cfg;
        cfg.samples = 40;
        cfg.seed = 99;
        cfg.weighted = true;
        ProbeReport rep = inequality_probe(kind, st, cfg);
        CAPTURE(probe_kind_name(kind));
        CHECK(rep.pass);
        CHECK(rep.scale_invariance_err < 1e-10);
    }
}

TEST_CASE("probe kind names round-trip") {
    for (auto kind : {ProbeKind::Hodge, ProbeKind::EllipticI, ProbeKind::EllipticII,
                      ProbeKind::Tensor, ProbeKind::Theta, ProbeKind::Trace,
                      ProbeKind::Poincare, ProbeKind::InteriorSobolev,
                      ProbeKind::BoundaryInterpolation, ProbeKind::GagliardoNirenberg})
        CHECK(probe_kind_from_string(probe_kind_name(kind)) == kind);
    CHECK_THROWS(probe_kind_from_string("nope"));
}

} // TEST_SUITE
