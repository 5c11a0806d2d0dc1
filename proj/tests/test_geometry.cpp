#include <doctest.h>

#include <cmath>
#include <random>

#include "wwlab/boundary.hpp"
#include "wwlab/map.hpp"

using namespace ww;

namespace {
using A3 = std::array<double, 3>;
}

TEST_SUITE("geometry") {

TEST_CASE("identity map: g = delta, sqrt(det g) = 1") {
    StripGrid g(32, 16, 1.0);
    LagrangianMap map(g);
    Metric m = metric_from_map(map);
    CHECK(m.flat);
    for (int n = 0; n < g.nnodes(); ++n) {
        CHECK(m.g.at(0, n) == doctest::Approx(1.0));
        CHECK(m.g.at(1, n) == doctest::Approx(0.0));
        CHECK(m.g.at(3, n) == doctest::Approx(1.0));
        CHECK(m.sqrt_det.at(0, n) == doctest::Approx(1.0));
    }
}

TEST_CASE("vertical stretch map: direct metric formula") {
    StripGrid g(32, 16, 1.0);
    auto map = map_from_function(g, [](A3 y) { return A3{y[0], 2 * y[1] + 1, 0}; });
    Metric m = metric_from_map(map);
    for (int n = 0; n < g.nnodes(); ++n) {
        CHECK(m.g.at(0, n) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.g.at(1, n) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(m.g.at(3, n) == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(m.sqrt_det.at(0, n) == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("random C2 perturbation matches the definition oracle") {
    StripGrid g(48, 24, 1.0);
    const double a = 0.05;
    auto xfun = [a](A3 y) {
        return A3{y[0] + a * std::sin(2 * y[0]) * (y[1] * y[1] * y[1] + 0.3 * y[1]),
                  y[1] + a * std::cos(y[0]) * (0.2 * y[1] * y[1] + y[1]), 0};
    };
    auto map = map_from_function(g, xfun);
    Metric m = metric_from_map(map);
    // Richardson central differences of the analytic map as the oracle
    auto jac_oracle = [&](A3 y, double J[2][2]) {
        const double h = 1e-3;
        for (int aa = 0; aa < 2; ++aa) {
            auto d_at = [&](double hh) {
                A3 yp = y, ym = y;
                yp[aa] += hh;
                ym[aa] -= hh;
                auto xp = xfun(yp), xm = xfun(ym);
                return std::array<double, 2>{(xp[0] - xm[0]) / (2 * hh),
                                             (xp[1] - xm[1]) / (2 * hh)};
            };
            auto c1 = d_at(h), c2 = d_at(h / 2);
            for (int i = 0; i < 2; ++i) J[i][aa] = (4 * c2[i] - c1[i]) / 3.0;
        }
    };
    double worst = 0;
    for (int n = 0; n < g.nnodes(); ++n) {
        double J[2][2];
        jac_oracle(g.y(n), J);
        for (int aa = 0; aa < 2; ++aa)
            for (int bb = 0; bb < 2; ++bb) {
                double gref = J[0][aa] * J[0][bb] + J[1][aa] * J[1][bb];
                worst = std::max(worst, std::abs(m.g.at(aa * 2 + bb, n) - gref));
            }
    }
    CHECK(worst < 1e-8);
    // metric inverse consistency
    for (int n = 0; n < g.nnodes(); n += 17) {
        for (int aa = 0; aa < 2; ++aa)
            for (int bb = 0; bb < 2; ++bb) {
                double acc = 0;
                for (int cc = 0; cc < 2; ++cc)
                    acc += m.g.at(aa * 2 + cc, n) * m.g_inv.at(cc * 2 + bb, n);
                CHECK(acc == doctest::Approx(aa == bb ? 1.0 : 0.0).epsilon(1e-10));
            }
    }
}

TEST_CASE("singular jacobian is rejected") {
    StripGrid g(16, 8, 1.0);
    CHECK_THROWS_AS(map_from_function(g, [](A3 y) { return A3{y[0], -0.1 * y[1], 0}; }),
                    std::runtime_error);
}

TEST_CASE("boundary geometry: flat surface") {
    StripGrid g(32, 16, 1.0);
    LagrangianMap map(g);
    Metric m = metric_from_map(map);
    BoundaryGeometry bg = boundary_geometry(map, m);
    for (int b = 0; b < g.nbdy(); ++b) {
        CHECK(bg.sigma.at(0, b) == doctest::Approx(0.0));
        CHECK(bg.n_euler.at(0, b) == doctest::Approx(0.0));
        CHECK(bg.n_euler.at(1, b) == doctest::Approx(1.0));
        for (int c = 0; c < 4; ++c) CHECK(bg.theta.at(c, b) == doctest::Approx(0.0));
    }
    CHECK(bg.theta_sup == doctest::Approx(0.0));
    CHECK(bg.l0_proxy == doctest::Approx(1.0)); // capped by the depth
    CHECK(bg.K_monitor == doctest::Approx(1.0));
}

TEST_CASE("boundary geometry: graph surface curvature oracle") {
    StripGrid g(64, 16, 1.0);
    const double a = 0.1;
    auto map = map_from_function(g, [a](A3 y) {
        double psi = (1 + y[1]) * (1 + y[1]); // 1 at the surface, 0 at the bottom
        return A3{y[0], y[1] + a * std::sin(y[0]) * psi, 0};
    });
    Metric m = metric_from_map(map);
    BoundaryGeometry bg = boundary_geometry(map, m);
    for (int b = 0; b < g.nbdy(); ++b) {
        double y1 = g.y(g.top_node(b))[0];
        double c = std::cos(y1);
        double ref = a * std::sin(y1) / std::pow(1 + a * a * c * c, 1.5);
        CHECK(bg.sigma.at(0, b) == doctest::Approx(ref).epsilon(1e-9));
    }
    // Lagrangian normal invariants at every boundary node
    for (int b = 0; b < g.nbdy(); ++b) {
        int tn = g.top_node(b);
        double nn = 0, gn0 = 0, gn1 = 0;
        for (int aa = 0; aa < 2; ++aa)
            for (int bb = 0; bb < 2; ++bb)
                nn += m.g.at(aa * 2 + bb, tn) * bg.N_up.at(aa, b) * bg.N_up.at(bb, b);
        for (int bb = 0; bb < 2; ++bb) {
            gn0 += bg.gamma_dn.at(0 * 2 + bb, b) * bg.N_up.at(bb, b);
            gn1 += bg.gamma_dn.at(1 * 2 + bb, b) * bg.N_up.at(bb, b);
        }
        CHECK(nn == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(gn0 == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(gn1 == doctest::Approx(0.0).epsilon(1e-12));
        // sigma = g^{ab} theta_ab
        double tr = 0;
        for (int aa = 0; aa < 2; ++aa)
            for (int bb = 0; bb < 2; ++bb)
                tr += m.g_inv.at(aa * 2 + bb, tn) * bg.theta.at(aa * 2 + bb, b);
        CHECK(tr == doctest::Approx(bg.sigma.at(0, b)).epsilon(1e-9));
    }
}

TEST_CASE("sphere-cap patch (3-D smoke): sigma ~ 2/R at the crest") {
    StripGrid g(24, 24, 8, 1.0);
    const double R = 2.0;
    auto map = map_from_function(g, [R](A3 y) {
        double r2 = (y[0] - M_PI) * (y[0] - M_PI) + (y[1] - M_PI) * (y[1] - M_PI);
        double m = std::exp(-r2 * r2); // quartic mask: flat to 2nd order at crest
        double psi = (1 + y[2]) * (1 + y[2]);
        return A3{y[0], y[1], y[2] - r2 / (2 * R) * m * psi * 0.5};
    });
    Metric m = metric_from_map(map);
    BoundaryGeometry bg = boundary_geometry(map, m);
    int crest = g.n1 / 2 + g.n1 * (g.n2 / 2); // y = (pi, pi)
    CHECK(bg.sigma.at(0, crest) == doctest::Approx(0.5 * 2.0 / R).epsilon(0.02));
}

TEST_CASE("q-form: cutoff zones and boundary projector") {
    StripGrid g(32, 32, 1.0);
    LagrangianMap map(g);
    Metric m = metric_from_map(map);
    BoundaryGeometry bg = boundary_geometry(map, m);
    const double d0 = bg.l0_proxy / 2.0;
    NormalExtension ext = q_form(map, bg, d0);
    CHECK_THROWS(q_form(map, bg, bg.l0_proxy));
    for (int n = 0; n < g.nnodes(); ++n) {
        double d = ext.d.at(0, n);
        if (d > d0 / 2 + 1e-12) {
            CHECK(ext.q.at(0, n) == doctest::Approx(1.0));
            CHECK(ext.q.at(3, n) == doctest::Approx(1.0));
            CHECK(ext.q.at(1, n) == doctest::Approx(0.0));
        } else if (d <= d0 / 4) {
            CHECK(ext.q.at(0, n) == doctest::Approx(1.0));
            CHECK(ext.q.at(3, n) == doctest::Approx(0.0)); // flat normal = e2
        } else {
            double eta = ext.eta.at(0, n);
            CHECK(ext.q.at(3, n) == doctest::Approx(1.0 - eta * eta).epsilon(1e-12));
        }
    }
}

TEST_CASE("q-form boundary consistency on a curved surface") {
    StripGrid g(32, 16, 1.0);
    auto map = map_from_function(g, [](A3 y) {
        double psi = (1 + y[1]) * (1 + y[1]);
        return A3{y[0], y[1] + 0.08 * std::cos(2 * y[0]) * psi, 0};
    });
    Metric m = metric_from_map(map);
    BoundaryGeometry bg = boundary_geometry(map, m);
    NormalExtension ext = q_form(map, bg, bg.l0_proxy / 4.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 5; ++trial) {
        Field alpha(g, 1);
        for (auto& v : alpha.data) v = U(rng);
        for (int b = 0; b < g.nbdy(); ++b) {
            int tn = g.top_node(b);
            double q = q_contract_node(ext.q, alpha, alpha, 1, tn);
            // |Pi alpha|^2 with the Euclidean tangential projector
            double an = 0;
            for (int i = 0; i < 2; ++i) an += alpha.at(i, tn) * bg.n_euler.at(i, b);
            double a2 = 0;
            for (int i = 0; i < 2; ++i) a2 += alpha.at(i, tn) * alpha.at(i, tn);
            CHECK(q == doctest::Approx(a2 - an * an).epsilon(1e-10));
        }
    }
}

TEST_CASE("kinematics: zero and rigid-translation flows") {
    StripGrid g(32, 16, 1.0);
    LagrangianMap map(g);
    auto zero = [](A3) { return A3{0, 0, 0}; };
    auto rep = kinematics_check(map, zero, 1e-2);
    for (double r : rep.residual_dt) CHECK(r == doctest::Approx(0.0));

    auto trans = [](A3) { return A3{0.7, 0.2, 0}; };
    auto rep2 = kinematics_check(map, trans, 1e-2);
    CHECK(rep2.residual_dt[0] < 1e-12); // isometry: Dt g = 0
    CHECK(rep2.residual_dt[1] < 1e-12);
    CHECK(rep2.residual_dt[3] < 1e-12);
}

TEST_CASE("kinematics: shear flow residuals decay O(dt^2)") {
    StripGrid g(32, 16, 1.0);
    LagrangianMap map(g);
    auto shear = [](A3 x) { return A3{0.5 * std::sin(x[1]), 0.3 * std::sin(x[0]), 0}; };
    auto rep = kinematics_check(map, shear, 5e-2);
    for (int k = 0; k < 4; ++k) {
        if (rep.residual_half[k] < 1e-12) continue;
        CHECK(rep.ratio[k] == doctest::Approx(4.0).epsilon(0.35));
    }
}

} // TEST_SUITE
