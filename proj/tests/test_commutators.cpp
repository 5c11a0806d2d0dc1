#include <doctest.h>

#include <cmath>
#include <fstream>
#include <functional>

#include "wwlab/history.hpp"
#include "wwlab/norms.hpp"
#include "wwlab/symbolic.hpp"

using namespace ww;
namespace S = ww::sym;

namespace {

Field scalar_of(const StripGrid& g, const std::function<double(double, double)>& f) {
    Field out(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) {
        auto y = g.y(n);
        out.at(0, n) = f(y[0], y[1]);
    }
    return out;
}

Field vector_of(const StripGrid& g,
                const std::function<std::array<double, 2>(double, double)>& f) {
    Field out(g, 1);
    for (int n = 0; n < g.nnodes(); ++n) {
        auto y = g.y(n);
        auto v = f(y[0], y[1]);
        out.at(0, n) = v[0];
        out.at(1, n) = v[1];
    }
    return out;
}

// smooth band-limited state decaying at the bottom
struct TestState {
    StripGrid g{48, 33, 1.0};
    LagrangianMap map{g};
    Field v, h;
    EosPtr eos = make_eos("gamma-law", 50.0, 2.0);
    TestState() {
        v = vector_of(g, [](double y1, double y2) {
            double s = (1 + y2) * (1 + y2);
            return std::array<double, 2>{0.3 * std::sin(y1) * s + 0.1,
                                         0.2 * std::cos(2 * y1) * s * y2};
        });
        h = scalar_of(g, [](double y1, double y2) {
            return -y2 + 0.08 * std::cos(y1) * (1 - y2 * y2);
        });
    }
};

} // namespace

TEST_SUITE("commutators") {

TEST_CASE("[Dt, d] has a single chain term with coefficient -1") {
    auto terms = S::expand(S::Identity::DtPartialR, 1);
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].coeff == S::Rational(-1));
    REQUIRE(terms[0].factors.size() == 1);
    CHECK(terms[0].factors[0] == std::array<int, 3>{0, 1, 0}); // (dv)
    CHECK(terms[0].trailing == std::array<int, 2>{1, 0});
    CHECK(terms[0].pattern == "symmetric-dot");
}

TEST_CASE("[Dt, d^r] reproduces the binomial coefficients") {
    for (int r = 2; r <= 6; ++r) {
        auto terms = S::expand(S::Identity::DtPartialR, r);
        REQUIRE(static_cast<int>(terms.size()) == r);
        long long binom = 1;
        for (const auto& e : terms) {
            // term with factor (d^{1+s} v) should carry -C(r, s+1)
            int s = e.factors[0][1] - 1;
            long long c = 1;
            for (int i = 0; i < s + 1; ++i) c = c * (r - i) / (i + 1);
            CHECK(e.coeff == S::Rational(-c));
            CHECK(e.trailing[0] == r - s);
            CHECK(e.trailing[1] == 0);
            binom += 0;
        }
    }
}

TEST_CASE("[d, Dt] is the transpose of the r = 1 case") {
    auto terms = S::expand(S::Identity::PartialDtK, 1);
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].coeff == S::Rational(1));
    CHECK(terms[0].factors[0] == std::array<int, 3>{0, 1, 0});
    CHECK(terms[0].trailing == std::array<int, 2>{1, 0});
}

TEST_CASE("[Lap, Dt] = (Lap v).d + 2 (dv):(d^2)") {
    auto terms = S::expand(S::Identity::LaplacianDt, 1);
    REQUIRE(terms.size() == 2);
    bool saw_lapv = false, saw_hess = false;
    for (const auto& e : terms) {
        REQUIRE(e.factors.size() == 1);
        if (e.factors[0] == std::array<int, 3>{0, 2, 0} && e.trailing == std::array<int, 2>{1, 0}) {
            CHECK(e.coeff == S::Rational(1));
            saw_lapv = true;
        }
        if (e.factors[0] == std::array<int, 3>{0, 1, 0} && e.trailing == std::array<int, 2>{2, 0}) {
            CHECK(e.coeff == S::Rational(2));
            saw_hess = true;
        }
    }
    CHECK(saw_lapv);
    CHECK(saw_hess);
}

TEST_CASE("order cap is enforced") {
    CHECK_THROWS(S::expand(S::Identity::DtPartialR, 7));
    CHECK_THROWS(S::expand(S::Identity::PartialDtK, 0));
}

TEST_CASE("numeric: [Dt,d]h equals the hand formula on a shear state") {
    StripGrid g(32, 17, 1.0);
    LagrangianMap map(g);
    Field v = vector_of(g, [](double, double y2) { return std::array<double, 2>{y2, 0}; });
    Field h = scalar_of(g, [](double y1, double) { return std::sin(y1); });
    EvalContext ctx(map, v, h, make_eos("linear", 100.0));
    Field c = evaluate(S::expand_terms(S::Identity::DtPartialR, 1), ctx);
    REQUIRE(c.rank == 1);
    for (int n = 0; n < g.nnodes(); ++n) {
        auto y = g.y(n);
        CHECK(c.at(0, n) == doctest::Approx(0.0).epsilon(1e-10));
        // [Dt, d_2]h = -(d_2 v^1)(d_1 h) = -cos(y1)
        CHECK(c.at(1, n) == doctest::Approx(-std::cos(y[0])).epsilon(1e-9));
    }
}

TEST_CASE("closure histories match the equations of motion") {
    TestState st;
    EvalContext ctx(st.map, st.v, st.h, st.eos);
    Field h1 = material_history_h(ctx, 1);
    Field dv = divergence(st.v, st.map);
    for (int n = 0; n < st.g.nnodes(); ++n) {
        double ep = st.eos->e_prime(st.h.at(0, n));
        CHECK(h1.at(0, n) == doctest::Approx(-dv.at(0, n) / ep).epsilon(1e-11));
    }
    Field v1 = material_history_v(ctx, 1);
    Field gh = euler_derivative(st.h, st.map);
    for (int n = 0; n < st.g.nnodes(); ++n) {
        CHECK(v1.at(0, n) == doctest::Approx(-gh.at(0, n)).epsilon(1e-11));
        CHECK(v1.at(1, n) == doctest::Approx(-gh.at(1, n) - 1.0).epsilon(1e-11));
    }
}

TEST_CASE("f_1 examples") {
    StripGrid g(32, 17, 1.0);
    LagrangianMap map(g);
    EosPtr eos = make_eos("linear", 100.0);
    // shear: nilpotent gradient -> f_1 = 0
    Field vs = vector_of(g, [](double, double y2) { return std::array<double, 2>{y2, 0}; });
    Field h = scalar_of(g, [](double, double y2) { return -y2; });
    EvalContext c1(map, vs, h, eos);
    SourceAssembly s1 = assemble_sources(1, c1);
    CHECK(norm(s1.f, NormSpace::L2) == doctest::Approx(0.0).epsilon(1e-12));

    // v = (x2, sin x1): f_1 = 2 cos(y1), equal to 2 at y1 = 0
    Field vr = vector_of(g, [](double y1, double y2) {
        return std::array<double, 2>{y2, std::sin(y1)};
    });
    EvalContext c2(map, vr, h, eos);
    SourceAssembly s2 = assemble_sources(1, c2);
    for (int n = 0; n < g.nnodes(); ++n) {
        auto y = g.y(n);
        CHECK(s2.f.at(0, n) == doctest::Approx(2 * std::cos(y[0])).epsilon(1e-9));
    }
    // linear EOS: e'' = 0 kills g_2's e'' part; g_2 has only the e'' term
    TestState st;
    EvalContext c3(st.map, st.v, scalar_of(st.g, [](double y1, double y2) {
                       return -y2 + 0.05 * std::sin(y1) * (1 - y2 * y2);
                   }),
                   make_eos("linear", 100.0));
    SourceAssembly s3 = assemble_sources(2, c3);
    CHECK(norm(s3.g, NormSpace::L2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("g_1 = -e''(h) (Dt h)^2") {
    TestState st;
    EvalContext ctx(st.map, st.v, st.h, st.eos);
    SourceAssembly s = assemble_sources(1, ctx);
    Field h1 = material_history_h(ctx, 1);
    for (int n = 0; n < st.g.nnodes(); n += 7) {
        double epp = st.eos->e_deriv(2, st.h.at(0, n));
        double ref = -epp * h1.at(0, n) * h1.at(0, n);
        CHECK(s.g.at(0, n) == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("data mode and closure mode agree when fed closure histories") {
    TestState st;
    EvalContext closure(st.map, st.v, st.h, st.eos);
    const int r = 3;
    std::vector<Field> hk;
    for (int k = 0; k <= r + 1; ++k) hk.push_back(material_history_h(closure, k));
    EvalContext data(st.map, st.v, hk, st.eos);
    SourceAssembly sc = assemble_sources(r, closure);
    SourceAssembly sd = assemble_sources(r, data);
    double scale = std::max(1.0, norm(sc.f, NormSpace::L2));
    Field diff = sc.f - sd.f;
    CHECK(norm(diff, NormSpace::L2) / scale < 1e-9);
    Field diffg = sc.g - sd.g;
    CHECK(norm(diffg, NormSpace::L2) < 1e-9);
}

TEST_CASE("wave-equation residual shrinks at the discretization order") {
    // e'(h) Dt^{r+1} h - Lap Dt^{r-1} h = f_r + g_r along the closure route
    auto residual = [&](int nv, int r) {
        StripGrid g(48, nv, 1.0);
        LagrangianMap map(g);
        EosPtr eos = make_eos("gamma-law", 50.0, 2.0);
        Field v = vector_of(g, [](double y1, double y2) {
            double s = (1 + y2) * (1 + y2);
            return std::array<double, 2>{0.3 * std::sin(y1) * s, 0.2 * std::cos(2 * y1) * s};
        });
        Field h = scalar_of(g, [](double y1, double y2) {
            return -y2 + 0.08 * std::cos(y1) * std::exp(y2);
        });
        EvalContext ctx(map, v, h, eos);
        SourceAssembly s = assemble_sources(r, ctx);
        Field hr1 = material_history_h(ctx, r + 1);
        Field hrm = material_history_h(ctx, r - 1);
        Field lap(g, 0);
        {
            Field grad = euler_derivative(hrm, map);
            Field gg = euler_derivative(grad, map);
            for (int n = 0; n < g.nnodes(); ++n)
                lap.at(0, n) = gg.at(0, n) + gg.at(3, n);
        }
        Field res(g, 0);
        for (int n = 0; n < g.nnodes(); ++n) {
            double ep = eos->e_prime(h.at(0, n));
            res.at(0, n) = ep * hr1.at(0, n) - lap.at(0, n) - s.f.at(0, n) - s.g.at(0, n);
        }
        return norm(res, NormSpace::L2);
    };
    for (int r = 1; r <= 3; ++r) {
        double c = residual(17, r);
        double f = residual(33, r);
        if (c < 1e-12) {
            CHECK(f < 1e-12); // identity holds to machine precision
        } else {
            CHECK(f < c / 8.0); // better than 3rd order in the vertical spacing
        }
    }
}

TEST_CASE("source term structure invariants up to order 6") {
    for (int r = 1; r <= 6; ++r) {
        const auto& fr = S::source_f(r, S::Mode::Data);
        CHECK(!fr.empty());
        if (r == 1) CHECK(fr.size() == 1);
        for (const auto& t : fr) {
            CHECK(t.eos.trivial()); // no EOS factors in f_r
            int sum = 0;
            bool has_d2v_drm1h = false;
            int d2v = 0, drm1h = 0;
            for (const auto& a : t.atoms) {
                if (a.base == S::Base::V) {
                    CHECK(a.mt == 0);
                    CHECK(a.sp >= 1);
                    sum += a.sp;
                    if (a.sp == 2) ++d2v;
                } else if (a.base == S::Base::H) {
                    CHECK(a.sp >= 1); // undifferentiated h never enters f_r
                    sum += a.sp + a.mt;
                    if (a.sp == r - 1 && a.mt == 0) ++drm1h;
                } else {
                    CHECK(a.base != S::Base::F);
                }
            }
            CHECK(sum == r + 1);
            if (r >= 6 && t.atoms.size() == 2 && d2v == 1 && drm1h == 1)
                has_d2v_drm1h = true;
            CHECK(!has_d2v_drm1h); // no (d^2 v)(d^{r-1} h) when r >= 6
            // the elliptic data hierarchy needs f_{k+1} free of Dt^k h
            for (const auto& a : t.atoms)
                if (a.base == S::Base::H) CHECK(a.mt <= std::max(r - 2, 0));
        }
        // g_r: index sums and bounds
        const auto& gr = S::source_g(r);
        if (r == 1) CHECK(gr.size() == 1);
        for (const auto& t : gr) {
            int m = static_cast<int>(t.atoms.size());
            CHECK(m >= 2);
            CHECK(m <= r + 1); // m blocks of a partition of r+1 with sizes >= 1
            int sum = 0;
            for (const auto& a : t.atoms) {
                CHECK(a.base == S::Base::H);
                CHECK(a.mt >= 1);
                CHECK(a.mt <= r);
                sum += a.mt;
            }
            CHECK(sum == r + 1);
            CHECK(t.eos.ed.count(m) == 1);
        }
    }
}

} // TEST_SUITE
