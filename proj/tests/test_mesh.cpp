#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "wwlab/grid.hpp"
#include "wwlab/io.hpp"
#include "wwlab/norms.hpp"
#include "wwlab/quadrature.hpp"

using namespace ww;

namespace {

Field sample_scalar(const StripGrid& g, const std::function<double(double, double)>& f) {
    Field out(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) {
        auto y = g.y(n);
        out.at(0, n) = f(y[0], y[g.dim - 1]);
    }
    return out;
}

Field random_trig(const StripGrid& g, std::mt19937_64& rng, int kmax = 3) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> a(kmax + 1), b(kmax + 1), c(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        a[k] = U(rng);
        b[k] = U(rng);
        c[k] = U(rng);
    }
    return sample_scalar(g, [&](double y1, double y2) {
        double v = 0;
        for (int k = 0; k <= kmax; ++k)
            v += (a[k] * std::cos(k * y1) + b[k] * std::sin(k * y1)) *
                 std::cos(c[k] * y2);
        return v;
    });
}

} // namespace

TEST_SUITE("mesh") {

TEST_CASE("grid invariants are enforced") {
    CHECK_THROWS(StripGrid(7, 32, 1.0));
    CHECK_THROWS(StripGrid(9, 32, 1.0));
    CHECK_THROWS(StripGrid(64, 3, 1.0));
    CHECK_THROWS(StripGrid(64, 32, -1.0));
    StripGrid g(64, 32, 1.0);
    CHECK(g.nnodes() == 64 * 32);
    CHECK(g.y(g.top_node(0))[1] == doctest::Approx(0.0));
    CHECK(g.y(0)[1] == doctest::Approx(-1.0));
}

TEST_CASE("integrate: constants and trig identities") {
    StripGrid g(64, 32, 1.0);
    Field one = sample_scalar(g, [](double, double) { return 1.0; });
    CHECK(integrate(one, Region::Interior) == doctest::Approx(2 * M_PI).epsilon(1e-13));

    Field s2 = sample_scalar(g, [](double y1, double) { return std::sin(y1) * std::sin(y1); });
    CHECK(integrate(s2, Region::Interior) == doctest::Approx(M_PI).epsilon(1e-13));

    CHECK(integrate(one, Region::TopBoundary) == doctest::Approx(2 * M_PI).epsilon(1e-13));
}

TEST_CASE("integrate: gaussian bump against a refinement oracle") {
    StripGrid g(64, 32, 1.0);
    auto bump = [](double y1, double) { return std::exp(-(y1 - M_PI) * (y1 - M_PI)); };
    double coarse = integrate(sample_scalar(g, bump), Region::Interior);
    StripGrid gf(256, 128, 1.0);
    double fine = integrate(sample_scalar(gf, bump), Region::Interior);
    // the bump is only near-periodic; the seam limits agreement to ~1e-6
    CHECK(coarse == doctest::Approx(fine).epsilon(1e-5));
}

TEST_CASE("integrate: exact for resolvable trig x cubic products") {
    StripGrid g(16, 12, 2.0);
    // trig polynomial horizontally, cubic vertically: Gregory weights are exact
    auto f = [](double y1, double y2) {
        return (1.0 + std::cos(3 * y1) - 2 * std::sin(5 * y1)) * (y2 * y2 * y2 - y2 + 0.5);
    };
    // separable exact value: int trig = 2*pi (constant term only)
    double vexact = 2 * M_PI * [](double h) {
        auto F = [](double z) { return z * z * z * z / 4 - z * z / 2 + 0.5 * z; };
        return F(0.0) - F(-h);
    }(2.0);
    CHECK(integrate(sample_scalar(g, f), Region::Interior) ==
          doctest::Approx(vexact).epsilon(1e-13));
}

TEST_CASE("integrate rejects non-finite values with node index") {
    StripGrid g(8, 4, 1.0);
    Field f(g, 0);
    f.at(0, 7) = std::nan("");
    CHECK_THROWS_WITH_AS(integrate(f, Region::Interior),
                         doctest::Contains("node 7"), std::runtime_error);
}

TEST_CASE("norms: analytic values") {
    StripGrid g(64, 33, 1.0);
    Field s = sample_scalar(g, [](double y1, double) { return std::sin(y1); });
    CHECK(norm(s, NormSpace::L2) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(norm(s, NormSpace::Hs, 1) == doctest::Approx(std::sqrt(2 * M_PI)).epsilon(1e-12));
    CHECK(norm(s, NormSpace::BdyL2) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));

    Field z(g, 0);
    CHECK(norm(z, NormSpace::Hsw, 3) == 0.0);
    CHECK_THROWS(norm(s, NormSpace::Hs, 7));
}

TEST_CASE("norm properties: weight domination, triangle, homogeneity") {
    StripGrid g(32, 16, 1.0);
    std::mt19937_64 rng(42);
    WeightSpec w{2.0};
    for (int trial = 0; trial < 20; ++trial) {
        Field f = random_trig(g, rng), h = random_trig(g, rng);
        double l2 = norm(f, NormSpace::L2);
        CHECK(l2 <= norm(f, NormSpace::L2w, 0, &w) * (1 + 1e-12));
        CHECK(norm(f + h, NormSpace::L2) <= norm(f, NormSpace::L2) + norm(h, NormSpace::L2) + 1e-12);
        Field fs = 3.5 * f;
        CHECK(norm(fs, NormSpace::Hs, 2) ==
              doctest::Approx(3.5 * norm(f, NormSpace::Hs, 2)).epsilon(1e-12));
        CHECK((l2 == 0.0) == [&] {
            for (double v : f.data)
                if (v != 0.0) return false;
            return true;
        }());
    }
}

TEST_CASE("restrict_to_boundary") {
    StripGrid g(32, 16, 1.0);
    Field h = sample_scalar(g, [](double, double y2) { return -y2; });
    BoundaryField hb = restrict_to_boundary(h);
    for (int b = 0; b < g.nbdy(); ++b) CHECK(hb.at(0, b) == doctest::Approx(0.0));

    Field s = sample_scalar(g, [](double y1, double) { return std::sin(y1); });
    BoundaryField sb = restrict_to_boundary(s);
    for (int b = 0; b < g.nbdy(); ++b)
        CHECK(sb.at(0, b) == doctest::Approx(std::sin(g.y(g.top_node(b))[0])));

    std::mt19937_64 rng(7);
    Field r = random_trig(g, rng);
    BoundaryField rb = restrict_to_boundary(r);
    for (int b = 0; b < g.nbdy(); ++b)
        CHECK(rb.at(0, b) == doctest::Approx(r.at(0, g.top_node(b))));
}

TEST_CASE("field round-trips through the binary format") {
    StripGrid g(16, 8, 1.5);
    std::mt19937_64 rng(3);
    Field f = random_trig(g, rng);
    write_field(f, "/tmp/wwlab_roundtrip.wwf");
    StripGrid g2;
    Field f2 = read_field("/tmp/wwlab_roundtrip.wwf", g2);
    REQUIRE(g2.same(g));
    for (size_t i = 0; i < f.data.size(); ++i) CHECK(f2.data[i] == f.data[i]);
}

} // TEST_SUITE
