#include <doctest.h>

#include <cmath>

#include "wwlab/eos.hpp"

using namespace ww;

TEST_SUITE("eos") {

TEST_CASE("linear family") {
    auto eos = make_eos("linear", 100.0);
    CHECK(eos->rho(0.0) == doctest::Approx(1.0));
    CHECK(eos->e(0.0) == 0.0);
    CHECK(eos->e_prime(0.3) == doctest::Approx(0.01));
    CHECK(eos->e_deriv(2, 0.3) == 0.0);
    CHECK(eos->e_deriv(5, -1.0) == 0.0);
    CHECK(eos->dp_drho(1.0) == doctest::Approx(100.0));
    CHECK(eos->Q(1.0) == doctest::Approx(0.0));
}

TEST_CASE("gamma-law: gamma=2, kappa=1 gives rho = 1 + h") {
    auto eos = make_eos("gamma-law", 1.0, 2.0);
    // numeric inversion oracle of h(rho) = int_1^rho p'(l)/l dl
    for (double r = 0.55; r < 3.0; r += 0.25) {
        double h = 0;
        int m = 20000;
        double lo = 1.0;
        for (int i = 0; i < m; ++i) {
            double l0 = lo + (r - lo) * i / m, l1 = lo + (r - lo) * (i + 1) / m;
            h += 0.5 * ((eos->dp_drho(l0) / l0) + (eos->dp_drho(l1) / l1)) * (l1 - l0);
        }
        CHECK(eos->rho(h) == doctest::Approx(r).epsilon(1e-7));
        CHECK(eos->rho(h) == doctest::Approx(1.0 + h).epsilon(1e-7));
    }
    CHECK(eos->dp_drho(1.0) == doctest::Approx(1.0)); // p'(1) = kappa
}

TEST_CASE("normalization holds for every kind") {
    for (auto eos : {make_eos("linear", 7.0), make_eos("gamma-law", 7.0, 1.4)}) {
        CHECK(eos->rho(0.0) == doctest::Approx(1.0));
        CHECK(eos->e(0.0) == doctest::Approx(0.0));
        CHECK(eos->dp_drho(1.0) == doctest::Approx(7.0).epsilon(1e-12));
    }
}

TEST_CASE("chain consistency d/dh log rho = e'") {
    for (auto eos : {make_eos("linear", 10.0), make_eos("gamma-law", 10.0, 1.7)}) {
        for (double h = -0.5; h <= 0.5; h += 0.1) {
            double d = 1e-6;
            double fd = (std::log(eos->rho(h + d)) - std::log(eos->rho(h - d))) / (2 * d);
            CHECK(fd == doctest::Approx(eos->e_prime(h)).epsilon(1e-8));
        }
    }
}

TEST_CASE("Q(1)=0 and Q'(rho) = p/rho^2") {
    for (auto eos : {make_eos("linear", 5.0), make_eos("gamma-law", 5.0, 2.0)}) {
        CHECK(eos->Q(1.0) == doctest::Approx(0.0));
        for (double r = 0.8; r <= 2.0; r += 0.2) {
            double d = 1e-6;
            double fd = (eos->Q(r + d) - eos->Q(r - d)) / (2 * d);
            CHECK(fd == doctest::Approx(eos->p_of_rho(r) / (r * r)).epsilon(1e-7));
        }
    }
}

TEST_CASE("structural conditions") {
    auto lin = make_eos("linear", 10.0);
    auto rep = verify_structural_conditions(const_cast<Eos&>(*lin), -1.0, 1.0, 3);
    CHECK(rep.pass);
    CHECK(rep.sup_ratio[0] == doctest::Approx(1.0));
    for (size_t k = 1; k < rep.sup_ratio.size(); ++k) CHECK(rep.sup_ratio[k] == 0.0);

    // gamma-law dense sampling oracle
    auto gl = make_eos("gamma-law", 10.0, 2.0);
    auto rep2 = verify_structural_conditions(const_cast<Eos&>(*gl), -0.5, 0.5, 3);
    CHECK(rep2.pass);
    // |e^{(k)}| = (k-1)! (gamma-1)^{k-1} |e'|^k exactly for the gamma law
    CHECK(rep2.sup_ratio[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep2.sup_ratio[2] == doctest::Approx(2.0).epsilon(1e-10));

    // kappa-sequence: sup|e_k(h)| strictly decreasing in kappa
    double prev = 1e300;
    for (double kap : {1e2, 1e3, 1e4}) {
        auto e = make_eos("linear", kap);
        double sup = std::max(std::abs(e->e(-1.0)), std::abs(e->e(1.0)));
        CHECK(sup < prev);
        prev = sup;
    }
}

TEST_CASE("gamma-law admissibility guard") {
    auto gl = make_eos("gamma-law", 1.0, 3.0);
    CHECK_THROWS_AS(gl->rho(-0.6), std::domain_error);
    CHECK_THROWS_AS(gl->require_admissible(-2.0, 2.0), std::domain_error);
    CHECK_THROWS(make_eos("gamma-law", 1.0, 0.9));
    CHECK_THROWS(make_eos("linear", -1.0));
}

} // TEST_SUITE
