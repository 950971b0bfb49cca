#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "wnv/thresholds.hpp"

using namespace wnv;
using Catch::Approx;

TEST_CASE("interval rejects empty or reversed bounds", "[thresholds]") {
    CHECK_THROWS_AS(DomainInterval(1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(DomainInterval(2.0, -2.0), ValidationError);
    CHECK(DomainInterval::symmetric(2.0).width() == 4.0);
}

TEST_CASE("lambda star depends on width only", "[thresholds]") {
    CHECK(lambda_star(DomainInterval{-2.0, 2.0}) == Approx(0.6168502750680849).epsilon(1e-15));
    CHECK(lambda_star(DomainInterval{3.0, 7.0}) == lambda_star(DomainInterval{-2.0, 2.0}));
}

TEST_CASE("closed-form eigen data on (-2, 2)", "[thresholds]") {
    const auto e = r0_dirichlet(test::s1(), DomainInterval::symmetric(2.0));
    CHECK(e.a_const == Approx(0.10616850275068085).epsilon(1e-14));
    CHECK(e.b_const == Approx(0.716850275068085).epsilon(1e-14));
    CHECK(e.r_star == Approx(6.569704796482906).epsilon(1e-13));
    CHECK(e.r0d == Approx(2.5631435380178975).epsilon(1e-13));
    CHECK(e.lambda0 == Approx(-0.35870685135057256).epsilon(1e-12));
    CHECK(e.delta0 == Approx(2.1511142528373153).epsilon(1e-12));
}

TEST_CASE("closed-form eigen data on (-0.2, 0.2)", "[thresholds]") {
    const auto e = r0_dirichlet(test::s1(), DomainInterval::symmetric(0.2));
    CHECK(e.r0d == Approx(0.1062500521480088).epsilon(1e-12));
    CHECK(e.lambda0 == Approx(0.7086638).epsilon(1e-6));
    CHECK(e.delta0 == Approx(122.1527).epsilon(1e-6));
}

TEST_CASE("(phi, psi) solves the coupled eigenproblem pointwise", "[thresholds][property]") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 30; ++i) {
        const auto p = test::random_params(rng);
        const double h = std::uniform_real_distribution<double>(0.1, 5.0)(rng);
        const auto e = r0_dirichlet(p, DomainInterval{-h, 0.3 * h});
        for (int k = 1; k < 20; ++k) {
            const double x = -h + 1.3 * h * k / 20.0;
            const double phi = e.phi(x), psi = e.psi(x);
            const double phi_xx = e.delta0 * e.psi_second(x);
            const double r1 = -p.dv * phi_xx + p.vector_loss() * phi -
                              p.beta_v * p.n_v_star / p.n_h_star * psi - e.lambda0 * phi;
            const double r2 = -p.dh * e.psi_second(x) + p.host_loss() * psi - p.beta_h * phi -
                              e.lambda0 * psi;
            CHECK(std::abs(r1) < 1e-10 * (1.0 + std::abs(phi)));
            CHECK(std::abs(r2) < 1e-10);
        }
        CHECK(e.delta0 > 0.0);
        CHECK((e.lambda0 < 0.0) == (e.r0d > 1.0));
    }
}

TEST_CASE("R0D increases with the interval and tends to R0", "[thresholds][property]") {
    const auto p = test::s1();
    double prev = 0.0;
    for (double h : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0}) {
        const double r = r0_free(p, -h, h);
        CHECK(r > prev);
        CHECK(r < reproduction_number_r0(p));
        prev = r;
    }
    CHECK(r0_free(p, -1e4, 1e4) == Approx(reproduction_number_r0(p)).epsilon(1e-6));
}

TEST_CASE("discrete principal eigenvalue at R = 1 recovers lambda0", "[thresholds]") {
    const auto p = test::s1();
    for (double h : {0.2, 2.0}) {
        const auto omega = DomainInterval::symmetric(h);
        const auto e = mu1_of_r(p, omega, 1.0, 2000);
        CHECK(e.lower <= e.mu1);
        CHECK(e.mu1 <= e.upper);
        CHECK(e.mu1 == Approx(r0_dirichlet(p, omega).lambda0).epsilon(1e-5));
        for (const auto& v : e.vector) {
            CHECK(v[0] > 0.0);
            CHECK(v[1] > 0.0);
        }
    }
}

TEST_CASE("mu1 increases with R", "[thresholds][property]") {
    // R divides the infection terms, so the operator loses positive feedback as R grows.
    const auto p = test::s1();
    const auto omega = DomainInterval::symmetric(1.0);
    double prev = -1e300;
    for (double r : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double m = mu1_of_r(p, omega, r, 256).mu1;
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("eigen oracle rejects tiny grids", "[thresholds]") {
    CHECK_THROWS_AS(mu1_of_r(test::s1(), DomainInterval::symmetric(1.0), 1.0, 10), std::invalid_argument);
}

TEST_CASE("oracle R0D agrees with the closed form", "[thresholds]") {
    const auto p = test::s1();
    for (double h : {0.2, 1.0, 2.0}) {
        const auto omega = DomainInterval::symmetric(h);
        CHECK(r0_dirichlet_oracle(p, omega, 2000) ==
              Approx(r0_dirichlet(p, omega).r0d).epsilon(1e-5));
    }
}

TEST_CASE("threshold report tracks R0F along fronts", "[thresholds]") {
    const auto p = test::s1();
    const auto rep = threshold_report(p, DomainInterval::symmetric(2.0),
                                      {{0.0, -2.0, 2.0}, {1.0, -3.0, 3.0}});
    CHECK(rep.r0 == Approx(std::sqrt(50.0)));
    CHECK(rep.r0n == rep.r0);
    REQUIRE(rep.r0f_at.size() == 2);
    CHECK(rep.r0f_at[0].second == Approx(rep.r0d));
    CHECK(rep.r0f_at[1].second > rep.r0f_at[0].second);
}
