#include <catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "wnv/ode.hpp"
#include "wnv/wavespeed.hpp"

using namespace wnv;
using Catch::Approx;

namespace {

/// Sup over interior nodes of the semi-wave residual evaluated with
/// fourth-order stencils, an estimate of the truncation error of the profile.
double fourth_order_residual(const SemiWavefrontProfile& s, double a, double b, double d, double k) {
    const auto& u = s.v_profile;
    const double dx = s.grid[1] - s.grid[0];
    double worst = 0.0;
    for (std::size_t j = 2; j + 2 < u.size(); ++j) {
        const double uxx =
            (-u[j + 2] + 16 * u[j + 1] - 30 * u[j] + 16 * u[j - 1] - u[j - 2]) / (12 * dx * dx);
        const double ux = (-u[j + 2] + 8 * u[j + 1] - 8 * u[j - 1] + u[j - 2]) / (12 * dx);
        worst = std::max(worst, std::abs(-d * uxx + k * ux - a * u[j] + b * u[j] * u[j]));
    }
    return worst;
}

} // namespace

TEST_CASE("dispersion root solves the characteristic polynomial", "[wavespeed]") {
    const auto p = test::s1();
    for (double s : {0.1, 0.5, 1.0, 3.0}) {
        const auto d = dispersion(p, s);
        const double a = p.dv * s * s - p.vector_loss(), dd = p.dh * s * s - p.host_loss();
        const double det = (a - d.lambda_p) * (dd - d.lambda_p) - p.beta_v * p.n_v_star / p.n_h_star * p.beta_h;
        CHECK(std::abs(det) < 1e-12);
        CHECK(d.lambda_p >= std::max(a, dd));
        CHECK(d.speed == Approx(d.lambda_p / s));
    }
}

TEST_CASE("minimal speed of the reference set", "[wavespeed]") {
    // Dense-scan oracle over s in (0, 10].
    const auto w = c_min(test::s1());
    CHECK(w.c_min == Approx(1.2438349811).epsilon(1e-9));
    CHECK(w.s_star == Approx(0.8526).epsilon(1e-3));
    CHECK(w.c0 == w.c_min);
    CHECK_THROWS_AS(c_min(test::s2()), WaveSpeedError);
}

TEST_CASE("generic minimizer on the Fisher-KPP dispersion", "[wavespeed]") {
    for (double a : {0.5, 1.0, 4.0})
        for (double d : {0.25, 1.0}) {
            const auto m = minimize_speed([&](double s) { return (d * s * s + a) / s; });
            CHECK(m.speed == Approx(logistic_c_min(a, d)).epsilon(1e-12));
            CHECK(m.s == Approx(std::sqrt(a / d)).epsilon(1e-5));
        }
    CHECK(logistic_c_min(1.0, 1.0) == 2.0);
}

TEST_CASE("logistic semi-wave profile", "[wavespeed]") {
    const auto s = semi_wavefront_logistic(1.0, 1.0, 1.0, 0.8);
    CHECK(s.v_profile.front() == 0.0);
    CHECK(s.v_profile.back() == 1.0);
    CHECK(s.grid.back() >= 40.0);
    CHECK(is_nondecreasing(s.v_profile));
    CHECK(s.boundary_slope > 0.0);
    CHECK_THROWS_AS(semi_wavefront_logistic(1.0, 1.0, 1.0, 2.0), WaveSpeedError);
    CHECK_THROWS_AS(semi_wavefront_logistic(1.0, 1.0, 1.0, 0.0), WaveSpeedError);
}

TEST_CASE("semi-wave slope at vanishing speed", "[wavespeed]") {
    // With k0 = 0 the first integral gives U'(0)^2 = a^3 / (3 d b^2).
    const auto s = semi_wavefront_logistic(1.0, 1.0, 1.0, 1e-4);
    CHECK(s.boundary_slope == Approx(1.0 / std::sqrt(3.0)).epsilon(5e-4));
    // Same resolution per decay length sqrt(d / a) as the first case.
    SemiWaveOptions fine;
    fine.dx = 0.01;
    const auto t = semi_wavefront_logistic(4.0, 2.0, 1.0, 1e-4, fine);
    CHECK(t.boundary_slope == Approx(std::sqrt(64.0 / 12.0)).epsilon(5e-4));
}

TEST_CASE("semi-wave slope decreases with speed", "[wavespeed][property]") {
    double prev = 1e9;
    for (double k : {0.1, 0.5, 1.0, 1.5, 1.9}) {
        const double s = semi_wavefront_logistic(1.0, 1.0, 1.0, k).boundary_slope;
        CHECK(s < prev);
        prev = s;
    }
}

TEST_CASE("semi-wave truncation error is second order", "[wavespeed]") {
    SemiWaveOptions coarse, fine;
    fine.dx = coarse.dx / 2.0;
    const double k = 0.7;
    const double r1 = fourth_order_residual(semi_wavefront_logistic(1, 1, 1, k, coarse), 1, 1, 1, k);
    const double r2 = fourth_order_residual(semi_wavefront_logistic(1, 1, 1, k, fine), 1, 1, 1, k);
    CHECK(r1 < 1e-3);
    CHECK(r1 / r2 == Approx(4.0).margin(0.5));
}

TEST_CASE("logistic spreading speed", "[wavespeed]") {
    const double k2 = k0_logistic(1.0, 1.0, 1.0, 2.0);
    CHECK(k2 > 0.0);
    CHECK(k2 < 2.0);
    const auto s = semi_wavefront_logistic(1.0, 1.0, 1.0, k2);
    CHECK(2.0 * s.boundary_slope == Approx(k2).epsilon(1e-8));
    const double k4 = k0_logistic(1.0, 1.0, 1.0, 4.0);
    CHECK(k4 > k2);
    CHECK(k4 < 2.0);
}

TEST_CASE("WNv semi-wave profile and speed candidate", "[wavespeed]") {
    const auto p = test::s1();
    const auto eq = endemic_equilibrium(p);
    const double c = c_min(p).c_min;
    const double k = k0_wnv(p);
    CHECK(k > 0.0);
    CHECK(k < c);
    const auto s = semi_wavefront_wnv(p, k);
    CHECK(s.v_profile.front() == 0.0);
    CHECK(s.h_profile.front() == 0.0);
    CHECK(s.v_profile.back() == eq.v_i_star);
    CHECK(s.h_profile.back() == eq.h_i_star);
    CHECK(is_nondecreasing(s.v_profile));
    CHECK(is_nondecreasing(s.h_profile));
    CHECK(p.mu * p.dh * s.boundary_slope == Approx(k).epsilon(1e-8));
    CHECK_THROWS_AS(semi_wavefront_wnv(p, c), WaveSpeedError);
}
