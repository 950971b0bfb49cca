#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "wnv/analysis.hpp"

using namespace wnv;
using Catch::Approx;

namespace {

SimulationTrace s2_run(double t_max) {
    SolverConfig c;
    c.n_xi = 201;
    c.t_max = t_max;
    InitialData d{2.0, std::vector<double>(201, 0.0), cosine_profile(2.0, 201, 0.5)};
    return run(test::s2(), d, c);
}

} // namespace

TEST_CASE("least squares recovers an exact line", "[analysis]") {
    const std::vector<double> t{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
    const auto f = least_squares(t, y);
    CHECK(f.slope == Approx(2.0));
    CHECK(f.intercept == Approx(1.0));
    CHECK(f.r_squared == Approx(1.0));
    CHECK_THROWS_AS(least_squares({1.0}, {1.0}), AnalysisError);
}

TEST_CASE("short horizon stays undecided", "[analysis]") {
    const auto tr = s2_run(0.001);
    CHECK(classify(tr, test::s2()).verdict == Verdict::undecided);
    CHECK_THROWS_AS(estimate_speed(tr, classify(tr, test::s2())), AnalysisError);
}

TEST_CASE("weak transmission vanishes with decaying mass", "[analysis]") {
    const auto p = test::s2();
    const auto tr = s2_run(200.0);
    const auto c = classify(tr, p);
    CHECK(c.verdict == Verdict::vanishing);
    CHECK(std::isfinite(c.t_decided));
    CHECK(vector_decay_consistent(tr, p));
    CHECK(mass_functional_increase(tr, p) <= 1e-9);
}

TEST_CASE("maximal delta in the upper solution", "[analysis]") {
    const auto p = test::s1();
    const auto us = build_upper_solution(p, 0.2);
    REQUIRE(us.delta > 0.0);
    REQUIRE(us.delta < 1.0);
    const auto [m1, m2] = detail::upper_margins(us.eig, p, us.delta);
    CHECK(m1 >= 0.0);
    CHECK(m2 >= 0.0);
    const auto [n1, n2] = detail::upper_margins(us.eig, p, us.delta + 1e-8);
    CHECK((n1 < 0.0 || n2 < 0.0));
    // With D_h <= 2, eps reduces to delta^2 h0^2 / (2 mu pi).
    CHECK(us.epsilon == Approx(us.delta * us.delta * 0.04 / (2.0 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("upper solution satisfies its inequalities", "[analysis][property]") {
    std::mt19937_64 rng(5);
    int audited = 0;
    for (int i = 0; i < 40 && audited < 12; ++i) {
        const auto p = test::random_params(rng);
        const double h0 = 0.3;
        if (!(r0_free(p, -h0, h0) < 1.0)) continue;
        const auto us = build_upper_solution(p, h0);
        const auto a = audit_upper_solution(us, 200.0, 61, 61);
        CHECK(a.passes());
        ++audited;
    }
    CHECK(audited >= 5);
}

TEST_CASE("large host diffusivity still gives a valid upper solution", "[analysis]") {
    auto p = test::s1();
    p.dh = 4.0;
    const auto us = build_upper_solution(p, 0.2);
    CHECK(audit_upper_solution(us, 100.0).passes());
}

TEST_CASE("upper and lower constructions check their regime", "[analysis]") {
    CHECK_THROWS_AS(build_upper_solution(test::s1(), 2.0), AnalysisError);
    CHECK_THROWS_AS(build_lower_solution(test::s1(), 0.2), AnalysisError);
    CHECK_THROWS_AS(build_lower_solution(test::s2(), 2.0), AnalysisError);
}

TEST_CASE("lower solution is a static subsolution", "[analysis][property]") {
    std::mt19937_64 rng(9);
    int audited = 0;
    for (int i = 0; i < 60 && audited < 12; ++i) {
        const auto p = test::random_params(rng);
        const double h0 = 3.0;
        if (!(r0_free(p, -h0, h0) > 1.0)) continue;
        const auto ls = build_lower_solution(p, h0);
        CHECK(audit_lower_solution(ls).passes());
        ++audited;
    }
    CHECK(audited >= 5);
}

TEST_CASE("lower solution starts below the data", "[analysis]") {
    const auto p = test::s1();
    const InitialData d{2.0, cosine_profile(2.0, 201, 0.1), cosine_profile(2.0, 201, 0.1)};
    const auto ls = build_lower_solution(p, 2.0, &d);
    const auto x = sample_on_grid(2.0, 201, [](double y) { return y; });
    for (std::size_t j = 1; j + 1 < 201; ++j) {
        CHECK(ls.v(x[j]) <= d.v_i0[j] + 1e-15);
        CHECK(ls.h(x[j]) <= d.h_i0[j] + 1e-15);
    }
}

TEST_CASE("spreading run yields matching front slopes", "[analysis]") {
    const auto p = test::s1();
    SolverConfig c;
    c.n_xi = 201;
    c.t_max = 60.0;
    const InitialData d{2.0, cosine_profile(2.0, 201, 0.1), cosine_profile(2.0, 201, 0.1)};
    const auto tr = run(p, d, c);
    const auto v = classify(tr, p);
    REQUIRE(v.verdict == Verdict::spreading);
    const auto s = estimate_speed(tr, v);
    CHECK(s.k0_right == Approx(s.k0_left).epsilon(1e-12));
    CHECK(s.r_squared > 0.999);
    CHECK(endemic_deviation(tr.final_state, p, 5.0) < 0.02);
}
