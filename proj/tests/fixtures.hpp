#pragma once

#include <random>

#include "wnv/params.hpp"

namespace wnv::test {

/// Strong transmission: R0 = sqrt(50).
inline EpidemicParams s1() {
    EpidemicParams p;
    p.beta_v = 0.5;
    p.beta_h = 0.5;
    p.r_v = p.d_v = 0.1;
    p.q = 0.0;
    p.r_h = p.d_h = 0.05;
    p.gamma_h = 0.05;
    p.n_v_star = 2.0;
    p.n_h_star = 1.0;
    p.dv = 0.01;
    p.dh = 1.0;
    p.mu = 1.0;
    return p;
}

/// Weak transmission: R0 = 0.5.
inline EpidemicParams s2() {
    EpidemicParams p = s1();
    p.beta_v = p.beta_h = 0.1;
    p.r_v = p.d_v = 0.2;
    p.r_h = p.d_h = 0.1;
    p.gamma_h = 0.1;
    p.n_v_star = 1.0;
    p.n_h_star = 1.0;
    return p;
}

/// Random parameter set valid for the simplified model.
template <class Rng>
EpidemicParams random_params(Rng& rng) {
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    EpidemicParams p;
    p.beta_v = u(0.05, 1.0);
    p.beta_h = u(0.05, 1.0);
    p.r_v = p.d_v = u(0.05, 0.5);
    p.q = u(0.0, 0.5);
    p.r_h = p.d_h = u(0.01, 0.2);
    p.gamma_h = u(0.0, 0.2);
    p.n_v_star = u(0.5, 3.0);
    p.n_h_star = u(0.5, 2.0);
    p.dv = u(0.001, 0.1);
    p.dh = u(0.1, 2.0);
    p.mu = u(0.1, 2.0);
    return p;
}

} // namespace wnv::test
