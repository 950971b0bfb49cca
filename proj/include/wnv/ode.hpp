#pragma once

// Nonspatial dynamics: the four-compartment vector-host system, its
// two-compartment reduction, R0 and the endemic equilibrium.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wnv/params.hpp"

namespace wnv {

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OdeState2 {
    double v_i = 0.0;
    double h_i = 0.0;
    friend bool operator==(const OdeState2&, const OdeState2&) = default;
};

struct OdeState4 {
    double v_s = 0.0;
    double v_i = 0.0;
    double h_s = 0.0;
    double h_i = 0.0;
    friend bool operator==(const OdeState4&, const OdeState4&) = default;
};

struct EndemicEquilibrium {
    double v_i_star = 0.0;
    double h_i_star = 0.0;
    bool exists = false;
};

/// Mosquito per-capita reproduction G(V_s, V_i).
enum class Reproduction { constant, logistic };

/// f1: net production of infected vectors in the simplified model.
inline double vector_reaction(const EpidemicParams& p, double v_i, double h_i) noexcept {
    return p.beta_v * (p.n_v_star - v_i) * h_i / p.n_h_star - p.vector_loss() * v_i;
}

/// f2: net production of infected hosts in the simplified model.
inline double host_reaction(const EpidemicParams& p, double v_i, double h_i) noexcept {
    return p.beta_h * v_i * (p.n_h_star - h_i) / p.n_h_star - p.host_loss() * h_i;
}

/// Basic reproduction number of the homogeneous simplified model.
inline double reproduction_number_r0(const EpidemicParams& p) {
    return std::sqrt(p.beta_v * p.beta_h * p.n_v_star /
                     (p.vector_loss() * p.n_h_star * p.host_loss()));
}

inline EndemicEquilibrium endemic_equilibrium(const EpidemicParams& p) {
    const double numer =
        p.beta_v * p.beta_h * p.n_v_star - p.vector_loss() * p.n_h_star * p.host_loss();
    if (!(numer > 0.0)) return {};
    const double v_star = numer / (p.beta_v * p.beta_h + p.vector_loss() * p.beta_h);
    const double h_star = p.beta_h * v_star / (p.beta_h * v_star / p.n_h_star + p.host_loss());
    return {v_star, h_star, true};
}

template <class State>
struct TimeSeries {
    std::vector<double> t;
    std::vector<State> x;
    bool converged_early = false;

    const State& final_state() const { return x.back(); }
};

struct OdeOptions {
    /// Stop once the relative change per step stays below `convergence_tol`
    /// for `convergence_window` consecutive steps.
    bool stop_on_convergence = true;
    double convergence_tol = 1e-10;
    int convergence_window = 100;
    /// A step leaving the admissible box by more than this is rejected.
    double box_tol = 1e-9;
    int max_halvings = 20;
};

namespace detail {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N, class Rhs>
Vec<N> rk4_step(const Rhs& rhs, const Vec<N>& x, double dt) {
    auto axpy = [](const Vec<N>& a, double s, const Vec<N>& b) {
        Vec<N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const Vec<N> k1 = rhs(x);
    const Vec<N> k2 = rhs(axpy(x, 0.5 * dt, k1));
    const Vec<N> k3 = rhs(axpy(x, 0.5 * dt, k2));
    const Vec<N> k4 = rhs(axpy(x, dt, k3));
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

/// Largest amount by which x leaves [lo, hi] componentwise.
template <std::size_t N>
double box_excess(const Vec<N>& x, const Vec<N>& lo, const Vec<N>& hi) {
    double e = 0.0;
    for (std::size_t i = 0; i < N; ++i) e = std::max({e, lo[i] - x[i], x[i] - hi[i]});
    return e;
}

template <std::size_t N>
double sup_norm(const Vec<N>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

/// Fixed-step RK4 with step halving on box violation and optional early stop.
template <std::size_t N, class Rhs>
TimeSeries<Vec<N>> integrate_boxed(const Rhs& rhs, Vec<N> x, double t_end, double dt,
                                   const Vec<N>& lo, const Vec<N>& hi, const OdeOptions& opt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
    TimeSeries<Vec<N>> out;
    out.t.push_back(0.0);
    out.x.push_back(x);
    double t = 0.0;
    int quiet_steps = 0;
    while (t < t_end) {
        const double h = std::min(dt, t_end - t);
        // Try one step; on a box violation split it into 2^k equal substeps.
        Vec<N> next{};
        bool accepted = false;
        for (int k = 0; k <= opt.max_halvings && !accepted; ++k) {
            const int sub = 1 << k;
            next = x;
            bool ok = true;
            for (int s = 0; s < sub && ok; ++s) {
                next = rk4_step<N>(rhs, next, h / sub);
                ok = box_excess<N>(next, lo, hi) <= opt.box_tol;
            }
            accepted = ok;
        }
        if (!accepted)
            throw IntegrationError("integrator left the admissible box at t=" + std::to_string(t) +
                                   " after " + std::to_string(opt.max_halvings) + " halvings");
        for (std::size_t i = 0; i < N; ++i) next[i] = std::clamp(next[i], lo[i], hi[i]);

        Vec<N> diff;
        for (std::size_t i = 0; i < N; ++i) diff[i] = next[i] - x[i];
        x = next;
        t = (h == t_end - t) ? t_end : t + h;
        out.t.push_back(t);
        out.x.push_back(x);

        if (opt.stop_on_convergence) {
            if (sup_norm<N>(diff) <= opt.convergence_tol * sup_norm<N>(x))
                ++quiet_steps;
            else
                quiet_steps = 0;
            if (quiet_steps >= opt.convergence_window) {
                out.converged_early = t < t_end;
                break;
            }
        }
    }
    return out;
}

} // namespace detail

/// Integrates the two-compartment system; every sample stays in [0,N_v*] x [0,N_h*].
inline TimeSeries<OdeState2> integrate_ode2(const EpidemicParams& p, OdeState2 init, double t_end,
                                            double dt, const OdeOptions& opt = {}) {
    const detail::Vec<2> lo{0.0, 0.0};
    const detail::Vec<2> hi{p.n_v_star, p.n_h_star};
    if (detail::box_excess<2>({init.v_i, init.h_i}, lo, hi) > 0.0)
        throw std::invalid_argument("initial state outside [0,N_v*] x [0,N_h*]");
    auto rhs = [&p](const detail::Vec<2>& x) -> detail::Vec<2> {
        return {vector_reaction(p, x[0], x[1]), host_reaction(p, x[0], x[1])};
    };
    const auto raw = detail::integrate_boxed<2>(rhs, {init.v_i, init.h_i}, t_end, dt, lo, hi, opt);
    TimeSeries<OdeState2> out;
    out.t = raw.t;
    out.converged_early = raw.converged_early;
    out.x.reserve(raw.x.size());
    for (const auto& s : raw.x) out.x.push_back({s[0], s[1]});
    return out;
}

/// Integrates the full four-compartment system.
///
/// In `constant` mode G = r_v; in `logistic` mode G = r_v (1 - (V_s + V_i)/K_v)
/// and `p.k_v` must be set.
inline TimeSeries<OdeState4> integrate_ode4(const EpidemicParams& p, OdeState4 init,
                                            Reproduction g_mode, double t_end, double dt,
                                            const OdeOptions& opt = {}) {
    if (init.v_s < 0.0 || init.v_i < 0.0 || init.h_s < 0.0 || init.h_i < 0.0)
        throw std::invalid_argument("initial state must be nonnegative");
    if (g_mode == Reproduction::logistic && !(p.k_v && *p.k_v > 0.0))
        throw ValidationError("k_v", "logistic reproduction requires K_v > 0");

    auto rhs = [&p, g_mode](const detail::Vec<4>& x) -> detail::Vec<4> {
        const double vs = x[0], vi = x[1], hs = x[2], hi = x[3];
        const double g =
            g_mode == Reproduction::constant ? p.r_v : p.r_v * (1.0 - (vs + vi) / *p.k_v);
        const double n_h = hs + hi;
        const double bite_v = n_h > 0.0 ? p.beta_v * vs * hi / n_h : 0.0;
        const double bite_h = n_h > 0.0 ? p.beta_h * vi * hs / n_h : 0.0;
        return {(vs + (1.0 - p.q) * vi) * g - bite_v - p.d_v * vs,
                p.q * vi * g + bite_v - p.d_v * vi,
                p.r_h * (hs + hi) - bite_h - p.d_h * hs + p.gamma_h * hi,
                bite_h - p.d_h * hi - p.gamma_h * hi};
    };
    const double inf = std::numeric_limits<double>::infinity();
    const detail::Vec<4> lo{0.0, 0.0, 0.0, 0.0};
    const detail::Vec<4> hi{inf, inf, inf, inf};
    const auto raw = detail::integrate_boxed<4>(rhs, {init.v_s, init.v_i, init.h_s, init.h_i},
                                                t_end, dt, lo, hi, opt);
    TimeSeries<OdeState4> out;
    out.t = raw.t;
    out.converged_early = raw.converged_early;
    out.x.reserve(raw.x.size());
    for (const auto& s : raw.x) out.x.push_back({s[0], s[1], s[2], s[3]});
    return out;
}

} // namespace wnv
