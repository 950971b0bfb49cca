#pragma once

// Minimal traveling-front speed by linear determinacy, and semi-wavefront
// profiles on the half-line whose flux at the origin selects the asymptotic
// speed of the free-boundary problem.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wnv/linalg.hpp"
#include "wnv/ode.hpp"
#include "wnv/params.hpp"

namespace wnv {

class WaveSpeedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Linear determinacy

struct DispersionPoint {
    double s = 0.0;        ///< spatial decay rate
    double lambda_p = 0.0; ///< principal eigenvalue of s^2 diag(D_v, D_h) + J
    double speed = 0.0;    ///< lambda_p / s
};

/// J is the Jacobian of (f1, f2) at the disease-free state.
inline DispersionPoint dispersion(const EpidemicParams& p, double s) {
    const double a = p.dv * s * s - p.vector_loss();
    const double d = p.dh * s * s - p.host_loss();
    const double b = p.beta_v * p.n_v_star / p.n_h_star;
    const double c = p.beta_h;
    const double lam = 0.5 * (a + d + std::sqrt((a - d) * (a - d) + 4.0 * b * c));
    return {s, lam, lam / s};
}

struct SpeedMinimum {
    double speed = 0.0;
    double s = 0.0;
};

/// Minimizes speed(s) over s > 0: geometric scan over 2^-10..2^10, then golden section.
template <class SpeedOfS>
SpeedMinimum minimize_speed(const SpeedOfS& speed_of_s) {
    std::vector<double> s, c;
    for (int k = -10; k <= 10; ++k) {
        s.push_back(std::ldexp(1.0, k));
        c.push_back(speed_of_s(s.back()));
    }
    const auto it = std::min_element(c.begin(), c.end());
    const std::size_t i = static_cast<std::size_t>(it - c.begin());
    if (i == 0 || i + 1 == c.size())
        throw WaveSpeedError("minimize_speed: minimum not bracketed by the scan");
    double lo = s[i - 1], hi = s[i + 1];
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
    double f1 = speed_of_s(x1), f2 = speed_of_s(x2);
    while (hi - lo > 1e-12 * (1.0 + hi)) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = speed_of_s(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = speed_of_s(x2);
        }
    }
    const double sm = 0.5 * (lo + hi);
    return {speed_of_s(sm), sm};
}

struct WaveSpeedResult {
    double c_min = 0.0;
    double s_star = 0.0;
    std::optional<double> k0; ///< semi-wavefront speed, when computed
    double c0 = 0.0;          ///< spread speed, equal to c_min
};

inline WaveSpeedResult c_min(const EpidemicParams& p) {
    if (!(reproduction_number_r0(p) > 1.0))
        throw WaveSpeedError("no traveling front: R0 <= 1");
    const auto m = minimize_speed([&](double s) { return dispersion(p, s).speed; });
    WaveSpeedResult r;
    r.c_min = m.speed;
    r.s_star = m.s;
    r.c0 = m.speed;
    return r;
}

/// Fisher-KPP minimal speed of u_t = d u_xx + u (a - b u).
inline double logistic_c_min(double a, double d) { return 2.0 * std::sqrt(a * d); }

// ---------------------------------------------------------------------------
// Semi-wavefronts

struct SemiWaveOptions {
    double dx = 0.02;
    double initial_length = 20.0;
    double max_length = 640.0;
    double match_tol = 1e-8;
    double newton_tol = 1e-11;
    int max_newton = 100;
};

struct SemiWavefrontProfile {
    double k0_candidate = 0.0;
    std::vector<double> grid;
    std::vector<double> v_profile; ///< V_i, or U for the scalar problem
    std::vector<double> h_profile; ///< H_i (empty for the scalar problem)
    double boundary_slope = 0.0;   ///< H_i'(0), or U'(0)
    double residual = 0.0;         ///< sup of the discrete residual at exit
    int newton_iterations = 0;
};

namespace detail {

inline double one_sided_slope(const std::vector<double>& u, double dx) {
    return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx);
}

/// Scalar: -d U'' + k U' = a U - b U^2, U(0) = 0, U(L) = a/b.
inline SemiWavefrontProfile solve_logistic_fixed(double a, double b, double d, double k, double length,
                                                 const SemiWaveOptions& opt,
                                                 const std::vector<double>* guess) {
    const std::size_t n = static_cast<std::size_t>(std::llround(length / opt.dx));
    const double dx = length / double(n);
    const double top = a / b;
    std::vector<double> u(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double x = j * dx;
        u[j] = (guess && j < guess->size()) ? (*guess)[j] : top * (1.0 - std::exp(-x));
    }
    u[0] = 0.0;
    u[n] = top;

    const double cl = -d / (dx * dx) - k / (2.0 * dx);
    const double cu = -d / (dx * dx) + k / (2.0 * dx);
    const double cd = 2.0 * d / (dx * dx);
    auto residual = [&](const std::vector<double>& w, std::vector<double>& r) {
        double sup = 0.0;
        r.assign(n - 1, 0.0);
        for (std::size_t j = 1; j < n; ++j) {
            r[j - 1] = cl * w[j - 1] + cd * w[j] + cu * w[j + 1] - (a * w[j] - b * w[j] * w[j]);
            sup = std::max(sup, std::abs(r[j - 1]));
        }
        return sup;
    };
    SemiWavefrontProfile prof;
    prof.k0_candidate = k;
    std::vector<double> r, lo(n - 1), di(n - 1), up(n - 1);
    double res = residual(u, r);
    const double tol = opt.newton_tol * std::max(1.0, a * top);
    int it = 0;
    for (; it < opt.max_newton && res > tol; ++it) {
        for (std::size_t j = 1; j < n; ++j) {
            lo[j - 1] = cl;
            up[j - 1] = cu;
            di[j - 1] = cd - a + 2.0 * b * u[j];
        }
        std::vector<double> step(r.begin(), r.end());
        linalg::solve_tridiagonal(lo, di, up, step);
        // Backtracking on the residual norm.
        double lambda = 1.0;
        std::vector<double> trial(u), rt;
        for (int ls = 0; ls < 30; ++ls) {
            for (std::size_t j = 1; j < n; ++j) trial[j] = u[j] - lambda * step[j - 1];
            const double rn = residual(trial, rt);
            if (rn < res || ls == 29) {
                u.swap(trial);
                r.swap(rt);
                res = rn;
                break;
            }
            lambda *= 0.5;
        }
    }
    if (!(res <= tol))
        throw WaveSpeedError("semi-wavefront (logistic): Newton did not converge, residual " +
                             std::to_string(res));
    prof.newton_iterations = it;
    prof.residual = res;
    prof.grid.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) prof.grid[j] = j * dx;
    prof.boundary_slope = one_sided_slope(u, dx);
    prof.v_profile = std::move(u);
    return prof;
}

/// Coupled: -D u'' + k u' = f(u) with (V, H)(0) = 0 and (V, H)(L) = (V*, H*).
inline SemiWavefrontProfile solve_wnv_fixed(const EpidemicParams& p, double k, double length,
                                            const SemiWaveOptions& opt,
                                            const SemiWavefrontProfile* guess) {
    const auto eq = endemic_equilibrium(p);
    const std::size_t n = static_cast<std::size_t>(std::llround(length / opt.dx));
    const double dx = length / double(n);
    std::vector<linalg::Vec2> u(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        if (guess && j < guess->grid.size()) {
            u[j] = {guess->v_profile[j], guess->h_profile[j]};
        } else {
            const double w = 1.0 - std::exp(-double(j) * dx);
            u[j] = {eq.v_i_star * w, eq.h_i_star * w};
        }
    }
    u[0] = {0.0, 0.0};
    u[n] = {eq.v_i_star, eq.h_i_star};

    const double lv = -p.dv / (dx * dx) - k / (2.0 * dx), uv = -p.dv / (dx * dx) + k / (2.0 * dx);
    const double lh = -p.dh / (dx * dx) - k / (2.0 * dx), uh = -p.dh / (dx * dx) + k / (2.0 * dx);
    const double dv2 = 2.0 * p.dv / (dx * dx), dh2 = 2.0 * p.dh / (dx * dx);
    auto residual = [&](const std::vector<linalg::Vec2>& w, std::vector<linalg::Vec2>& r) {
        double sup = 0.0;
        r.assign(n - 1, {0.0, 0.0});
        for (std::size_t j = 1; j < n; ++j) {
            const double V = w[j][0], H = w[j][1];
            r[j - 1][0] = lv * w[j - 1][0] + dv2 * V + uv * w[j + 1][0] - vector_reaction(p, V, H);
            r[j - 1][1] = lh * w[j - 1][1] + dh2 * H + uh * w[j + 1][1] - host_reaction(p, V, H);
            sup = std::max({sup, std::abs(r[j - 1][0]), std::abs(r[j - 1][1])});
        }
        return sup;
    };

    std::vector<linalg::Vec2> r, rt;
    double res = residual(u, r);
    const double tol = opt.newton_tol * std::max(1.0, p.beta_v * p.n_v_star);
    int it = 0;
    for (; it < opt.max_newton && res > tol; ++it) {
        linalg::BlockTridiagonal2 jac(n - 1);
        for (std::size_t j = 1; j < n; ++j) {
            const double V = u[j][0], H = u[j][1];
            const double f1v = -p.beta_v * H / p.n_h_star - p.vector_loss();
            const double f1h = p.beta_v * (p.n_v_star - V) / p.n_h_star;
            const double f2v = p.beta_h * (p.n_h_star - H) / p.n_h_star;
            const double f2h = -p.beta_h * V / p.n_h_star - p.host_loss();
            jac.diag[j - 1] = {dv2 - f1v, -f1h, -f2v, dh2 - f2h};
            jac.lower[j - 1] = j > 1 ? linalg::Mat2{lv, 0.0, 0.0, lh} : linalg::Mat2{};
            jac.upper[j - 1] = j + 1 < n ? linalg::Mat2{uv, 0.0, 0.0, uh} : linalg::Mat2{};
        }
        const auto step = jac.solve(r);
        double lambda = 1.0;
        std::vector<linalg::Vec2> trial(u);
        for (int ls = 0; ls < 30; ++ls) {
            for (std::size_t j = 1; j < n; ++j) {
                trial[j][0] = u[j][0] - lambda * step[j - 1][0];
                trial[j][1] = u[j][1] - lambda * step[j - 1][1];
            }
            const double rn = residual(trial, rt);
            if (rn < res || ls == 29) {
                u.swap(trial);
                r.swap(rt);
                res = rn;
                break;
            }
            lambda *= 0.5;
        }
    }
    if (!(res <= tol))
        throw WaveSpeedError("semi-wavefront (WNv): Newton did not converge, residual " +
                             std::to_string(res));
    SemiWavefrontProfile prof;
    prof.k0_candidate = k;
    prof.newton_iterations = it;
    prof.residual = res;
    prof.grid.resize(n + 1);
    prof.v_profile.resize(n + 1);
    prof.h_profile.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        prof.grid[j] = j * dx;
        prof.v_profile[j] = u[j][0];
        prof.h_profile[j] = u[j][1];
    }
    prof.boundary_slope = one_sided_slope(prof.h_profile, dx);
    return prof;
}

/// Doubles the truncation length until profiles agree at matched nodes.
template <class Solve>
SemiWavefrontProfile solve_with_truncation(const Solve& solve, const SemiWaveOptions& opt) {
    auto prev = solve(opt.initial_length, nullptr);
    for (double len = 2.0 * opt.initial_length; len <= opt.max_length; len *= 2.0) {
        auto next = solve(len, &prev);
        double diff = std::abs(next.boundary_slope - prev.boundary_slope);
        for (std::size_t j = 0; j < prev.grid.size(); ++j) {
            diff = std::max(diff, std::abs(next.v_profile[j] - prev.v_profile[j]));
            if (!prev.h_profile.empty())
                diff = std::max(diff, std::abs(next.h_profile[j] - prev.h_profile[j]));
        }
        if (diff < opt.match_tol) return next;
        prev = std::move(next);
    }
    throw WaveSpeedError("semi-wavefront: truncation did not settle below max_length");
}

} // namespace detail

/// Scalar semi-wave -d U'' + k0 U' = a U - b U^2 on the half-line, U(0) = 0, U(inf) = a/b.
inline SemiWavefrontProfile semi_wavefront_logistic(double a, double b, double d, double k0,
                                                    const SemiWaveOptions& opt = {}) {
    if (!(k0 > 0.0 && k0 < logistic_c_min(a, d)))
        throw WaveSpeedError("semi_wavefront_logistic: requires 0 < k0 < 2 sqrt(a d)");
    return detail::solve_with_truncation(
        [&](double len, const SemiWavefrontProfile* g) {
            return detail::solve_logistic_fixed(a, b, d, k0, len, opt, g ? &g->v_profile : nullptr);
        },
        opt);
}

namespace detail {

/// Bisection for mu_eff * slope(k) = k on (0, c). slope(k) must decrease to 0 as k -> c.
template <class SlopeOf>
double select_speed(double mu_eff, double c, const SlopeOf& slope_of) {
    auto f = [&](double k) { return mu_eff * slope_of(k) - k; };
    double lo = 1e-3 * c;
    double hi = 0.99 * c;
    if (!(f(lo) > 0.0)) {
        lo = 1e-6 * c;
        if (!(f(lo) > 0.0)) throw WaveSpeedError("speed selection: no lower bracket");
    }
    if (!(f(hi) < 0.0)) {
        hi = 0.999 * c;
        if (!(f(hi) < 0.0)) throw WaveSpeedError("speed selection: no upper bracket");
    }
    while (hi - lo > 1e-10 * c) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Free-boundary spreading speed of the logistic problem: the root of mu U'_{k0}(0) = k0.
inline double k0_logistic(double a, double b, double d, double mu, const SemiWaveOptions& opt = {}) {
    if (!(a > 0.0 && b > 0.0 && d > 0.0 && mu > 0.0))
        throw WaveSpeedError("k0_logistic: inputs must be positive");
    return detail::select_speed(mu, logistic_c_min(a, d), [&](double k) {
        return semi_wavefront_logistic(a, b, d, k, opt).boundary_slope;
    });
}

/// WNv semi-wavefront with V_i(0) = H_i(0) = 0 and limits (V_i*, H_i*).
inline SemiWavefrontProfile semi_wavefront_wnv(const EpidemicParams& p, double k0,
                                               const SemiWaveOptions& opt = {}) {
    const auto c = c_min(p).c_min;
    if (!(k0 > 0.0 && k0 < c)) throw WaveSpeedError("semi_wavefront_wnv: requires 0 < k0 < c_min");
    return detail::solve_with_truncation(
        [&](double len, const SemiWavefrontProfile* g) {
            return detail::solve_wnv_fixed(p, k0, len, opt, g);
        },
        opt);
}

/// Candidate free-boundary speed for WNv from mu D_h H_i'(0) = k0.
///
/// This selection rule mirrors the scalar one; only H_i's flux drives the fronts.
/// It is an extension, not an established result, and is labelled as such in outputs.
inline double k0_wnv(const EpidemicParams& p, const SemiWaveOptions& opt = {}) {
    const auto c = c_min(p).c_min;
    return detail::select_speed(p.mu * p.dh, c, [&](double k) {
        return semi_wavefront_wnv(p, k, opt).boundary_slope;
    });
}

inline bool is_nondecreasing(const std::vector<double>& u, double tol = 1e-12) {
    for (std::size_t j = 1; j < u.size(); ++j)
        if (u[j] < u[j - 1] - tol) return false;
    return true;
}

} // namespace wnv
