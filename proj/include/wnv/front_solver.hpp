#pragma once

// Two-front Stefan problem in Landau (front-fixing) coordinates.
//
// With xi = (x - g) / (h - g) the moving interval maps onto [0, 1] and each
// species u obeys
//
//     u_t = D / L^2 u_xixi + (g' + xi (h' - g')) / L u_xi + f(u),   L = h - g,
//
// with u = 0 at xi = 0, 1. The fronts move with the flux of the front species:
// g' = -c u_x(g), h' = -c u_x(h), where c = mu D_h (WNv) or mu (logistic).
//
// One step: fronts explicit from the current gradients; transport
// (diffusion + grid advection) implicit, reactions explicit. Advection is
// central where the cell Peclet number is <= 1 and upwind otherwise, which
// keeps the implicit matrix an M-matrix with unit row sums, so the discrete
// maximum principle holds and the box [0, upper] is preserved.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wnv/linalg.hpp"
#include "wnv/ode.hpp"
#include "wnv/params.hpp"
#include "wnv/thresholds.hpp"

namespace wnv {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kVector = 0; ///< species index of V_i
inline constexpr std::size_t kHost = 1;   ///< species index of H_i

/// Snapshot of the moving domain and the species densities on the xi grid.
template <std::size_t N>
struct FieldState {
    double t = 0.0;
    double g = 0.0;
    double h = 0.0;
    std::vector<double> xi;
    std::array<std::vector<double>, N> u;

    std::size_t nodes() const noexcept { return xi.size(); }
    double width() const noexcept { return h - g; }
    double x_at(std::size_t j) const noexcept { return g + xi[j] * (h - g); }
};

/// WNv state: u[kVector] = V_i, u[kHost] = H_i.
using FrontState = FieldState<2>;

struct SolverConfig {
    int n_xi = 401;
    double dt_init = 0.05;   ///< largest step the solver will take
    double cfl_safety = 0.4; ///< fraction of the advective and reaction stability limits
    double t_max = 100.0;
    double record_every = 0.5; ///< sample cadence in time units

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

inline void validate_config(const SolverConfig& c) {
    if (c.n_xi < 101 || c.n_xi % 2 == 0)
        throw ValidationError("n_xi", "must be odd and >= 101");
    if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 0.5))
        throw ValidationError("cfl_safety", "must lie in (0, 0.5]");
    if (!(c.dt_init > 0.0) || !std::isfinite(c.dt_init))
        throw ValidationError("dt_init", "must be > 0");
    if (!(c.t_max >= 0.0) || !std::isfinite(c.t_max))
        throw ValidationError("t_max", "must be >= 0");
    if (!(c.record_every > 0.0) || !std::isfinite(c.record_every))
        throw ValidationError("record_every", "must be > 0");
}

inline std::vector<double> xi_grid(int n_xi) {
    std::vector<double> xi(static_cast<std::size_t>(n_xi));
    for (int j = 0; j < n_xi; ++j) xi[j] = double(j) / (n_xi - 1);
    // Exact mirror symmetry of the grid.
    for (int j = 0; j < n_xi / 2; ++j) xi[n_xi - 1 - j] = 1.0 - xi[j];
    return xi;
}

// ---------------------------------------------------------------------------
// Reaction models

/// Simplified WNv system on the moving interval.
struct WnvFrontModel {
    static constexpr std::size_t species = 2;
    EpidemicParams p;

    std::array<double, 2> diffusivity() const { return {p.dv, p.dh}; }
    std::array<double, 2> upper_bound() const { return {p.n_v_star, p.n_h_star}; }
    std::size_t front_species() const { return kHost; }
    double front_coefficient() const { return p.mu * p.dh; }

    std::array<double, 2> react(const std::array<double, 2>& u) const {
        return {vector_reaction(p, u[0], u[1]), host_reaction(p, u[0], u[1])};
    }
    /// Row-sum bound of |df/du| over the box.
    double lipschitz() const {
        const double lv = p.beta_v + p.vector_loss() + p.beta_v * p.n_v_star / p.n_h_star;
        const double lh = p.beta_h + p.beta_h * p.n_v_star / p.n_h_star + p.host_loss();
        return std::max(lv, lh);
    }
    std::optional<double> risk_index(double g, double h) const { return r0_free(p, g, h); }
};

/// Scalar diffusive logistic equation u_t = d u_xx + u (a - b u) with Stefan fronts.
struct LogisticFrontModel {
    static constexpr std::size_t species = 1;
    double a = 1.0, b = 1.0, d = 1.0, mu = 1.0;
    double box_top = 1.0;

    std::array<double, 1> diffusivity() const { return {d}; }
    std::array<double, 1> upper_bound() const { return {box_top}; }
    std::size_t front_species() const { return 0; }
    double front_coefficient() const { return mu; }
    std::array<double, 1> react(const std::array<double, 1>& u) const {
        return {u[0] * (a - b * u[0])};
    }
    double lipschitz() const { return a + 2.0 * b * box_top; }
    std::optional<double> risk_index(double, double) const { return std::nullopt; }
};

// ---------------------------------------------------------------------------
// Trace

template <std::size_t N>
struct TraceSample {
    double t = 0.0;
    double g = 0.0;
    double h = 0.0;
    std::array<double, N> sup{};
    std::array<double, N> integral{};
    std::array<double, N> at_origin{}; ///< value at the node nearest x = 0
    double r0f = std::numeric_limits<double>::quiet_NaN();
    double gdot = 0.0;
    double hdot = 0.0;

    double width() const noexcept { return h - g; }
};

template <std::size_t N>
struct Trace {
    double h0 = 0.0;
    std::vector<TraceSample<N>> samples;
    FieldState<N> final_state;
    std::vector<std::string> warnings;
    long accepted_steps = 0;
    long rejected_steps = 0;
    double max_box_excess = 0.0; ///< largest pre-clamp excursion over accepted steps
    long nonmonotone_steps = 0;  ///< accepted steps failing detail::advances
    bool symmetric_data = false;
    double max_symmetry_defect = 0.0; ///< max |g + h| over steps (symmetric data only)
    double sup_front_speed = 0.0;     ///< max over steps of max(-g', h')
};

using SimulationTrace = Trace<2>;

template <std::size_t N>
using StateObserver = std::function<void(const FieldState<N>&)>;

// ---------------------------------------------------------------------------
// Initial data

struct InitialData {
    double h0 = 1.0;
    std::vector<double> v_i0; ///< sampled at x = -h0 + 2 h0 xi_j
    std::vector<double> h_i0;
};

/// Samples `f` on the n_xi-node grid over [-h0, h0]; endpoints are pinned to zero.
template <class F>
std::vector<double> sample_on_grid(double h0, int n_xi, F f) {
    const auto xi = xi_grid(n_xi);
    const std::size_t n = xi.size();
    std::vector<double> out(n);
    // x is mirrored exactly so that even profiles sample to symmetric vectors.
    for (std::size_t j = 1; j <= n / 2; ++j) {
        const double x = j == n / 2 && n % 2 == 1 ? 0.0 : -h0 + 2.0 * h0 * xi[j];
        out[j] = f(x);
        if (n - 1 - j != j) out[n - 1 - j] = f(-x);
    }
    return out;
}

/// amplitude * cos(x pi / (2 h0)), the principal Dirichlet mode.
inline std::vector<double> cosine_profile(double h0, int n_xi, double amplitude) {
    return sample_on_grid(h0, n_xi, [=](double x) {
        return amplitude * std::cos(x * std::numbers::pi / (2.0 * h0));
    });
}

/// Smooth compactly supported bump, amplitude at x = 0.
inline std::vector<double> bump_profile(double h0, int n_xi, double amplitude) {
    return sample_on_grid(h0, n_xi, [=](double x) {
        const double s = x / h0;
        const double r = 1.0 - s * s;
        return r > 0.0 ? amplitude * std::exp(1.0 - 1.0 / r) : 0.0;
    });
}

/// Piecewise-linear interpolation of (xs, ys) tabulated on [-h0, h0].
inline std::vector<double> tabulated_profile(double h0, int n_xi, std::span<const double> xs,
                                             std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw ValidationError("tabulated", "needs matching x/value arrays of length >= 2");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw ValidationError("tabulated", "x values must be increasing");
    return sample_on_grid(h0, n_xi, [&](double x) {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin());
        const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return (1.0 - w) * ys[i - 1] + w * ys[i];
    });
}

// ---------------------------------------------------------------------------
// Solver

namespace detail {

/// du/dx at xi = 0 and xi = 1 by second-order one-sided stencils. If the
/// three-point value has the wrong sign for a nonnegative profile vanishing
/// at the end, the two-point slope is used instead.
inline std::pair<double, double> boundary_slopes(std::span<const double> u, double width) {
    const std::size_t n = u.size();
    const double dxi = 1.0 / double(n - 1);
    double left = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dxi);
    double right = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dxi);
    if (left < 0.0) left = (u[1] - u[0]) / dxi;
    if (right > 0.0) right = (u[n - 1] - u[n - 2]) / dxi;
    return {left / width, right / width};
}

template <std::size_t N>
bool is_mirror_symmetric(const FieldState<N>& s) {
    if (s.g != -s.h) return false;
    const std::size_t n = s.nodes();
    for (const auto& u : s.u)
        for (std::size_t j = 0; j < n / 2; ++j)
            if (u[j] != u[n - 1 - j]) return false;
    return true;
}

} // namespace detail

/// Front velocities (g', h') from the front species' boundary gradients.
template <class Model>
std::pair<double, double> front_flux(const FieldState<Model::species>& s, const Model& model) {
    const auto [left, right] = detail::boundary_slopes(s.u[model.front_species()], s.width());
    const double c = model.front_coefficient();
    return {-c * left, -c * right};
}

inline std::pair<double, double> front_flux(const FrontState& s, const EpidemicParams& p) {
    return front_flux(s, WnvFrontModel{p});
}

template <class Model>
struct StepResult {
    FieldState<Model::species> state;
    double box_excess = 0.0;
    double gdot = 0.0;
    double hdot = 0.0;
};

/// One IMEX step of size dt. The returned state is clamped to the box;
/// `box_excess` reports how far the unclamped update left it.
template <class Model>
StepResult<Model> try_step(const FieldState<Model::species>& s, const Model& model, double dt) {
    constexpr std::size_t N = Model::species;
    const std::size_t n = s.nodes();
    const double dxi = 1.0 / double(n - 1);
    const auto [gd, hd] = front_flux(s, model);

    StepResult<Model> out;
    out.gdot = gd;
    out.hdot = hd;
    auto& next = out.state;
    next.t = s.t + dt;
    next.g = s.g + dt * gd;
    next.h = s.h + dt * hd;
    next.xi = s.xi;
    const double width = next.h - next.g;

    // Explicit reactions.
    std::array<std::vector<double>, N> rhs;
    for (auto& r : rhs) r.assign(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        std::array<double, N> uj;
        for (std::size_t k = 0; k < N; ++k) uj[k] = s.u[k][j];
        const auto f = model.react(uj);
        for (std::size_t k = 0; k < N; ++k) rhs[k][j] = uj[k] + dt * f[k];
    }

    const auto diff = model.diffusivity();
    const auto top = model.upper_bound();
    const std::size_t m = n - 2;
    std::vector<double> lo(m), di(m), up(m), b(m);
    for (std::size_t k = 0; k < N; ++k) {
        const double kappa = diff[k] / (width * width);
        const double dif = dt * kappa / (dxi * dxi);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = i + 1;
            const double a = (gd + s.xi[j] * (hd - gd)) / width;
            const double peclet = std::abs(a) * dxi / (2.0 * kappa);
            double l = -dif, c = 1.0 + 2.0 * dif, r = -dif;
            if (peclet <= 1.0) {
                l += dt * a / (2.0 * dxi);
                r -= dt * a / (2.0 * dxi);
            } else if (a > 0.0) {
                c += dt * a / dxi;
                r -= dt * a / dxi;
            } else {
                c -= dt * a / dxi;
                l += dt * a / dxi;
            }
            lo[i] = l;
            di[i] = c;
            up[i] = r;
            b[i] = rhs[k][j];
        }
        linalg::solve_tridiagonal(lo, di, up, b);
        auto& u = next.u[k];
        u.assign(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double v = b[i];
            out.box_excess = std::max({out.box_excess, -v, v - top[k]});
            u[i + 1] = std::clamp(v, 0.0, top[k]);
        }
    }
    return out;
}

template <class Model>
TraceSample<Model::species> make_sample(const FieldState<Model::species>& s, const Model& model) {
    constexpr std::size_t N = Model::species;
    TraceSample<N> smp;
    smp.t = s.t;
    smp.g = s.g;
    smp.h = s.h;
    const std::size_t n = s.nodes();
    const double dx = s.width() / double(n - 1);
    const double pos = std::clamp(-s.g / s.width(), 0.0, 1.0) * double(n - 1);
    const std::size_t origin = static_cast<std::size_t>(std::lround(pos));
    for (std::size_t k = 0; k < N; ++k) {
        double sup = 0.0, sum = 0.0;
        for (double v : s.u[k]) {
            sup = std::max(sup, v);
            sum += v;
        }
        smp.sup[k] = sup;
        smp.integral[k] = dx * sum; // trapezoid; endpoint values are zero
        smp.at_origin[k] = s.u[k][origin];
    }
    if (auto r = model.risk_index(s.g, s.h)) smp.r0f = *r;
    std::tie(smp.gdot, smp.hdot) = front_flux(s, model);
    return smp;
}

namespace detail {

/// Front monotonicity over one step. While the front species is positive the
/// front velocities must be strictly signed, and a front must move whenever
/// its displacement exceeds a few ulps of its position; positions never retreat.
template <std::size_t N>
bool advances(const FieldState<N>& before, const FieldState<N>& after, double gdot, double hdot,
              double dt, bool active) {
    if (after.h < before.h || after.g > before.g) return false;
    if (!active) return true;
    if (!(hdot > 0.0 && gdot < 0.0)) return false;
    auto resolvable = [](double x, double dx) {
        const double ulp = std::nextafter(std::abs(x), std::numeric_limits<double>::infinity()) -
                           std::abs(x);
        return std::abs(dx) > 4.0 * ulp;
    };
    if (resolvable(before.h, hdot * dt) && !(after.h > before.h)) return false;
    if (resolvable(before.g, gdot * dt) && !(after.g < before.g)) return false;
    return true;
}

} // namespace detail

/// Integrates the moving-front system from `init` to `config.t_max`.
template <class Model>
Trace<Model::species> run_model(const Model& model, FieldState<Model::species> state,
                                const SolverConfig& config,
                                const StateObserver<Model::species>& observer = {}) {
    constexpr std::size_t N = Model::species;
    validate_config(config);
    Trace<N> trace;
    trace.h0 = 0.5 * state.width();
    trace.symmetric_data = detail::is_mirror_symmetric(state);

    const double dxi = 1.0 / double(state.nodes() - 1);
    const double lip = model.lipschitz();
    const auto fc = model.front_species();

    auto record = [&](const FieldState<N>& s) {
        trace.samples.push_back(make_sample(s, model));
        if (observer) observer(s);
    };
    record(state);

    long next_record = 1;
    while (state.t < config.t_max) {
        const double t_rec = std::min(config.t_max, next_record * config.record_every);
        const auto [gd, hd] = front_flux(state, model);
        const double vmax = std::max(std::abs(gd), std::abs(hd));
        double dt = config.dt_init;
        if (vmax > 0.0) dt = std::min(dt, config.cfl_safety * dxi * state.width() / vmax);
        if (lip > 0.0) dt = std::min(dt, config.cfl_safety / lip);
        bool lands = false;
        // A shortfall of a few ulps from accumulated t counts as landing.
        if (state.t + dt >= t_rec || t_rec - (state.t + dt) <= 1e-9 * dt) {
            dt = t_rec - state.t;
            lands = true;
        } else if (t_rec - (state.t + dt) < 0.5 * dt) {
            // Split the remainder so no sliver step is left before the record time.
            dt = 0.5 * (t_rec - state.t);
        }

        std::optional<StepResult<Model>> step;
        for (int halving = 0; halving <= 20; ++halving) {
            auto trial = try_step(state, model, dt);
            if (trial.box_excess <= 1e-9) {
                step = std::move(trial);
                break;
            }
            ++trace.rejected_steps;
            dt *= 0.5;
            lands = false;
        }
        if (!step)
            throw SolverError("step rejected after 20 halvings at t=" + std::to_string(state.t) +
                              " (box violation; width=" + std::to_string(state.width()) + ")");

        double sup_front = 0.0;
        for (double v : state.u[fc]) sup_front = std::max(sup_front, v);
        if (!detail::advances(state, step->state, step->gdot, step->hdot, dt, sup_front > 0.0))
            ++trace.nonmonotone_steps;
        trace.max_box_excess = std::max(trace.max_box_excess, step->box_excess);
        trace.sup_front_speed = std::max({trace.sup_front_speed, -step->gdot, step->hdot});

        state = std::move(step->state);
        if (lands) state.t = t_rec; // avoid drift in the sample times
        ++trace.accepted_steps;
        if (trace.symmetric_data)
            trace.max_symmetry_defect =
                std::max(trace.max_symmetry_defect, std::abs(state.g + state.h));

        if (lands) {
            record(state);
            ++next_record;
        }
    }
    trace.final_state = std::move(state);
    return trace;
}

/// Builds the t = 0 state on (-h0, h0) after checking the initial-data conditions.
template <std::size_t N>
FieldState<N> initial_state(double h0, const std::array<std::vector<double>, N>& profiles,
                            const std::array<double, N>& top, std::size_t front_species,
                            std::vector<std::string>* warnings) {
    if (!(h0 > 0.0)) throw ValidationError("h0", "must be > 0");
    const std::size_t n = profiles[0].size();
    FieldState<N> s;
    s.t = 0.0;
    s.g = -h0;
    s.h = h0;
    s.xi = xi_grid(static_cast<int>(n));
    for (std::size_t k = 0; k < N; ++k) {
        const auto& u = profiles[k];
        if (u.size() != n) throw ValidationError("initial_data", "profiles differ in length");
        if (u.front() != 0.0 || u.back() != 0.0)
            throw ValidationError("initial_data", "profiles must vanish at x = +-h0");
        for (double v : u)
            if (!(v >= 0.0 && v <= top[k]))
                throw ValidationError("initial_data", "profile leaves the box [0, upper]");
        s.u[k] = u;
    }
    const auto& hf = profiles[front_species];
    const bool all_zero = std::all_of(hf.begin(), hf.end(), [](double v) { return v == 0.0; });
    if (all_zero) {
        if (warnings) warnings->push_back("front species identically zero: fronts stay fixed");
    } else {
        for (std::size_t j = 1; j + 1 < n; ++j)
            if (!(hf[j] > 0.0))
                throw ValidationError("initial_data",
                                      "front-species profile must be positive inside (-h0, h0)");
    }
    return s;
}

/// Runs the WNv free-boundary system.
inline SimulationTrace run(const EpidemicParams& params, const InitialData& init,
                           const SolverConfig& config, const StateObserver<2>& observer = {}) {
    validate_params(params, ModelMode::simplified);
    validate_config(config);
    if (init.v_i0.size() != std::size_t(config.n_xi) || init.h_i0.size() != std::size_t(config.n_xi))
        throw ValidationError("initial_data", "profiles must have n_xi samples");
    const WnvFrontModel model{params};
    std::vector<std::string> warnings;
    auto s0 = initial_state<2>(init.h0, {init.v_i0, init.h_i0}, model.upper_bound(), kHost,
                               &warnings);
    auto trace = run_model(model, std::move(s0), config, observer);
    trace.warnings.insert(trace.warnings.begin(), warnings.begin(), warnings.end());
    return trace;
}

/// Advances the WNv system by one step of size dt (no halving).
inline FrontState step(const FrontState& s, const EpidemicParams& p, double dt) {
    auto r = try_step(s, WnvFrontModel{p}, dt);
    if (r.box_excess > 1e-9) throw SolverError("step left the box; reduce dt");
    return std::move(r.state);
}

/// Scalar logistic free-boundary problem, used to validate the scheme against
/// the known semi-wave speed.
inline Trace<1> run_logistic(double a, double b, double d, double mu, double h0,
                             const std::vector<double>& u0, const SolverConfig& config,
                             const StateObserver<1>& observer = {}) {
    if (!(a > 0.0 && b > 0.0 && d > 0.0 && mu > 0.0))
        throw ValidationError("logistic", "a, b, d, mu must be > 0");
    validate_config(config);
    if (u0.size() != std::size_t(config.n_xi))
        throw ValidationError("initial_data", "profile must have n_xi samples");
    LogisticFrontModel model{a, b, d, mu, a / b};
    model.box_top = std::max(a / b, *std::max_element(u0.begin(), u0.end()));
    std::vector<std::string> warnings;
    auto s0 = initial_state<1>(h0, {u0}, model.upper_bound(), 0, &warnings);
    auto trace = run_model(model, std::move(s0), config, observer);
    trace.warnings.insert(trace.warnings.begin(), warnings.begin(), warnings.end());
    return trace;
}

// ---------------------------------------------------------------------------
// Invariant audit

struct FrontBoundsReport {
    bool box = true;
    bool monotone = true;
    bool symmetry = true;    ///< -2 h0 < g + h < 2 h0, and exact mirror symmetry when applicable
    bool speed_bound = true; ///< max(-g', h') <= C1
    double c1 = std::numeric_limits<double>::infinity();
    double max_speed = 0.0;

    bool all() const noexcept { return box && monotone && symmetry && speed_bound; }
};

/// C1 = 2 M N_h* mu D_h with M = max(sqrt(beta_h N_v* N_h* / (2 D_h)), 4 |H_i0|_C1 / (3 N_h*)).
/// The C1 norm of H_i0 is estimated from grid data: sup value plus largest difference slope.
inline double front_speed_bound(const EpidemicParams& p, double h0,
                                const std::vector<double>& h_i0) {
    const double dx = 2.0 * h0 / double(h_i0.size() - 1);
    double sup = 0.0, slope = 0.0;
    for (std::size_t j = 0; j < h_i0.size(); ++j) {
        sup = std::max(sup, std::abs(h_i0[j]));
        if (j > 0) slope = std::max(slope, std::abs(h_i0[j] - h_i0[j - 1]) / dx);
    }
    const double m = std::max(std::sqrt(p.beta_h * p.n_v_star * p.n_h_star / (2.0 * p.dh)),
                              4.0 * (sup + slope) / (3.0 * p.n_h_star));
    return 2.0 * m * p.n_h_star * p.mu * p.dh;
}

/// Checks the monotone-front, symmetry-trap, box and (optionally) speed-bound
/// invariants over every accepted step and every recorded sample.
template <std::size_t N>
FrontBoundsReport audit_front_invariants(const Trace<N>& trace,
                                         std::optional<double> speed_bound = std::nullopt) {
    FrontBoundsReport rep;
    rep.box = trace.max_box_excess <= 1e-9;
    rep.monotone = trace.nonmonotone_steps == 0;
    const auto& s = trace.samples;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const bool active = s[i - 1].sup[N == 2 ? kHost : 0] > 0.0;
        if (active && !(s[i - 1].hdot > 0.0 && s[i - 1].gdot < 0.0)) rep.monotone = false;
        if (s[i].h < s[i - 1].h || s[i].g > s[i - 1].g) rep.monotone = false;
    }
    for (const auto& x : s) {
        const double sum = x.g + x.h;
        if (!(sum > -2.0 * trace.h0 && sum < 2.0 * trace.h0)) rep.symmetry = false;
    }
    if (trace.symmetric_data && trace.max_symmetry_defect > 1e-10) rep.symmetry = false;
    rep.max_speed = trace.sup_front_speed;
    for (const auto& x : s) rep.max_speed = std::max({rep.max_speed, -x.gdot, x.hdot});
    if (speed_bound) {
        rep.c1 = *speed_bound;
        rep.speed_bound = rep.max_speed <= *speed_bound;
    }
    return rep;
}

} // namespace wnv
