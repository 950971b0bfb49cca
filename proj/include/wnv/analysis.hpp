#pragma once

// Spreading/vanishing classification, speed fits, and the explicit upper and
// lower solutions used as comparison harnesses for the moving-front system.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wnv/front_solver.hpp"
#include "wnv/ode.hpp"
#include "wnv/params.hpp"
#include "wnv/thresholds.hpp"

namespace wnv {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Classification

enum class Verdict { spreading, vanishing, undecided };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::spreading: return "spreading";
    case Verdict::vanishing: return "vanishing";
    case Verdict::undecided: return "undecided";
    }
    return "undecided";
}

/// Finite-horizon surrogates for the asymptotic definitions.
struct ClassifyConfig {
    double sup_fraction = 1e-6;    ///< vanishing: sup of front species below this times its scale
    double width_growth = 1e-6;    ///< vanishing: width increment over the window below this times h0
    double window_fraction = 0.1;  ///< trailing part of the horizon used for the growth test
    double spread_factor = 50.0;   ///< spreading: width above this times h0
    double proximity = 0.02;       ///< spreading: origin node within this relative distance of equilibrium

    friend bool operator==(const ClassifyConfig&, const ClassifyConfig&) = default;
};

struct Classification {
    Verdict verdict = Verdict::undecided;
    std::string evidence;
    double t_decided = std::numeric_limits<double>::quiet_NaN();
};

/// Generic classifier. `scale` is the box size of the front species and
/// `target`, when present, the positive equilibrium per species.
template <std::size_t N>
Classification classify_trace(const Trace<N>& trace, std::size_t front, double scale,
                              const std::optional<std::array<double, N>>& target,
                              const ClassifyConfig& cfg) {
    const auto& s = trace.samples;
    Classification c;
    if (s.size() < 2) {
        c.evidence = "trace too short";
        return c;
    }
    const double h0 = trace.h0;
    for (const auto& x : s) {
        if (x.width() > cfg.spread_factor * h0) {
            c.verdict = Verdict::spreading;
            c.evidence = "width exceeded " + std::to_string(cfg.spread_factor) + " h0";
            c.t_decided = x.t;
            return c;
        }
        if (target) {
            bool near = true;
            for (std::size_t k = 0; k < N; ++k)
                near = near && std::abs(x.at_origin[k] - (*target)[k]) <= cfg.proximity * (*target)[k];
            if (near) {
                c.verdict = Verdict::spreading;
                c.evidence = "origin within " + std::to_string(cfg.proximity) +
                             " of the endemic equilibrium";
                c.t_decided = x.t;
                return c;
            }
        }
    }

    const double threshold = cfg.sup_fraction * scale;
    const auto& last = s.back();
    const double t_end = last.t;
    const double t_window = s.front().t + (1.0 - cfg.window_fraction) * (t_end - s.front().t);
    const auto first_in_window =
        std::find_if(s.begin(), s.end(), [&](const auto& x) { return x.t >= t_window; });
    const double growth = last.width() - first_in_window->width();
    if (last.sup[front] < threshold && growth < cfg.width_growth * h0 && t_end > s.front().t) {
        // Earliest time from which the front species stays below threshold.
        std::size_t k = s.size() - 1;
        while (k > 0 && s[k - 1].sup[front] < threshold) --k;
        c.verdict = Verdict::vanishing;
        c.evidence = "sup below threshold and width stalled over the final window";
        c.t_decided = s[k].t;
        return c;
    }
    c.evidence = "no rule fired within the horizon";
    return c;
}

inline Classification classify(const SimulationTrace& trace, const EpidemicParams& p,
                               const ClassifyConfig& cfg = {}) {
    std::optional<std::array<double, 2>> target;
    if (const auto eq = endemic_equilibrium(p); eq.exists) target = {{eq.v_i_star, eq.h_i_star}};
    return classify_trace(trace, kHost, p.n_h_star, target, cfg);
}

inline Classification classify_logistic(const Trace<1>& trace, double a, double b,
                                        const ClassifyConfig& cfg = {}) {
    return classify_trace(trace, 0, a / b, std::optional<std::array<double, 1>>{{a / b}}, cfg);
}

// ---------------------------------------------------------------------------
// Trace diagnostics

/// Decay of H_i forces decay of V_i: sup V <= beta_v N_v*/(N_h* r_v (1-q)) sup H + slack.
inline bool vector_decay_consistent(const SimulationTrace& trace, const EpidemicParams& p,
                                    double slack = 1e-6) {
    const auto& last = trace.samples.back();
    const double k = p.beta_v * p.n_v_star / (p.n_h_star * p.vector_loss());
    return last.sup[kVector] < k * last.sup[kHost] + slack;
}

/// Q(t) = int (V + c H) dx + (c / mu) (h - g), c = r_v (1-q) / beta_h, which is
/// non-increasing when R0 <= 1. Returns the largest relative increase
/// max_{i<j} (Q_j - Q_i) / Q_i seen on the trace (<= 0 means monotone).
inline double mass_functional_increase(const SimulationTrace& trace, const EpidemicParams& p) {
    const double c = p.vector_loss() / p.beta_h;
    double running_min = std::numeric_limits<double>::infinity();
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& x : trace.samples) {
        const double q = x.integral[kVector] + c * x.integral[kHost] + c / p.mu * x.width();
        if (std::isfinite(running_min)) worst = std::max(worst, (q - running_min) / running_min);
        running_min = std::min(running_min, q);
    }
    return worst;
}

/// Largest relative deviation from (V_i*, H_i*) over nodes with |x| <= half_width.
inline double endemic_deviation(const FrontState& s, const EpidemicParams& p, double half_width) {
    const auto eq = endemic_equilibrium(p);
    if (!eq.exists) throw AnalysisError("endemic_deviation: no endemic equilibrium (R0 <= 1)");
    if (s.g > -half_width || s.h < half_width)
        return std::numeric_limits<double>::infinity(); // region not yet infected
    double worst = 0.0;
    for (std::size_t j = 0; j < s.nodes(); ++j) {
        if (std::abs(s.x_at(j)) > half_width) continue;
        worst = std::max({worst, std::abs(s.u[kVector][j] - eq.v_i_star) / eq.v_i_star,
                          std::abs(s.u[kHost][j] - eq.h_i_star) / eq.h_i_star});
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Speed estimate

struct SpeedEstimate {
    double k0_right = 0.0;
    double k0_left = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double r_squared = 0.0; ///< smaller of the two fits
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline LineFit least_squares(const std::vector<double>& t, const std::vector<double>& y) {
    const double n = double(t.size());
    if (t.size() < 2) throw AnalysisError("least_squares: need at least two points");
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= n;
    my /= n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sty / stt;
    f.intercept = my - f.slope * mt;
    double sse = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * t[i]);
        sse += e * e;
    }
    f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return f;
}

/// Least-squares slopes of h(t) and -g(t) over the final `fit_fraction` of the trace.
template <std::size_t N>
SpeedEstimate estimate_speed(const Trace<N>& trace, const Classification& verdict,
                             double fit_fraction = 0.5) {
    if (verdict.verdict != Verdict::spreading)
        throw AnalysisError("estimate_speed: trace is not classified as spreading");
    if (!(fit_fraction > 0.0 && fit_fraction <= 1.0))
        throw std::invalid_argument("estimate_speed: fit_fraction must be in (0, 1]");
    const auto& s = trace.samples;
    const double t0 = s.front().t, t1 = s.back().t;
    const double lo = t1 - fit_fraction * (t1 - t0);
    std::vector<double> t, hr, gl;
    for (const auto& x : s) {
        if (x.t < lo) continue;
        t.push_back(x.t);
        hr.push_back(x.h);
        gl.push_back(-x.g);
    }
    const auto fr = least_squares(t, hr);
    const auto fl = least_squares(t, gl);
    return {fr.slope, fl.slope, t.front(), t.back(), std::min(fr.r_squared, fl.r_squared)};
}

// ---------------------------------------------------------------------------
// Upper solution (vanishing side)

/// Expanding-domain upper solution
///   sigma(t) = h0 (1 + delta - delta/2 e^{-delta t}),
///   (V, H)(x, t) = eps e^{-delta t} (phi, psi)(x h0 / sigma(t)),
/// built from the principal pair on (-h0, h0) when R0^F(0) < 1.
struct UpperSolution {
    EpidemicParams params;
    EigenConstruction eig{};
    double h0 = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;

    double sigma(double t) const { return h0 * (1.0 + delta - 0.5 * delta * std::exp(-delta * t)); }
    double sigma_prime(double t) const { return 0.5 * h0 * delta * delta * std::exp(-delta * t); }
    double amplitude(double t) const { return epsilon * std::exp(-delta * t); }
    double v(double x, double t) const { return amplitude(t) * eig.phi(x * h0 / sigma(t)); }
    double h(double x, double t) const { return amplitude(t) * eig.psi(x * h0 / sigma(t)); }

    /// Largest admissible initial data: sup V_i0 and sup H_i0 bounds.
    double initial_bound_v() const { return epsilon * eig.phi(h0 / (1.0 + 0.5 * delta)); }
    double initial_bound_h() const { return epsilon * eig.psi(h0 / (1.0 + 0.5 * delta)); }
};

namespace detail {

/// Left-hand sides of the two differential inequalities, each with lambda0 > 0.
/// Both are decreasing in delta.
inline std::pair<double, double> upper_margins(const EigenConstruction& e,
                                               const EpidemicParams& p, double delta) {
    const double s = 1.0 / ((1.0 + delta) * (1.0 + delta));
    const double bv = p.beta_v * p.n_v_star / (p.n_h_star * e.delta0) - p.vector_loss();
    const double bh = p.beta_h * e.delta0 - p.host_loss();
    return {-delta + (s - 1.0) * bv + s * e.lambda0, -delta + (s - 1.0) * bh + s * e.lambda0};
}

} // namespace detail

inline UpperSolution build_upper_solution(const EpidemicParams& p, double h0) {
    validate_params(p, ModelMode::simplified);
    UpperSolution us;
    us.params = p;
    us.h0 = h0;
    us.eig = r0_dirichlet(p, DomainInterval::symmetric(h0));
    if (!(us.eig.r0d < 1.0) || !(us.eig.lambda0 > 0.0))
        throw AnalysisError("build_upper_solution: requires R0^F(0) < 1");

    auto ok = [&](double d) {
        const auto [m1, m2] = detail::upper_margins(us.eig, p, d);
        return m1 >= 0.0 && m2 >= 0.0;
    };
    double lo = 0.0, hi = 1.0;
    if (ok(hi)) {
        lo = hi;
    } else {
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
        }
    }
    us.delta = lo;
    if (!(us.delta > 0.0)) throw AnalysisError("build_upper_solution: no admissible delta");

    // eps = -delta^2 h0 / (4 mu psi'(h0)); the extra factor min(1, 2/D_h) keeps the
    // front inequality sigma' >= -mu D_h H_x(sigma) valid when D_h > 2.
    const double psi_prime_h0 = us.eig.psi_prime(h0);
    us.epsilon = -us.delta * us.delta * h0 / (4.0 * p.mu * psi_prime_h0) * std::min(1.0, 2.0 / p.dh);
    return us;
}

struct UpperAudit {
    double max_violation_v = 0.0; ///< normalized by eps e^{-delta t} delta0
    double max_violation_h = 0.0; ///< normalized by eps e^{-delta t}
    double front_violation = 0.0; ///< normalized by sigma'(t)
    bool box_ok = true;
    bool initial_ok = true;

    bool passes(double tol = 1e-8) const {
        return max_violation_v <= tol && max_violation_h <= tol && front_violation <= tol &&
               box_ok && initial_ok;
    }
};

/// Evaluates both differential inequalities on an nx-by-nt sample of
/// {|x| <= sigma(t), 0 <= t <= t_end} with exact derivatives, plus the
/// front inequalities and box. `extra` adds points (x / sigma(t), t).
inline UpperAudit audit_upper_solution(const UpperSolution& us, double t_end, int nx = 101,
                                       int nt = 101,
                                       const std::vector<std::pair<double, double>>& extra = {}) {
    const auto& p = us.params;
    const auto& e = us.eig;
    UpperAudit a;
    auto check = [&](double x, double t) {
        const double sig = us.sigma(t), sigp = us.sigma_prime(t), amp = us.amplitude(t);
        const double scale = us.h0 / sig;
        const double y = x * scale;
        const double psi = e.psi(y), dpsi = e.psi_prime(y), ddpsi = e.psi_second(y);
        const double V = amp * e.delta0 * psi, H = amp * psi;
        const double dydt = -x * us.h0 * sigp / (sig * sig);
        const double vt = -us.delta * V + amp * e.delta0 * dpsi * dydt;
        const double ht = -us.delta * H + amp * dpsi * dydt;
        const double vxx = amp * e.delta0 * ddpsi * scale * scale;
        const double hxx = amp * ddpsi * scale * scale;
        const double rv = vt - p.dv * vxx - vector_reaction(p, V, H);
        const double rh = ht - p.dh * hxx - host_reaction(p, V, H);
        a.max_violation_v = std::max(a.max_violation_v, -rv / (amp * e.delta0));
        a.max_violation_h = std::max(a.max_violation_h, -rh / amp);
        if (V > p.n_v_star || H > p.n_h_star) a.box_ok = false;
    };
    for (int it = 0; it < nt; ++it) {
        const double t = t_end * it / (nt - 1);
        const double sig = us.sigma(t), sigp = us.sigma_prime(t), amp = us.amplitude(t);
        for (int ix = 0; ix < nx; ++ix) check(-sig + 2.0 * sig * ix / (nx - 1), t);
        // sigma' >= -mu D_h H_x(sigma, t); the left front mirrors it.
        const double hx = amp * e.psi_prime(us.h0) * us.h0 / sig;
        a.front_violation = std::max(a.front_violation, (-p.mu * p.dh * hx - sigp) / sigp);
    }
    for (const auto& [frac, t] : extra) check(frac * us.sigma(t), t);
    return a;
}

/// Tracks how far a simulation rises above the upper solution.
struct UpperDominance {
    double max_excess_v = 0.0; ///< max (V - Vbar) / eps
    double max_excess_h = 0.0; ///< max (H - Hbar) / eps
    double max_front_excess = -std::numeric_limits<double>::infinity(); ///< max(h - sigma, -sigma - g)
    int checks = 0;

    bool holds(double tol = 1e-8) const {
        return max_excess_v <= tol && max_excess_h <= tol && max_front_excess <= 0.0;
    }
};

inline StateObserver<2> watch_upper(const UpperSolution& us, UpperDominance& out) {
    return [&us, &out](const FrontState& s) {
        const double sig = us.sigma(s.t);
        out.max_front_excess = std::max({out.max_front_excess, s.h - sig, -sig - s.g});
        for (std::size_t j = 0; j < s.nodes(); ++j) {
            const double x = s.x_at(j);
            const double vb = std::abs(x) <= sig ? us.v(x, s.t) : 0.0;
            const double hb = std::abs(x) <= sig ? us.h(x, s.t) : 0.0;
            out.max_excess_v = std::max(out.max_excess_v, (s.u[kVector][j] - vb) / us.epsilon);
            out.max_excess_h = std::max(out.max_excess_h, (s.u[kHost][j] - hb) / us.epsilon);
        }
        ++out.checks;
    };
}

// ---------------------------------------------------------------------------
// Lower solution (spreading side)

/// Static lower solution (delta phi, delta psi) on [-h0, h0] when R0^F(0) > 1.
struct LowerSolution {
    EpidemicParams params;
    EigenConstruction eig{};
    double h0 = 0.0;
    double delta_small = 0.0;

    double v(double x) const { return std::abs(x) <= h0 ? delta_small * eig.phi(x) : 0.0; }
    double h(double x) const { return std::abs(x) <= h0 ? delta_small * eig.psi(x) : 0.0; }
};

/// When initial data are given, delta is also capped so the lower solution
/// starts below them (pointwise ratio at the interior grid nodes).
inline LowerSolution build_lower_solution(const EpidemicParams& p, double h0,
                                          const InitialData* data = nullptr) {
    validate_params(p, ModelMode::simplified);
    LowerSolution ls;
    ls.params = p;
    ls.h0 = h0;
    ls.eig = r0_dirichlet(p, DomainInterval::symmetric(h0));
    if (!(ls.eig.r0d > 1.0) || !(ls.eig.lambda0 < 0.0))
        throw AnalysisError("build_lower_solution: requires R0^F(0) > 1");
    const double max_psi = 1.0, max_phi = ls.eig.delta0;
    const double l0 = -ls.eig.lambda0;
    ls.delta_small =
        0.5 * std::min(l0 * p.n_h_star / (p.beta_v * max_psi), l0 * p.n_h_star / (p.beta_h * max_phi));
    if (data) {
        const std::size_t n = data->h_i0.size();
        const auto x = sample_on_grid(h0, static_cast<int>(n), [](double y) { return y; });
        for (std::size_t j = 1; j + 1 < n; ++j) {
            ls.delta_small = std::min(ls.delta_small, data->v_i0[j] / ls.eig.phi(x[j]));
            ls.delta_small = std::min(ls.delta_small, data->h_i0[j] / ls.eig.psi(x[j]));
        }
        if (!(ls.delta_small > 0.0))
            throw AnalysisError("build_lower_solution: initial data must be positive inside");
    }
    return ls;
}

struct LowerAudit {
    double max_violation_v = 0.0; ///< max of the residual that must be <= 0
    double max_violation_h = 0.0;
    bool box_ok = true;

    bool passes(double tol = 1e-8) const {
        return max_violation_v <= tol && max_violation_h <= tol && box_ok;
    }
};

/// Residuals -D u'' - f(u) of the static profile at n interior nodes of (-h0, h0),
/// plus any `extra` points given as x / h0.
inline LowerAudit audit_lower_solution(const LowerSolution& ls, int n = 101,
                                       const std::vector<double>& extra = {}) {
    const auto& p = ls.params;
    const auto& e = ls.eig;
    LowerAudit a;
    auto check = [&](double x) {
        const double V = ls.delta_small * e.phi(x), H = ls.delta_small * e.psi(x);
        const double vxx = ls.delta_small * e.delta0 * e.psi_second(x);
        const double hxx = ls.delta_small * e.psi_second(x);
        a.max_violation_v = std::max(a.max_violation_v, -p.dv * vxx - vector_reaction(p, V, H));
        a.max_violation_h = std::max(a.max_violation_h, -p.dh * hxx - host_reaction(p, V, H));
        if (V > p.n_v_star || H > p.n_h_star) a.box_ok = false;
    };
    for (int i = 1; i <= n; ++i) check(-ls.h0 + 2.0 * ls.h0 * i / (n + 1));
    for (double frac : extra) check(frac * ls.h0);
    return a;
}

/// Tracks how far a simulation dips below the lower solution on [-h0, h0].
struct LowerDominance {
    double max_deficit_v = 0.0; ///< max (Vlow - V)
    double max_deficit_h = 0.0; ///< max (Hlow - H)
    double min_sup_h = std::numeric_limits<double>::infinity();
    int checks = 0;

    bool holds(double tol = 1e-8) const { return max_deficit_v <= tol && max_deficit_h <= tol; }
};

inline StateObserver<2> watch_lower(const LowerSolution& ls, LowerDominance& out) {
    return [&ls, &out](const FrontState& s) {
        double sup = 0.0;
        for (std::size_t j = 0; j < s.nodes(); ++j) {
            sup = std::max(sup, s.u[kHost][j]);
            const double x = s.x_at(j);
            if (std::abs(x) > ls.h0) continue;
            out.max_deficit_v = std::max(out.max_deficit_v, ls.v(x) - s.u[kVector][j]);
            out.max_deficit_h = std::max(out.max_deficit_h, ls.h(x) - s.u[kHost][j]);
        }
        out.min_sup_h = std::min(out.min_sup_h, sup);
        ++out.checks;
    };
}

// ---------------------------------------------------------------------------
// Small-mu vanishing

struct MuProbe {
    double mu;
    Verdict verdict;
};

struct MuBracket {
    double mu_vanishing = 0.0;        ///< largest mu certified to vanish
    std::optional<double> mu_other;   ///< smallest mu found not to vanish
    std::vector<MuProbe> probes;      ///< every run, in evaluation order

    /// True when every probe at or below mu_vanishing vanished.
    bool small_side_all_vanishing() const {
        for (const auto& pr : probes)
            if (pr.mu <= mu_vanishing && pr.verdict != Verdict::vanishing) return false;
        return mu_vanishing > 0.0;
    }
};

/// Brackets the vanishing region in mu by bisection between mu_lo and mu_hi.
/// Requires R0^F(0) < 1. The search never claims a sharp threshold: runs that
/// are undecided count as "not vanishing".
inline MuBracket bracket_vanishing_mu(EpidemicParams p, const InitialData& init,
                                      const SolverConfig& config, double mu_lo, double mu_hi,
                                      int bisections = 6, const ClassifyConfig& cfg = {},
                                      const std::function<void(double, const SimulationTrace&)>&
                                          on_run = {}) {
    if (!(r0_dirichlet(p, DomainInterval::symmetric(init.h0)).r0d < 1.0))
        throw AnalysisError("bracket_vanishing_mu: requires R0^F(0) < 1");
    if (!(mu_lo > 0.0 && mu_hi > mu_lo)) throw std::invalid_argument("need 0 < mu_lo < mu_hi");
    MuBracket br;
    auto probe = [&](double mu) {
        p.mu = mu;
        const auto trace = run(p, init, config);
        if (on_run) on_run(mu, trace);
        const auto v = classify(trace, p, cfg).verdict;
        br.probes.push_back({mu, v});
        return v == Verdict::vanishing;
    };
    int shrink = 0;
    while (!probe(mu_lo)) {
        mu_lo *= 0.25;
        if (++shrink > 8) return br;
    }
    br.mu_vanishing = mu_lo;
    if (probe(mu_hi)) {
        br.mu_vanishing = mu_hi;
        return br;
    }
    br.mu_other = mu_hi;
    double lo = mu_lo, hi = mu_hi;
    for (int i = 0; i < bisections; ++i) {
        const double mid = std::sqrt(lo * hi);
        (probe(mid) ? lo : hi) = mid;
    }
    br.mu_vanishing = lo;
    br.mu_other = hi;
    // Confirm the region below the certified value.
    probe(0.5 * lo);
    probe(0.25 * lo);
    return br;
}

} // namespace wnv
