#pragma once

// Reproduction-number thresholds on bounded and expanding intervals, plus a
// discretized eigenvalue oracle that recovers R0^D without the closed form.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wnv/linalg.hpp"
#include "wnv/ode.hpp"
#include "wnv/params.hpp"

namespace wnv {

class EigenError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DomainInterval {
    double left = 0.0;
    double right = 0.0;

    DomainInterval(double l, double r) : left(l), right(r) {
        if (!(l < r)) throw ValidationError("interval", "requires left < right");
    }
    static DomainInterval symmetric(double half_width) { return {-half_width, half_width}; }

    double width() const noexcept { return right - left; }
    double center() const noexcept { return 0.5 * (left + right); }
};

/// Principal Dirichlet eigenvalue of -d^2/dx^2 on the interval. Depends on width only.
inline double lambda_star(const DomainInterval& omega) {
    const double k = std::numbers::pi / omega.width();
    return k * k;
}

/// Closed-form eigen data on a bounded interval with hostile boundary.
///
/// The pair (phi, psi) = (delta0 psi*, psi*) with psi* the principal Dirichlet
/// mode solves the coupled eigenproblem with eigenvalue lambda0, whose sign
/// is the sign of 1 - R0^D.
struct EigenConstruction {
    DomainInterval omega{-1.0, 1.0};
    double lambda_star = 0.0;
    double a_const = 0.0; ///< D_v lambda* + r_v (1 - q)
    double b_const = 0.0; ///< D_h lambda* + d_h + gamma_h
    double r_star = 0.0;
    double lambda0 = 0.0;
    double delta0 = 0.0;
    double r0d = 0.0; ///< sqrt(r_star)

    /// psi*(x) = cos(pi (x - c) / width), normalized to 1 at the center.
    double psi(double x) const {
        return std::cos(std::numbers::pi * (x - omega.center()) / omega.width());
    }
    double psi_prime(double x) const {
        const double k = std::numbers::pi / omega.width();
        return -k * std::sin(k * (x - omega.center()));
    }
    double psi_second(double x) const { return -lambda_star * psi(x); }
    double phi(double x) const { return delta0 * psi(x); }
};

inline EigenConstruction r0_dirichlet(const EpidemicParams& p, const DomainInterval& omega) {
    EigenConstruction e;
    e.omega = omega;
    e.lambda_star = lambda_star(omega);
    e.a_const = p.dv * e.lambda_star + p.vector_loss();
    e.b_const = p.dh * e.lambda_star + p.host_loss();
    e.r_star = (p.beta_v * p.beta_h * p.n_v_star / p.n_h_star) / (e.a_const * e.b_const);
    e.r0d = std::sqrt(e.r_star);
    const double s = e.a_const + e.b_const;
    const double disc = s * s + 4.0 * e.a_const * e.b_const * (e.r_star - 1.0);
    e.lambda0 = 0.5 * (s - std::sqrt(disc));
    e.delta0 = (e.b_const - e.lambda0) / p.beta_h;
    return e;
}

/// Spatial-temporal risk index: R0^D on the current infected interval (g, h).
inline double r0_free(const EpidemicParams& p, double g, double h) {
    return r0_dirichlet(p, DomainInterval{g, h}).r0d;
}

/// Coupled cooperative operator of the R-scaled eigenproblem, discretized by
/// central differences on `grid_n` uniform cells with Dirichlet rows eliminated.
/// Unknowns are interleaved (phi_j, psi_j) at the grid_n - 1 interior nodes;
/// the principal eigenvalue of this matrix is mu_1(R).
inline linalg::BlockTridiagonal2 coupled_operator(const EpidemicParams& p,
                                                  const DomainInterval& omega, double r,
                                                  int grid_n) {
    const std::size_t m = static_cast<std::size_t>(grid_n - 1);
    const double dx = omega.width() / grid_n;
    const double kv = p.dv / (dx * dx);
    const double kh = p.dh / (dx * dx);
    const double c_vh = p.beta_v * p.n_v_star / (p.n_h_star * r);
    const double c_hv = p.beta_h / r;
    linalg::BlockTridiagonal2 op(m);
    for (std::size_t j = 0; j < m; ++j) {
        op.diag[j] = {2.0 * kv + p.vector_loss(), -c_vh, -c_hv, 2.0 * kh + p.host_loss()};
        op.lower[j] = j > 0 ? linalg::Mat2{-kv, 0.0, 0.0, -kh} : linalg::Mat2{};
        op.upper[j] = j + 1 < m ? linalg::Mat2{-kv, 0.0, 0.0, -kh} : linalg::Mat2{};
    }
    return op;
}

struct PrincipalEigen {
    double mu1 = 0.0;
    double lower = 0.0; ///< certified lower bound (Collatz-Wielandt)
    double upper = 0.0; ///< certified upper bound
    std::vector<linalg::Vec2> vector; ///< (phi_j, psi_j), max-normalized, entrywise positive
    int iterations = 0;
};

struct EigenOptions {
    double rel_tol = 1e-12;
    int max_iterations = 500;
};

/// Principal eigenvalue mu_1(R) of the discretized coupled operator.
///
/// Shifted inverse iteration: the shift always stays below the certified lower
/// bound min_i (L x)_i / x_i, so (L - sI)^{-1} is entrywise positive and the
/// iterate stays positive. The shift tracks the bound, which accelerates
/// convergence once the bracket narrows.
inline PrincipalEigen mu1_of_r(const EpidemicParams& p, const DomainInterval& omega, double r,
                               int grid_n, const EigenOptions& opt = {},
                               const std::vector<linalg::Vec2>* warm_start = nullptr) {
    if (!(r > 0.0)) throw std::invalid_argument("mu1_of_r: R must be > 0");
    if (grid_n < 64) throw std::invalid_argument("mu1_of_r: grid_n must be >= 64");
    const auto op = coupled_operator(p, omega, r, grid_n);
    const std::size_t m = op.size();

    const double c_vh = p.beta_v * p.n_v_star / (p.n_h_star * r);
    const double c_hv = p.beta_h / r;
    const double gersh = std::min(p.vector_loss() - c_vh, p.host_loss() - c_hv);
    const double diag_max = std::max(op.diag[0][0], op.diag[0][3]);
    const double noise = 256.0 * std::numeric_limits<double>::epsilon() * diag_max;
    const double safe_shift = gersh - 0.1 * (1.0 + std::abs(gersh));

    std::vector<linalg::Vec2> x;
    if (warm_start && warm_start->size() == m) {
        x = *warm_start;
    } else {
        x.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double s = std::sin(std::numbers::pi * double(j + 1) / grid_n);
            x[j] = {s, s};
        }
    }

    PrincipalEigen out;
    double shift = safe_shift;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        auto shifted = op;
        for (auto& d : shifted.diag) {
            d[0] -= shift;
            d[3] -= shift;
        }
        auto z = shifted.solve(x);
        double zmax = 0.0;
        bool positive = true;
        for (const auto& v : z) {
            zmax = std::max({zmax, v[0], v[1]});
            positive = positive && v[0] > 0.0 && v[1] > 0.0;
        }
        if (!positive || !(zmax > 0.0) || !std::isfinite(zmax)) {
            // Lost positivity to rounding near the eigenvalue; restart from the safe shift.
            if (shift == safe_shift) throw EigenError("inverse iteration lost positivity");
            shift = safe_shift;
            continue;
        }
        for (auto& v : z) {
            v[0] /= zmax;
            v[1] /= zmax;
        }
        const auto lz = op.apply(z);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t j = 0; j < m; ++j) {
            for (int c = 0; c < 2; ++c) {
                const double ratio = lz[j][c] / z[j][c];
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
        }
        x = std::move(z);
        out.iterations = it;
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= std::max(noise, opt.rel_tol * std::abs(mid))) {
            out.mu1 = mid;
            out.lower = lo;
            out.upper = hi;
            out.vector = std::move(x);
            return out;
        }
        shift = std::max(safe_shift, lo - std::max(hi - lo, noise));
    }
    throw EigenError("mu1_of_r: inverse iteration did not converge in " +
                     std::to_string(opt.max_iterations) + " iterations (ill-conditioned grid?)");
}

/// R0^D recovered as the zero of mu_1(R) by bisection, independent of the closed form
/// except for the starting bracket.
inline double r0_dirichlet_oracle(const EpidemicParams& p, const DomainInterval& omega, int grid_n,
                                  double tol = 1e-9) {
    std::vector<linalg::Vec2> warm;
    auto mu = [&](double r) {
        auto e = mu1_of_r(p, omega, r, grid_n, {}, warm.empty() ? nullptr : &warm);
        warm = e.vector;
        return e;
    };

    const double guess = r0_dirichlet(p, omega).r0d;
    double lo = std::isfinite(guess) && guess > 0.0 ? 0.5 * guess : 0.5;
    double hi = 4.0 * lo;
    int expansions = 0;
    while (mu(lo).upper >= 0.0) {
        lo *= 0.5;
        if (++expansions > 60) throw EigenError("r0_dirichlet_oracle: no lower bracket");
    }
    while (mu(hi).lower <= 0.0) {
        hi *= 2.0;
        if (++expansions > 120) throw EigenError("r0_dirichlet_oracle: no upper bracket");
    }
    while ((hi - lo) > tol * 0.5 * (hi + lo)) {
        const double mid = 0.5 * (lo + hi);
        const auto e = mu(mid);
        if (e.lower > 0.0)
            hi = mid;
        else if (e.upper < 0.0)
            lo = mid;
        else
            return mid; // mu_1(mid) is zero to working precision
    }
    return 0.5 * (lo + hi);
}

enum class ThresholdMethod { closed_form, oracle };

struct ThresholdReport {
    double r0 = 0.0;
    double r0n = 0.0; ///< no-flux threshold; equals r0 for constant coefficients
    double r0d = 0.0;
    std::vector<std::pair<double, double>> r0f_at; ///< (t, R0^F(t))
    ThresholdMethod method = ThresholdMethod::closed_form;
};

struct FrontPosition {
    double t;
    double g;
    double h;
};

inline ThresholdReport threshold_report(const EpidemicParams& p, const DomainInterval& omega,
                                        const std::vector<FrontPosition>& fronts = {},
                                        ThresholdMethod method = ThresholdMethod::closed_form,
                                        int grid_n = 2000) {
    ThresholdReport rep;
    rep.method = method;
    rep.r0 = reproduction_number_r0(p);
    rep.r0n = rep.r0;
    rep.r0d = method == ThresholdMethod::closed_form ? r0_dirichlet(p, omega).r0d
                                                     : r0_dirichlet_oracle(p, omega, grid_n);
    rep.r0f_at.reserve(fronts.size());
    for (const auto& f : fronts) rep.r0f_at.emplace_back(f.t, r0_free(p, f.g, f.h));
    return rep;
}

} // namespace wnv
