#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace wnv {

/// Thrown when a parameter set or configuration violates one of its invariants.
/// `field()` names the offending entry so callers can report it verbatim.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Biological and transport constants of the vector-host model.
///
/// Rates are per unit time, densities per unit area (or length in 1-D),
/// diffusivities in length^2/time. `mu` converts the host-infected flux at a
/// front into front velocity.
struct EpidemicParams {
    double beta_v = 0.0;   ///< host -> vector transmission rate
    double beta_h = 0.0;   ///< vector -> host transmission rate
    double r_v = 0.0;      ///< mosquito recruitment rate
    double d_v = 0.0;      ///< mosquito death rate
    double r_h = 0.0;      ///< bird recruitment rate
    double d_h = 0.0;      ///< bird death rate
    double gamma_h = 0.0;  ///< bird recovery rate
    double q = 0.0;        ///< vertical transmission fraction, in [0, 1)
    double n_v_star = 0.0; ///< total vector density
    double n_h_star = 0.0; ///< total host density
    double dv = 0.0;       ///< vector diffusivity
    double dh = 0.0;       ///< host diffusivity
    double mu = 0.0;       ///< front-expansion coefficient
    std::optional<double> k_v; ///< mosquito carrying capacity (logistic reproduction only)

    /// Effective loss rate of infected vectors, r_v (1 - q).
    double vector_loss() const noexcept { return r_v * (1.0 - q); }
    /// Removal rate of infected hosts, d_h + gamma_h.
    double host_loss() const noexcept { return d_h + gamma_h; }

    friend bool operator==(const EpidemicParams&, const EpidemicParams&) = default;
};

enum class ModelMode { full, simplified };

namespace detail {

inline void require(bool ok, const char* field, const char* what) {
    if (!ok) throw ValidationError(field, what);
}

} // namespace detail

/// Returns `p` unchanged when every invariant of `mode` holds, throws ValidationError otherwise.
inline EpidemicParams validate_params(const EpidemicParams& p, ModelMode mode) {
    using detail::require;
    auto rate = [](double x) { return std::isfinite(x) && x >= 0.0; };
    require(rate(p.beta_v), "beta_v", "must be a finite rate >= 0");
    require(rate(p.beta_h), "beta_h", "must be a finite rate >= 0");
    require(rate(p.r_v), "r_v", "must be a finite rate >= 0");
    require(rate(p.d_v), "d_v", "must be a finite rate >= 0");
    require(rate(p.r_h), "r_h", "must be a finite rate >= 0");
    require(rate(p.d_h), "d_h", "must be a finite rate >= 0");
    require(rate(p.gamma_h), "gamma_h", "must be a finite rate >= 0");
    require(std::isfinite(p.q) && p.q >= 0.0 && p.q < 1.0, "q", "must satisfy 0 <= q < 1");
    require(std::isfinite(p.n_v_star) && p.n_v_star > 0.0, "n_v_star", "must be > 0");
    require(std::isfinite(p.n_h_star) && p.n_h_star > 0.0, "n_h_star", "must be > 0");
    require(std::isfinite(p.dv) && p.dv > 0.0, "dv", "must be > 0");
    require(std::isfinite(p.dh) && p.dh > 0.0, "dh", "must be > 0");
    require(std::isfinite(p.mu) && p.mu > 0.0, "mu", "must be > 0");
    if (p.k_v) require(std::isfinite(*p.k_v) && *p.k_v > 0.0, "k_v", "must be > 0 when given");

    if (mode == ModelMode::simplified) {
        require(p.r_v == p.d_v, "d_v", "simplified model requires r_v == d_v");
        require(p.r_h == p.d_h, "d_h", "simplified model requires r_h == d_h");
        // The closed forms divide by these.
        require(p.vector_loss() > 0.0, "r_v", "simplified model requires r_v (1 - q) > 0");
        require(p.host_loss() > 0.0, "gamma_h", "simplified model requires d_h + gamma_h > 0");
    }
    return p;
}

} // namespace wnv
