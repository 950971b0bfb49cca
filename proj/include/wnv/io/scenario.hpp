#pragma once

// Scenario files: a small YAML subset with flat sections
//
//   params:   { beta_v, beta_h, r_v, d_v, r_h, d_h, gamma_h, q, n_v_star, n_h_star, dv, dh, mu, k_v }
//   init:     { family: cosine | bump | tabulated, h0, amplitude_v, amplitude_h, x, v_i, h_i }
//   solver:   { n_xi, dt_init, cfl_safety, t_max, record_every }
//   classify: { sup_fraction, width_growth, window_fraction, spread_factor, proximity }
//   analyses: [thresholds, classify, speed, bounds, upper_audit, lower_audit, wavespeed]
//
// Unknown keys are errors. r_v and r_h default to d_v and d_h, q to 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "wnv/analysis.hpp"
#include "wnv/front_solver.hpp"
#include "wnv/io/format.hpp"
#include "wnv/params.hpp"

namespace wnv::io {

/// Malformed scenario text. Line and column are 1-based; 0 when unknown.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& msg, int line = 0, int column = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                            std::to_string(column) + ": " + msg
                                      : msg),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

enum class ProfileFamily { cosine, bump, tabulated };

enum class Analysis { thresholds, classify, speed, bounds, upper_audit, lower_audit, wavespeed };

inline const char* to_string(ProfileFamily f) {
    switch (f) {
    case ProfileFamily::cosine: return "cosine";
    case ProfileFamily::bump: return "bump";
    case ProfileFamily::tabulated: return "tabulated";
    }
    return "cosine";
}

inline const char* to_string(Analysis a) {
    switch (a) {
    case Analysis::thresholds: return "thresholds";
    case Analysis::classify: return "classify";
    case Analysis::speed: return "speed";
    case Analysis::bounds: return "bounds";
    case Analysis::upper_audit: return "upper_audit";
    case Analysis::lower_audit: return "lower_audit";
    case Analysis::wavespeed: return "wavespeed";
    }
    return "thresholds";
}

struct InitSpec {
    ProfileFamily family = ProfileFamily::cosine;
    double h0 = 1.0;
    double amplitude_v = 0.0;
    double amplitude_h = 0.0;
    std::vector<double> x, v_i, h_i; ///< tabulated family only

    friend bool operator==(const InitSpec&, const InitSpec&) = default;
};

struct Scenario {
    EpidemicParams params;
    InitSpec init;
    SolverConfig solver;
    ClassifyConfig classify;
    std::vector<Analysis> analyses{Analysis::thresholds, Analysis::classify, Analysis::speed,
                                   Analysis::bounds, Analysis::wavespeed};

    bool wants(Analysis a) const {
        return std::find(analyses.begin(), analyses.end(), a) != analyses.end();
    }
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct SweepAxis {
    std::string path; ///< e.g. "params.mu" or "init.h0"
    std::vector<double> values;

    friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct SweepSpec {
    Scenario base;
    std::vector<SweepAxis> axes;
    int workers = 1;
};

// ---------------------------------------------------------------------------
// Numeric fields addressable by "section.key"

struct NumberField {
    std::string section;
    std::string key;
    bool required = false;
    bool integral = false;
    std::function<void(Scenario&, double)> set;
    std::function<double(const Scenario&)> get;

    std::string path() const { return section + "." + key; }
};

namespace detail {

template <class Sub, class T>
NumberField field(const char* section, const char* key, bool required, Sub Scenario::*sub,
                  T Sub::*member) {
    NumberField f;
    f.section = section;
    f.key = key;
    f.required = required;
    f.integral = std::is_integral_v<T>;
    f.set = [sub, member](Scenario& s, double v) { s.*sub.*member = static_cast<T>(v); };
    f.get = [sub, member](const Scenario& s) { return static_cast<double>(s.*sub.*member); };
    return f;
}

} // namespace detail

inline const std::vector<NumberField>& number_fields() {
    using detail::field;
    using P = EpidemicParams;
    static const std::vector<NumberField> fields = {
        field("params", "beta_v", true, &Scenario::params, &P::beta_v),
        field("params", "beta_h", true, &Scenario::params, &P::beta_h),
        field("params", "r_v", false, &Scenario::params, &P::r_v),
        field("params", "d_v", true, &Scenario::params, &P::d_v),
        field("params", "r_h", false, &Scenario::params, &P::r_h),
        field("params", "d_h", true, &Scenario::params, &P::d_h),
        field("params", "gamma_h", true, &Scenario::params, &P::gamma_h),
        field("params", "q", false, &Scenario::params, &P::q),
        field("params", "n_v_star", true, &Scenario::params, &P::n_v_star),
        field("params", "n_h_star", true, &Scenario::params, &P::n_h_star),
        field("params", "dv", true, &Scenario::params, &P::dv),
        field("params", "dh", true, &Scenario::params, &P::dh),
        field("params", "mu", true, &Scenario::params, &P::mu),
        field("init", "h0", true, &Scenario::init, &InitSpec::h0),
        field("init", "amplitude_v", false, &Scenario::init, &InitSpec::amplitude_v),
        field("init", "amplitude_h", false, &Scenario::init, &InitSpec::amplitude_h),
        field("solver", "n_xi", false, &Scenario::solver, &SolverConfig::n_xi),
        field("solver", "dt_init", false, &Scenario::solver, &SolverConfig::dt_init),
        field("solver", "cfl_safety", false, &Scenario::solver, &SolverConfig::cfl_safety),
        field("solver", "t_max", false, &Scenario::solver, &SolverConfig::t_max),
        field("solver", "record_every", false, &Scenario::solver, &SolverConfig::record_every),
        field("classify", "sup_fraction", false, &Scenario::classify, &ClassifyConfig::sup_fraction),
        field("classify", "width_growth", false, &Scenario::classify, &ClassifyConfig::width_growth),
        field("classify", "window_fraction", false, &Scenario::classify,
              &ClassifyConfig::window_fraction),
        field("classify", "spread_factor", false, &Scenario::classify,
              &ClassifyConfig::spread_factor),
        field("classify", "proximity", false, &Scenario::classify, &ClassifyConfig::proximity),
    };
    return fields;
}

inline const NumberField* find_number_field(std::string_view path) {
    for (const auto& f : number_fields())
        if (f.path() == path) return &f;
    return nullptr;
}

/// Sets a numeric field; integral fields must receive whole numbers.
inline void set_number(Scenario& s, std::string_view path, double value) {
    const auto* f = find_number_field(path);
    if (!f) throw ScenarioError("unknown parameter path '" + std::string(path) + "'");
    if (f->integral && !(std::isfinite(value) && value == std::floor(value) &&
                         std::abs(value) < 2147483647.0))
        throw ValidationError(f->key, "must be an integer");
    f->set(s, value);
}

// ---------------------------------------------------------------------------
// Initial data and validation

inline InitialData make_initial_data(const Scenario& s) {
    const auto& in = s.init;
    const int n = s.solver.n_xi;
    InitialData d;
    d.h0 = in.h0;
    switch (in.family) {
    case ProfileFamily::cosine:
        d.v_i0 = cosine_profile(in.h0, n, in.amplitude_v);
        d.h_i0 = cosine_profile(in.h0, n, in.amplitude_h);
        break;
    case ProfileFamily::bump:
        d.v_i0 = bump_profile(in.h0, n, in.amplitude_v);
        d.h_i0 = bump_profile(in.h0, n, in.amplitude_h);
        break;
    case ProfileFamily::tabulated:
        d.v_i0 = tabulated_profile(in.h0, n, in.x, in.v_i);
        d.h_i0 = tabulated_profile(in.h0, n, in.x, in.h_i);
        break;
    }
    return d;
}

/// Throws ValidationError naming the first violated invariant.
inline void validate_scenario(const Scenario& s) {
    validate_params(s.params, ModelMode::simplified);
    validate_config(s.solver);
    const auto& in = s.init;
    if (!(std::isfinite(in.h0) && in.h0 > 0.0)) throw ValidationError("h0", "must be > 0");
    if (in.family != ProfileFamily::tabulated) {
        if (!(std::isfinite(in.amplitude_v) && in.amplitude_v >= 0.0 &&
              in.amplitude_v <= s.params.n_v_star))
            throw ValidationError("amplitude_v", "must lie in [0, n_v_star]");
        if (!(std::isfinite(in.amplitude_h) && in.amplitude_h >= 0.0 &&
              in.amplitude_h <= s.params.n_h_star))
            throw ValidationError("amplitude_h", "must lie in [0, n_h_star]");
    } else {
        if (in.x.size() != in.v_i.size() || in.x.size() != in.h_i.size())
            throw ValidationError("tabulated", "x, v_i and h_i must have equal lengths");
        if (in.x.size() < 2) throw ValidationError("tabulated", "needs at least two points");
        if (in.x.front() < -in.h0 || in.x.back() > in.h0)
            throw ValidationError("tabulated", "x must lie in [-h0, h0]");
    }
    const auto& c = s.classify;
    auto pos = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!pos(c.sup_fraction)) throw ValidationError("sup_fraction", "must be > 0");
    if (!pos(c.width_growth)) throw ValidationError("width_growth", "must be > 0");
    if (!(pos(c.window_fraction) && c.window_fraction <= 1.0))
        throw ValidationError("window_fraction", "must lie in (0, 1]");
    if (!(pos(c.spread_factor) && c.spread_factor > 1.0))
        throw ValidationError("spread_factor", "must be > 1");
    if (!(pos(c.proximity) && c.proximity < 1.0))
        throw ValidationError("proximity", "must lie in (0, 1)");
    for (std::size_t i = 0; i < s.analyses.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (s.analyses[i] == s.analyses[j])
                throw ValidationError("analyses", std::string("duplicate entry ") +
                                                      to_string(s.analyses[i]));
    const auto d = make_initial_data(s);
    const WnvFrontModel model{s.params};
    initial_state<2>(d.h0, {d.v_i0, d.h_i0}, model.upper_bound(), kHost, nullptr);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline ScenarioError error_at(const YAML::Node& n, const std::string& msg) {
    const auto m = n.Mark();
    if (m.is_null()) return ScenarioError(msg);
    return ScenarioError(msg, m.line + 1, m.column + 1);
}

inline double as_double(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) throw error_at(n, what + ": expected a number");
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        throw error_at(n, what + ": expected a number, got '" + n.Scalar() + "'");
    }
}

inline std::vector<double> as_doubles(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence()) throw error_at(n, what + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& e : n) out.push_back(as_double(e, what));
    return out;
}

inline std::string as_string(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) throw error_at(n, what + ": expected a string");
    return n.Scalar();
}

inline void require_map(const YAML::Node& n, const std::string& what) {
    if (!n.IsMap()) throw error_at(n, what + ": expected a mapping");
}

inline YAML::Node load(std::string_view text) {
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ScenarioError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
}

/// Reads the numeric keys of one section; other keys must be in `extra`.
inline void read_section(Scenario& s, const YAML::Node& node, const std::string& section,
                         const std::vector<std::string>& extra) {
    require_map(node, section);
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        const auto* f = find_number_field(section + "." + key);
        if (f) {
            const double v = as_double(kv.second, section + "." + key);
            try {
                set_number(s, f->path(), v);
            } catch (const ValidationError& e) {
                throw error_at(kv.second, e.what());
            }
        } else if (std::find(extra.begin(), extra.end(), key) == extra.end()) {
            throw error_at(kv.first, "unknown key '" + key + "' in section '" + section + "'");
        }
    }
    for (const auto& f : number_fields())
        if (f.section == section && f.required && !node[f.key])
            throw error_at(node, "missing required key '" + f.path() + "'");
}

inline Analysis parse_analysis(const YAML::Node& n) {
    const auto name = as_string(n, "analyses");
    for (auto a : {Analysis::thresholds, Analysis::classify, Analysis::speed, Analysis::bounds,
                   Analysis::upper_audit, Analysis::lower_audit, Analysis::wavespeed})
        if (name == to_string(a)) return a;
    throw error_at(n, "unknown analysis '" + name + "'");
}

inline Scenario parse_root(const YAML::Node& root, bool allow_sweep) {
    if (!root.IsMap()) throw error_at(root, "scenario must be a mapping of sections");
    Scenario s;
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (key != "params" && key != "init" && key != "solver" && key != "classify" &&
            key != "analyses" && !(allow_sweep && key == "sweep"))
            throw error_at(kv.first, "unknown section '" + key + "'");
    }
    if (!root["params"]) throw error_at(root, "missing section 'params'");
    if (!root["init"]) throw error_at(root, "missing section 'init'");

    const auto params = root["params"];
    read_section(s, params, "params", {"k_v"});
    if (!params["r_v"]) s.params.r_v = s.params.d_v;
    if (!params["r_h"]) s.params.r_h = s.params.d_h;
    if (params["k_v"]) s.params.k_v = as_double(params["k_v"], "params.k_v");

    const auto init = root["init"];
    read_section(s, init, "init", {"family", "x", "v_i", "h_i"});
    if (init["family"]) {
        const auto fam = as_string(init["family"], "init.family");
        if (fam == "cosine")
            s.init.family = ProfileFamily::cosine;
        else if (fam == "bump")
            s.init.family = ProfileFamily::bump;
        else if (fam == "tabulated")
            s.init.family = ProfileFamily::tabulated;
        else
            throw error_at(init["family"], "init.family: expected cosine, bump or tabulated");
    }
    if (s.init.family == ProfileFamily::tabulated) {
        for (const char* k : {"amplitude_v", "amplitude_h"})
            if (init[k])
                throw error_at(init[k], std::string("init.") + k + " does not apply to tabulated data");
        for (const char* k : {"x", "v_i", "h_i"})
            if (!init[k]) throw error_at(init, std::string("missing required key 'init.") + k + "'");
        s.init.x = as_doubles(init["x"], "init.x");
        s.init.v_i = as_doubles(init["v_i"], "init.v_i");
        s.init.h_i = as_doubles(init["h_i"], "init.h_i");
    } else {
        for (const char* k : {"x", "v_i", "h_i"})
            if (init[k])
                throw error_at(init[k], std::string("init.") + k + " applies to tabulated data only");
        if (!init["amplitude_h"]) throw error_at(init, "missing required key 'init.amplitude_h'");
    }

    if (root["solver"]) read_section(s, root["solver"], "solver", {});
    if (root["classify"]) read_section(s, root["classify"], "classify", {});
    if (root["analyses"]) {
        const auto an = root["analyses"];
        if (!an.IsSequence()) throw error_at(an, "analyses: expected a list");
        s.analyses.clear();
        for (const auto& a : an) s.analyses.push_back(parse_analysis(a));
    }
    validate_scenario(s);
    return s;
}

} // namespace detail

/// Parses and validates scenario text.
///
/// Throws ScenarioError for malformed text (with line and column) and
/// ValidationError naming the field for values that break an invariant.
inline Scenario parse_scenario(std::string_view text) {
    return detail::parse_root(detail::load(text), false);
}

/// A scenario with an extra `sweep:` section holding `workers` and `axes`,
/// each axis a mapping with `path` and `values`.
inline SweepSpec parse_sweep(std::string_view text) {
    const auto root = detail::load(text);
    SweepSpec spec;
    spec.base = detail::parse_root(root, true);
    const auto sw = root["sweep"];
    if (!sw) throw detail::error_at(root, "missing section 'sweep'");
    detail::require_map(sw, "sweep");
    for (const auto& kv : sw) {
        const auto key = kv.first.as<std::string>();
        if (key != "workers" && key != "axes")
            throw detail::error_at(kv.first, "unknown key '" + key + "' in section 'sweep'");
    }
    if (sw["workers"]) {
        const double w = detail::as_double(sw["workers"], "sweep.workers");
        if (!(w >= 1.0 && w <= 256.0 && w == std::floor(w)))
            throw ValidationError("workers", "must be an integer in [1, 256]");
        spec.workers = static_cast<int>(w);
    }
    const auto axes = sw["axes"];
    if (!axes || !axes.IsSequence() || axes.size() == 0)
        throw ValidationError("axes", "sweep needs at least one axis");
    for (const auto& a : axes) {
        detail::require_map(a, "sweep.axes");
        for (const auto& kv : a) {
            const auto key = kv.first.as<std::string>();
            if (key != "path" && key != "values")
                throw detail::error_at(kv.first, "unknown key '" + key + "' in sweep axis");
        }
        if (!a["path"] || !a["values"])
            throw detail::error_at(a, "sweep axis needs 'path' and 'values'");
        SweepAxis ax;
        ax.path = detail::as_string(a["path"], "sweep.axes.path");
        if (!find_number_field(ax.path))
            throw detail::error_at(a["path"], "unknown parameter path '" + ax.path + "'");
        ax.values = detail::as_doubles(a["values"], "sweep.axes.values");
        if (ax.values.empty()) throw detail::error_at(a["values"], "axis values must be non-empty");
        spec.axes.push_back(std::move(ax));
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::string list(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
    return out + "]";
}

} // namespace detail

/// Canonical text for a scenario. Every field is written, so parsing the
/// result reproduces the scenario exactly.
inline std::string serialize(const Scenario& s) {
    std::ostringstream os;
    std::string current;
    for (const auto& f : number_fields()) {
        if (f.section != current) {
            if (current == "init") {
                if (s.init.family == ProfileFamily::tabulated) {
                    os << "  x: " << detail::list(s.init.x) << "\n";
                    os << "  v_i: " << detail::list(s.init.v_i) << "\n";
                    os << "  h_i: " << detail::list(s.init.h_i) << "\n";
                }
            }
            current = f.section;
            os << current << ":\n";
            if (current == "init") os << "  family: " << to_string(s.init.family) << "\n";
        }
        if (f.section == "init" && s.init.family == ProfileFamily::tabulated &&
            f.key.starts_with("amplitude"))
            continue;
        os << "  " << f.key << ": " << format_double(f.get(s)) << "\n";
        if (f.path() == "params.mu" && s.params.k_v)
            os << "  k_v: " << format_double(*s.params.k_v) << "\n";
    }
    os << "analyses: [";
    for (std::size_t i = 0; i < s.analyses.size(); ++i)
        os << (i ? ", " : "") << to_string(s.analyses[i]);
    os << "]\n";
    return os.str();
}

} // namespace wnv::io
