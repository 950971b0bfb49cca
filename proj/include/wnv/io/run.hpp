#pragma once

// Runs a scenario end to end and writes trace.csv and report.json.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wnv/analysis.hpp"
#include "wnv/front_solver.hpp"
#include "wnv/io/format.hpp"
#include "wnv/io/scenario.hpp"
#include "wnv/thresholds.hpp"
#include "wnv/wavespeed.hpp"

namespace wnv::io {

using Json = nlohmann::ordered_json;

inline constexpr int kExitDecided = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUndecided = 2;

inline constexpr const char* kTraceColumns[] = {"t",      "g",      "h",      "width",
                                                "sup_vi", "sup_hi", "int_vi", "int_hi",
                                                "r0f",    "gdot",   "hdot"};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::uint64_t seed = 0; ///< sample points of the randomized audit checks
    int audit_samples = 64;
};

struct ScenarioResult {
    int exit_code = kExitFailure;
    Json report;
    std::string trace_csv; ///< empty when the run failed before integrating
    std::string error;
    Classification classification;
    std::optional<SpeedEstimate> speed;
};

inline Json params_json(const EpidemicParams& p) {
    Json j;
    j["beta_v"] = p.beta_v;
    j["beta_h"] = p.beta_h;
    j["r_v"] = p.r_v;
    j["d_v"] = p.d_v;
    j["r_h"] = p.r_h;
    j["d_h"] = p.d_h;
    j["gamma_h"] = p.gamma_h;
    j["q"] = p.q;
    j["n_v_star"] = p.n_v_star;
    j["n_h_star"] = p.n_h_star;
    j["dv"] = p.dv;
    j["dh"] = p.dh;
    j["mu"] = p.mu;
    j["k_v"] = p.k_v ? Json(*p.k_v) : Json(nullptr);
    return j;
}

inline Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline std::string trace_to_csv(const SimulationTrace& trace) {
    std::string out;
    out += csv_row({std::begin(kTraceColumns), std::end(kTraceColumns)});
    for (const auto& s : trace.samples) {
        out += csv_row({format_double(s.t), format_double(s.g), format_double(s.h),
                        format_double(s.width()), format_double(s.sup[kVector]),
                        format_double(s.sup[kHost]), format_double(s.integral[kVector]),
                        format_double(s.integral[kHost]), format_double(s.r0f),
                        format_double(s.gdot), format_double(s.hdot)});
    }
    return out;
}

/// Computes everything a scenario asks for, in memory.
///
/// Report keys, in order: r0, r0d_initial, r0f_initial, verdict, t_decided,
/// k0_right, k0_left, c_min, bounds_ok, params, then the supplementary
/// evidence, k0_selection, upper_audit, lower_audit, warnings and steps.
inline ScenarioResult compute_scenario(const Scenario& sc, const RunOptions& opt = {}) {
    ScenarioResult res;
    const auto& p = sc.params;
    const double h0 = sc.init.h0;
    const auto omega = DomainInterval::symmetric(h0);
    auto& rep = res.report;
    const auto eig = r0_dirichlet(p, omega);
    const double r0 = reproduction_number_r0(p);
    rep["r0"] = r0;
    rep["r0d_initial"] = eig.r0d;
    rep["r0f_initial"] = r0_free(p, -h0, h0);
    rep["verdict"] = nullptr;
    rep["t_decided"] = nullptr;
    rep["k0_right"] = nullptr;
    rep["k0_left"] = nullptr;
    rep["c_min"] = nullptr;
    rep["bounds_ok"] = nullptr;
    rep["params"] = params_json(p);
    rep["evidence"] = nullptr;
    rep["k0_selection"] = nullptr;
    rep["upper_audit"] = nullptr;
    rep["lower_audit"] = nullptr;
    rep["warnings"] = Json::array();
    rep["steps"] = nullptr;

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    if (sc.wants(Analysis::wavespeed) && r0 > 1.0) {
        try {
            rep["c_min"] = c_min(p).c_min;
            Json sel;
            sel["value"] = k0_wnv(p);
            sel["rule"] = "mu dh H_i'(0) = k0";
            sel["status"] = "extension: selection rule not established for the coupled system";
            rep["k0_selection"] = sel;
        } catch (const std::exception& e) {
            rep["warnings"].push_back(std::string("wavespeed: ") + e.what());
        }
    }

    const auto init = make_initial_data(sc);
    std::optional<UpperSolution> upper;
    UpperDominance upper_dom;
    if (sc.wants(Analysis::upper_audit)) {
        if (eig.r0d < 1.0) {
            upper = build_upper_solution(p, h0);
        } else {
            Json j;
            j["applicable"] = false;
            j["reason"] = "requires R0F(0) < 1";
            rep["upper_audit"] = j;
        }
    }
    std::optional<LowerSolution> lower;
    LowerDominance lower_dom;
    if (sc.wants(Analysis::lower_audit)) {
        if (eig.r0d > 1.0) {
            lower = build_lower_solution(p, h0, &init);
        } else {
            Json j;
            j["applicable"] = false;
            j["reason"] = "requires R0F(0) > 1";
            rep["lower_audit"] = j;
        }
    }
    StateObserver<2> watch_u, watch_l;
    if (upper) watch_u = watch_upper(*upper, upper_dom);
    if (lower) watch_l = watch_lower(*lower, lower_dom);
    StateObserver<2> observer;
    if (watch_u || watch_l)
        observer = [&](const FrontState& s) {
            if (watch_u) watch_u(s);
            if (watch_l) watch_l(s);
        };

    SimulationTrace trace;
    try {
        trace = run(p, init, sc.solver, observer);
    } catch (const SolverError& e) {
        res.error = e.what();
        rep["evidence"] = std::string("solver failure: ") + e.what();
        res.exit_code = kExitFailure;
        return res;
    }
    res.trace_csv = trace_to_csv(trace);
    for (const auto& w : trace.warnings) rep["warnings"].push_back(w);
    {
        Json st;
        st["accepted"] = trace.accepted_steps;
        st["rejected"] = trace.rejected_steps;
        rep["steps"] = st;
    }

    if (sc.wants(Analysis::bounds)) {
        const auto b = audit_front_invariants(trace, front_speed_bound(p, h0, init.h_i0));
        Json j;
        j["box"] = b.box;
        j["monotone"] = b.monotone;
        j["symmetry"] = b.symmetry;
        j["speed_bound"] = b.speed_bound;
        j["c1"] = b.c1;
        j["max_front_speed"] = b.max_speed;
        j["all"] = b.all();
        rep["bounds_ok"] = j;
    }

    if (upper) {
        std::vector<std::pair<double, double>> extra;
        for (int i = 0; i < opt.audit_samples; ++i)
            extra.emplace_back(unit(rng), 0.5 * (1.0 + unit(rng)) * sc.solver.t_max);
        const auto a = audit_upper_solution(*upper, sc.solver.t_max, 101, 101, extra);
        Json j;
        j["applicable"] = true;
        j["delta"] = upper->delta;
        j["epsilon"] = upper->epsilon;
        j["inequalities_ok"] = a.passes();
        j["max_violation_v"] = a.max_violation_v;
        j["max_violation_h"] = a.max_violation_h;
        j["front_violation"] = a.front_violation;
        j["dominates_run"] = upper_dom.holds();
        j["max_excess_v"] = upper_dom.max_excess_v;
        j["max_excess_h"] = upper_dom.max_excess_h;
        j["max_front_excess"] = upper_dom.max_front_excess;
        rep["upper_audit"] = j;
    }
    if (lower) {
        std::vector<double> extra;
        for (int i = 0; i < opt.audit_samples; ++i) extra.push_back(unit(rng));
        const auto a = audit_lower_solution(*lower, 101, extra);
        Json j;
        j["applicable"] = true;
        j["delta_small"] = lower->delta_small;
        j["inequalities_ok"] = a.passes();
        j["max_violation_v"] = a.max_violation_v;
        j["max_violation_h"] = a.max_violation_h;
        j["never_crossed"] = lower_dom.holds();
        j["max_deficit_v"] = lower_dom.max_deficit_v;
        j["max_deficit_h"] = lower_dom.max_deficit_h;
        rep["lower_audit"] = j;
    }

    res.exit_code = kExitDecided;
    if (sc.wants(Analysis::classify)) {
        res.classification = classify(trace, p, sc.classify);
        rep["verdict"] = to_string(res.classification.verdict);
        rep["t_decided"] = number_or_null(res.classification.t_decided);
        rep["evidence"] = res.classification.evidence;
        if (res.classification.verdict == Verdict::undecided) res.exit_code = kExitUndecided;
        if (sc.wants(Analysis::speed) && res.classification.verdict == Verdict::spreading) {
            res.speed = estimate_speed(trace, res.classification);
            rep["k0_right"] = res.speed->k0_right;
            rep["k0_left"] = res.speed->k0_left;
        }
    }
    return res;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << content;
    f.close();
    if (!f) throw IoError("failed writing " + path.string());
}

inline void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// Writes trace.csv (when the run integrated) and report.json into `out_dir`
/// and returns the exit code: 0 decided, 2 undecided, 1 failure.
inline int run_scenario(const Scenario& sc, const std::filesystem::path& out_dir,
                        const RunOptions& opt = {}) {
    ensure_dir(out_dir);
    const auto res = compute_scenario(sc, opt);
    if (!res.trace_csv.empty()) write_file(out_dir / "trace.csv", res.trace_csv);
    write_file(out_dir / "report.json", dump(res.report));
    return res.exit_code;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace wnv::io
