#pragma once

// Cartesian parameter sweeps over a base scenario.

#include <atomic>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

#include "wnv/io/format.hpp"
#include "wnv/io/run.hpp"
#include "wnv/io/scenario.hpp"

namespace wnv::io {

struct SweepRow {
    std::vector<double> values; ///< one per axis
    double r0 = std::numeric_limits<double>::quiet_NaN();
    double r0f_initial = std::numeric_limits<double>::quiet_NaN();
    std::string verdict = "error";
    double k0 = std::numeric_limits<double>::quiet_NaN(); ///< mean of the two front slopes
    std::string error;
};

/// Total number of runs, the product of the axis lengths.
inline std::size_t sweep_size(const SweepSpec& spec) {
    if (spec.axes.empty()) throw ValidationError("axes", "sweep needs at least one axis");
    std::size_t n = 1;
    for (const auto& a : spec.axes) n *= a.values.size();
    return n;
}

/// Axis values of run `index`; the last axis varies fastest.
inline std::vector<double> sweep_point(const SweepSpec& spec, std::size_t index) {
    std::vector<double> v(spec.axes.size());
    for (std::size_t k = spec.axes.size(); k-- > 0;) {
        const auto& vals = spec.axes[k].values;
        v[k] = vals[index % vals.size()];
        index /= vals.size();
    }
    return v;
}

inline SweepRow run_sweep_point(const SweepSpec& spec, std::size_t index, const RunOptions& opt) {
    SweepRow row;
    row.values = sweep_point(spec, index);
    try {
        Scenario sc = spec.base;
        for (std::size_t k = 0; k < spec.axes.size(); ++k)
            set_number(sc, spec.axes[k].path, row.values[k]);
        validate_scenario(sc);
        if (!sc.wants(Analysis::classify)) sc.analyses.push_back(Analysis::classify);
        if (!sc.wants(Analysis::speed)) sc.analyses.push_back(Analysis::speed);
        // Traveling-wave work is per-scenario, not per-row.
        std::erase(sc.analyses, Analysis::wavespeed);
        const auto res = compute_scenario(sc, opt);
        row.r0 = res.report["r0"].get<double>();
        row.r0f_initial = res.report["r0f_initial"].get<double>();
        if (!res.error.empty()) {
            row.error = res.error;
        } else {
            row.verdict = to_string(res.classification.verdict);
            if (res.speed) row.k0 = 0.5 * (res.speed->k0_right + res.speed->k0_left);
        }
    } catch (const std::exception& e) {
        row.verdict = "error";
        row.error = e.what();
    }
    return row;
}

/// Runs every grid point on `workers` threads. Rows come back in
/// lexicographic order of axis indices regardless of the worker count, and a
/// failing run only marks its own row.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers,
                                       const RunOptions& opt = {}) {
    const std::size_t n = sweep_size(spec);
    if (workers < 1) throw ValidationError("workers", "must be >= 1");
    std::vector<SweepRow> rows(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) rows[i] = run_sweep_point(spec, i, opt);
    };
    const std::size_t extra = std::min<std::size_t>(std::size_t(workers), n) - 1;
    std::vector<std::thread> pool;
    pool.reserve(extra);
    for (std::size_t w = 0; w < extra; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

/// Columns: one per axis path, then r0, r0f_initial, verdict, k0, error.
inline std::string sweep_to_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
    std::vector<std::string> header;
    for (const auto& a : spec.axes) header.push_back(a.path);
    for (const char* c : {"r0", "r0f_initial", "verdict", "k0", "error"}) header.emplace_back(c);
    std::string out = csv_row(header);
    for (const auto& r : rows) {
        std::vector<std::string> f;
        for (double v : r.values) f.push_back(format_double(v));
        f.push_back(format_double(r.r0));
        f.push_back(format_double(r.r0f_initial));
        f.push_back(r.verdict);
        f.push_back(format_double(r.k0));
        f.push_back(r.error);
        out += csv_row(f);
    }
    return out;
}

} // namespace wnv::io
