// wnvlab: thresholds, free-boundary runs, classification, wave speeds and sweeps
// for the vector-host free-boundary model.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wnv/io/run.hpp"
#include "wnv/io/scenario.hpp"
#include "wnv/io/sweep.hpp"
#include "wnv/thresholds.hpp"
#include "wnv/wavespeed.hpp"

namespace {

using namespace wnv;
using namespace wnv::io;

struct Common {
    std::string scenario;
    std::string out = ".";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--scenario", c.scenario, "scenario file (YAML)")->required()->check(CLI::ExistingFile);
    app->add_option("--out", c.out, "output directory")->capture_default_str();
    app->add_option("--seed", c.seed, "seed for randomized audit sample points")->capture_default_str();
}

int cmd_thresholds(const Common& c, int grid_n) {
    const auto sc = parse_scenario(read_file(c.scenario));
    const auto& p = sc.params;
    const auto omega = DomainInterval::symmetric(sc.init.h0);
    const auto rep = threshold_report(p, omega, {{0.0, -sc.init.h0, sc.init.h0}});
    const auto eig = r0_dirichlet(p, omega);
    Json j;
    j["r0"] = rep.r0;
    j["r0n"] = rep.r0n;
    j["r0d_initial"] = rep.r0d;
    j["r0d_oracle"] = r0_dirichlet_oracle(p, omega, grid_n);
    j["oracle_grid_n"] = grid_n;
    j["r0f_initial"] = rep.r0f_at.front().second;
    j["lambda_star"] = eig.lambda_star;
    j["lambda0"] = eig.lambda0;
    j["delta0"] = eig.delta0;
    const auto eq = endemic_equilibrium(p);
    if (eq.exists) {
        j["endemic"] = {{"v_i_star", eq.v_i_star}, {"h_i_star", eq.h_i_star}};
    } else {
        j["endemic"] = nullptr;
    }
    ensure_dir(c.out);
    write_file(std::filesystem::path(c.out) / "thresholds.json", dump(j));
    std::cout << "R0 = " << format_double(rep.r0) << ", R0F(0) = " << format_double(rep.r0d) << "\n";
    return kExitDecided;
}

int cmd_simulate(const Common& c) {
    auto sc = parse_scenario(read_file(c.scenario));
    std::erase(sc.analyses, Analysis::classify);
    std::erase(sc.analyses, Analysis::speed);
    const int code = run_scenario(sc, c.out, {c.seed});
    if (code == kExitFailure) {
        std::cerr << "simulation failed; see " << (std::filesystem::path(c.out) / "report.json").string()
                  << "\n";
        return code;
    }
    std::cout << "wrote " << (std::filesystem::path(c.out) / "trace.csv").string() << "\n";
    return kExitDecided;
}

int cmd_classify(const Common& c) {
    auto sc = parse_scenario(read_file(c.scenario));
    for (auto a : {Analysis::classify, Analysis::speed})
        if (!sc.wants(a)) sc.analyses.push_back(a);
    ensure_dir(c.out);
    const auto res = compute_scenario(sc, {c.seed});
    const std::filesystem::path out(c.out);
    if (!res.trace_csv.empty()) write_file(out / "trace.csv", res.trace_csv);
    write_file(out / "report.json", dump(res.report));
    if (res.exit_code == kExitFailure) {
        std::cerr << "solver failure: " << res.error << "\n";
    } else {
        std::cout << "verdict: " << to_string(res.classification.verdict) << "\n";
    }
    return res.exit_code;
}

int cmd_wavespeed(const Common& c) {
    const auto sc = parse_scenario(read_file(c.scenario));
    const auto& p = sc.params;
    const auto w = c_min(p);
    const double k0 = k0_wnv(p);
    const auto prof = semi_wavefront_wnv(p, k0);
    Json j;
    j["c_min"] = w.c_min;
    j["s_star"] = w.s_star;
    j["k0_selection"] = {{"value", k0},
                         {"rule", "mu dh H_i'(0) = k0"},
                         {"status", "extension: selection rule not established for the coupled system"}};
    j["profile_length"] = prof.grid.back();
    j["profile_residual"] = prof.residual;
    ensure_dir(c.out);
    const std::filesystem::path out(c.out);
    write_file(out / "wavespeed.json", dump(j));
    std::string csv = csv_row({"x", "v_i", "h_i"});
    for (std::size_t i = 0; i < prof.grid.size(); ++i)
        csv += csv_row({format_double(prof.grid[i]), format_double(prof.v_profile[i]),
                        format_double(prof.h_profile[i])});
    write_file(out / "semiwave.csv", csv);
    std::cout << "c_min = " << format_double(w.c_min) << ", k0 (extension) = " << format_double(k0)
              << "\n";
    return kExitDecided;
}

int cmd_sweep(const Common& c, int workers) {
    auto spec = parse_sweep(read_file(c.scenario));
    if (workers > 0) spec.workers = workers;
    const auto rows = run_sweep(spec, spec.workers, {c.seed});
    ensure_dir(c.out);
    const auto path = std::filesystem::path(c.out) / "summary.csv";
    write_file(path, sweep_to_csv(spec, rows));
    std::size_t failed = 0;
    for (const auto& r : rows) failed += !r.error.empty();
    std::cout << "wrote " << path.string() << " (" << rows.size() << " runs, " << failed
              << " failed)\n";
    return kExitDecided;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free-boundary West Nile virus model lab"};
    app.require_subcommand(1);

    Common thr, sim, cls, wav, swp;
    int grid_n = 2000;
    int workers = 0;
    auto* t = app.add_subcommand("thresholds", "R0, R0D/R0F on the initial interval, eigen oracle");
    add_common(t, thr);
    t->add_option("--grid", grid_n, "cells for the eigenvalue oracle")->check(CLI::Range(64, 1000000));
    auto* s = app.add_subcommand("simulate", "integrate the free-boundary system, write trace.csv");
    add_common(s, sim);
    auto* k = app.add_subcommand("classify", "integrate and classify spreading vs vanishing");
    add_common(k, cls);
    auto* w = app.add_subcommand("wavespeed", "c_min and the semi-wavefront speed candidate");
    add_common(w, wav);
    auto* sw = app.add_subcommand("sweep", "Cartesian parameter sweep, write summary.csv");
    add_common(sw, swp);
    sw->add_option("--workers", workers, "worker threads (overrides the file)")->check(CLI::Range(1, 256));

    CLI11_PARSE(app, argc, argv);

    try {
        if (t->parsed()) return cmd_thresholds(thr, grid_n);
        if (s->parsed()) return cmd_simulate(sim);
        if (k->parsed()) return cmd_classify(cls);
        if (w->parsed()) return cmd_wavespeed(wav);
        if (sw->parsed()) return cmd_sweep(swp, workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
