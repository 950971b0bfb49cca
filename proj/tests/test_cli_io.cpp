#include <catch_amalgamated.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include "wnv/io/format.hpp"
#include "wnv/io/run.hpp"
#include "wnv/io/scenario.hpp"
#include "wnv/io/sweep.hpp"

using namespace wnv;
using namespace wnv::io;

namespace {

const char* kS2 = R"(params:
  beta_v: 0.1
  beta_h: 0.1
  d_v: 0.2
  d_h: 0.1
  gamma_h: 0.1
  n_v_star: 1
  n_h_star: 1
  dv: 0.01
  dh: 1
  mu: 1
init:
  h0: 2
  amplitude_h: 0.5
)";

const char* kS1 = R"(params:
  beta_v: 0.5
  beta_h: 0.5
  d_v: 0.1
  d_h: 0.05
  gamma_h: 0.05
  n_v_star: 2
  n_h_star: 1
  dv: 0.01
  dh: 1
  mu: 1
init:
  h0: 2
  amplitude_v: 0.1
  amplitude_h: 0.1
solver:
  n_xi: 201
  t_max: 60
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

std::filesystem::path temp_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / ("wnv_test_" + name);
    std::filesystem::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("numbers print as shortest round-trip decimals", "[cli_io]") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(1e-7) == "1e-07");
    CHECK(format_double(std::nan("")) == "nan");
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = std::ldexp(std::uniform_real_distribution<double>(-1, 1)(rng), int(rng() % 200) - 100);
        const auto s = format_double(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
    }
}

TEST_CASE("CSV fields are quoted when needed", "[cli_io]") {
    CHECK(csv_row({"a", "b,c", "say \"hi\""}) == "a,\"b,c\",\"say \"\"hi\"\"\"\n");
}

TEST_CASE("minimal scenario fills defaults", "[cli_io]") {
    const auto s = parse_scenario(kS2);
    CHECK(s.params.r_v == 0.2);
    CHECK(s.params.r_h == 0.1);
    CHECK(s.params.q == 0.0);
    CHECK_FALSE(s.params.k_v);
    CHECK(s.init.family == ProfileFamily::cosine);
    CHECK(s.init.amplitude_v == 0.0);
    CHECK(s.solver == SolverConfig{});
    CHECK(s.classify == ClassifyConfig{});
    CHECK(s.wants(Analysis::classify));
    CHECK_FALSE(s.wants(Analysis::upper_audit));
}

TEST_CASE("out-of-range q is a validation error naming q", "[cli_io]") {
    const auto text = replace(kS2, "  mu: 1\n", "  mu: 1\n  q: 1.5\n");
    try {
        parse_scenario(text);
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "q");
    }
}

TEST_CASE("unknown keys and bad syntax report positions", "[cli_io]") {
    const auto unknown = replace(kS2, "  mu: 1\n", "  mu: 1\n  muu: 2\n");
    try {
        parse_scenario(unknown);
        FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(e.line() == 12);
        CHECK(e.column() == 3);
        CHECK(std::string(e.what()).find("muu") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_scenario(replace(kS2, "init:", "extra: 1\ninit:")), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(replace(kS2, "beta_v: 0.1", "beta_v: fast")), ScenarioError);
    try {
        parse_scenario("params: [1, 2\n");
        FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(e.line() >= 1);
    }
    CHECK_THROWS_AS(parse_scenario(replace(kS2, "  amplitude_h: 0.5\n", "")), ScenarioError);
}

TEST_CASE("serialize then parse is the identity", "[cli_io]") {
    for (const char* text : {kS1, kS2}) {
        const auto s = parse_scenario(text);
        const auto again = parse_scenario(serialize(s));
        CHECK(again == s);
        CHECK(serialize(again) == serialize(s));
    }
    const auto tab = parse_scenario(replace(kS2, "  amplitude_h: 0.5\n",
                                            "  family: tabulated\n  x: [-2, 0, 2]\n"
                                            "  v_i: [0, 0.1, 0]\n  h_i: [0, 0.3, 0]\n"));
    CHECK(tab.init.family == ProfileFamily::tabulated);
    CHECK(parse_scenario(serialize(tab)) == tab);
}

TEST_CASE("tabulated data must fit the interval", "[cli_io]") {
    CHECK_THROWS_AS(parse_scenario(replace(kS2, "  amplitude_h: 0.5\n",
                                           "  family: tabulated\n  x: [-3, 0, 2]\n"
                                           "  v_i: [0, 0.1, 0]\n  h_i: [0, 0.3, 0]\n")),
                    ValidationError);
}

TEST_CASE("run_scenario writes trace and report", "[cli_io]") {
    const auto dir = temp_dir("s2");
    const int code = run_scenario(parse_scenario(kS2), dir);
    CHECK(code == kExitDecided);
    const auto report = Json::parse(read_file(dir / "report.json"));
    CHECK(report["verdict"] == "vanishing");
    const std::vector<std::string> keys{"r0",       "r0d_initial", "r0f_initial", "verdict",
                                        "t_decided", "k0_right",   "k0_left",     "c_min",
                                        "bounds_ok", "params"};
    std::size_t i = 0;
    for (const auto& [k, v] : report.items()) {
        if (i < keys.size()) CHECK(k == keys[i]);
        ++i;
    }
    std::istringstream csv(read_file(dir / "trace.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,g,h,width,sup_vi,sup_hi,int_vi,int_hi,r0f,gdot,hdot");
    std::filesystem::remove_all(dir);
}

TEST_CASE("spreading scenario reports front speeds", "[cli_io]") {
    const auto res = compute_scenario(parse_scenario(kS1));
    CHECK(res.exit_code == kExitDecided);
    CHECK(res.report["verdict"] == "spreading");
    CHECK(res.report["k0_right"].is_number());
    CHECK(res.report["c_min"].is_number());
    CHECK(res.report["k0_selection"]["status"].get<std::string>().starts_with("extension"));
    CHECK(res.report["bounds_ok"]["all"] == true);
}

TEST_CASE("short horizon exits undecided", "[cli_io]") {
    auto s = parse_scenario(kS2);
    s.solver.t_max = 0.001;
    const auto res = compute_scenario(s);
    CHECK(res.exit_code == kExitUndecided);
    CHECK(res.report["verdict"] == "undecided");
    CHECK(res.report["t_decided"].is_null());
}

TEST_CASE("identical input gives identical bytes", "[cli_io]") {
    const auto s = parse_scenario(kS1);
    const auto a = compute_scenario(s, {42});
    const auto b = compute_scenario(s, {42});
    CHECK(a.trace_csv == b.trace_csv);
    CHECK(dump(a.report) == dump(b.report));
}

TEST_CASE("sweep file parsing", "[cli_io]") {
    const std::string base = kS1;
    CHECK_THROWS_AS(parse_sweep(base + "sweep:\n  axes: []\n"), ValidationError);
    CHECK_THROWS_AS(parse_sweep(base), ScenarioError);
    CHECK_THROWS_AS(parse_sweep(base + "sweep:\n  axes:\n    - path: params.nope\n      values: [1]\n"),
                    ScenarioError);
    const auto spec = parse_sweep(base + "sweep:\n  workers: 3\n  axes:\n"
                                         "    - path: init.h0\n      values: [0.5, 1]\n"
                                         "    - path: params.mu\n      values: [1, 2, 3]\n");
    CHECK(spec.workers == 3);
    CHECK(sweep_size(spec) == 6);
    CHECK(sweep_point(spec, 0) == std::vector<double>{0.5, 1});
    CHECK(sweep_point(spec, 2) == std::vector<double>{0.5, 3});
    CHECK(sweep_point(spec, 3) == std::vector<double>{1, 1});
}

TEST_CASE("R0F(0) column increases with h0", "[cli_io]") {
    auto spec = parse_sweep(std::string(kS1) + "sweep:\n  axes:\n"
                                               "    - path: init.h0\n      values: [0.2, 0.5, 1, 2]\n");
    spec.base.solver.t_max = 5.0;
    const auto rows = run_sweep(spec, 1);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].r0f_initial > rows[i - 1].r0f_initial);
    const auto rows4 = run_sweep(spec, 4);
    CHECK(sweep_to_csv(spec, rows) == sweep_to_csv(spec, rows4));
}

TEST_CASE("failing sweep rows do not stop the sweep", "[cli_io]") {
    auto spec = parse_sweep(std::string(kS1) + "sweep:\n  axes:\n"
                                               "    - path: params.q\n      values: [0, 1.5, 0.2]\n");
    spec.base.solver.t_max = 2.0;
    const auto rows = run_sweep(spec, 2);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].error.empty());
    CHECK(rows[1].verdict == "error");
    CHECK(rows[1].error.find("q") != std::string::npos);
    CHECK(rows[2].error.empty());
}
