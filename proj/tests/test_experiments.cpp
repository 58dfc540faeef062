// Copyright 2026 The QSC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "qsc/bounds.hpp"
#include "qsc/errors.hpp"
#include "qsc/experiments.hpp"

using namespace qsc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qsc_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

const CsvTable* find_table(const ExperimentOutput& out, const std::string& name) {
    for (const auto& t : out.tables) {
        if (t.name == name) {
            return &t;
        }
    }
    return nullptr;
}

json small_bounds() {
    return {{"count", 8}, {"min_passes", 6}, {"protocol", {{"enabled", false}}}};
}

}  // namespace

TEST(Output, FormatNumberRoundTrips) {
    for (double x : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, -1e-300, std::nextafter(1.0, 2.0)}) {
        EXPECT_EQ(std::stod(format_number(x)), x) << format_number(x);
    }
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(INFINITY), "inf");
    EXPECT_EQ(format_number(-INFINITY), "-inf");
}

TEST(Output, CsvLayout) {
    CsvTable t{"demo", {"a", "b"}, {{1.0, 0.5}, {2.0, -3.0}}};
    const json cfg = {{"k", 1}};
    std::istringstream is(render_csv(t, cfg));
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, std::string("# qsc ") + kVersion);
    std::getline(is, line);
    EXPECT_EQ(json::parse(line.substr(std::string("# config ").size())), cfg);
    std::getline(is, line);
    EXPECT_EQ(line, "a,b");
    std::getline(is, line);
    EXPECT_EQ(line, "1,0.5");
    std::getline(is, line);
    EXPECT_EQ(line, "2,-3");
    EXPECT_FALSE(std::getline(is, line));
}

TEST(Output, WriteOutputEmbedsConfig) {
    const auto out = cmd_spectrum({{"sweep", {{"L_min", 1}, {"L_max", 2}}}}, 9);
    const fs::path dir = scratch_dir("write");
    const auto paths = write_output(out, dir.string());
    ASSERT_EQ(paths.size(), 2u);
    std::ifstream f(dir / "spectrum.json");
    const json report = json::parse(f);
    EXPECT_EQ(report.at("command"), "spectrum");
    EXPECT_EQ(report.at("config").at("seed"), 9);
    EXPECT_EQ(report.at("config"), out.config);
    EXPECT_EQ(report.at("exit_code"), 0);
    EXPECT_EQ(report.at("qsc_version"), kVersion);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(cmd_grover({{"nn", 3}}, 1), ConfigError);
    EXPECT_THROW(cmd_grover({{"ensemble", {{"drawz", 3}}}}, 1), ConfigError);
    EXPECT_THROW(cmd_spectrum({{"circuit", {{"random", {{"n", 1}, {"L", 2}, {"seed", 1}}}, {"bogus", 1}}}}, 1),
                 ConfigError);
    EXPECT_THROW(default_config("nope"), ConfigError);
    EXPECT_THROW(run_command("nope", json::object(), 1), ConfigError);
}

TEST(Config, OverlayKeepsDefaults) {
    const json d = {{"a", 1}, {"b", {{"c", 2}, {"d", 3}}}};
    const json r = resolve_config(d, {{"b", {{"d", 7}}}});
    EXPECT_EQ(r, json({{"a", 1}, {"b", {{"c", 2}, {"d", 7}}}}));
    EXPECT_EQ(resolve_config(d, json(nullptr)), d);
}

TEST(Config, CircuitSources) {
    EXPECT_EQ(circuit_from_config({{"identity", {{"n", 2}, {"L", 3}}}}).gates.size(), 3u);
    EXPECT_EQ(circuit_from_config({{"text", "qubits 1\nG X 0\n"}, {"pad", 2}}).gates.size(), 3u);
    EXPECT_EQ(circuit_from_config({{"file", "circuits/bell.txt"}}, QSC_DATA_DIR).n, 2u);
    EXPECT_THROW(circuit_from_config(json::object()), ConfigError);
    EXPECT_THROW(circuit_from_config({{"identity", {{"n", 1}, {"L", 1}}}, {"text", "qubits 1\nG X 0\n"}}),
                 ConfigError);
}

TEST(Analysis, HalfWidthOfTriangle) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (int i = -100; i <= 100; ++i) {
        xs.push_back(0.01 * i + 0.3);
        ys.push_back(1.0 - std::abs(0.01 * i));
    }
    double peak = 0.0;
    EXPECT_NEAR(half_width(xs, ys, &peak), 0.5, 1e-12);
    EXPECT_NEAR(peak, 0.3, 1e-12);
}

TEST(Analysis, HalfWidthOfGaussian) {
    const double sigma = 0.2;
    std::vector<double> xs;
    std::vector<double> ys;
    for (int i = -2000; i <= 2000; ++i) {
        const double x = 0.001 * i;
        xs.push_back(x);
        ys.push_back(std::exp(-x * x / (2 * sigma * sigma)));
    }
    EXPECT_NEAR(half_width(xs, ys), sigma * std::sqrt(2 * std::log(2.0)), 1e-6);
    EXPECT_THROW(half_width({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST(Analysis, LinearFitExact) {
    const auto f = linear_fit({1, 2, 3, 4}, {-1.5, -2.0, -2.5, -3.0});
    EXPECT_NEAR(f.slope, -0.5, 1e-14);
    EXPECT_NEAR(f.intercept, -1.0, 1e-14);
}

TEST(Fig1, SmallCurvePeaksHigh) {
    const auto cv = fig1_curve(2, 0.05, 201, 8.0);
    ASSERT_EQ(cv.fidelity.size(), 201u);
    EXPECT_GE(cv.peak_fidelity, 0.99);
    EXPECT_GT(cv.half_width, 0.0);
    EXPECT_LT(std::abs(cv.peak_detuning), cv.half_width);
}

TEST(Fig1, CommandTablesAndFit) {
    const auto out = cmd_fig1({{"n_min", 3}, {"n_max", 5}, {"points", 121}, {"inset_n", 5}}, 1);
    const auto* w = find_table(out, "fig1_halfwidths");
    ASSERT_NE(w, nullptr);
    EXPECT_EQ(w->rows.size(), 3u);
    EXPECT_EQ(find_table(out, "fig1_curves")->rows.size(), 3u * 121u);
    EXPECT_EQ(out.summary.at("inset").at("n"), 5);
    EXPECT_NEAR(out.summary.at("slope").get<double>(), -0.5, 0.15);
}

TEST(Grover, MarkedThreeMatchesBlockOracle) {
    const auto out = cmd_grover({{"n", 3}, {"marked", {3}}, {"r", 0.02}}, 1);
    const json& s = out.summary;
    const double f = s.at("corrected").at("ground_fidelity");
    EXPECT_GE(f, 0.95);
    const json& st = s.at("schedule").at("steps").at(0);
    const double oracle_f = oracle::grover_block_fidelity(s.at("x0"), s.at("x1"), 1.0, s.at("schedule").at("omega0"),
                                                          st.at("omega_b"), st.at("tau"));
    EXPECT_NEAR(f, oracle_f, 1e-9);
    EXPECT_NEAR(s.at("reduced_fidelity").get<double>(), f, 1e-9);
    EXPECT_LE(s.at("reduced_dim").get<std::size_t>(), 2u);
}

TEST(Grover, NaiveDetuningLosesAtLargerN) {
    for (std::size_t n : {6u, 7u}) {
        const auto out = cmd_grover({{"n", n}}, 1);
        EXPECT_LT(out.summary.at("naive").at("ground_fidelity").get<double>(),
                  out.summary.at("corrected").at("ground_fidelity").get<double>())
            << n;
    }
}

TEST(Grover, EnsembleOverlapScaling) {
    const auto out = cmd_grover({{"n", 3}, {"ensemble", {{"draws", 200}, {"n_min", 4}, {"n_max", 8}}}}, 5);
    const auto* t = find_table(out, "grover_ensemble");
    ASSERT_NE(t, nullptr);
    ASSERT_EQ(t->rows.size(), 5u);
    for (const auto& row : t->rows) {
        // Single marked state: x0^2 ~ Beta(1, N - 1) and x1^2 = 1 - x0^2, so
        // E[1 / (x0 x1)] = (N - 1) B(1/2, N - 1/2). The sample mean has
        // unbounded variance, so it is compared with this expectation and the
        // expectation with sqrt(N).
        const double big_n = std::exp2(row[0]);
        const double expect = (big_n - 1.0) * std::exp(std::lgamma(0.5) + std::lgamma(big_n - 0.5) - std::lgamma(big_n));
        const double ratio = expect / std::sqrt(big_n);
        EXPECT_NEAR(row[2], std::sqrt(big_n), 1e-12);
        EXPECT_GE(ratio, 0.5) << row[0];
        EXPECT_LE(ratio, 2.0) << row[0];
        EXPECT_GE(row[1] / expect, 0.5) << row[0];
        EXPECT_LE(row[1] / expect, 2.0) << row[0];
    }
}

TEST(Grover, Errors) {
    EXPECT_THROW(cmd_grover({{"n", 3}, {"marked", {8}}}, 1), ConfigError);
    EXPECT_THROW(cmd_grover({{"fiducial", "flat"}}, 1), ConfigError);
    EXPECT_THROW(cmd_grover({{"n", 20}}, 1), DimensionTooLarge);
}

TEST(Clock, IdentityCircuitCools) {
    const json cfg = {{"circuit", {{"identity", {{"n", 1}, {"L", 2}}}}}, {"epsilon", 0.1}};
    const auto out = cmd_clock(cfg, 1);
    EXPECT_GE(out.summary.at("run").at("ground_fidelity").get<double>(), 1.0 - 0.1);
    EXPECT_EQ(out.summary.at("omegas").size(), 3u);
}

TEST(Clock, XGateOutputSite) {
    const json cfg = {{"circuit", {{"file", "circuits/x_gate.txt"}, {"pad", 2}}}};
    const auto out = cmd_clock(cfg, 1, QSC_DATA_DIR);
    const std::size_t L = out.summary.at("L");
    EXPECT_EQ(L, 3u);
    const json& o = out.summary.at("output");
    EXPECT_NEAR(o.at("site_weight").get<double>(), 1.0 / static_cast<double>(L + 1), 1e-3);
    EXPECT_NEAR(o.at("output_fidelity").get<double>(), 1.0, 1e-6);
}

TEST(Clock, RandomCircuitWithinBudget) {
    const json cfg = {{"circuit", {{"random", {{"n", 2}, {"L", 3}, {"seed", 7}}}}}, {"epsilon", 0.1}};
    const auto out = cmd_clock(cfg, 1);
    EXPECT_GE(out.summary.at("run").at("ground_fidelity").get<double>(), 1.0 - 2 * 0.1);
}

TEST(Clock, RSweepTable) {
    const json cfg = {{"circuit", {{"identity", {{"n", 1}, {"L", 2}}}}}, {"r_grid", {0.04, 0.02}}};
    const auto out = cmd_clock(cfg, 1);
    const auto* t = find_table(out, "clock_r_sweep");
    ASSERT_NE(t, nullptr);
    ASSERT_EQ(t->rows.size(), 2u);
    EXPECT_LT(t->rows[1][1], t->rows[0][1]);
    EXPECT_GT(t->rows[1][2], t->rows[0][2]);
    EXPECT_TRUE(out.summary.contains("r_sweep_exponent"));
}

TEST(Clock, TrajectoryModeHasNoOutputBlock) {
    const json cfg = {{"circuit", {{"identity", {{"n", 1}, {"L", 1}}}}}, {"mode", "trajectory"}, {"shots", 50}};
    const auto out = cmd_clock(cfg, 1);
    EXPECT_FALSE(out.summary.contains("output"));
    EXPECT_EQ(out.summary.at("run").at("shots"), 50);
    EXPECT_THROW(cmd_clock({{"mode", "quantum"}}, 1), ConfigError);
}

TEST(Prob, ConditionalSuccess) {
    const auto out = cmd_prob({{"trials", 300}}, 2);
    EXPECT_GE(out.summary.at("run").at("conditional_success").get<double>(), 1.0 - 0.1);
    EXPECT_EQ(out.summary.at("run").at("trials"), 300);
}

TEST(Prob, HalvedRabiSlowsDown) {
    const auto base = cmd_prob({{"trials", 300}}, 2);
    const auto half = cmd_prob({{"trials", 300}, {"omega_star_scale", 0.5}}, 2);
    const double ratio = half.summary.at("run").at("mean_time").get<double>() /
                         base.summary.at("run").at("mean_time").get<double>();
    EXPECT_GT(ratio, 1.5);
    EXPECT_LT(ratio, 2.5);
}

TEST(Prob, AttemptTable) {
    const auto out = cmd_prob({{"trials", 20}, {"record_attempts", true}}, 2);
    const auto* t = find_table(out, "prob_attempts");
    ASSERT_NE(t, nullptr);
    EXPECT_EQ(static_cast<double>(t->rows.size()), out.summary.at("run").at("attempts").get<double>());
}

TEST(Bounds, SmallSuitesPass) {
    const auto out = cmd_bounds(small_bounds(), 1);
    EXPECT_EQ(out.exit_code, kExitOk);
    EXPECT_TRUE(out.summary.at("ok").get<bool>());
    EXPECT_EQ(out.summary.at("suites").size(), 2 * suite_kinds().size());
    for (const auto& s : out.summary.at("suites")) {
        EXPECT_TRUE(s.at("ok").get<bool>()) << s.dump();
    }
    EXPECT_TRUE(out.extra_files.empty());
}

TEST(Bounds, CorruptedReplayFails) {
    const fs::path dir = scratch_dir("replay");
    const auto inst = generate_instance("weyl", 4);
    json good = instance_to_json(inst, evaluate(inst));
    json bad = good;
    auto& re = bad["instance"]["matrices"]["H"]["re"];
    re[0] = re[0].get<double>() + 0.5;
    std::ofstream(dir / "good.json") << good.dump();
    std::ofstream(dir / "bad.json") << bad.dump();

    json cfg = small_bounds();
    cfg["kinds"] = {"weyl"};
    cfg["replay"] = {"good.json"};
    EXPECT_EQ(cmd_bounds(cfg, 1, dir.string()).exit_code, kExitOk);

    cfg["replay"] = {"good.json", "bad.json"};
    const auto out = cmd_bounds(cfg, 1, dir.string());
    EXPECT_EQ(out.exit_code, kExitViolation);
    EXPECT_FALSE(out.summary.at("ok").get<bool>());
    ASSERT_EQ(out.extra_files.size(), 1u);
    EXPECT_EQ(out.extra_files[0].first, "dumps/replay_1.json");
    EXPECT_FALSE(out.summary.at("replays").at(0).at("violation").get<bool>());
    EXPECT_TRUE(out.summary.at("replays").at(1).at("violation").get<bool>());
}

TEST(Spectrum, SingleStepClock) {
    const auto out = cmd_spectrum({{"circuit", {{"identity", {{"n", 1}, {"L", 1}}}}}}, 1);
    const auto* t = find_table(out, "spectrum");
    ASSERT_EQ(t->rows.size(), 2u);
    EXPECT_NEAR(t->rows[0][2], 0.0, 1e-12);
    EXPECT_NEAR(t->rows[1][2], 1.0, 1e-12);
}

TEST(Spectrum, ShippedCircuitsHaveAGap) {
    for (const char* name : {"x_gate.txt", "bell.txt", "phase_ladder.txt"}) {
        const json cfg = {{"circuit", {{"file", std::string("circuits/") + name}}}};
        const auto out = cmd_spectrum(cfg, 1, QSC_DATA_DIR);
        EXPECT_GT(out.summary.at("models").at(0).at("delta").get<double>(), 0.0) << name;
    }
}

TEST(Spectrum, SweepNormGrows) {
    const auto out = cmd_spectrum({{"sweep", {{"L_min", 2}, {"L_max", 6}}}}, 1);
    const json& m = out.summary.at("models");
    ASSERT_EQ(m.size(), 5u);
    for (std::size_t i = 1; i < m.size(); ++i) {
        EXPECT_GT(m[i].at("h_norm").get<double>(), m[i - 1].at("h_norm").get<double>());
        EXPECT_LT(m[i].at("delta").get<double>(), m[i - 1].at("delta").get<double>());
    }
}

TEST(Determinism, RepeatedRunsAreByteIdentical) {
    const std::vector<std::pair<std::string, json>> runs = {
        {"grover", {{"n", 3}, {"mode", "trajectory"}, {"shots", 64}}},
        {"prob", {{"trials", 40}, {"record_attempts", true}}},
        {"bounds", small_bounds()},
    };
    for (const auto& [cmd, cfg] : runs) {
        const auto a = run_command(cmd, cfg, 42);
        const auto b = run_command(cmd, cfg, 42);
        EXPECT_EQ(a.summary.dump(), b.summary.dump()) << cmd;
        ASSERT_EQ(a.tables.size(), b.tables.size()) << cmd;
        for (std::size_t i = 0; i < a.tables.size(); ++i) {
            EXPECT_EQ(render_csv(a.tables[i], a.config), render_csv(b.tables[i], b.config)) << cmd;
        }
        EXPECT_EQ(a.config.at("seed"), 42) << cmd;
    }
}

TEST(ExitCodes, Mapping) {
    EXPECT_EQ(exit_code_for(DimensionTooLarge("x")), kExitResource);
    EXPECT_EQ(exit_code_for(ConfigError("x")), kExitConfig);
    EXPECT_EQ(exit_code_for(ParseError("x")), kExitConfig);
    EXPECT_EQ(exit_code_for(CouplingTooLarge("x")), kExitConfig);
    EXPECT_EQ(exit_code_for(NoSignChange("x")), kExitViolation);
}
