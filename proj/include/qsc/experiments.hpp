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

#ifndef QSC_EXPERIMENTS_HPP
#define QSC_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsc/bounds.hpp"
#include "qsc/cooling.hpp"
#include "qsc/models.hpp"
#include "qsc/probabilistic.hpp"

namespace qsc {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitViolation = 1,
    kExitConfig = 2,
    kExitResource = 3,
};

/// Numeric cells are written with 17 significant digits.
struct CsvTable {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentOutput {
    std::string command;
    nlohmann::json config;   // fully resolved, including the master seed
    nlohmann::json summary;  // written to <command>.json together with `config`
    std::vector<CsvTable> tables;
    std::vector<std::pair<std::string, nlohmann::json>> extra_files;  // relative path, content
    int exit_code = kExitOk;
};

std::string format_number(double x);

/// "# qsc <version>", then "# config <compact json>", then the column header.
std::string render_csv(const CsvTable& table, const nlohmann::json& config);

/// Writes every table and the summary under `dir` (created if missing).
/// Returns the paths written.
std::vector<std::string> write_output(const ExperimentOutput& out, const std::string& dir);

// ---------------------------------------------------------------------------
// Config helpers. Unknown keys are rejected with ConfigError so typos do not
// silently fall back to defaults.

/// Overlays `user` on `defaults` (recursively for objects) and checks that
/// every key of `user` exists in `defaults`.
nlohmann::json resolve_config(const nlohmann::json& defaults, const nlohmann::json& user);

nlohmann::json load_config_file(const std::string& path);

/// Circuit from a resolved "circuit" object: {"file": path} or
/// {"random": {"n", "L", "seed"}} or {"identity": {"n", "L"}}, plus "pad".
CircuitSpec circuit_from_config(const nlohmann::json& c, const std::string& base_dir = "");

nlohmann::json default_config(const std::string& command);

// ---------------------------------------------------------------------------
// Fig. 1 analysis.

struct DetuningCurve {
    std::size_t n = 0;
    std::vector<double> detuning_rel;  // (omega_B - omega1) / omega1
    std::vector<double> fidelity;
    double peak_detuning = 0.0;
    double peak_fidelity = 0.0;
    double half_width = 0.0;  // relative units
    double predicted_rabi = 0.0;
};

/// Half of the full width at half maximum of (f - min f) around the global
/// peak, with linear interpolation between grid points.
double half_width(const std::vector<double>& xs, const std::vector<double>& ys, double* peak_x = nullptr);

/// Single-marked Grover fidelity against bath detuning at fixed pulse length
/// (the exact-timing pulse of the corrected detuning).
DetuningCurve fig1_curve(std::size_t n, double ratio, std::size_t points, double span_factor);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

// ---------------------------------------------------------------------------
// Commands. Each takes the user config (defaults are filled in) and the
// master seed, and never touches the filesystem except through the circuit
// loader.

ExperimentOutput cmd_fig1(const nlohmann::json& config, std::uint64_t seed);
ExperimentOutput cmd_grover(const nlohmann::json& config, std::uint64_t seed);
ExperimentOutput cmd_clock(const nlohmann::json& config, std::uint64_t seed, const std::string& base_dir = "");
ExperimentOutput cmd_prob(const nlohmann::json& config, std::uint64_t seed, const std::string& base_dir = "");
ExperimentOutput cmd_bounds(const nlohmann::json& config, std::uint64_t seed, const std::string& base_dir = "");
ExperimentOutput cmd_spectrum(const nlohmann::json& config, std::uint64_t seed, const std::string& base_dir = "");

/// Dispatches by name; throws ConfigError for an unknown command.
ExperimentOutput run_command(const std::string& command, const nlohmann::json& config, std::uint64_t seed,
                             const std::string& base_dir = "");

/// Maps library exceptions to exit codes.
int exit_code_for(const std::exception& e);

nlohmann::json to_json(const RunReport& r);
nlohmann::json to_json(const ProbRunReport& r);
nlohmann::json to_json(const CoolingSchedule& s);
nlohmann::json to_json(const SuiteResult& s);
nlohmann::json to_json(const ScalingFit& f);

}  // namespace qsc

#endif
