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

#include "qsc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qsc/circuit.hpp"
#include "qsc/errors.hpp"
#include "qsc/parallel.hpp"
#include "qsc/random.hpp"

namespace qsc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string render_csv(const CsvTable& table, const json& config) {
    std::ostringstream os;
    os << "# qsc " << kVersion << "\n";
    os << "# config " << config.dump() << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        os << (c ? "," : "") << table.columns[c];
    }
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << (c ? "," : "") << format_number(row[c]);
        }
        os << "\n";
    }
    return os.str();
}

std::vector<std::string> write_output(const ExperimentOutput& out, const std::string& dir) {
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto put = [&](const fs::path& p, const std::string& text) {
        fs::create_directories(p.parent_path());
        std::ofstream f(p, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot write " + p.string());
        }
        f << text;
        written.push_back(p.string());
    };
    for (const auto& t : out.tables) {
        put(fs::path(dir) / (t.name + ".csv"), render_csv(t, out.config));
    }
    json report = {{"qsc_version", kVersion},
                   {"command", out.command},
                   {"config", out.config},
                   {"summary", out.summary},
                   {"exit_code", out.exit_code}};
    put(fs::path(dir) / (out.command + ".json"), report.dump(2) + "\n");
    for (const auto& [rel, content] : out.extra_files) {
        put(fs::path(dir) / rel, content.dump(2) + "\n");
    }
    return written;
}

// ---------------------------------------------------------------------------
// Config.

namespace {

// Values under these keys are replaced wholesale rather than merged.
bool opaque_key(const std::string& key) { return key == "circuit"; }

void merge_into(json& base, const json& user, const std::string& where) {
    if (!user.is_object()) {
        throw ConfigError("config: " + (where.empty() ? std::string("top level") : where) + " must be an object");
    }
    for (const auto& [key, value] : user.items()) {
        const std::string path = where.empty() ? key : where + "." + key;
        if (!base.contains(key)) {
            throw ConfigError("config: unknown key '" + path + "'");
        }
        json& slot = base[key];
        if (slot.is_object() && !opaque_key(key)) {
            merge_into(slot, value, path);
        } else {
            if (!slot.is_null() && slot.is_number() != value.is_number() && !opaque_key(key)) {
                throw ConfigError("config: '" + path + "' has the wrong type");
            }
            slot = value;
        }
    }
}

template <typename T>
T get(const json& c, const std::string& key) {
    try {
        return c.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
}

json clock_circuit_default() { return {{"random", {{"n", 1}, {"L", 2}, {"seed", 3}}}, {"pad", 0}}; }

ClockModel clock_from_config(const json& c, const std::string& base_dir) {
    ClockModel m;
    m.circuit = circuit_from_config(c.at("circuit"), base_dir);
    m.omega = get<double>(c, "omega");
    m.h = get<double>(c, "h");
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return m;
}

void require_positive(const json& c, const std::string& key) {
    if (!(get<double>(c, key) > 0.0)) {
        throw ConfigError("config: '" + key + "' must be positive");
    }
}

TimingMode timing_from(const json& c) {
    const std::string t = get<std::string>(c, "timing");
    if (t == "exact") {
        return TimingMode::kExact;
    }
    if (t == "analytic") {
        return TimingMode::kAnalytic;
    }
    throw ConfigError("config: timing must be 'exact' or 'analytic'");
}

RunMode mode_from(const json& c) {
    const std::string t = get<std::string>(c, "mode");
    if (t == "density") {
        return RunMode::kDensity;
    }
    if (t == "trajectory") {
        return RunMode::kTrajectory;
    }
    throw ConfigError("config: mode must be 'density' or 'trajectory'");
}

const char* mode_name(RunMode m) { return m == RunMode::kDensity ? "density" : "trajectory"; }

}  // namespace

json resolve_config(const json& defaults, const json& user) {
    json out = defaults;
    if (!user.is_null()) {
        merge_into(out, user, "");
    }
    return out;
}

json load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot open config file " + path);
    }
    try {
        return json::parse(f, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
}

CircuitSpec circuit_from_config(const json& c, const std::string& base_dir) {
    if (!c.is_object()) {
        throw ConfigError("config: circuit must be an object");
    }
    std::size_t pad = 0;
    int sources = 0;
    CircuitSpec spec;
    for (const auto& [key, value] : c.items()) {
        if (key == "pad") {
            pad = value.get<std::size_t>();
        } else if (key == "file") {
            fs::path p = value.get<std::string>();
            if (p.is_relative() && !base_dir.empty()) {
                p = fs::path(base_dir) / p;
            }
            spec = load_circuit(p.string());
            ++sources;
        } else if (key == "random") {
            spec = random_circuit(get<std::size_t>(value, "n"), get<std::size_t>(value, "L"),
                                  get<std::uint64_t>(value, "seed"));
            ++sources;
        } else if (key == "identity") {
            spec = identity_circuit(get<std::size_t>(value, "n"), get<std::size_t>(value, "L"));
            ++sources;
        } else if (key == "text") {
            spec = parse_circuit_string(value.get<std::string>());
            ++sources;
        } else {
            throw ConfigError("config: unknown circuit key '" + key + "'");
        }
    }
    if (sources != 1) {
        throw ConfigError("config: circuit needs exactly one of file, random, identity, text");
    }
    return pad > 0 ? pad_with_identities(spec, pad) : spec;
}

json default_config(const std::string& command) {
    if (command == "fig1") {
        return {{"n_min", 4}, {"n_max", 9}, {"ratio", 0.05}, {"points", 400}, {"span_factor", 8.0}, {"inset_n", 7}};
    }
    if (command == "grover") {
        return {{"n", 6},
                {"marked", {0}},
                {"omega1", 1.0},
                {"r", 0.02},
                {"omega0", 0.0},
                {"fiducial", "uniform"},
                {"mode", "density"},
                {"shots", 2000},
                {"ensemble", {{"draws", 0}, {"n_min", 4}, {"n_max", 8}}}};
    }
    if (command == "clock") {
        return {{"circuit", clock_circuit_default()},
                {"omega", 1.0},
                {"h", 0.1},
                {"epsilon", 0.1},
                {"c", 1.0},
                {"omega0", 0.0},
                {"timing", "exact"},
                {"reduced", false},
                {"eta", -1.0},
                {"mode", "density"},
                {"shots", 2000},
                {"r_grid", json::array()}};
    }
    if (command == "prob") {
        return {{"circuit", clock_circuit_default()},
                {"omega", 1.0},
                {"h", 0.1},
                {"epsilon", 0.1},
                {"c", 1.0},
                {"omega0", 0.0},
                {"omega_star_scale", 1.0},
                {"f1_lower", 0.0},
                {"trials", 2000},
                {"max_rounds", 64},
                {"record_attempts", false}};
    }
    if (command == "bounds") {
        return {{"count", 128},
                {"kinds", suite_kinds()},
                {"negative", true},
                {"min_passes", 100},
                {"replay", json::array()},
                {"protocol",
                 {{"enabled", true},
                  {"rs", {0.04, 0.02, 0.01}},
                  {"grover_n", 4},
                  {"clock", {{"circuit", clock_circuit_default()}, {"omega", 1.0}, {"h", 0.1}}}}}};
    }
    if (command == "spectrum") {
        return {{"circuit", clock_circuit_default()},
                {"omega", 1.0},
                {"h", 0.1},
                {"sweep", {{"n", 1}, {"L_min", 0}, {"L_max", 0}, {"seed", 1}}}};
    }
    throw ConfigError("unknown command '" + command + "'");
}

// ---------------------------------------------------------------------------
// Fig. 1.

double half_width(const std::vector<double>& xs, const std::vector<double>& ys, double* peak_x) {
    if (xs.size() != ys.size() || xs.size() < 3) {
        throw std::invalid_argument("half_width: need three or more matched points");
    }
    const auto n = xs.size();
    const std::size_t ip = static_cast<std::size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
    const double lo = *std::min_element(ys.begin(), ys.end());
    const double half = 0.5 * (ys[ip] - lo);
    auto h = [&](std::size_t i) { return ys[i] - lo; };
    auto cross = [&](std::size_t a, std::size_t b) {
        const double t = (half - h(a)) / (h(b) - h(a));
        return xs[a] + t * (xs[b] - xs[a]);
    };
    double left = xs.front();
    for (std::size_t i = ip; i > 0; --i) {
        if (h(i - 1) < half) {
            left = cross(i - 1, i);
            break;
        }
    }
    double right = xs.back();
    for (std::size_t i = ip; i + 1 < n; ++i) {
        if (h(i + 1) < half) {
            right = cross(i + 1, i);
            break;
        }
    }
    if (peak_x != nullptr) {
        *peak_x = xs[ip];
        if (ip > 0 && ip + 1 < n) {
            // Vertex of the parabola through the three points around the peak.
            const double y0 = ys[ip - 1];
            const double y1 = ys[ip];
            const double y2 = ys[ip + 1];
            const double den = y0 - 2.0 * y1 + y2;
            if (den < 0.0) {
                *peak_x = xs[ip] + 0.5 * (y0 - y2) / den * (xs[ip + 1] - xs[ip]);
            }
        }
    }
    return 0.5 * (right - left);
}

DetuningCurve fig1_curve(std::size_t n, double ratio, std::size_t points, double span_factor) {
    if (points < 3) {
        throw ConfigError("fig1: need at least three detuning points");
    }
    GroverModel gm;
    gm.n = n;
    gm.marked = {0};
    gm.omega1 = 1.0;
    const CoolingProblem problem = reduce_problem(grover_problem(gm));
    ScheduleOptions opts;
    opts.omega0 = ratio * gm.omega1;
    const CoolingSchedule sched = build_schedule(problem, opts);
    DetuningCurve cv;
    cv.n = n;
    cv.predicted_rabi = sched.steps.at(0).rabi;
    const double span = span_factor * cv.predicted_rabi / gm.omega1;
    for (std::size_t i = 0; i < points; ++i) {
        const double d = -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(points - 1);
        CoolingSchedule s = sched;
        s.steps[0].omega_b = gm.omega1 * (1.0 + d);
        cv.detuning_rel.push_back(d);
        cv.fidelity.push_back(run_deterministic(problem, s).ground_fidelity);
    }
    cv.half_width = half_width(cv.detuning_rel, cv.fidelity, &cv.peak_detuning);
    cv.peak_fidelity = *std::max_element(cv.fidelity.begin(), cv.fidelity.end());
    return cv;
}

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("linear_fit: need two or more matched points");
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) {
        throw std::invalid_argument("linear_fit: x values are all equal");
    }
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

// ---------------------------------------------------------------------------
// Reports.

json to_json(const RunReport& r) {
    return {{"mode", mode_name(r.mode)},
            {"ground_fidelity", r.ground_fidelity},
            {"fidelity_stderr", r.fidelity_stderr},
            {"per_step_up_probability", r.per_step_up_probability},
            {"remainder_weights", r.remainder_weights},
            {"trace_residual", r.trace_residual},
            {"min_eigenvalue", r.min_eigenvalue},
            {"total_time", r.total_time},
            {"h_norm", r.h_norm},
            {"cost", r.cost},
            {"error_budget", r.error_budget},
            {"shots", r.shots},
            {"f_perp", r.f_perp},
            {"predicted_augmentation", r.predicted_augmentation}};
}

json to_json(const ProbRunReport& r) {
    return {{"trials", r.trials},
            {"accept_count", r.accept_count},
            {"attempts", r.attempts},
            {"bright_count", r.bright_count},
            {"round_limit_hits", r.round_limit_hits},
            {"accept_rate", r.accept_rate},
            {"attempt_accept_rate", r.attempt_accept_rate},
            {"conditional_success", r.conditional_success},
            {"mean_time", r.mean_time},
            {"predicted_accept", r.predicted_accept},
            {"omega0", r.omega0},
            {"omega_star", r.omega_star},
            {"rabi", r.rabi},
            {"r", r.r},
            {"tau_verify", r.tau_verify},
            {"doubling_threshold", r.doubling_threshold},
            {"tau_schedule", r.tau_schedule}};
}

json to_json(const CoolingSchedule& s) {
    json steps = json::array();
    for (const auto& st : s.steps) {
        steps.push_back({{"j", st.j}, {"omega_b", st.omega_b}, {"tau", st.tau}, {"rabi", st.rabi}});
    }
    return {{"omega0", s.omega0},
            {"epsilon", s.epsilon},
            {"r", s.r},
            {"timing", s.timing == TimingMode::kExact ? "exact" : "analytic"},
            {"total_time", s.total_time()},
            {"skipped", s.skipped},
            {"steps", steps}};
}

json to_json(const SuiteResult& s) {
    json j = {{"kind", s.kind},         {"negative", s.negative},     {"count", s.count},
              {"passes", s.passes},     {"violations", s.violations}, {"vacuous", s.vacuous}};
    j["min_margin"] = std::isfinite(s.min_margin) ? json(s.min_margin) : json();
    return j;
}

json to_json(const ScalingFit& f) {
    json j = {{"name", f.name},
              {"rs", f.rs},
              {"residuals", f.residuals},
              {"threshold", f.threshold},
              {"pass", f.pass}};
    j["exponent"] = std::isfinite(f.exponent) ? json(f.exponent) : json("inf");
    return j;
}

// ---------------------------------------------------------------------------
// Commands.

ExperimentOutput cmd_fig1(const json& config, std::uint64_t seed) {
    ExperimentOutput out;
    out.command = "fig1";
    out.config = resolve_config(default_config("fig1"), config);
    out.config["seed"] = seed;
    const json& c = out.config;
    const auto n_min = get<std::size_t>(c, "n_min");
    const auto n_max = get<std::size_t>(c, "n_max");
    if (n_min < 1 || n_max < n_min) {
        throw ConfigError("fig1: need 1 <= n_min <= n_max");
    }
    require_positive(c, "ratio");
    require_positive(c, "span_factor");
    const double ratio = get<double>(c, "ratio");
    const auto points = get<std::size_t>(c, "points");
    const double span = get<double>(c, "span_factor");
    std::vector<std::size_t> ns;
    for (std::size_t n = n_min; n <= n_max; ++n) {
        ns.push_back(n);
    }
    const auto inset = get<std::size_t>(c, "inset_n");
    if (std::find(ns.begin(), ns.end(), inset) == ns.end()) {
        ns.push_back(inset);
    }
    const std::vector<DetuningCurve> curves =
        parallel_map(ns.size(), [&](std::size_t i) { return fig1_curve(ns[i], ratio, points, span); });

    CsvTable curve_t{"fig1_curves", {"n", "detuning_rel", "fidelity"}, {}};
    CsvTable width_t{"fig1_halfwidths", {"n", "half_width", "peak_detuning", "peak_fidelity", "predicted_rabi"}, {}};
    std::vector<double> fit_n;
    std::vector<double> fit_y;
    json per_n = json::array();
    const DetuningCurve* inset_curve = nullptr;
    for (const auto& cv : curves) {
        for (std::size_t i = 0; i < cv.fidelity.size(); ++i) {
            curve_t.rows.push_back({static_cast<double>(cv.n), cv.detuning_rel[i], cv.fidelity[i]});
        }
        width_t.rows.push_back(
            {static_cast<double>(cv.n), cv.half_width, cv.peak_detuning, cv.peak_fidelity, cv.predicted_rabi});
        if (cv.n >= n_min && cv.n <= n_max) {
            fit_n.push_back(static_cast<double>(cv.n));
            fit_y.push_back(std::log2(cv.half_width));
        }
        if (cv.n == inset) {
            inset_curve = &cv;
        }
        per_n.push_back({{"n", cv.n},
                         {"half_width", cv.half_width},
                         {"peak_detuning", cv.peak_detuning},
                         {"peak_fidelity", cv.peak_fidelity}});
    }
    out.summary["curves"] = per_n;
    if (fit_n.size() >= 2) {
        const LinearFit f = linear_fit(fit_n, fit_y);
        out.summary["slope"] = f.slope;
        out.summary["intercept"] = f.intercept;
    }
    const double expected_peak = ratio * ratio;
    out.summary["inset"] = {{"n", inset},
                            {"peak_detuning", inset_curve->peak_detuning},
                            {"expected_peak", expected_peak},
                            {"half_width", inset_curve->half_width},
                            {"within_half_width",
                             std::abs(inset_curve->peak_detuning - expected_peak) <= inset_curve->half_width}};
    out.tables = {curve_t, width_t};
    return out;
}

ExperimentOutput cmd_grover(const json& config, std::uint64_t seed) {
    ExperimentOutput out;
    out.command = "grover";
    out.config = resolve_config(default_config("grover"), config);
    out.config["seed"] = seed;
    const json& c = out.config;
    GroverModel gm;
    gm.n = get<std::size_t>(c, "n");
    gm.marked = get<std::vector<std::uint64_t>>(c, "marked");
    gm.omega1 = get<double>(c, "omega1");
    try {
        gm.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grover: ") + e.what());
    }
    if (gm.dim() * 2 > dimension_cap()) {
        throw DimensionTooLarge("grover: 2^(n+1) exceeds the dimension cap");
    }
    const std::string fid = get<std::string>(c, "fiducial");
    std::optional<StateVector> f;
    if (fid == "haar") {
        f = random_state(gm.dim(), derive_seed(seed, 0));
    } else if (fid != "uniform") {
        throw ConfigError("grover: fiducial must be 'uniform' or 'haar'");
    }
    const CoolingProblem problem = grover_problem(gm, f);
    ScheduleOptions opts;
    opts.omega0 = get<double>(c, "omega0") > 0.0 ? get<double>(c, "omega0") : get<double>(c, "r") * problem.band.gap;
    RunOptions run;
    run.mode = mode_from(c);
    run.shots = get<std::size_t>(c, "shots");
    run.seed = seed;

    const CoolingSchedule sched = build_schedule(problem, opts);
    const RunReport corrected = run_deterministic(problem, sched, run);
    ScheduleOptions naive_opts = opts;
    naive_opts.naive_detuning = true;
    const CoolingSchedule naive_sched = build_schedule(problem, naive_opts);
    const RunReport naive = run_deterministic(problem, naive_sched, run);
    const CoolingProblem reduced = reduce_problem(problem);
    const RunReport block = run_deterministic(reduced, build_schedule(reduced, opts));

    out.summary = {{"corrected", to_json(corrected)},
                   {"naive", to_json(naive)},
                   {"schedule", to_json(sched)},
                   {"naive_schedule", to_json(naive_sched)},
                   {"reduced_dim", reduced.system_dim()},
                   {"reduced_fidelity", block.ground_fidelity},
                   {"x0", problem.band.xs[0]},
                   {"x1", problem.band.xs[1]}};

    const json& ens = c.at("ensemble");
    const auto draws = get<std::size_t>(ens, "draws");
    if (draws > 0) {
        CsvTable t{"grover_ensemble", {"n", "mean_inv_x0x1", "sqrt_N_over_N0", "ratio"}, {}};
        for (auto n = get<std::size_t>(ens, "n_min"); n <= get<std::size_t>(ens, "n_max"); ++n) {
            GroverModel m = gm;
            m.n = n;
            m.marked = {0};
            const GroverSystem sys = build_grover(m);
            const std::vector<double> inv = parallel_map(draws, [&](std::size_t k) {
                const StateVector v = random_state(m.dim(), derive_seed(seed, 1000 * n + k + 1));
                return 1.0 / std::sqrt(sys.p0.weight(v) * sys.p1.weight(v));
            });
            double mean = 0.0;
            for (double x : inv) {
                mean += x / static_cast<double>(draws);
            }
            const double pred = std::sqrt(static_cast<double>(m.dim()) / static_cast<double>(m.marked.size()));
            t.rows.push_back({static_cast<double>(n), mean, pred, mean / pred});
        }
        out.tables.push_back(t);
    }
    return out;
}

namespace {

// Register state on the final legal clock site and its overlap with the
// circuit output U_L...U_1|0^n>.
json clock_output(const ClockModel& m, const Operator& rho_full) {
    const std::size_t dn = std::size_t{1} << m.n();
    const std::size_t dl = std::size_t{1} << m.L();
    const Operator rho = partial_trace(rho_full, {dn, dl, 2}, {0, 1});
    const std::size_t last = dl - 1;
    Operator reg(dn, dn);
    for (std::size_t a = 0; a < dn; ++a) {
        for (std::size_t b = 0; b < dn; ++b) {
            reg(a, b) = rho(a * dl + last, b * dl + last);
        }
    }
    const StateVector target = circuit_prefix(m.circuit, m.L()) * basis_vector(dn, 0);
    const double weight = reg.trace().real();
    const double hit = std::real(target.dot(reg * target));
    return {{"site_weight", weight},
            {"output_success", hit},
            {"output_fidelity", weight > 0.0 ? hit / weight : 0.0}};
}

}  // namespace

ExperimentOutput cmd_clock(const json& config, std::uint64_t seed, const std::string& base_dir) {
    ExperimentOutput out;
    out.command = "clock";
    out.config = resolve_config(default_config("clock"), config);
    out.config["seed"] = seed;
    const json& c = out.config;
    const ClockModel model = clock_from_config(c, base_dir);
    if ((model.dim() * 2) > dimension_cap()) {
        throw DimensionTooLarge("clock: 2^(n+L+1) exceeds the dimension cap");
    }
    const CoolingProblem problem = clock_problem(model);
    ScheduleOptions opts;
    opts.epsilon = get<double>(c, "epsilon");
    opts.c = get<double>(c, "c");
    opts.omega0 = get<double>(c, "omega0");
    opts.timing = timing_from(c);
    RunOptions run;
    run.mode = mode_from(c);
    run.shots = get<std::size_t>(c, "shots");
    run.seed = seed;
    RunReport rep;
    CoolingSchedule sched;
    if (get<bool>(c, "reduced")) {
        const double eta = get<double>(c, "eta");
        ScheduleOptions o = opts;
        o.eta = eta < 0.0 ? opts.epsilon / std::pow(static_cast<double>(problem.L()), 1.5) : eta;
        sched = build_schedule(problem, o);
        rep = run_reduced(problem, opts, eta, run);
    } else {
        sched = build_schedule(problem, opts);
        rep = run_deterministic(problem, sched, run);
    }
    out.summary = {{"run", to_json(rep)},
                   {"schedule", to_json(sched)},
                   {"gap", problem.band.gap},
                   {"n", model.n()},
                   {"L", model.L()},
                   {"omegas", problem.band.omegas},
                   {"xs", problem.band.xs}};
    if (run.mode == RunMode::kDensity) {
        out.summary["output"] = clock_output(model, rep.final_density);
    }

    const auto rs = get<std::vector<double>>(c, "r_grid");
    if (!rs.empty()) {
        const std::vector<RunReport> reps = parallel_map(rs.size(), [&](std::size_t i) {
            ScheduleOptions o = opts;
            o.omega0 = rs[i] * problem.band.gap;
            return run_deterministic(problem, build_schedule(problem, o));
        });
        CsvTable t{"clock_r_sweep", {"r", "infidelity", "total_time"}, {}};
        std::vector<double> inf;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            inf.push_back(1.0 - reps[i].ground_fidelity);
            t.rows.push_back({rs[i], inf.back(), reps[i].total_time});
        }
        out.tables.push_back(t);
        if (rs.size() >= 2) {
            const double e = loglog_slope(rs, inf);
            out.summary["r_sweep_exponent"] = std::isfinite(e) ? json(e) : json("inf");
        }
    }
    return out;
}

ExperimentOutput cmd_prob(const json& config, std::uint64_t seed, const std::string& base_dir) {
    ExperimentOutput out;
    out.command = "prob";
    out.config = resolve_config(default_config("prob"), config);
    out.config["seed"] = seed;
    const json& c = out.config;
    const ClockModel model = clock_from_config(c, base_dir);
    if (model.dim() * 3 > dimension_cap()) {
        throw DimensionTooLarge("prob: 3 * 2^(n+L) exceeds the dimension cap");
    }
    const ProbProblem problem = clock_prob_problem(model);
    ProbOptions o;
    o.epsilon = get<double>(c, "epsilon");
    o.c = get<double>(c, "c");
    o.omega0 = get<double>(c, "omega0") > 0.0 ? get<double>(c, "omega0")
                                               : o.c * problem.f1 * std::pow(o.epsilon, 1.5) * problem.model.gap;
    o.omega_star = get<double>(c, "omega_star_scale") * o.omega0 * unit_rabi(problem);
    o.f1_lower = get<double>(c, "f1_lower");
    o.trials = get<std::size_t>(c, "trials");
    o.max_rounds = get<std::size_t>(c, "max_rounds");
    o.seed = seed;
    o.record_attempts = get<bool>(c, "record_attempts");
    const ProbRunReport rep = run_probabilistic(problem, o);
    out.summary = {{"run", to_json(rep)},
                   {"f0", problem.f0},
                   {"f1", problem.f1},
                   {"gap", problem.model.gap},
                   {"omega1", problem.model.omega1}};
    if (o.record_attempts) {
        CsvTable t{"prob_attempts", {"trial", "round", "tau", "bright", "accepted"}, {}};
        for (const auto& r : rep.records) {
            t.rows.push_back({static_cast<double>(r.trial), static_cast<double>(r.round), r.tau,
                              r.bright ? 1.0 : 0.0, r.accepted ? 1.0 : 0.0});
        }
        out.tables.push_back(t);
    }
    return out;
}

ExperimentOutput cmd_bounds(const json& config, std::uint64_t seed, const std::string& base_dir) {
    ExperimentOutput out;
    out.command = "bounds";
    out.config = resolve_config(default_config("bounds"), config);
    out.config["seed"] = seed;
    const json& c = out.config;
    const auto count = get<std::size_t>(c, "count");
    const auto min_passes = get<std::size_t>(c, "min_passes");
    bool failed = false;
    json suites = json::array();
    CsvTable t{"bounds_suites", {"kind_index", "negative", "count", "passes", "violations", "vacuous", "min_margin"},
               {}};
    const auto& all = suite_kinds();
    for (const auto& kind : get<std::vector<std::string>>(c, "kinds")) {
        const auto it = std::find(all.begin(), all.end(), kind);
        if (it == all.end()) {
            throw ConfigError("bounds: unknown kind '" + kind + "'");
        }
        const double kind_index = static_cast<double>(it - all.begin());
        std::vector<bool> modes = {false};
        if (get<bool>(c, "negative")) {
            modes.push_back(true);
        }
        for (bool neg : modes) {
            const SuiteResult s = run_suite(kind, count, derive_seed(seed, static_cast<std::uint64_t>(kind_index)), neg);
            json js = to_json(s);
            bool ok = s.violations == 0;
            if (neg) {
                ok = ok && s.vacuous == s.count;
            } else {
                ok = ok && s.passes >= std::min(min_passes, count);
            }
            js["ok"] = ok;
            failed = failed || !ok;
            suites.push_back(js);
            t.rows.push_back({kind_index, neg ? 1.0 : 0.0, static_cast<double>(s.count),
                              static_cast<double>(s.passes), static_cast<double>(s.violations),
                              static_cast<double>(s.vacuous), s.min_margin});
            for (const auto& [inst, check] : s.failures) {
                out.extra_files.emplace_back(
                    "dumps/" + kind + (neg ? "_neg_" : "_") + std::to_string(inst.seed) + ".json",
                    instance_to_json(inst, check));
            }
        }
    }
    out.summary["suites"] = suites;
    out.tables.push_back(t);

    json replays = json::array();
    std::size_t ri = 0;
    for (const auto& path : get<std::vector<std::string>>(c, "replay")) {
        fs::path p = path;
        if (p.is_relative() && !base_dir.empty()) {
            p = fs::path(base_dir) / p;
        }
        const ReplayResult r = replay_dump(load_config_file(p.string()));
        replays.push_back({{"file", path},
                           {"verdict", verdict_name(r.check.verdict)},
                           {"recorded_verdict", r.recorded_verdict},
                           {"consistent", r.consistent},
                           {"violation", r.violation()}});
        if (r.violation()) {
            failed = true;
            out.extra_files.emplace_back("dumps/replay_" + std::to_string(ri) + ".json",
                                         instance_to_json(instance_from_json(load_config_file(p.string())), r.check));
        }
        ++ri;
    }
    out.summary["replays"] = replays;

    const json& pc = c.at("protocol");
    if (get<bool>(pc, "enabled")) {
        const auto rs = get<std::vector<double>>(pc, "rs");
        GroverModel gm;
        gm.n = get<std::size_t>(pc, "grover_n");
        gm.marked = {0};
        const CoolingProblem gp = grover_problem(gm);
        json cc = resolve_config(default_config("bounds").at("protocol").at("clock"), pc.at("clock"));
        const ClockModel cm = clock_from_config(cc, base_dir);
        const CoolingProblem cp = clock_problem(cm);
        const ProbProblem pp = clock_prob_problem(cm);
        json fits = json::array();
        for (const auto& rep : {check_protocol_lemmas(&gp, nullptr, rs), check_protocol_lemmas(&cp, &pp, rs)}) {
            for (const auto& f : rep.fits) {
                fits.push_back(to_json(f));
            }
            failed = failed || !rep.pass();
        }
        fits[0]["model"] = "grover";
        fits[1]["model"] = "grover";
        for (std::size_t i = 2; i < fits.size(); ++i) {
            fits[i]["model"] = "clock";
        }
        out.summary["protocol"] = fits;
    }
    out.summary["ok"] = !failed;
    out.exit_code = failed ? kExitViolation : kExitOk;
    return out;
}

ExperimentOutput cmd_spectrum(const json& config, std::uint64_t seed, const std::string& base_dir) {
    ExperimentOutput out;
    out.command = "spectrum";
    out.config = resolve_config(default_config("spectrum"), config);
    out.config["seed"] = seed;
    const json& c = out.config;
    std::vector<ClockModel> models;
    const json& sw = c.at("sweep");
    const auto l_max = get<std::size_t>(sw, "L_max");
    if (l_max > 0) {
        for (auto l = get<std::size_t>(sw, "L_min"); l <= l_max; ++l) {
            ClockModel m;
            m.circuit = random_circuit(get<std::size_t>(sw, "n"), l, derive_seed(get<std::uint64_t>(sw, "seed"), l));
            m.omega = get<double>(c, "omega");
            m.h = get<double>(c, "h");
            models.push_back(m);
        }
    } else {
        models.push_back(clock_from_config(c, base_dir));
    }
    for (const auto& m : models) {
        if (m.dim() > dimension_cap()) {
            throw DimensionTooLarge("spectrum: 2^(n+L) exceeds the dimension cap");
        }
    }
    const std::vector<ClockSpectrum> specs =
        parallel_map(models.size(), [&](std::size_t i) { return clock_spectrum(models[i]); });
    CsvTable t{"spectrum", {"L", "j", "omega_j", "x_j", "h_j", "delta", "h_norm"}, {}};
    json rows = json::array();
    for (std::size_t i = 0; i < models.size(); ++i) {
        const ClockSpectrum& s = specs[i];
        for (std::size_t j = 0; j < s.omegas.size(); ++j) {
            t.rows.push_back({static_cast<double>(models[i].L()), static_cast<double>(j), s.omegas[j], s.xs[j],
                              s.hs[j], s.delta, s.h_norm});
        }
        rows.push_back({{"L", models[i].L()}, {"n", models[i].n()}, {"delta", s.delta}, {"h_norm", s.h_norm}});
    }
    out.summary["models"] = rows;
    out.tables.push_back(t);
    return out;
}

ExperimentOutput run_command(const std::string& command, const json& config, std::uint64_t seed,
                             const std::string& base_dir) {
    if (command == "fig1") {
        return cmd_fig1(config, seed);
    }
    if (command == "grover") {
        return cmd_grover(config, seed);
    }
    if (command == "clock") {
        return cmd_clock(config, seed, base_dir);
    }
    if (command == "prob") {
        return cmd_prob(config, seed, base_dir);
    }
    if (command == "bounds") {
        return cmd_bounds(config, seed, base_dir);
    }
    if (command == "spectrum") {
        return cmd_spectrum(config, seed, base_dir);
    }
    throw ConfigError("unknown command '" + command + "'");
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const DimensionTooLarge*>(&e) != nullptr) {
        return kExitResource;
    }
    if (dynamic_cast<const ConfigError*>(&e) != nullptr || dynamic_cast<const ParseError*>(&e) != nullptr ||
        dynamic_cast<const CouplingTooLarge*>(&e) != nullptr || dynamic_cast<const std::invalid_argument*>(&e) != nullptr ||
        dynamic_cast<const nlohmann::json::exception*>(&e) != nullptr) {
        return kExitConfig;
    }
    return kExitViolation;
}

}  // namespace qsc
