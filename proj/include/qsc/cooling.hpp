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

#ifndef QSC_COOLING_HPP
#define QSC_COOLING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsc/level_shift.hpp"
#include "qsc/linalg.hpp"
#include "qsc/models.hpp"

namespace qsc {

/// Everything the deterministic pipeline needs about a system. The bath qubit
/// is appended as the last tensor factor by the engine.
struct CoolingProblem {
    std::string label;
    Operator h_system;
    Operator t_s;                          // unit strength; V = omega0 T_S (x) sigma_x
    StateVector fiducial;
    BandData band;                         // omegas, xs (overlaps with F), gap
    std::vector<StateVector> band_states;  // |j>, j = 0..L
    Subspace ground;                       // support of M_0 on the system

    std::size_t system_dim() const { return static_cast<std::size_t>(h_system.rows()); }
    std::size_t L() const { return band.xs.size() - 1; }
};

/// H_S = omega1 P_1, T_S = |F><F|; bands are P_0 F and P_1 F. F defaults to
/// the uniform superposition.
CoolingProblem grover_problem(const GroverModel& model, const std::optional<StateVector>& fiducial = {});

/// Clock H_S with T_S = 1_n (x) |0><0|_{c1} and F = |0^n 0^L>.
CoolingProblem clock_problem(const ClockModel& model, std::size_t cap = dimension_cap());

/// Smallest subspace containing `seeds` and invariant under every operator in
/// `ops` (block Krylov closure).
Subspace krylov_closure(const std::vector<Operator>& ops, const Operator& seeds, double tol = 1e-12);

/// Restricts a problem to the closure of F under {H_S, T_S}. The dynamics of
/// |F><F| (x) rho_bath never leave this space, so runs on the reduced problem
/// reproduce the full ones.
CoolingProblem reduce_problem(const CoolingProblem& problem, double tol = 1e-12);

enum class TimingMode { kExact, kAnalytic };

struct ScheduleStep {
    std::size_t j = 0;
    double omega_b = 0.0;
    double tau = 0.0;
    double rabi = 0.0;  // pi / (2 tau)
    DetuningSolution detuning;
};

struct CoolingSchedule {
    std::vector<ScheduleStep> steps;  // j = L down to 1
    double omega0 = 0.0;
    double epsilon = 0.0;
    double r = 0.0;
    TimingMode timing = TimingMode::kExact;
    std::vector<std::size_t> skipped;  // bands omitted (x_j <= eta)

    double total_time() const;
};

struct ScheduleOptions {
    double epsilon = 0.1;
    /// Used when positive; otherwise omega0 = c * epsilon * L^{-5/2} * gap.
    double omega0 = 0.0;
    double c = 1.0;
    TimingMode timing = TimingMode::kExact;
    /// Bands with x_j <= eta are skipped. Bands with x_j = 0 are always skipped.
    double eta = 0.0;
    /// Replace the solved detuning by omega_j (uncorrected bath).
    bool naive_detuning = false;
};

/// c * epsilon * L^{-5/2} * gap.
double scheduled_coupling(const BandData& band, double epsilon, double c = 1.0);

/// Throws CouplingTooLarge when omega0 / gap >= 1/8.
CoolingSchedule build_schedule(const CoolingProblem& problem, const ScheduleOptions& options);

/// H_S (x) 1 + omega_B 1 (x) |up><up| + omega0 T_S (x) sigma_x (+ delta).
Operator step_hamiltonian(const CoolingProblem& problem, double omega0, double omega_b,
                          const Operator* delta = nullptr);

/// exp(-i tau H_j) for the given step.
Operator step_unitary(const CoolingProblem& problem, double omega0, const ScheduleStep& step,
                      const Operator* delta = nullptr);

/// U Pi_down rho Pi_down U^dagger + Pi_up rho Pi_up, bath qubit last.
Operator cooling_step(const Operator& rho, const Operator& unitary);

/// |F><F| (x) |down><down|.
Operator initial_density(const CoolingProblem& problem);

/// One Hermitian error term per schedule step, on system (x) bath. An empty
/// list means no error.
struct ErrorInjection {
    std::vector<Operator> deltas;
};

struct BlockBudget {
    std::size_t j = 0;
    double r1 = 0.0;       // |S1 d S1| / gap
    double rx = 0.0;       // |S1 (V + d) S2| / gap
    double r2 = 0.0;       // |S2 (V + d) S2| / gap
    double budget = 0.0;   // r * omega0 x_0 x_j / gap
    bool r1_ok = false;    // r1 < budget
    bool rx_ok = false;    // rx^2 < budget
    bool r2_ok = false;    // r2 < 1/2
    bool ok() const { return r1_ok && rx_ok && r2_ok; }
};

/// S1 = span{|j>} (x) bath. Throws NonHermitianInput.
std::vector<BlockBudget> inject_errors(const CoolingProblem& problem, const CoolingSchedule& schedule,
                                       const ErrorInjection& errors);

/// Random Hermitian errors whose S1, cross and S2 blocks have norms r1 * gap,
/// rx * gap and r2 * gap (the requested R targets before adding V).
ErrorInjection random_block_errors(const CoolingProblem& problem, const CoolingSchedule& schedule,
                                   double r1, double rx, double r2, std::uint64_t seed);

enum class RunMode { kDensity, kTrajectory };

struct RunOptions {
    RunMode mode = RunMode::kDensity;
    std::size_t shots = 2000;
    std::uint64_t seed = 1;
    const ErrorInjection* errors = nullptr;
    /// Initial system state; defaults to F.
    std::optional<StateVector> initial;
};

struct RunReport {
    RunMode mode = RunMode::kDensity;
    double ground_fidelity = 0.0;
    double fidelity_stderr = 0.0;  // binomial, trajectory mode only
    std::vector<double> per_step_up_probability;
    std::vector<double> remainder_weights;  // weight outside M_{j-1} (x) down + ground (x) up
    double trace_residual = 0.0;
    double min_eigenvalue = 0.0;
    double total_time = 0.0;
    double h_norm = 0.0;
    double cost = 0.0;
    double error_budget = 0.0;  // sum of remainder_weights
    std::size_t shots = 0;
    double f_perp = 0.0;                  // reduced runs: norm of F on skipped bands
    double predicted_augmentation = 0.0;  // reduced runs: kept steps * f_perp
    Operator final_density;               // density mode only
};

RunReport run_deterministic(const CoolingProblem& problem, const CoolingSchedule& schedule,
                            const RunOptions& options = {});

/// Builds the schedule with the given eta (default epsilon / L^{3/2} when
/// eta < 0) and runs it in density mode.
RunReport run_reduced(const CoolingProblem& problem, ScheduleOptions options, double eta = -1.0,
                      const RunOptions& run = {});

struct CostReport {
    double total_time = 0.0;
    double h_norm = 0.0;  // max_j |H_j + V|
    double cost = 0.0;
};

CostReport cost_report(const CoolingProblem& problem, const CoolingSchedule& schedule);

}  // namespace qsc

#endif
