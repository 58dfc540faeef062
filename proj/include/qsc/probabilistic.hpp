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

#ifndef QSC_PROBABILISTIC_HPP
#define QSC_PROBABILISTIC_HPP

#include <cstdint>
#include <vector>

#include "qsc/linalg.hpp"
#include "qsc/models.hpp"

namespace qsc {

struct ProbProblem {
    QutritModel model;
    Operator t_s;  // unit strength; X = omega0 T_S (x) (|C><B| + |B><C|)
    StateVector fiducial;
    double f0 = 0.0;  // |<0|F>|
    double f1 = 0.0;  // |P1 F|
};

ProbProblem make_prob_problem(QutritModel model, Operator t_s, StateVector fiducial);

/// |0> = history state, P1 = |k=1>, T_S = 1_n (x) |0><0|_{c1}, F = |0^n 0^L>.
ProbProblem clock_prob_problem(const ClockModel& model, std::size_t cap = dimension_cap());

/// |P1 T_S |0>| (unit-strength Rabi rate).
double unit_rabi(const ProbProblem& problem);

/// E[sin^2(rabi tau)] for tau uniform on [lo, hi].
double mean_sin2(double rabi, double lo, double hi);

struct ProbOptions {
    double epsilon = 0.1;
    /// Used when positive; otherwise omega0 = c * f1 * epsilon^{3/2} * gap.
    double omega0 = 0.0;
    double c = 1.0;
    /// Lower bound on the Rabi rate; defaults to the exact omega0 |P1 T_S|0>|.
    double omega_star = 0.0;
    /// Lower bound on |f1|; defaults to f1.
    double f1_lower = 0.0;
    std::size_t trials = 2000;
    std::size_t max_rounds = 64;
    std::uint64_t seed = 1;
    bool record_attempts = false;
};

struct AttemptRecord {
    std::size_t trial = 0;
    std::size_t round = 0;
    double tau = 0.0;
    bool bright = false;
    bool accepted = false;
};

struct ProbRunReport {
    std::size_t trials = 0;
    std::size_t accept_count = 0;
    std::size_t attempts = 0;
    std::size_t bright_count = 0;
    std::size_t round_limit_hits = 0;  // trials that ran out of rounds
    double accept_rate = 0.0;           // accept_count / trials
    double attempt_accept_rate = 0.0;   // empirical p_v per attempt
    double conditional_success = 0.0;   // mean <0|rho_sys|0> over accepted trials
    double mean_time = 0.0;             // mean total evolution time per trial
    double predicted_accept = 0.0;      // f1^2 E[sin^2(Omega tau)] on the first window
    double omega0 = 0.0;
    double omega_star = 0.0;
    double rabi = 0.0;
    double r = 0.0;
    double tau_verify = 0.0;
    std::size_t doubling_threshold = 0;
    std::vector<double> tau_schedule;  // window lower edges reached, ascending
    std::vector<AttemptRecord> records;
};

/// Throws CouplingTooLarge when omega0 / gap >= 1/8.
ProbRunReport run_probabilistic(const ProbProblem& problem, const ProbOptions& options);

/// max over excited eigenstates psi of the probability of finding R after
/// verification from |psi L>.
double verification_leakage(const QutritModel& model, double omega0);

struct VerificationSpectrum {
    double ground_split = 0.0;  // |E(0L) - E(0R)|
    double separation = 0.0;    // min E(R sector) - max E(excited L)
    bool ok = false;            // separation >= gap
};

VerificationSpectrum verification_spectrum(const QutritModel& model);

}  // namespace qsc

#endif
