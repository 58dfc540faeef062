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

#ifndef QSC_MODELS_HPP
#define QSC_MODELS_HPP

#include <cstdint>
#include <vector>

#include "qsc/circuit.hpp"
#include "qsc/linalg.hpp"

namespace qsc {

/// Dimension cap for dense work; QSC_MAX_DIM overrides the 2^14 default.
std::size_t dimension_cap();

// ---------------------------------------------------------------------------
// Grover-type system: H_S = omega1 * P1, zero on marked strings.

struct GroverModel {
    std::size_t n = 1;
    std::vector<std::uint64_t> marked;
    double omega1 = 1.0;
    double omega0 = 0.05;

    std::size_t dim() const { return std::size_t{1} << n; }
    void validate() const;
};

struct GroverSystem {
    Operator h_system;
    Subspace p0;
    Subspace p1;
};

GroverSystem build_grover(const GroverModel& model);

/// Uniform superposition over all 2^n strings.
StateVector uniform_state(std::size_t n);

// ---------------------------------------------------------------------------
// Clock construction. Register qubits first, then clock qubits 1..L; the legal
// clock state |l> is |1^l 0^(L-l)>.

struct ClockModel {
    CircuitSpec circuit;
    double omega = 1.0;
    double h = 0.1;

    std::size_t n() const { return circuit.n; }
    std::size_t L() const { return circuit.length(); }
    std::size_t num_qubits() const { return n() + L(); }
    std::size_t dim() const { return std::size_t{1} << num_qubits(); }
    /// h * omega * pi^2 / (2 n (L+1)^2).
    double delta1() const;
    void validate() const;
};

struct ClockTerms {
    Operator prop;   // (1/2) sum_l H_l
    Operator input;  // sum_i |1><1|_i (x) |0><0|_{c1}
    Operator clock;  // sum_l |01><01|_{c_l, c_l+1}
};

/// Throws DimensionTooLarge past `cap`.
ClockTerms clock_terms(const ClockModel& model, std::size_t cap = dimension_cap());

/// omega H_prop + Delta1 H_input + 2 omega H_clock.
Operator build_clock(const ClockModel& model, std::size_t cap = dimension_cap());

/// Full-space index of register basis state `reg` with legal clock state `l`.
std::size_t clock_index(const ClockModel& model, std::size_t reg, std::size_t l);

Subspace legal_clock_subspace(const ClockModel& model);

/// sum_l c_{k,l} U_l...U_1|0^n>|l>, an exact eigenvector with energy omega_k.
StateVector clock_band_state(const ClockModel& model, std::size_t k);

/// Uniform history state (k = 0).
StateVector history_state(const ClockModel& model);

/// |0^n 0^L>.
StateVector clock_fiducial(const ClockModel& model);

/// 1_n (x) |0><0|_{c1} (x) 1 (unit strength; callers scale by Omega0).
Operator clock_coupling(const ClockModel& model);

double clock_omega(std::size_t L, double omega, std::size_t j);
double clock_overlap(std::size_t L, std::size_t j);
/// (2 - delta_{j0}) / (L+1) * cos^2(j pi / (2(L+1))).
double clock_shift_factor(std::size_t L, std::size_t j);

struct ClockSpectrum {
    std::vector<double> omegas;
    std::vector<double> xs;
    std::vector<double> hs;
    double delta = 0.0;
    double h_norm = 0.0;
};

ClockSpectrum clock_spectrum(const ClockModel& model, std::size_t cap = dimension_cap());

/// min over j of the distance from omega_j to every other eigenvalue, where the
/// eigenvalue matching omega_j itself is excluded. Throws if a listed level is
/// absent from the spectrum.
double band_gap(const SpectralDecomposition& sd, const std::vector<double>& omegas);

// ---------------------------------------------------------------------------
// Baths. System is the first tensor factor. Qubit basis {down, up}; qutrit
// basis {C, L, R}.

namespace bath {
StateVector down();
StateVector up();
StateVector center();
StateVector left();
StateVector right();
StateVector bright();  // (L + R) / sqrt 2
StateVector dark();    // (L - R) / sqrt 2
Operator sigma_x();
}  // namespace bath

enum class BathKind { kQubit, kQutrit };

struct Composite {
    Operator h;  // unperturbed H
    Operator v;  // coupling
    std::size_t system_dim = 0;
    std::size_t bath_dim = 0;

    Operator total() const { return h + v; }
};

/// H = H_S (x) 1 + omega_B 1 (x) |up><up|, V = T_S (x) sigma_x.
Composite qubit_bath(const Operator& h_s, double omega_b, const Operator& t_s);

/// H = H_S (x) (|C><C| + |R><R| - |L><L|) + omega1 1 (x) (|R><R| + |L><L|),
/// V = T_S (x) (|C><B| + |B><C|).
Composite qutrit_bath(const Operator& h_s, double omega1, const Operator& t_s);

/// Unperturbed qutrit H plus omega0 1 (x) (|L><R| + |R><L|).
Operator verification_hamiltonian(const Operator& h_s, double omega1, double omega0);

// ---------------------------------------------------------------------------

struct FiducialDecomposition {
    std::vector<double> xs;               // real, non-negative
    std::vector<StateVector> band_states;  // gauge-fixed |j>; zero when x_j = 0
    double f_perp = 0.0;
};

/// x_j = |P_j F|, |j> = P_j F / x_j. Degenerate bands are handled through
/// their projectors.
FiducialDecomposition decompose_fiducial(const StateVector& f, const std::vector<Subspace>& bands);

/// Every eigenvalue cluster of `sd` (spacing below kDegenerate * |H|) is one band.
FiducialDecomposition decompose_fiducial(const StateVector& f, const SpectralDecomposition& sd);

// ---------------------------------------------------------------------------
// System data for the qutrit-bath scheme: nondegenerate ground |0> at energy
// 0, a manifold P1 near omega1, and the remainder S2.

struct QutritModel {
    Operator h_system;
    StateVector ground;
    Subspace p1;
    double omega1 = 0.0;
    double gap = 0.0;  // min{omega1, E, |E - omega1|} over S2
};

/// P1 is every eigenvector within `halfwidth` of omega1. Throws
/// std::invalid_argument if the ground state is degenerate, not at zero, or
/// P1 is empty.
QutritModel make_qutrit_model(const Operator& h_s, double omega1, double halfwidth);

/// Clock system with |1> = |k=1>.
QutritModel clock_qutrit_model(const ClockModel& model, std::size_t cap = dimension_cap());

}  // namespace qsc

#endif
