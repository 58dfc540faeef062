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

#ifndef QSC_LEVEL_SHIFT_HPP
#define QSC_LEVEL_SHIFT_HPP

#include <vector>

#include "qsc/linalg.hpp"
#include "qsc/models.hpp"

namespace qsc {

struct LevelShiftContext {
    Operator h;
    Subspace p;
    Subspace q;
    double gap = 0.0;
    double omega0 = 0.0;

    double r() const { return omega0 / gap; }

    /// Q is built as the orthogonal complement of P.
    static LevelShiftContext make(Operator h, Subspace p, double gap, double omega0);
};

/// Q (z Q - Q H Q)^{-1} Q as a full-space operator. Throws PoleTooClose when z
/// is within gap/4 of Spec(H|_Q).
Operator green_function(const LevelShiftContext& ctx, double z);

enum class SelfEnergyMode { kClosed, kSeries };

/// Matrix expressed in the coordinates of `basis` (columns of P).
struct EffectiveHamiltonian {
    Operator matrix;
    Operator basis;
    double z = 0.0;
    int order = -1;  // -1 for the closed resolvent form
};

/// PHP + PVP + PVQ (z - Q(H+V)Q)^{-1} QVP. Series mode expands the resolvent
/// in powers of QVQ and keeps `order` terms. Throws SingularResolvent.
EffectiveHamiltonian self_energy(const LevelShiftContext& ctx, const Operator& v, double z,
                                 SelfEnergyMode mode = SelfEnergyMode::kClosed, int order = 4);

/// Band description used by the closed-form formulas: energies omega_j and
/// real non-negative overlaps x_j of the coupled state, with omega_0 = 0.
struct BandData {
    std::vector<double> omegas;
    std::vector<double> xs;
    double gap = 0.0;
};

struct GSums {
    double gj = 0.0;
    double g0 = 0.0;
};

/// g_j(z) = sum_{k != j} x_k^2 / (z - omega_k),
/// g_0(z) = sum_{k != 0} x_k^2 / (z - omega_k - omega_B).
/// Poles carrying nonzero weight closer than `pole_guard` raise PoleTooClose.
GSums g_sums(const std::vector<double>& xs, const std::vector<double>& omegas, double omega_b,
             std::size_t j, double z, double pole_guard = 0.0);

/// (1 - O0^2 g_j g_0)(z - omega_j) + O0^2 (x_0^2 g_j - x_j^2 g_0) with omega_B = z.
double detuning_function(const BandData& band, double omega0, std::size_t j, double z);

struct DetuningSolution {
    std::size_t j = 0;
    double omega_b = 0.0;
    double rabi = 0.0;       // Omega0 x_0 x_j / (1 - O0^2 g_j g_0)
    double omega_b_star = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    double x_ratio = 0.0;     // x_0 / x_j, reported only
    bool used_scan = false;   // true when the endpoint signs did not bracket
};

/// Bisection on (omega_j - gap/4, omega_j + gap/4). If the endpoints do not
/// bracket a root, scans the interval and takes the sign change closest to
/// omega_j; throws NoSignChange if there is none. A positive `tolerance`
/// overrides min(r O0 x_0 x_j, 1e-12 gap).
DetuningSolution solve_detuning(const BandData& band, double omega0, std::size_t j,
                                double tolerance = 0.0);

/// Closed-form two-level matrix in the basis {|j down>, |0 up>} at energy z for
/// bath splitting omega_b.
Operator two_level_heff(const BandData& band, double omega0, std::size_t j, double omega_b, double z);

/// omega_B* 1 + Omega (|j down><0 up| + h.c.) evaluated at z = omega_B.
EffectiveHamiltonian effective_grover_hamiltonian(const BandData& band, double omega0, std::size_t j,
                                                  const DetuningSolution& sol);

/// Qubit-bath problem restricted to the band span: H = diag(omega_k) (x) 1 +
/// omega_b |up><up|, V = omega0 |x><x| (x) sigma_x in band coordinates.
/// Basis order is band index major, bath minor.
Composite band_composite(const BandData& band, double omega0, double omega_b);

struct QutritTruncationReport {
    double bgb_norm = 0.0;           // |<B|G_Q(omega1)|B>|
    Operator h_eff;                  // second-order truncation, P coordinates
    Operator p_basis;                // columns {0L, 0R, P1 (x) C}
    double rabi = 0.0;               // |P1 T_S |0>|
    double ground_shift = 0.0;       // <0B|H_eff|0B> - omega1
    double expected_ground_shift = 0.0;  // |<0|T_S|0>|^2 / omega1
    double closed_form_defect = 0.0;     // |H_eff - closed-form matrix|
    double resolvent_defect = 0.0;       // |H_eff - closed resolvent at omega1|
};

/// Uses the S1-projected coupling (S1 = |0> + P1) as the perturbation.
QutritTruncationReport qutrit_truncation_check(const QutritModel& model, const Operator& t_s);

}  // namespace qsc

#endif
