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

#include "qsc/level_shift.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qsc/errors.hpp"

namespace qsc {

LevelShiftContext LevelShiftContext::make(Operator h, Subspace p, double gap, double omega0) {
    require_hermitian(h, "level-shift H");
    if (p.ambient_dim() != static_cast<std::size_t>(h.rows())) {
        throw DimensionMismatch("LevelShiftContext: P lives in a different space");
    }
    if (!(gap > 0.0)) {
        throw std::invalid_argument("LevelShiftContext: gap must be positive");
    }
    LevelShiftContext ctx;
    ctx.q = p.complement();
    ctx.p = std::move(p);
    ctx.h = std::move(h);
    ctx.gap = gap;
    ctx.omega0 = omega0;
    return ctx;
}

Operator green_function(const LevelShiftContext& ctx, double z) {
    const Operator& bq = ctx.q.basis();
    if (bq.cols() == 0) {
        return Operator::Zero(ctx.h.rows(), ctx.h.cols());
    }
    SpectralDecomposition sd = hermitian_eig(ctx.q.restrict(ctx.h));
    double nearest = (sd.values.array() - z).abs().minCoeff();
    if (nearest < ctx.gap / 4.0) {
        std::ostringstream msg;
        msg << "green_function: z = " << z << " lies " << nearest << " from Spec(H|_Q)";
        throw PoleTooClose(msg.str());
    }
    Eigen::VectorXcd inv(sd.values.size());
    for (Eigen::Index k = 0; k < inv.size(); ++k) {
        inv[k] = 1.0 / (z - sd.values[k]);
    }
    Operator w = bq * sd.vectors;
    return w * inv.asDiagonal() * w.adjoint();
}

EffectiveHamiltonian self_energy(const LevelShiftContext& ctx, const Operator& v, double z,
                                 SelfEnergyMode mode, int order) {
    if (v.rows() != ctx.h.rows() || v.cols() != ctx.h.cols()) {
        throw DimensionMismatch("self_energy: V does not match H");
    }
    require_hermitian(v, "self_energy V");
    const Operator& bp = ctx.p.basis();
    const Operator& bq = ctx.q.basis();
    EffectiveHamiltonian out;
    out.basis = bp;
    out.z = z;
    out.order = mode == SelfEnergyMode::kClosed ? -1 : order;
    out.matrix = bp.adjoint() * (ctx.h + v) * bp;
    if (bq.cols() == 0 || bp.cols() == 0) {
        return out;
    }
    const Operator w = bq.adjoint() * v * bp;
    const double scale = 1.0 + operator_norm(ctx.h) + operator_norm(v);

    if (mode == SelfEnergyMode::kClosed) {
        SpectralDecomposition sd = hermitian_eig(bq.adjoint() * (ctx.h + v) * bq);
        Eigen::VectorXcd inv(sd.values.size());
        for (Eigen::Index k = 0; k < inv.size(); ++k) {
            double d = z - sd.values[k];
            if (std::abs(d) < 1e-13 * scale) {
                throw SingularResolvent("self_energy: z is an eigenvalue of Q(H+V)Q");
            }
            inv[k] = 1.0 / d;
        }
        Operator u = sd.vectors.adjoint() * w;
        out.matrix += u.adjoint() * inv.asDiagonal() * u;
    } else {
        SpectralDecomposition sd = hermitian_eig(ctx.q.restrict(ctx.h));
        Eigen::VectorXcd inv(sd.values.size());
        for (Eigen::Index k = 0; k < inv.size(); ++k) {
            double d = z - sd.values[k];
            if (std::abs(d) < 1e-13 * scale) {
                throw SingularResolvent("self_energy: z is an eigenvalue of QHQ");
            }
            inv[k] = 1.0 / d;
        }
        const Operator g0 = sd.vectors * inv.asDiagonal() * sd.vectors.adjoint();
        const Operator vqq = bq.adjoint() * v * bq;
        Operator x = g0 * w;
        for (int m = 1; m <= order; ++m) {
            out.matrix += w.adjoint() * x;
            x = g0 * (vqq * x);
        }
    }
    return out;
}

GSums g_sums(const std::vector<double>& xs, const std::vector<double>& omegas, double omega_b,
             std::size_t j, double z, double pole_guard) {
    if (xs.size() != omegas.size() || j >= xs.size()) {
        throw DimensionMismatch("g_sums: inconsistent band data");
    }
    GSums g;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double w = xs[k] * xs[k];
        if (w == 0.0) {
            continue;
        }
        if (k != j) {
            double d = z - omegas[k];
            if (std::abs(d) < pole_guard || d == 0.0) {
                throw PoleTooClose("g_sums: z too close to omega_k");
            }
            g.gj += w / d;
        }
        if (k != 0) {
            double d = z - (omegas[k] + omega_b);
            if (std::abs(d) < pole_guard || d == 0.0) {
                throw PoleTooClose("g_sums: z too close to omega_k + omega_B");
            }
            g.g0 += w / d;
        }
    }
    return g;
}

double detuning_function(const BandData& band, double omega0, std::size_t j, double z) {
    const GSums g = g_sums(band.xs, band.omegas, z, j, z, band.gap / 4.0);
    const double o2 = omega0 * omega0;
    const double x0 = band.xs[0];
    const double xj = band.xs[j];
    return (1.0 - o2 * g.gj * g.g0) * (z - band.omegas[j]) + o2 * (x0 * x0 * g.gj - xj * xj * g.g0);
}

DetuningSolution solve_detuning(const BandData& band, double omega0, std::size_t j, double tolerance) {
    if (j == 0 || j >= band.xs.size() || band.xs.size() != band.omegas.size()) {
        throw std::invalid_argument("solve_detuning: band index out of range");
    }
    const double x0 = band.xs[0];
    const double xj = band.xs[j];
    if (!(x0 > 0.0) || !(xj > 0.0)) {
        throw std::invalid_argument("solve_detuning: x_0 and x_j must be positive");
    }
    const double r = omega0 / band.gap;
    if (!(r < 0.125)) {
        std::ostringstream msg;
        msg << "solve_detuning: r = " << r << " is not below 1/8";
        throw CouplingTooLarge(msg.str());
    }

    DetuningSolution sol;
    sol.j = j;
    sol.x_ratio = x0 / xj;
    sol.tolerance = tolerance > 0.0 ? tolerance : std::min(r * omega0 * x0 * xj, 1e-12 * band.gap);
    auto f = [&](double z) { return detuning_function(band, omega0, j, z); };

    // Open bracket: stay a hair inside the gap/4 pole guard.
    const double half = band.gap / 4.0 * (1.0 - 1e-12);
    double lo = band.omegas[j] - half;
    double hi = band.omegas[j] + half;
    double flo = f(lo);
    double fhi = f(hi);
    if (!(flo < 0.0 && fhi > 0.0) && !(flo > 0.0 && fhi < 0.0)) {
        constexpr int kScan = 4096;
        double best = std::numeric_limits<double>::infinity();
        double prev_z = lo;
        double prev_f = flo;
        bool found = false;
        for (int s = 1; s <= kScan; ++s) {
            double z = lo + (hi - lo) * s / kScan;
            double fz = f(z);
            if ((prev_f <= 0.0 && fz > 0.0) || (prev_f >= 0.0 && fz < 0.0)) {
                double mid = 0.5 * (prev_z + z);
                if (std::abs(mid - band.omegas[j]) < best) {
                    best = std::abs(mid - band.omegas[j]);
                    sol.lo = prev_z;
                    sol.hi = z;
                    found = true;
                }
            }
            prev_z = z;
            prev_f = fz;
        }
        if (!found) {
            throw NoSignChange("solve_detuning: no sign change in the bracket");
        }
        sol.used_scan = true;
        lo = sol.lo;
        hi = sol.hi;
        flo = f(lo);
    } else {
        sol.lo = lo;
        sol.hi = hi;
    }

    for (int it = 0; it < 400 && hi - lo > 2.0 * sol.tolerance; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    sol.omega_b = 0.5 * (lo + hi);
    sol.residual = f(sol.omega_b);

    const GSums g = g_sums(band.xs, band.omegas, sol.omega_b, j, sol.omega_b, band.gap / 4.0);
    const double den = 1.0 - omega0 * omega0 * g.gj * g.g0;
    sol.rabi = omega0 * x0 * xj / den;
    sol.omega_b_star = sol.omega_b + omega0 * omega0 * x0 * x0 * g.gj / den;
    return sol;
}

Operator two_level_heff(const BandData& band, double omega0, std::size_t j, double omega_b, double z) {
    const GSums g = g_sums(band.xs, band.omegas, omega_b, j, z);
    const double den = 1.0 - omega0 * omega0 * g.gj * g.g0;
    const double x0 = band.xs[0];
    const double xj = band.xs[j];
    const double pref = omega0 / den;
    Operator m(2, 2);
    m(0, 0) = band.omegas[j] + pref * xj * xj * omega0 * g.g0;
    m(0, 1) = pref * x0 * xj;
    m(1, 0) = pref * x0 * xj;
    m(1, 1) = omega_b + pref * x0 * x0 * omega0 * g.gj;
    return m;
}

EffectiveHamiltonian effective_grover_hamiltonian(const BandData& band, double omega0, std::size_t j,
                                                  const DetuningSolution& sol) {
    EffectiveHamiltonian out;
    out.matrix = two_level_heff(band, omega0, j, sol.omega_b, sol.omega_b);
    const auto dim = static_cast<Eigen::Index>(2 * band.xs.size());
    out.basis = Operator::Zero(dim, 2);
    out.basis(static_cast<Eigen::Index>(2 * j), 0) = 1.0;
    out.basis(1, 1) = 1.0;
    out.z = sol.omega_b;
    return out;
}

Composite band_composite(const BandData& band, double omega0, double omega_b) {
    const std::size_t m = band.xs.size();
    Operator hs = Operator::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    StateVector x(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        hs(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = band.omegas[k];
        x[static_cast<Eigen::Index>(k)] = band.xs[k];
    }
    return qubit_bath(hs, omega_b, Operator(omega0 * projector(x)));
}

QutritTruncationReport qutrit_truncation_check(const QutritModel& model, const Operator& t_s) {
    const auto d = static_cast<std::size_t>(model.h_system.rows());
    const Operator& b1 = model.p1.basis();
    const Operator s1 = projector(model.ground) + model.p1.projector();
    const Operator t1 = s1 * t_s * s1;
    const Composite comp = qutrit_bath(model.h_system, model.omega1, t1);

    Operator pb(static_cast<Eigen::Index>(3 * d), 2 + b1.cols());
    pb.col(0) = tensor(model.ground, bath::left());
    pb.col(1) = tensor(model.ground, bath::right());
    for (Eigen::Index k = 0; k < b1.cols(); ++k) {
        pb.col(2 + k) = tensor(StateVector(b1.col(k)), bath::center());
    }
    const LevelShiftContext ctx =
        LevelShiftContext::make(comp.h, Subspace(pb), model.gap, operator_norm(t_s));
    const Operator g = green_function(ctx, model.omega1);

    QutritTruncationReport rep;
    const Operator bmap = tensor(identity(d), Operator(bath::bright()));
    rep.bgb_norm = operator_norm(Operator(bmap.adjoint() * g * bmap));
    rep.p_basis = pb;
    rep.h_eff = pb.adjoint() * comp.total() * pb + pb.adjoint() * comp.v * g * comp.v * pb;

    const cplx t00 = model.ground.dot(t_s * model.ground);
    const StateVector coupling = b1.adjoint() * (t_s * model.ground);
    rep.rabi = coupling.norm();
    rep.expected_ground_shift = std::norm(t00) / model.omega1;
    const StateVector zb = tensor(model.ground, bath::bright());
    rep.ground_shift = std::real(zb.dot(pb * (rep.h_eff * (pb.adjoint() * zb)))) - model.omega1;

    Operator closed = Operator::Zero(pb.cols(), pb.cols());
    closed(0, 0) = closed(1, 1) = model.omega1;
    closed.block(2, 2, b1.cols(), b1.cols()) = b1.adjoint() * model.h_system * b1;
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index k = 0; k < b1.cols(); ++k) {
        closed(2 + k, 0) = closed(2 + k, 1) = s * coupling[k];
        closed(0, 2 + k) = closed(1, 2 + k) = s * std::conj(coupling[k]);
    }
    closed.block(0, 0, 2, 2).array() += 0.5 * rep.expected_ground_shift;
    rep.closed_form_defect = operator_norm(Operator(rep.h_eff - closed));

    const EffectiveHamiltonian exact = self_energy(ctx, comp.v, model.omega1);
    rep.resolvent_defect = operator_norm(Operator(rep.h_eff - exact.matrix));
    return rep;
}

}  // namespace qsc
