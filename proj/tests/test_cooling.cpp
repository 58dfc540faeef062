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
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qsc/cooling.hpp"
#include "qsc/errors.hpp"

using namespace qsc;

namespace {

constexpr double kPi = std::numbers::pi;

CoolingProblem grover(std::size_t n) {
    return grover_problem(GroverModel{n, {0}, 1.0, 0.05});
}

CoolingProblem clock(std::size_t n, std::size_t L, std::uint64_t seed) {
    ClockModel m;
    m.circuit = random_circuit(n, L, seed);
    return clock_problem(m);
}

ScheduleOptions at_r(const CoolingProblem& p, double r, TimingMode timing = TimingMode::kExact) {
    ScheduleOptions o;
    o.omega0 = r * p.band.gap;
    o.timing = timing;
    return o;
}

double infidelity(const CoolingProblem& p, double r) {
    return 1.0 - run_deterministic(p, build_schedule(p, at_r(p, r))).ground_fidelity;
}

}  // namespace

TEST(Schedule, GroverSingleStep) {
    const CoolingProblem p = grover(1);
    const auto s = build_schedule(p, at_r(p, 0.02));
    ASSERT_EQ(s.steps.size(), 1u);
    EXPECT_EQ(s.steps[0].j, 1u);
    EXPECT_NEAR(s.steps[0].rabi, kPi / (2.0 * s.steps[0].tau), 1e-12);
}

TEST(Schedule, ClockScaling) {
    const CoolingProblem p = clock(1, 3, 5);
    ScheduleOptions o;
    o.epsilon = 0.1;
    const auto s = build_schedule(p, o);
    ASSERT_EQ(s.steps.size(), 3u);
    EXPECT_EQ(s.steps[0].j, 3u);
    EXPECT_EQ(s.steps[1].j, 2u);
    EXPECT_EQ(s.steps[2].j, 1u);
    EXPECT_NEAR(s.r, 0.1 * std::pow(3.0, -2.5), 1e-15);
    EXPECT_NEAR(s.omega0, s.r * p.band.gap, 1e-15);
    EXPECT_NEAR(scheduled_coupling(p.band, 0.1), s.omega0, 1e-15);
}

TEST(Schedule, AnalyticTimingIsSecondOrderClose) {
    const double r = 0.02;
    for (const CoolingProblem& p : {grover(4), clock(1, 3, 5)}) {
        const auto ex = build_schedule(p, at_r(p, r));
        const auto an = build_schedule(p, at_r(p, r, TimingMode::kAnalytic));
        ASSERT_EQ(ex.steps.size(), an.steps.size());
        for (std::size_t k = 0; k < ex.steps.size(); ++k) {
            EXPECT_LE(std::abs(an.steps[k].tau / ex.steps[k].tau - 1.0), 10 * r * r) << p.label << " " << k;
        }
    }
}

TEST(Schedule, CouplingTooLarge) {
    const CoolingProblem p = grover(3);
    EXPECT_THROW(build_schedule(p, at_r(p, 0.2)), CouplingTooLarge);
    EXPECT_NO_THROW(build_schedule(p, at_r(p, 0.1)));
}

TEST(Schedule, NaiveDetuningUsesBandEnergy) {
    const CoolingProblem p = grover(5);
    auto o = at_r(p, 0.05);
    o.naive_detuning = true;
    const auto s = build_schedule(p, o);
    EXPECT_EQ(s.steps[0].omega_b, 1.0);
}

TEST(CoolingStep, GroundUpIsFixed) {
    const CoolingProblem p = grover(3);
    const auto s = build_schedule(p, at_r(p, 0.05));
    const Operator u = step_unitary(p, s.omega0, s.steps[0]);
    const StateVector g_up = tensor(p.band_states[0], bath::up());
    const Operator rho = projector(g_up);
    EXPECT_LE((cooling_step(rho, u) - rho).norm(), 1e-15);
}

TEST(CoolingStep, TopBandTransfersToGroundUp) {
    for (double r : {0.05, 0.02}) {
        const CoolingProblem p = clock(1, 2, 3);
        const auto s = build_schedule(p, at_r(p, r));
        const Operator u = step_unitary(p, s.omega0, s.steps[0]);
        const Operator out = cooling_step(projector(tensor(p.band_states[2], bath::down())), u);
        const StateVector g_up = tensor(p.band_states[0], bath::up());
        EXPECT_GE(g_up.dot(out * g_up).real(), 1.0 - 10 * r * r) << r;
    }
}

TEST(CoolingStep, LowerBandsArePreserved) {
    const double r = 0.02;
    const CoolingProblem p = clock(1, 3, 3);
    const auto s = build_schedule(p, at_r(p, r));
    const Operator out = cooling_step(projector(tensor(p.band_states[0], bath::down())), step_unitary(p, s.omega0, s.steps[0]));
    // leakage out of M_{L-1} (x) bath is an O(r) amplitude
    double kept = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        for (const StateVector& b : {bath::down(), bath::up()}) {
            const StateVector v = tensor(p.band_states[k], b);
            kept += v.dot(out * v).real();
        }
    }
    EXPECT_GE(kept, 1.0 - 3.0 * r * r);
}

TEST(CoolingStep, GroverUpProbabilityMatchesBlock) {
    const double r = 0.02;
    const CoolingProblem p = grover(4);
    const auto s = build_schedule(p, at_r(p, r));
    const auto& st = s.steps[0];
    const auto rep = run_deterministic(p, s);
    // 4-dim invariant block: up probability after the pulse
    const Operator u = oracle::pade_evolve(
        oracle::grover_block_hamiltonian(p.band.xs[0], p.band.xs[1], 1.0, s.omega0, st.omega_b), st.tau);
    StateVector in = StateVector::Zero(4);
    in[0] = p.band.xs[0];
    in[2] = p.band.xs[1];
    const StateVector out = u * in;
    const double up = std::norm(out[1]) + std::norm(out[3]);
    EXPECT_NEAR(rep.per_step_up_probability[0], up, 1e-9);
    EXPECT_NEAR(rep.per_step_up_probability[0], p.band.xs[1] * p.band.xs[1], 5 * r);
    EXPECT_NEAR(rep.ground_fidelity, oracle::grover_block_fidelity(p.band.xs[0], p.band.xs[1], 1.0, s.omega0, st.omega_b, st.tau), 1e-9);
}

TEST(Run, GroundInputStaysCold) {
    const double r = 0.02;
    const CoolingProblem p = clock(1, 2, 3);
    const auto s = build_schedule(p, at_r(p, r));
    RunOptions o;
    o.initial = p.band_states[0];
    EXPECT_GE(run_deterministic(p, s, o).ground_fidelity, 1.0 - 10 * r * r);
}

TEST(Run, ClockIdentityCircuitImprovesWithSmallerR) {
    ClockModel m;
    m.circuit = identity_circuit(1, 2);
    const CoolingProblem p = clock_problem(m);
    double prev = 1.0;
    double c_fit = 0.0;
    for (double r : {0.05, 0.02, 0.01}) {
        const double inf = infidelity(p, r);
        EXPECT_LT(inf, prev) << r;
        prev = inf;
        c_fit = std::max(c_fit, inf / (std::pow(2.0, 2.5) * r));
    }
    RecordProperty("fitted_c", std::to_string(c_fit));
    EXPECT_LT(c_fit, 1.0);
    EXPECT_GE(1.0 - prev, 1.0 - c_fit * std::pow(2.0, 2.5) * 0.01);
}

TEST(Run, TrajectoryAgreesWithDensity) {
    const CoolingProblem p = clock(1, 2, 3);
    const auto s = build_schedule(p, at_r(p, 0.05));
    const auto dens = run_deterministic(p, s);
    RunOptions o;
    o.mode = RunMode::kTrajectory;
    o.shots = 2000;
    o.seed = 11;
    const auto traj = run_deterministic(p, s, o);
    const double f = dens.ground_fidelity;
    const double sigma = std::sqrt(std::max(f * (1 - f), 1e-12) / 2000.0);
    EXPECT_LE(std::abs(traj.ground_fidelity - f), 3.0 * sigma + 1.0 / 2000.0);
    EXPECT_EQ(traj.shots, 2000u);
}

TEST(Run, DensityModeIsBitwiseReproducible) {
    const CoolingProblem p = clock(1, 2, 4);
    const auto s = build_schedule(p, at_r(p, 0.03));
    const auto a = run_deterministic(p, s);
    const auto b = run_deterministic(p, s);
    EXPECT_EQ(a.ground_fidelity, b.ground_fidelity);
    EXPECT_TRUE((a.final_density.array() == b.final_density.array()).all());
}

TEST(Reduced, ZeroEtaMatchesFullRun) {
    const CoolingProblem p = clock(1, 3, 2);
    const auto o = at_r(p, 0.02);
    const auto full = run_deterministic(p, build_schedule(p, o));
    const auto red = run_reduced(p, o, 0.0);
    EXPECT_NEAR(red.ground_fidelity, full.ground_fidelity, 1e-12);
    EXPECT_NEAR(red.total_time, full.total_time, 1e-9 * full.total_time);
}

TEST(Reduced, LargeEtaSkipsEverything) {
    const CoolingProblem p = clock(1, 3, 2);
    const auto rep = run_reduced(p, at_r(p, 0.02), 2.0);
    EXPECT_EQ(rep.total_time, 0.0);
    EXPECT_NEAR(rep.ground_fidelity, p.band.xs[0] * p.band.xs[0], 1e-12);
}

TEST(Reduced, SkippingTheWeakestBand) {
    const double eps = 0.1;
    const CoolingProblem p = clock(1, 5, 8);
    ScheduleOptions o;
    o.epsilon = eps;
    const auto full = run_deterministic(p, build_schedule(p, o));
    // The default eta = eps / L^{3/2} skips nothing at L = 5: min x_j * L^{3/2} > 1.6.
    const auto dflt = run_reduced(p, o);
    EXPECT_NEAR(dflt.ground_fidelity, full.ground_fidelity, 1e-12);
    // eta just above the smallest overlap removes j = L
    const double eta = p.band.xs[5] * 1.01;
    ASSERT_LT(eta, p.band.xs[4]);
    const auto red = run_reduced(p, o, eta);
    EXPECT_LT(red.total_time, full.total_time);
    EXPECT_LE(std::abs(red.ground_fidelity - full.ground_fidelity), eps);
    EXPECT_NEAR(red.f_perp, p.band.xs[5], 1e-9);
}

TEST(Errors, ZeroInjectionMeetsBudgets) {
    const CoolingProblem p = clock(1, 2, 3);
    const auto s = build_schedule(p, at_r(p, 0.02));
    ErrorInjection none;
    for (const auto& b : inject_errors(p, s, none)) {
        EXPECT_TRUE(b.r1_ok);
        EXPECT_EQ(b.r1, 0.0);
    }
}

TEST(Errors, SaturatedS1BudgetStaysSecondOrder) {
    // The error-free exact-timing run falls off faster than r^2, so the
    // budget-saturating error is compared against r^2 rather than against it.
    const CoolingProblem p = clock(1, 2, 3);
    std::vector<double> rs = {0.04, 0.02, 0.01};
    std::vector<double> hits;
    for (double r : rs) {
        const auto s = build_schedule(p, at_r(p, r));
        double budget = 1e9;
        for (const auto& b : inject_errors(p, s, ErrorInjection{})) {
            budget = std::min(budget, b.budget);
        }
        const ErrorInjection at = random_block_errors(p, s, 0.99 * budget, 0.0, 0.0, 4);
        for (const auto& b : inject_errors(p, s, at)) {
            EXPECT_TRUE(b.r1_ok);
            EXPECT_NEAR(b.r1, 0.99 * budget, 1e-9);
        }
        RunOptions o;
        o.errors = &at;
        const double base = 1.0 - run_deterministic(p, s).ground_fidelity;
        const double hit = 1.0 - run_deterministic(p, s, o).ground_fidelity;
        EXPECT_GE(hit, base);
        EXPECT_LE(hit, r * r);
        hits.push_back(hit);
    }
    const double slope = std::log(hits.front() / hits.back()) / std::log(rs.front() / rs.back());
    EXPECT_GE(slope, 1.5);
}

TEST(Errors, TenfoldBudgetViolation) {
    const double r = 0.02;
    const CoolingProblem p = clock(1, 2, 3);
    const auto s = build_schedule(p, at_r(p, r));
    double budget = 1e9;
    for (const auto& b : inject_errors(p, s, ErrorInjection{})) {
        budget = std::min(budget, b.budget);
    }
    const ErrorInjection big = random_block_errors(p, s, 10.0 * budget, 10.0 * std::sqrt(budget), 0.0, 4);
    bool flagged = false;
    for (const auto& b : inject_errors(p, s, big)) {
        flagged = flagged || !b.ok();
    }
    EXPECT_TRUE(flagged);
    RunOptions o;
    o.errors = &big;
    const auto over = run_deterministic(p, s, o);
    RecordProperty("fidelity_10x_budget", std::to_string(over.ground_fidelity));
    EXPECT_LT(over.ground_fidelity, run_deterministic(p, s).ground_fidelity);
}

TEST(Errors, NonHermitianRejected) {
    const CoolingProblem p = grover(2);
    const auto s = build_schedule(p, at_r(p, 0.02));
    ErrorInjection e;
    Operator d = Operator::Zero(8, 8);
    d(0, 1) = 0.1;
    e.deltas.push_back(d);
    EXPECT_THROW(inject_errors(p, s, e), NonHermitianInput);
}

TEST(Cost, GroverSingleStep) {
    const double r = 0.02;
    const CoolingProblem p = grover(5);
    const auto s = build_schedule(p, at_r(p, r));
    const auto c = cost_report(p, s);
    const double bare = kPi / (2.0 * s.omega0 * p.band.xs[0] * p.band.xs[1]);
    EXPECT_NEAR(c.total_time / bare, 1.0, 10 * r * r);
    EXPECT_NEAR(c.cost, c.h_norm * c.total_time, 1e-12 * c.cost);
}

TEST(Cost, ClockTimeGrowsWithL) {
    double prev = 0.0;
    for (std::size_t L = 2; L <= 5; ++L) {
        ClockModel m;
        m.circuit = identity_circuit(1, L);
        const CoolingProblem p = clock_problem(m);
        ScheduleOptions o;
        o.epsilon = 0.1;
        const double t = cost_report(p, build_schedule(p, o)).total_time;
        EXPECT_GT(t, prev) << L;
        prev = t;
    }
}

TEST(Cost, DoublingEpsilonHalvesTime) {
    const CoolingProblem p = clock(1, 3, 5);
    ScheduleOptions o;
    o.timing = TimingMode::kAnalytic;
    o.epsilon = 0.05;
    const double t1 = build_schedule(p, o).total_time();
    o.epsilon = 0.1;
    const double t2 = build_schedule(p, o).total_time();
    EXPECT_NEAR(t1 / t2, 2.0, 2e-9);
}

TEST(CoolingProperty, TcpHygiene) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const CoolingProblem p = seed % 2 == 0 ? grover(2 + seed) : clock(1 + seed % 2, 2, seed);
        const auto rep = run_deterministic(p, build_schedule(p, at_r(p, 0.03)));
        EXPECT_LE(rep.trace_residual, 1e-10);
        EXPECT_GE(rep.min_eigenvalue, -1e-9);
        EXPECT_GE(rep.ground_fidelity, 0.0);
        EXPECT_LE(rep.ground_fidelity, 1.0 + 1e-9);
    }
}

TEST(CoolingProperty, RemainderScaling) {
    // trace of the Lemma-6 remainder per step, divided by j^{3/2} r
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const CoolingProblem p = clock(1, 3, seed);
        for (double r : {0.04, 0.02}) {
            const auto rep = run_deterministic(p, build_schedule(p, at_r(p, r)));
            for (std::size_t k = 0; k < rep.remainder_weights.size(); ++k) {
                const double j = static_cast<double>(p.L() - k);
                EXPECT_LE(rep.remainder_weights[k], 2.0 * std::pow(j, 1.5) * r) << seed << " " << r << " " << k;
            }
        }
    }
}

TEST(CoolingProperty, FidelityMonotoneInR) {
    const CoolingProblem p = clock(2, 2, 6);
    double prev = 1.0;
    for (double r : {0.06, 0.03, 0.015}) {
        const double inf = infidelity(p, r);
        EXPECT_LE(inf, prev);
        prev = inf;
    }
}

TEST(Krylov, ReductionReproducesFullRun) {
    const CoolingProblem p = grover(5);
    const CoolingProblem red = reduce_problem(p);
    EXPECT_EQ(red.system_dim(), 2u);
    const auto s = build_schedule(p, at_r(p, 0.02));
    EXPECT_NEAR(run_deterministic(red, s).ground_fidelity, run_deterministic(p, s).ground_fidelity, 1e-12);
}
