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

#include "qsc/errors.hpp"
#include "qsc/probabilistic.hpp"

using namespace qsc;

namespace {

constexpr double kPi = std::numbers::pi;

ClockModel clock(std::size_t n, std::size_t L, std::uint64_t seed) {
    ClockModel m;
    m.circuit = random_circuit(n, L, seed);
    return m;
}

double simpson_mean_sin2(double rabi, double lo, double hi) {
    const int n = 20000;
    const double h = (hi - lo) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        s += w * std::pow(std::sin(rabi * (lo + i * h)), 2);
    }
    return s * h / 3.0 / (hi - lo);
}

}  // namespace

TEST(MeanSin2, MatchesQuadrature) {
    for (double rabi : {0.3, 1.0, 2.7}) {
        for (auto [lo, hi] : {std::pair{0.1, 0.9}, std::pair{1.0, 4.0}, std::pair{kPi, 2 * kPi}}) {
            EXPECT_NEAR(mean_sin2(rabi, lo, hi), simpson_mean_sin2(rabi, lo, hi), 1e-10);
        }
    }
    // a full window of the doubled range averages to one half
    EXPECT_NEAR(mean_sin2(1.0, kPi, 2 * kPi), 0.5, 1e-14);
}

TEST(Prob, ProblemOverlaps) {
    const ProbProblem p = clock_prob_problem(clock(1, 2, 3));
    EXPECT_NEAR(p.f0, std::abs(p.model.ground.dot(p.fiducial)), 1e-14);
    EXPECT_NEAR(p.f1 * p.f1, p.model.p1.weight(p.fiducial), 1e-12);
    // F = |0 0^L> has the k = 0 and k = 1 clock overlaps
    EXPECT_NEAR(p.f0, clock_overlap(2, 0), 1e-9);
    EXPECT_NEAR(p.f1, clock_overlap(2, 1), 1e-9);
    EXPECT_GT(unit_rabi(p), 0.0);
}

TEST(Prob, MaximalOverlapPulse) {
    // F = |1>, a quarter Rabi period of H + X from |1 C>
    for (double r : {0.04, 0.02}) {
        const ProbProblem p = clock_prob_problem(clock(1, 2, 3));
        const QutritModel& q = p.model;
        const double omega0 = r * q.gap;
        const Composite c = qutrit_bath(q.h_system, q.omega1, omega0 * p.t_s);
        const double rabi = omega0 * unit_rabi(p);
        const StateVector one = q.p1.basis().col(0);
        const StateVector out = evolve(c.total(), kPi / (2.0 * rabi)) * tensor(one, bath::center());
        const Operator pb = tensor(identity(q.h_system.rows()), projector(bath::bright()));
        const double p_b = out.dot(pb * out).real();
        const double ground = std::norm(tensor(q.ground, bath::bright()).dot(out));
        EXPECT_GE(p_b, 1.0 - 5 * r) << r;
        EXPECT_GE(ground / p_b, 1.0 - 5 * r * r) << r;
    }
}

TEST(Prob, VerificationLeakageIsSecondOrder) {
    const ProbProblem p = clock_prob_problem(clock(1, 2, 3));
    for (double r : {0.04, 0.02, 0.01}) {
        const double leak = verification_leakage(p.model, r * p.model.gap);
        EXPECT_LE(leak, r * r) << r;
    }
}

TEST(Prob, VerificationSpectrum) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const ProbProblem p = clock_prob_problem(clock(1 + seed % 2, 2, seed));
        const auto vs = verification_spectrum(p.model);
        EXPECT_TRUE(vs.ok) << seed;
        EXPECT_LE(vs.ground_split, 1e-10);
        EXPECT_GE(vs.separation, p.model.gap * (1 - 1e-9));
    }
}

TEST(Prob, AcceptRateMatchesPrediction) {
    const ProbProblem p = clock_prob_problem(clock(1, 2, 3));
    ProbOptions o;
    o.epsilon = 0.1;
    o.trials = 2000;
    o.max_rounds = 1;
    o.seed = 5;
    const auto rep = run_probabilistic(p, o);
    EXPECT_EQ(rep.trials, 2000u);
    EXPECT_LE(rep.accept_count, rep.trials);
    EXPECT_GT(rep.predicted_accept, 0.0);
    EXPECT_GE(rep.accept_rate, 0.5 * rep.predicted_accept);
    EXPECT_LE(rep.accept_rate, 2.0 * rep.predicted_accept);
    EXPECT_NEAR(rep.predicted_accept, p.f1 * p.f1 * mean_sin2(rep.rabi, kPi / rep.omega_star, 2 * kPi / rep.omega_star), 1e-12);
    EXPECT_GE(rep.conditional_success, 0.9);
    EXPECT_LE(rep.conditional_success, 1.0 + 1e-12);
}

TEST(Prob, SeedDeterminism) {
    const ProbProblem p = clock_prob_problem(clock(1, 2, 3));
    ProbOptions o;
    o.trials = 200;
    o.seed = 9;
    o.record_attempts = true;
    const auto a = run_probabilistic(p, o);
    const auto b = run_probabilistic(p, o);
    EXPECT_EQ(a.accept_count, b.accept_count);
    EXPECT_EQ(a.attempts, b.attempts);
    EXPECT_EQ(a.conditional_success, b.conditional_success);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].tau, b.records[i].tau);
    }
    o.seed = 10;
    EXPECT_NE(run_probabilistic(p, o).records.front().tau, a.records.front().tau);
}

TEST(Prob, TauWindowsAndDoubling) {
    const ProbProblem p = clock_prob_problem(clock(1, 2, 3));
    ProbOptions o;
    o.trials = 50;
    o.max_rounds = 64;
    o.record_attempts = true;
    const auto rep = run_probabilistic(p, o);
    EXPECT_EQ(rep.doubling_threshold, static_cast<std::size_t>(std::ceil(4.0 / (p.f1 * p.f1))));
    ASSERT_FALSE(rep.tau_schedule.empty());
    EXPECT_NEAR(rep.tau_schedule.front(), kPi / rep.omega_star, 1e-12);
    for (std::size_t k = 1; k < rep.tau_schedule.size(); ++k) {
        EXPECT_NEAR(rep.tau_schedule[k], 2.0 * rep.tau_schedule[k - 1], 1e-9);
    }
    for (const auto& a : rep.records) {
        EXPECT_GE(a.tau, rep.tau_schedule.front() - 1e-12);
        EXPECT_TRUE(!a.accepted || a.bright);
    }
    EXPECT_NEAR(rep.tau_verify, kPi / (2.0 * rep.omega0), 1e-12);
}

TEST(Prob, CouplingTooLarge) {
    const ProbProblem p = clock_prob_problem(clock(1, 2, 3));
    ProbOptions o;
    o.omega0 = 0.2 * p.model.gap;
    o.trials = 1;
    EXPECT_THROW(run_probabilistic(p, o), CouplingTooLarge);
}

TEST(Prob, ScheduledCoupling) {
    const ProbProblem p = clock_prob_problem(clock(1, 2, 3));
    ProbOptions o;
    o.epsilon = 0.1;
    o.trials = 10;
    const auto rep = run_probabilistic(p, o);
    EXPECT_NEAR(rep.omega0, p.f1 * std::pow(0.1, 1.5) * p.model.gap, 1e-14);
    EXPECT_NEAR(rep.r, rep.omega0 / p.model.gap, 1e-14);
    EXPECT_NEAR(rep.omega_star, rep.rabi, 1e-14);
}
