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

#include "qsc/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "qsc/errors.hpp"
#include "qsc/parallel.hpp"
#include "qsc/random.hpp"

namespace qsc {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Orthogonalises v against the columns of `basis` (two Gram-Schmidt passes).
StateVector orthogonalize(const std::vector<StateVector>& basis, StateVector v) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
            v -= b * b.dot(v);
        }
    }
    return v;
}

Operator columns(const std::vector<StateVector>& vs, Eigen::Index rows) {
    Operator out(rows, idx(vs.size()));
    for (std::size_t c = 0; c < vs.size(); ++c) {
        out.col(idx(c)) = vs[c];
    }
    return out;
}

// Span of the nonzero band states with both bath levels.
Subspace band_span_with_bath(const CoolingProblem& problem) {
    std::vector<StateVector> vs;
    for (const auto& b : problem.band_states) {
        if (b.norm() > 0.0) {
            vs.push_back(tensor(b, bath::down()));
            vs.push_back(tensor(b, bath::up()));
        }
    }
    return Subspace::span(columns(vs, idx(2 * problem.system_dim())));
}

void check_problem(const CoolingProblem& p) {
    const auto d = p.h_system.rows();
    if (p.t_s.rows() != d || p.fiducial.size() != d || p.ground.ambient_dim() != p.system_dim()) {
        throw DimensionMismatch("cooling problem: inconsistent dimensions");
    }
    if (p.band.xs.size() != p.band.omegas.size() || p.band_states.size() != p.band.xs.size() ||
        p.band.xs.size() < 2) {
        throw DimensionMismatch("cooling problem: band data needs at least two consistent levels");
    }
}

}  // namespace

CoolingProblem grover_problem(const GroverModel& model, const std::optional<StateVector>& fiducial) {
    const GroverSystem sys = build_grover(model);
    CoolingProblem p;
    p.label = "grover";
    p.h_system = sys.h_system;
    p.fiducial = fiducial ? *fiducial : uniform_state(model.n);
    if (p.fiducial.size() != idx(model.dim())) {
        throw DimensionMismatch("grover_problem: fiducial has the wrong dimension");
    }
    if (std::abs(p.fiducial.norm() - 1.0) > tol::kNormalization) {
        throw std::invalid_argument("grover_problem: fiducial is not normalised");
    }
    p.t_s = projector(p.fiducial);
    p.band.omegas = {0.0, model.omega1};
    p.band.gap = model.omega1;
    for (const Subspace* s : {&sys.p0, &sys.p1}) {
        StateVector proj = s->projector() * p.fiducial;
        double x = proj.norm();
        p.band.xs.push_back(x);
        p.band_states.push_back(x > 0.0 ? StateVector(proj / x) : StateVector::Zero(p.fiducial.size()));
    }
    p.ground = sys.p0;
    return p;
}

CoolingProblem clock_problem(const ClockModel& model, std::size_t cap) {
    CoolingProblem p;
    p.label = "clock";
    p.h_system = build_clock(model, cap);
    p.t_s = clock_coupling(model);
    p.fiducial = clock_fiducial(model);
    const std::size_t L = model.L();
    for (std::size_t k = 0; k <= L; ++k) {
        StateVector s = clock_band_state(model, k);
        p.band.omegas.push_back(clock_omega(L, model.omega, k));
        p.band.xs.push_back(std::abs(s.dot(p.fiducial)));
        p.band_states.push_back(std::move(s));
    }
    p.band.gap = band_gap(hermitian_eig(p.h_system), p.band.omegas);
    p.ground = Subspace(Operator(p.band_states[0]));
    return p;
}

Subspace krylov_closure(const std::vector<Operator>& ops, const Operator& seeds, double tol) {
    const Eigen::Index dim = seeds.rows();
    std::vector<StateVector> basis;
    std::deque<std::size_t> pending;
    auto consider = [&](StateVector v, double scale) {
        v = orthogonalize(basis, std::move(v));
        double nv = v.norm();
        if (nv > tol * std::max(1.0, scale) && basis.size() < static_cast<std::size_t>(dim)) {
            basis.push_back(v / nv);
            pending.push_back(basis.size() - 1);
        }
    };
    for (Eigen::Index c = 0; c < seeds.cols(); ++c) {
        consider(seeds.col(c), seeds.col(c).norm());
    }
    while (!pending.empty()) {
        std::size_t k = pending.front();
        pending.pop_front();
        for (const auto& op : ops) {
            if (op.rows() != dim || op.cols() != dim) {
                throw DimensionMismatch("krylov_closure: operator dimension");
            }
            StateVector w = op * basis[k];
            double scale = w.norm();
            consider(std::move(w), scale);
        }
    }
    return Subspace(columns(basis, dim));
}

CoolingProblem reduce_problem(const CoolingProblem& problem, double tol) {
    check_problem(problem);
    const Subspace s = krylov_closure({problem.h_system, problem.t_s}, Operator(problem.fiducial), tol);
    const Operator& b = s.basis();
    CoolingProblem out;
    out.label = problem.label + "/reduced";
    out.h_system = b.adjoint() * problem.h_system * b;
    out.t_s = b.adjoint() * problem.t_s * b;
    out.fiducial = b.adjoint() * problem.fiducial;
    out.band = problem.band;
    for (const auto& v : problem.band_states) {
        out.band_states.push_back(b.adjoint() * v);
    }
    out.ground = Subspace::span(Operator(b.adjoint() * problem.ground.basis()));
    return out;
}

double CoolingSchedule::total_time() const {
    double t = 0.0;
    for (const auto& s : steps) {
        t += s.tau;
    }
    return t;
}

double scheduled_coupling(const BandData& band, double epsilon, double c) {
    const double L = static_cast<double>(band.xs.size() - 1);
    return c * epsilon * std::pow(L, -2.5) * band.gap;
}

Operator step_hamiltonian(const CoolingProblem& problem, double omega0, double omega_b, const Operator* delta) {
    const std::size_t d = problem.system_dim();
    Operator h = tensor(problem.h_system, identity(2)) + omega_b * tensor(identity(d), projector(bath::up())) +
                 omega0 * tensor(problem.t_s, bath::sigma_x());
    if (delta != nullptr && delta->size() > 0) {
        if (delta->rows() != h.rows() || delta->cols() != h.cols()) {
            throw DimensionMismatch("step_hamiltonian: error term has the wrong dimension");
        }
        require_hermitian(*delta, "error term");
        h += *delta;
    }
    return h;
}

CoolingSchedule build_schedule(const CoolingProblem& problem, const ScheduleOptions& options) {
    check_problem(problem);
    const BandData& band = problem.band;
    CoolingSchedule sched;
    sched.epsilon = options.epsilon;
    sched.timing = options.timing;
    sched.omega0 = options.omega0 > 0.0 ? options.omega0 : scheduled_coupling(band, options.epsilon, options.c);
    sched.r = sched.omega0 / band.gap;
    if (!(sched.r < 0.125)) {
        std::ostringstream msg;
        msg << "build_schedule: r = " << sched.r << " is not below 1/8";
        throw CouplingTooLarge(msg.str());
    }
    const double x0 = band.xs[0];
    if (!(x0 > 0.0)) {
        throw std::invalid_argument("build_schedule: F has no ground-band component");
    }
    for (std::size_t j = problem.L(); j >= 1; --j) {
        const double xj = band.xs[j];
        if (xj == 0.0 || xj <= options.eta) {
            sched.skipped.push_back(j);
            continue;
        }
        ScheduleStep step;
        step.j = j;
        step.detuning = solve_detuning(band, sched.omega0, j);
        step.omega_b = options.naive_detuning ? band.omegas[j] : step.detuning.omega_b;
        if (options.timing == TimingMode::kAnalytic) {
            step.tau = M_PI / (2.0 * sched.omega0 * x0 * xj);
        } else {
            const SpectralDecomposition sd = hermitian_eig(step_hamiltonian(problem, sched.omega0, step.omega_b));
            const StateVector a = tensor(problem.band_states[j], bath::down());
            const StateVector b = tensor(problem.band_states[0], bath::up());
            Eigen::VectorXd w = (sd.vectors.adjoint() * a).cwiseAbs2() + (sd.vectors.adjoint() * b).cwiseAbs2();
            Eigen::Index i1 = 0;
            w.maxCoeff(&i1);
            w[i1] = -1.0;
            Eigen::Index i2 = 0;
            w.maxCoeff(&i2);
            step.tau = M_PI / std::abs(sd.values[i1] - sd.values[i2]);
        }
        step.rabi = M_PI / (2.0 * step.tau);
        sched.steps.push_back(step);
    }
    return sched;
}

Operator step_unitary(const CoolingProblem& problem, double omega0, const ScheduleStep& step, const Operator* delta) {
    return hermitian_eig(step_hamiltonian(problem, omega0, step.omega_b, delta)).propagator(step.tau);
}

Operator cooling_step(const Operator& rho, const Operator& unitary) {
    const Eigen::Index n = rho.rows();
    if (n % 2 != 0 || rho.cols() != n || unitary.rows() != n || unitary.cols() != n) {
        throw DimensionMismatch("cooling_step: rho and U must share an even dimension");
    }
    const auto even = Eigen::seqN(0, n / 2, 2);
    const auto odd = Eigen::seqN(1, n / 2, 2);
    const Operator ue = unitary(Eigen::all, even);
    Operator out = ue * Operator(rho(even, even)) * ue.adjoint();
    out(odd, odd) += rho(odd, odd);
    return out;
}

Operator initial_density(const CoolingProblem& problem) {
    return projector(tensor(problem.fiducial, bath::down()));
}

std::vector<BlockBudget> inject_errors(const CoolingProblem& problem, const CoolingSchedule& schedule,
                                       const ErrorInjection& errors) {
    check_problem(problem);
    if (!errors.deltas.empty() && errors.deltas.size() != schedule.steps.size()) {
        throw DimensionMismatch("inject_errors: need one error term per step");
    }
    const Operator p1 = band_span_with_bath(problem).projector();
    const Operator p2 = identity(static_cast<std::size_t>(p1.rows())) - p1;
    const Operator v = schedule.omega0 * tensor(problem.t_s, bath::sigma_x());
    const double gap = problem.band.gap;
    std::vector<BlockBudget> out;
    for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
        Operator delta = Operator::Zero(p1.rows(), p1.cols());
        if (!errors.deltas.empty()) {
            if (errors.deltas[s].rows() != p1.rows() || errors.deltas[s].cols() != p1.cols()) {
                throw DimensionMismatch("inject_errors: error term has the wrong dimension");
            }
            require_hermitian(errors.deltas[s], "error term");
            delta = errors.deltas[s];
        }
        BlockBudget b;
        b.j = schedule.steps[s].j;
        b.r1 = operator_norm(Operator(p1 * delta * p1)) / gap;
        b.rx = operator_norm(Operator(p1 * (v + delta) * p2)) / gap;
        b.r2 = operator_norm(Operator(p2 * (v + delta) * p2)) / gap;
        b.budget = schedule.r * schedule.omega0 * problem.band.xs[0] * problem.band.xs[b.j] / gap;
        b.r1_ok = b.r1 < b.budget;
        b.rx_ok = b.rx * b.rx < b.budget;
        b.r2_ok = b.r2 < 0.5;
        out.push_back(b);
    }
    return out;
}

ErrorInjection random_block_errors(const CoolingProblem& problem, const CoolingSchedule& schedule, double r1,
                                   double rx, double r2, std::uint64_t seed) {
    const Operator p1 = band_span_with_bath(problem).projector();
    const std::size_t dim = static_cast<std::size_t>(p1.rows());
    const Operator p2 = identity(dim) - p1;
    const double gap = problem.band.gap;
    auto scaled = [](const Operator& m, double target) -> Operator {
        double nm = operator_norm(m);
        if (target == 0.0 || nm == 0.0) {
            return Operator::Zero(m.rows(), m.cols());
        }
        return m * (target / nm);
    };
    ErrorInjection out;
    for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
        Rng rng(derive_seed(seed, s));
        const Operator a = random_hermitian(dim, rng);
        const Operator d11 = scaled(p1 * a * p1, r1 * gap);
        const Operator d12 = scaled(p1 * a * p2, rx * gap);
        const Operator d22 = scaled(p2 * a * p2, r2 * gap);
        out.deltas.push_back(d11 + d12 + d12.adjoint() + d22);
    }
    return out;
}

CostReport cost_report(const CoolingProblem& problem, const CoolingSchedule& schedule) {
    CostReport c;
    c.total_time = schedule.total_time();
    for (const auto& s : schedule.steps) {
        c.h_norm = std::max(c.h_norm, hermitian_norm(step_hamiltonian(problem, schedule.omega0, s.omega_b)));
    }
    if (schedule.steps.empty()) {
        c.h_norm = hermitian_norm(step_hamiltonian(problem, schedule.omega0, 0.0));
    }
    c.cost = c.h_norm * c.total_time;
    return c;
}

RunReport run_deterministic(const CoolingProblem& problem, const CoolingSchedule& schedule, const RunOptions& options) {
    check_problem(problem);
    const ErrorInjection* errors = options.errors;
    if (errors != nullptr && !errors->deltas.empty() && errors->deltas.size() != schedule.steps.size()) {
        throw DimensionMismatch("run_deterministic: need one error term per step");
    }
    const std::size_t d = problem.system_dim();
    StateVector start = options.initial ? *options.initial : problem.fiducial;
    if (start.size() != idx(d)) {
        throw DimensionMismatch("run_deterministic: initial state has the wrong dimension");
    }

    std::vector<Operator> unitaries;
    for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
        const Operator* delta = (errors != nullptr && !errors->deltas.empty()) ? &errors->deltas[s] : nullptr;
        unitaries.push_back(step_unitary(problem, schedule.omega0, schedule.steps[s], delta));
    }
    const Operator m0 = tensor(problem.ground.projector(), identity(2));
    const Operator ground_up = tensor(problem.ground.projector(), projector(bath::up()));

    RunReport rep;
    rep.mode = options.mode;
    const CostReport cost = cost_report(problem, schedule);
    rep.total_time = cost.total_time;
    rep.h_norm = cost.h_norm;
    rep.cost = cost.cost;

    if (options.mode == RunMode::kDensity) {
        Operator rho = projector(tensor(start, bath::down()));
        const auto odd = Eigen::seqN(1, idx(d), 2);
        for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
            const double up_before = Operator(rho(odd, odd)).trace().real();
            rho = cooling_step(rho, unitaries[s]);
            rep.per_step_up_probability.push_back(Operator(rho(odd, odd)).trace().real() - up_before);

            Operator keep = ground_up;
            for (std::size_t k = 0; k < schedule.steps[s].j; ++k) {
                if (problem.band_states[k].norm() > 0.0) {
                    keep += projector(tensor(problem.band_states[k], bath::down()));
                }
            }
            const double rem = 1.0 - (keep * rho).trace().real();
            rep.remainder_weights.push_back(rem);
            rep.error_budget += rem;

            const DensityDiagnostics diag = inspect_density(rho);
            rep.trace_residual = std::max(rep.trace_residual, diag.trace_residual);
            rep.min_eigenvalue = std::min(rep.min_eigenvalue, diag.min_eigenvalue);
        }
        if (schedule.steps.empty()) {
            const DensityDiagnostics diag = inspect_density(rho);
            rep.trace_residual = diag.trace_residual;
            rep.min_eigenvalue = std::min(0.0, diag.min_eigenvalue);
        }
        rep.ground_fidelity = (m0 * rho).trace().real();
        rep.final_density = std::move(rho);
        return rep;
    }

    for (const auto& u : unitaries) {
        const double defect = (u.adjoint() * u - identity(static_cast<std::size_t>(u.rows()))).cwiseAbs().maxCoeff();
        rep.trace_residual = std::max(rep.trace_residual, defect);
    }
    const StateVector psi0 = tensor(start, bath::down());
    const auto even = Eigen::seqN(0, idx(d), 2);
    const auto odd = Eigen::seqN(1, idx(d), 2);
    const std::vector<int> hits = parallel_map(options.shots, [&](std::size_t shot) -> int {
        Rng rng(derive_seed(options.seed, shot));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        StateVector psi = psi0;
        bool up = false;
        for (const auto& u : unitaries) {
            if (up) {
                continue;
            }
            const double p_up = psi(odd).squaredNorm();
            if (unif(rng) < p_up) {
                psi(even).setZero();
                psi /= std::sqrt(p_up);
                up = true;
            } else {
                psi(odd).setZero();
                psi = u * psi;
                psi /= psi.norm();
            }
        }
        const double p_ground = (m0 * psi).squaredNorm();
        return unif(rng) < p_ground ? 1 : 0;
    });
    double successes = 0.0;
    for (int h : hits) {
        successes += h;
    }
    rep.shots = options.shots;
    rep.ground_fidelity = options.shots > 0 ? successes / static_cast<double>(options.shots) : 0.0;
    if (options.shots > 0) {
        rep.fidelity_stderr =
            std::sqrt(rep.ground_fidelity * (1.0 - rep.ground_fidelity) / static_cast<double>(options.shots));
    }
    return rep;
}

RunReport run_reduced(const CoolingProblem& problem, ScheduleOptions options, double eta, const RunOptions& run) {
    if (eta < 0.0) {
        eta = options.epsilon / std::pow(static_cast<double>(problem.L()), 1.5);
    }
    options.eta = eta;
    const CoolingSchedule sched = build_schedule(problem, options);
    RunReport rep = run_deterministic(problem, sched, run);
    double perp2 = 0.0;
    for (std::size_t j : sched.skipped) {
        perp2 += problem.band.xs[j] * problem.band.xs[j];
    }
    rep.f_perp = std::sqrt(perp2);
    rep.predicted_augmentation = static_cast<double>(sched.steps.size()) * rep.f_perp;
    return rep;
}

}  // namespace qsc
