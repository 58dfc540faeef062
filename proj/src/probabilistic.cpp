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

#include "qsc/probabilistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "qsc/errors.hpp"
#include "qsc/parallel.hpp"
#include "qsc/random.hpp"

namespace qsc {

namespace {

// (1 (x) <b|) psi for a qutrit bath stored last.
StateVector bath_component(const StateVector& psi, const StateVector& b) {
    const Eigen::Index d = psi.size() / 3;
    StateVector out(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        out[i] = std::conj(b[0]) * psi[3 * i] + std::conj(b[1]) * psi[3 * i + 1] + std::conj(b[2]) * psi[3 * i + 2];
    }
    return out;
}

struct TrialResult {
    bool accepted = false;
    bool hit_limit = false;
    double fidelity = 0.0;
    double time = 0.0;
    std::size_t attempts = 0;
    std::size_t bright = 0;
    std::size_t doublings = 0;
    std::vector<AttemptRecord> records;
};

}  // namespace

ProbProblem make_prob_problem(QutritModel model, Operator t_s, StateVector fiducial) {
    const Eigen::Index d = model.h_system.rows();
    if (t_s.rows() != d || fiducial.size() != d) {
        throw DimensionMismatch("prob problem: inconsistent dimensions");
    }
    require_hermitian(t_s, "T_S");
    ProbProblem p;
    p.f0 = std::abs(model.ground.dot(fiducial));
    p.f1 = model.p1.weight(fiducial) > 0.0 ? std::sqrt(model.p1.weight(fiducial)) : 0.0;
    p.model = std::move(model);
    p.t_s = std::move(t_s);
    p.fiducial = std::move(fiducial);
    return p;
}

ProbProblem clock_prob_problem(const ClockModel& model, std::size_t cap) {
    return make_prob_problem(clock_qutrit_model(model, cap), clock_coupling(model), clock_fiducial(model));
}

double unit_rabi(const ProbProblem& problem) {
    const Operator& b1 = problem.model.p1.basis();
    return StateVector(b1.adjoint() * (problem.t_s * problem.model.ground)).norm();
}

double mean_sin2(double rabi, double lo, double hi) {
    if (hi <= lo) {
        double s = std::sin(rabi * lo);
        return s * s;
    }
    return 0.5 - (std::sin(2.0 * rabi * hi) - std::sin(2.0 * rabi * lo)) / (4.0 * rabi * (hi - lo));
}

ProbRunReport run_probabilistic(const ProbProblem& problem, const ProbOptions& options) {
    const QutritModel& m = problem.model;
    ProbRunReport rep;
    rep.trials = options.trials;
    rep.omega0 = options.omega0 > 0.0 ? options.omega0
                                      : options.c * problem.f1 * std::pow(options.epsilon, 1.5) * m.gap;
    rep.r = rep.omega0 / m.gap;
    if (!(rep.r < 0.125)) {
        std::ostringstream msg;
        msg << "run_probabilistic: r = " << rep.r << " is not below 1/8";
        throw CouplingTooLarge(msg.str());
    }
    rep.rabi = rep.omega0 * unit_rabi(problem);
    rep.omega_star = options.omega_star > 0.0 ? options.omega_star : rep.rabi;
    if (!(rep.omega_star > 0.0)) {
        throw std::invalid_argument("run_probabilistic: T_S does not couple |0> to P1");
    }
    const double f1_lower = options.f1_lower > 0.0 ? options.f1_lower : problem.f1;
    if (!(f1_lower > 0.0)) {
        throw std::invalid_argument("run_probabilistic: f1 lower bound must be positive");
    }
    rep.doubling_threshold = static_cast<std::size_t>(std::ceil(4.0 / (f1_lower * f1_lower)));
    rep.tau_verify = M_PI / (2.0 * rep.omega0);
    const double window0 = M_PI / rep.omega_star;
    rep.predicted_accept = problem.f1 * problem.f1 * mean_sin2(rep.rabi, window0, 2.0 * window0);

    const Composite cool = qutrit_bath(m.h_system, m.omega1, Operator(rep.omega0 * problem.t_s));
    const SpectralDecomposition sd_cool = hermitian_eig(cool.total());
    const SpectralDecomposition sd_ver = hermitian_eig(verification_hamiltonian(m.h_system, m.omega1, rep.omega0));
    const StateVector psi0 = tensor(problem.fiducial, bath::center());
    const StateVector c0 = sd_cool.vectors.adjoint() * psi0;

    const std::vector<TrialResult> results = parallel_map(options.trials, [&](std::size_t trial) {
        TrialResult res;
        Rng rng(derive_seed(options.seed, trial));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double window = window0;
        std::size_t fails = 0;
        for (std::size_t round = 0; round < options.max_rounds; ++round) {
            const double tau = window * (1.0 + unif(rng));
            ++res.attempts;
            res.time += tau;
            Eigen::VectorXcd phase(c0.size());
            for (Eigen::Index k = 0; k < c0.size(); ++k) {
                phase[k] = std::polar(1.0, -sd_cool.values[k] * tau) * c0[k];
            }
            const StateVector psi = sd_cool.vectors * phase;
            const StateVector sys_b = bath_component(psi, bath::bright());
            const double p_b = sys_b.squaredNorm();
            AttemptRecord rec{trial, round, tau, false, false};
            if (unif(rng) < p_b) {
                rec.bright = true;
                ++res.bright;
                res.time += rep.tau_verify;
                const StateVector mapped = tensor(StateVector(sys_b / std::sqrt(p_b)), bath::left());
                const StateVector out = sd_ver.propagate(mapped, rep.tau_verify);
                const StateVector sys_r = bath_component(out, bath::right());
                const double p_r = sys_r.squaredNorm();
                if (unif(rng) < p_r) {
                    rec.accepted = true;
                    res.accepted = true;
                    res.fidelity = std::norm(m.ground.dot(sys_r)) / p_r;
                }
            }
            if (options.record_attempts) {
                res.records.push_back(rec);
            }
            if (res.accepted) {
                break;
            }
            if (++fails >= rep.doubling_threshold) {
                window *= 2.0;
                fails = 0;
                ++res.doublings;
            }
        }
        res.hit_limit = !res.accepted;
        return res;
    });

    std::set<std::size_t> doublings;
    double fid_sum = 0.0;
    double time_sum = 0.0;
    std::size_t accepted_attempts = 0;
    for (const auto& res : results) {
        rep.attempts += res.attempts;
        rep.bright_count += res.bright;
        time_sum += res.time;
        doublings.insert(res.doublings);
        if (res.accepted) {
            ++rep.accept_count;
            ++accepted_attempts;
            fid_sum += res.fidelity;
        }
        if (res.hit_limit) {
            ++rep.round_limit_hits;
        }
        rep.records.insert(rep.records.end(), res.records.begin(), res.records.end());
    }
    const std::size_t max_doublings = doublings.empty() ? 0 : *doublings.rbegin();
    for (std::size_t k = 0; k <= max_doublings; ++k) {
        rep.tau_schedule.push_back(window0 * std::ldexp(1.0, static_cast<int>(k)));
    }
    if (rep.trials > 0) {
        rep.accept_rate = static_cast<double>(rep.accept_count) / static_cast<double>(rep.trials);
        rep.mean_time = time_sum / static_cast<double>(rep.trials);
    }
    if (rep.attempts > 0) {
        rep.attempt_accept_rate = static_cast<double>(accepted_attempts) / static_cast<double>(rep.attempts);
    }
    if (rep.accept_count > 0) {
        rep.conditional_success = fid_sum / static_cast<double>(rep.accept_count);
    }
    return rep;
}

double verification_leakage(const QutritModel& model, double omega0) {
    const SpectralDecomposition sys = hermitian_eig(model.h_system);
    const SpectralDecomposition ver = hermitian_eig(verification_hamiltonian(model.h_system, model.omega1, omega0));
    const double tau = M_PI / (2.0 * omega0);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < sys.values.size(); ++k) {
        const StateVector psi = sys.vectors.col(k);
        if (std::norm(psi.dot(model.ground)) > 0.5) {
            continue;
        }
        const StateVector out = ver.propagate(tensor(psi, bath::left()), tau);
        worst = std::max(worst, bath_component(out, bath::right()).squaredNorm());
    }
    return worst;
}

VerificationSpectrum verification_spectrum(const QutritModel& model) {
    const std::size_t d = static_cast<std::size_t>(model.h_system.rows());
    const Operator h = qutrit_bath(model.h_system, model.omega1, Operator::Zero(model.h_system.rows(),
                                                                                 model.h_system.cols())).h;
    const Operator bl = tensor(identity(d), Operator(bath::left()));
    const Operator br = tensor(identity(d), Operator(bath::right()));
    const SpectralDecomposition sl = hermitian_eig(bl.adjoint() * h * bl);
    const SpectralDecomposition sr = hermitian_eig(br.adjoint() * h * br);
    Eigen::Index gl = 0;
    Eigen::Index gr = 0;
    (sl.vectors.adjoint() * model.ground).cwiseAbs2().maxCoeff(&gl);
    (sr.vectors.adjoint() * model.ground).cwiseAbs2().maxCoeff(&gr);
    VerificationSpectrum out;
    out.ground_split = std::abs(sl.values[gl] - sr.values[gr]);
    double max_excited_l = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < sl.values.size(); ++k) {
        if (k != gl) {
            max_excited_l = std::max(max_excited_l, sl.values[k]);
        }
    }
    out.separation = sr.values.minCoeff() - max_excited_l;
    out.ok = out.separation >= model.gap * (1.0 - 1e-9) &&
             out.ground_split <= tol::kResidual * (1.0 + operator_norm(model.h_system));
    return out;
}

}  // namespace qsc
