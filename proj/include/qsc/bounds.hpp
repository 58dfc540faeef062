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

#ifndef QSC_BOUNDS_HPP
#define QSC_BOUNDS_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsc/cooling.hpp"
#include "qsc/linalg.hpp"
#include "qsc/probabilistic.hpp"

namespace qsc {

enum class Verdict { kPass, kViolation, kVacuous };

const char* verdict_name(Verdict v);

/// Margins are rhs - lhs of each asserted inequality. A check passes when every
/// margin is at least -kBoundSlack * (1 + |rhs|).
inline constexpr double kBoundSlack = 1e-9;

struct BoundCheck {
    Verdict verdict = Verdict::kVacuous;
    double margin = std::numeric_limits<double>::infinity();
    std::vector<double> margins;
    std::map<std::string, double> quantities;
    std::string note;
};

// Checkers. Each throws HypothesisUnmet when its hypotheses fail; a bound whose
// right-hand side is trivially satisfied (non-positive overlap bound) comes
// back as kVacuous.

/// |mu_j - sigma_j| <= |H - H~| for sorted eigenvalues.
BoundCheck check_weyl(const Operator& h, const Operator& ht);

/// |X| <= |AX - XB| / beta given |A| <= alpha and |B^{-1}| <= 1/(alpha + beta).
BoundCheck check_sylvester(const Operator& a, const Operator& b, const Operator& x, double alpha, double beta);

/// Three block-resolvent inequalities for A block diagonal in S1 (+) S2 with
/// |S_i A^{-1} S_i| < 1/G_i.
BoundCheck check_block_resolvent(const Operator& a, const Operator& b, const Subspace& s1, double g1, double g2);

/// H with P = eigenspace in (lambda_minus, lambda_plus) and perturbation V.
struct WindowInstance {
    Operator h;
    Operator v;
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    double delta = 0.0;
};

/// Spectral subspace of `h` strictly inside (lo, hi).
Subspace window_subspace(const Operator& h, double lo, double hi);

/// Sigma_P(z) in P coordinates.
Operator window_self_energy(const WindowInstance& inst, const Subspace& p, double z);

/// Sigma_P at the midpoint of Spec(H|_P).
Operator window_heff(const WindowInstance& inst);

/// Smallest gamma (up to a 5% pad) with sup over the grid on [c - gamma,
/// d + gamma] of |Sigma_P(z) - H_eff| below gamma. Throws HypothesisUnmet when
/// the interval leaves (lambda_minus, lambda_plus).
double self_consistent_gamma(const WindowInstance& inst, const Operator& heff, int grid = 64);

/// Eigenvalue correspondence within gamma. The Sigma-closeness hypothesis is
/// checked on `grid` points.
BoundCheck check_spectral_correspondence(const WindowInstance& inst, const Operator& heff, double gamma,
                                         int grid = 64);

/// Both overlap bounds, over every unit vector of P and of P~ (via the minimum
/// eigenvalue of the projected overlap matrices).
BoundCheck check_subspace_overlap(const Operator& h, const Operator& ht, double lambda_minus, double lambda_plus,
                                  double delta);

/// P' is the most isolated eigenvector of H_eff.
BoundCheck check_corollary1(const WindowInstance& inst, const Operator& heff, double gamma, int grid = 64);

/// Multi-band overlap bound; `windows` are increasing (lambda_k-, lambda_k+).
BoundCheck check_corollary2(const Operator& h, const Operator& ht,
                            const std::vector<std::pair<double, double>>& windows, double delta);

// ---------------------------------------------------------------------------
// Instances, suites, dumps.

struct BoundInstance {
    std::string kind;
    std::uint64_t seed = 0;
    std::map<std::string, Operator> matrices;
    std::map<std::string, double> params;
    std::vector<std::pair<double, double>> windows;
};

/// weyl, sylvester, block_resolvent, theorem1, theorem2, corollary1, corollary2.
const std::vector<std::string>& suite_kinds();

/// Hypothesis-satisfying instance by default; `violate` draws one that breaks
/// a hypothesis of the checker.
BoundInstance generate_instance(const std::string& kind, std::uint64_t seed, bool violate = false);

/// Runs the matching checker; HypothesisUnmet becomes kVacuous.
BoundCheck evaluate(const BoundInstance& inst);

struct SuiteResult {
    std::string kind;
    bool negative = false;
    std::size_t count = 0;
    std::size_t passes = 0;
    std::size_t violations = 0;
    std::size_t vacuous = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<std::pair<BoundInstance, BoundCheck>> failures;
};

SuiteResult run_suite(const std::string& kind, std::size_t count, std::uint64_t seed, bool negative = false);

nlohmann::json instance_to_json(const BoundInstance& inst, const BoundCheck& check);
BoundInstance instance_from_json(const nlohmann::json& j);

struct ReplayResult {
    BoundCheck check;
    std::vector<double> recorded_margins;
    std::string recorded_verdict;
    bool consistent = false;  // recomputed margins and verdict match the dump
    bool violation() const { return !consistent || check.verdict == Verdict::kViolation; }
};

ReplayResult replay_dump(const nlohmann::json& dump);

// ---------------------------------------------------------------------------
// Protocol-level scaling checks.

struct ScalingFit {
    std::string name;
    std::vector<double> rs;
    std::vector<double> residuals;
    double exponent = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// min over phase |U_j|j down> - e^{i phi}|0 up>|.
ScalingFit lemma4_scaling(const CoolingProblem& problem, std::size_t j, const std::vector<double>& rs);

/// |(1 - M) U_j M| with M = span{|k down> : k < j}.
ScalingFit lemma5_scaling(const CoolingProblem& problem, std::size_t j, const std::vector<double>& rs);

/// Distance of U(tau)|1C> from cos(phi)|1C> - i sin(phi)|0B>, worst of
/// phi = pi/4 and pi/2, up to a global phase.
ScalingFit lemma8_scaling(const ProbProblem& problem, const std::vector<double>& rs);

/// verification_leakage; an O(r^2) claim.
ScalingFit lemma9_scaling(const ProbProblem& problem, const std::vector<double>& rs);

struct ProtocolLemmaReport {
    std::vector<ScalingFit> fits;
    bool pass() const;
};

ProtocolLemmaReport check_protocol_lemmas(const CoolingProblem* deterministic, const ProbProblem* probabilistic,
                                          const std::vector<double>& rs);

}  // namespace qsc

#endif
