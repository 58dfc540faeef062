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

#include "qsc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qsc/errors.hpp"
#include "qsc/level_shift.hpp"
#include "qsc/parallel.hpp"
#include "qsc/random.hpp"

namespace qsc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void unmet(const std::string& what) { throw HypothesisUnmet(what); }

void require_hermitian_hyp(const Operator& a, const char* name) {
    if (a.rows() != a.cols() || hermiticity_defect(a) > tol::kHermitian * (1.0 + operator_norm(a))) {
        unmet(std::string(name) + " is not Hermitian");
    }
}

// Records rhs - lhs for each inequality and sets the verdict.
void finish(BoundCheck& c, const std::vector<std::pair<double, double>>& lhs_rhs) {
    c.verdict = Verdict::kPass;
    for (const auto& [lhs, rhs] : lhs_rhs) {
        const double m = rhs - lhs;
        c.margins.push_back(m);
        c.margin = std::min(c.margin, m);
        if (m < -kBoundSlack * (1.0 + std::abs(rhs))) {
            c.verdict = Verdict::kViolation;
        }
    }
}

double min_abs_eig(const Operator& h) { return hermitian_eig(h).values.cwiseAbs().minCoeff(); }

Operator columns_of(const SpectralDecomposition& sd, const std::vector<Eigen::Index>& cols) {
    Operator out(sd.vectors.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out.col(static_cast<Eigen::Index>(c)) = sd.vectors.col(cols[c]);
    }
    return out;
}

// Eigenvalues of H strictly inside (lo, hi), ascending, with their vectors.
struct WindowSpectrum {
    std::vector<double> values;
    Operator vectors;
};

WindowSpectrum window_spectrum(const Operator& h, double lo, double hi) {
    const SpectralDecomposition sd = hermitian_eig(h);
    std::vector<Eigen::Index> cols;
    WindowSpectrum w;
    for (Eigen::Index k = 0; k < sd.values.size(); ++k) {
        if (sd.values[k] > lo && sd.values[k] < hi) {
            cols.push_back(k);
            w.values.push_back(sd.values[k]);
        }
    }
    w.vectors = columns_of(sd, cols);
    return w;
}

double min_overlap(const Operator& basis, const Operator& proj) {
    if (basis.cols() == 0) {
        return 1.0;
    }
    return hermitian_eig(basis.adjoint() * proj * basis).values.minCoeff();
}

// Sigma_P(z) with Q(H+V)Q diagonalised once.
struct SigmaEval {
    Operator base;  // P(H+V)P
    Operator u;     // eigenvectors^dagger Q V P
    RealVector values;

    Operator operator()(double z) const {
        Operator out = base;
        if (u.rows() > 0) {
            const RealVector inv = (z - values.array()).inverse().matrix();
            out += u.adjoint() * inv.asDiagonal() * u;
        }
        return out;
    }
};

SigmaEval make_sigma(const LevelShiftContext& ctx, const Operator& v) {
    SigmaEval s;
    const Operator& bp = ctx.p.basis();
    const Operator& bq = ctx.q.basis();
    s.base = bp.adjoint() * (ctx.h + v) * bp;
    if (bq.cols() > 0) {
        const SpectralDecomposition sd = hermitian_eig(bq.adjoint() * (ctx.h + v) * bq);
        s.values = sd.values;
        s.u = sd.vectors.adjoint() * (bq.adjoint() * v * bp);
    }
    return s;
}

struct Theorem1Gate {
    Subspace p;
    LevelShiftContext ctx;
    SigmaEval sigma;
    double c = 0.0;
    double d = 0.0;
    double sup_defect = 0.0;
    double v_norm = 0.0;
};

LevelShiftContext window_context(const WindowInstance& inst, const Subspace& p) {
    return LevelShiftContext::make(inst.h, p, inst.delta, hermitian_norm(inst.v));
}

Operator sigma_at(const LevelShiftContext& ctx, const Operator& v, double z) {
    return self_energy(ctx, v, z).matrix;
}

// Hypotheses on H, V and the window; gamma-dependent parts are separate.
Theorem1Gate theorem1_base(const WindowInstance& inst) {
    require_hermitian_hyp(inst.h, "H");
    require_hermitian_hyp(inst.v, "V");
    if (inst.h.rows() != inst.v.rows()) {
        throw DimensionMismatch("theorem1: H and V differ in dimension");
    }
    if (!(inst.delta > 0.0) || !(inst.lambda_minus < inst.lambda_plus)) {
        unmet("need delta > 0 and lambda_minus < lambda_plus");
    }
    const SpectralDecomposition sd = hermitian_eig(inst.h);
    for (Eigen::Index k = 0; k < sd.values.size(); ++k) {
        for (double lam : {inst.lambda_minus, inst.lambda_plus}) {
            if (std::abs(sd.values[k] - lam) <= inst.delta / 2.0) {
                unmet("H has an eigenvalue within delta/2 of a window edge");
            }
        }
    }
    Theorem1Gate g;
    g.v_norm = hermitian_norm(inst.v);
    if (!(g.v_norm < inst.delta / 2.0)) {
        unmet("|V| is not below delta/2");
    }
    g.p = window_subspace(inst.h, inst.lambda_minus, inst.lambda_plus);
    if (g.p.is_empty()) {
        unmet("P is empty");
    }
    g.ctx = window_context(inst, g.p);
    g.sigma = make_sigma(g.ctx, inst.v);
    return g;
}

// sup over `grid` points of [lo, hi] of |Sigma_P(z) - H_eff|.
double sup_sigma_defect(const SigmaEval& sigma, const Operator& heff, double lo, double hi, int grid) {
    double sup = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double z = lo + (hi - lo) * i / (grid - 1);
        sup = std::max(sup, operator_norm(Operator(sigma(z) - heff)));
    }
    return sup;
}

void heff_range(Theorem1Gate& g, const Operator& heff) {
    if (heff.rows() != static_cast<Eigen::Index>(g.p.rank()) || heff.cols() != heff.rows()) {
        unmet("H_eff does not act on P");
    }
    require_hermitian_hyp(heff, "H_eff");
    const RealVector ev = hermitian_eig(heff).values;
    g.c = ev.minCoeff();
    g.d = ev.maxCoeff();
}

void theorem1_gamma_gate(Theorem1Gate& g, const WindowInstance& inst, const Operator& heff, double gamma, int grid) {
    heff_range(g, heff);
    if (!(gamma > 0.0) || grid < 2) {
        unmet("need gamma > 0 and at least two grid points");
    }
    if (!(g.c - gamma > inst.lambda_minus && g.d + gamma < inst.lambda_plus)) {
        unmet("[c - gamma, d + gamma] is not inside the window");
    }
    g.sup_defect = sup_sigma_defect(g.sigma, heff, g.c - gamma, g.d + gamma, grid);
    if (!(g.sup_defect < gamma)) {
        unmet("|Sigma_P(z) - H_eff| reaches gamma on the grid");
    }
}

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

std::size_t randint(Rng& rng, std::size_t a, std::size_t b) {
    return std::uniform_int_distribution<std::size_t>(a, b)(rng);
}

// Gaussian Hermitian matrix with its eigenvalues replaced by `eigs`.
Operator with_spectrum(const std::vector<double>& eigs, Rng& rng) {
    const SpectralDecomposition sd = hermitian_eig(random_hermitian(eigs.size(), rng));
    RealVector v(static_cast<Eigen::Index>(eigs.size()));
    for (std::size_t k = 0; k < eigs.size(); ++k) {
        v[static_cast<Eigen::Index>(k)] = eigs[k];
    }
    return sd.vectors * v.asDiagonal() * sd.vectors.adjoint();
}

Operator hermitian_with_norm(std::size_t d, double norm, Rng& rng) {
    Operator h = random_hermitian(d, rng);
    return h * (norm / hermitian_norm(h));
}

Operator scale_to(const Operator& m, double target) {
    const double n = operator_norm(m);
    return n == 0.0 ? m : Operator(m * (target / n));
}

struct WindowDraw {
    Operator h;
    double w = 0.0;
};

WindowDraw draw_window_h(Rng& rng, std::size_t dim_p, double w, std::vector<double> extra_p = {}) {
    const std::size_t d = randint(rng, std::max<std::size_t>(4, dim_p + 2), 20);
    std::vector<double> eigs = std::move(extra_p);
    while (eigs.size() < dim_p) {
        eigs.push_back(uniform(rng, 0.05, w - 0.05));
    }
    while (eigs.size() < d) {
        eigs.push_back(uniform(rng, 0.0, 1.0) < 0.5 ? uniform(rng, -4.0, -1.05) : uniform(rng, w + 1.05, w + 4.0));
    }
    return {with_spectrum(eigs, rng), w};
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::kPass:
            return "pass";
        case Verdict::kViolation:
            return "violation";
        case Verdict::kVacuous:
            return "vacuous";
    }
    return "unknown";
}

BoundCheck check_weyl(const Operator& h, const Operator& ht) {
    require_hermitian_hyp(h, "H");
    require_hermitian_hyp(ht, "H~");
    if (h.rows() != ht.rows()) {
        unmet("H and H~ differ in dimension");
    }
    const RealVector mu = hermitian_eig(h).values;
    const RealVector sigma = hermitian_eig(ht).values;
    const double e = operator_norm(Operator(h - ht));
    std::vector<std::pair<double, double>> pairs;
    double shift = 0.0;
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
        pairs.emplace_back(std::abs(mu[j] - sigma[j]), e);
        shift = std::max(shift, std::abs(mu[j] - sigma[j]));
    }
    BoundCheck c;
    finish(c, pairs);
    c.quantities = {{"norm_diff", e}, {"max_shift", shift}};
    return c;
}

BoundCheck check_sylvester(const Operator& a, const Operator& b, const Operator& x, double alpha, double beta) {
    require_hermitian_hyp(a, "A");
    require_hermitian_hyp(b, "B");
    if (x.rows() != a.rows() || x.cols() != b.rows()) {
        unmet("X does not map the space of B to the space of A");
    }
    if (!(beta > 0.0) || !(alpha >= 0.0)) {
        unmet("need alpha >= 0 and beta > 0");
    }
    const double a_norm = hermitian_norm(a);
    if (a_norm > alpha * (1.0 + 1e-12)) {
        unmet("|A| exceeds alpha");
    }
    const double b_min = min_abs_eig(b);
    if (b_min < (alpha + beta) * (1.0 - 1e-12)) {
        unmet("|B^-1| exceeds 1/(alpha + beta)");
    }
    const double lhs = operator_norm(x);
    const double rhs = operator_norm(Operator(a * x - x * b)) / beta;
    BoundCheck c;
    finish(c, {{lhs, rhs}});
    c.quantities = {{"x_norm", lhs}, {"a_norm", a_norm}, {"b_min_abs", b_min}, {"alpha", alpha}, {"beta", beta}};
    return c;
}

BoundCheck check_block_resolvent(const Operator& a, const Operator& b, const Subspace& s1, double g1, double g2) {
    require_hermitian_hyp(a, "A");
    require_hermitian_hyp(b, "B");
    if (a.rows() != b.rows() || s1.ambient_dim() != static_cast<std::size_t>(a.rows())) {
        unmet("A, B and S1 live in different spaces");
    }
    const Subspace s2 = s1.complement();
    if (s1.is_empty() || s2.is_empty()) {
        unmet("both S1 and S2 must be nonempty");
    }
    if (!(g1 > 0.0) || !(g2 > 0.0)) {
        unmet("need G1, G2 > 0");
    }
    const Operator& u1 = s1.basis();
    const Operator& u2 = s2.basis();
    const double scale = 1.0 + operator_norm(a);
    if (operator_norm(Operator(u1.adjoint() * a * u2)) > tol::kHermitian * scale) {
        unmet("A is not block diagonal in S1 (+) S2");
    }
    if (min_abs_eig(a) <= tol::kDegenerate * scale) {
        unmet("A is not invertible");
    }
    const Operator a_inv = a.inverse();
    const double a11 = operator_norm(Operator(u1.adjoint() * a_inv * u1));
    const double a22 = operator_norm(Operator(u2.adjoint() * a_inv * u2));
    if (!(a11 < 1.0 / g1) || !(a22 < 1.0 / g2)) {
        unmet("|S_i A^-1 S_i| is not below 1/G_i");
    }
    const double b11 = operator_norm(Operator(u1.adjoint() * b * u1));
    const double b22 = operator_norm(Operator(u2.adjoint() * b * u2));
    const double b12 = operator_norm(Operator(u1.adjoint() * b * u2));
    if (!(b11 < g1 / 2.0) || !(b22 < g2 / 2.0) || !(b12 < std::min(g1, g2) / 2.0)) {
        unmet("a block of B is too large");
    }
    BoundCheck c;
    c.quantities = {{"b11", b11}, {"b22", b22}, {"b12", b12}, {"G1", g1}, {"G2", g2}};
    const Operator amb = a - b;
    if (min_abs_eig(amb) <= tol::kDegenerate * scale) {
        c.verdict = Verdict::kViolation;
        c.margin = -1.0;
        c.margins = {-1.0};
        c.note = "A - B is singular";
        return c;
    }
    const Operator inv = amb.inverse();
    const double x12 = operator_norm(Operator(u1.adjoint() * inv * u2));
    const double x11 = operator_norm(Operator(u1.adjoint() * inv * u1));
    const double x22 = operator_norm(Operator(u2.adjoint() * inv * u2));
    const double den = (g1 - b11) * (g2 - b22) - b12 * b12;
    finish(c, {{x12, b12 / den}, {x11, (1.0 + b12 * x12) / (g1 - b11)}, {x22, (1.0 + b12 * x12) / (g2 - b22)}});
    c.quantities["x12"] = x12;
    c.quantities["x11"] = x11;
    c.quantities["x22"] = x22;
    return c;
}

Subspace window_subspace(const Operator& h, double lo, double hi) {
    return Subspace(window_spectrum(h, lo, hi).vectors);
}

Operator window_self_energy(const WindowInstance& inst, const Subspace& p, double z) {
    return sigma_at(window_context(inst, p), inst.v, z);
}

Operator window_heff(const WindowInstance& inst) {
    const WindowSpectrum ws = window_spectrum(inst.h, inst.lambda_minus, inst.lambda_plus);
    if (ws.values.empty()) {
        unmet("P is empty");
    }
    const double mid = 0.5 * (ws.values.front() + ws.values.back());
    return window_self_energy(inst, Subspace(ws.vectors), mid);
}

double self_consistent_gamma(const WindowInstance& inst, const Operator& heff, int grid) {
    if (grid < 2) {
        unmet("need at least two grid points");
    }
    Theorem1Gate g = theorem1_base(inst);
    heff_range(g, heff);
    const double gmax = std::min(g.c - inst.lambda_minus, inst.lambda_plus - g.d) * (1.0 - 1e-9);
    if (!(gmax > 0.0)) {
        unmet("Spec(H_eff) is not inside the window");
    }
    auto sup = [&](double gamma) {
        return sup_sigma_defect(g.sigma, heff, g.c - gamma, g.d + gamma, grid);
    };
    double gamma = gmax;
    if (!(sup(gamma) < gamma)) {
        unmet("no self-consistent gamma inside the window");
    }
    const double floor = 1e-12 * (1.0 + hermitian_norm(inst.h));
    for (int it = 0; it < 60; ++it) {
        const double cand = std::max(1.05 * sup(gamma), floor);
        if (!(cand < gamma) || !(sup(cand) < cand)) {
            break;
        }
        gamma = cand;
    }
    return gamma;
}

BoundCheck check_spectral_correspondence(const WindowInstance& inst, const Operator& heff, double gamma, int grid) {
    Theorem1Gate g = theorem1_base(inst);
    theorem1_gamma_gate(g, inst, heff, gamma, grid);
    const RealVector lam = hermitian_eig(heff).values;
    const WindowSpectrum pt = window_spectrum(Operator(inst.h + inst.v), inst.lambda_minus, inst.lambda_plus);
    std::vector<std::pair<double, double>> pairs;
    const std::size_t np = static_cast<std::size_t>(lam.size());
    if (pt.values.size() != np) {
        pairs.emplace_back(std::abs(static_cast<double>(pt.values.size()) - static_cast<double>(np)), 0.0);
    }
    double shift = 0.0;
    for (std::size_t j = 0; j < std::min(np, pt.values.size()); ++j) {
        const double d = std::abs(pt.values[j] - lam[static_cast<Eigen::Index>(j)]);
        pairs.emplace_back(d, gamma);
        shift = std::max(shift, d);
    }
    BoundCheck c;
    finish(c, pairs);
    c.quantities = {{"gamma", gamma},     {"c", g.c},           {"d", g.d},
                    {"sup_defect", g.sup_defect}, {"v_norm", g.v_norm}, {"max_shift", shift}};
    return c;
}

BoundCheck check_subspace_overlap(const Operator& h, const Operator& ht, double lambda_minus, double lambda_plus,
                                  double delta) {
    require_hermitian_hyp(h, "H");
    require_hermitian_hyp(ht, "H~");
    if (h.rows() != ht.rows()) {
        unmet("H and H~ differ in dimension");
    }
    if (!(delta > 0.0) || !(lambda_minus < lambda_plus)) {
        unmet("need delta > 0 and lambda_minus < lambda_plus");
    }
    const double p_lo = lambda_minus + delta / 2.0;
    const double p_hi = lambda_plus - delta / 2.0;
    const SpectralDecomposition sd = hermitian_eig(h);
    std::vector<Eigen::Index> pcols;
    for (Eigen::Index k = 0; k < sd.values.size(); ++k) {
        const double e = sd.values[k];
        if (e >= p_lo && e <= p_hi) {
            pcols.push_back(k);
        } else if (e > lambda_minus - delta / 2.0 && e < lambda_plus + delta / 2.0) {
            unmet("H has an eigenvalue between the P and Q regions");
        }
    }
    if (pcols.empty()) {
        unmet("Spec(H|_P) is empty");
    }
    const Operator pb = columns_of(sd, pcols);
    const double e = operator_norm(Operator(h - ht));
    const double rhs = 1.0 - std::pow(2.0 * e / delta, 2);
    if (!(rhs > 0.0)) {
        unmet("overlap bound is non-positive");
    }
    const Operator ptb = window_spectrum(ht, lambda_minus, lambda_plus).vectors;
    const double ov_tilde = min_overlap(ptb, Operator(pb * pb.adjoint()));
    const double ov = min_overlap(pb, Operator(ptb * ptb.adjoint()));
    BoundCheck c;
    finish(c, {{rhs, ov_tilde}, {rhs, ov}});
    c.quantities = {{"norm_diff", e},
                    {"bound", rhs},
                    {"min_overlap_tilde", ov_tilde},
                    {"min_overlap", ov},
                    {"dim_p", static_cast<double>(pb.cols())},
                    {"dim_p_tilde", static_cast<double>(ptb.cols())}};
    return c;
}

BoundCheck check_corollary1(const WindowInstance& inst, const Operator& heff, double gamma, int grid) {
    Theorem1Gate g = theorem1_base(inst);
    theorem1_gamma_gate(g, inst, heff, gamma, grid);
    const SpectralDecomposition he = hermitian_eig(heff);
    const Eigen::Index np = he.values.size();
    Eigen::Index best = 0;
    double eta = -1.0;
    for (Eigen::Index i = 0; i < np; ++i) {
        double e = kInf;
        for (Eigen::Index k = 0; k < np; ++k) {
            if (k != i) {
                e = std::min(e, std::abs(he.values[i] - he.values[k]));
            }
        }
        if (e > eta) {
            eta = e;
            best = i;
        }
    }
    const double nu = 0.0;
    if (!(eta > gamma)) {
        unmet("eta does not exceed gamma");
    }
    const WindowSpectrum pt = window_spectrum(Operator(inst.h + inst.v), inst.lambda_minus, inst.lambda_plus);
    if (static_cast<Eigen::Index>(pt.values.size()) != np) {
        // The edge collar and |V| < delta/2 already pin the count.
        throw std::logic_error("corollary1: eigenvalue count changed inside the window");
    }
    const double f1 = 1.0 - std::pow(2.0 * g.v_norm / inst.delta, 2);
    const double ratio = std::isinf(eta) ? 0.0 : (2.0 * gamma + nu) / (eta - gamma);
    const double rhs = f1 * (1.0 - ratio * ratio);
    if (!(rhs > 0.0)) {
        unmet("overlap bound is non-positive");
    }
    const StateVector pprime = g.p.basis() * he.vectors.col(best);
    const double overlap = std::norm(pprime.dot(pt.vectors.col(best)));
    BoundCheck c;
    finish(c, {{rhs, overlap}});
    c.quantities = {{"gamma", gamma}, {"eta", std::isinf(eta) ? -1.0 : eta}, {"nu", nu},
                    {"bound", rhs},   {"overlap", overlap},                   {"sup_defect", g.sup_defect}};
    return c;
}

BoundCheck check_corollary2(const Operator& h, const Operator& ht,
                            const std::vector<std::pair<double, double>>& windows, double delta) {
    require_hermitian_hyp(h, "H");
    require_hermitian_hyp(ht, "H~");
    if (h.rows() != ht.rows()) {
        unmet("H and H~ differ in dimension");
    }
    if (windows.empty() || !(delta > 0.0)) {
        unmet("need at least one window and delta > 0");
    }
    for (std::size_t k = 0; k < windows.size(); ++k) {
        if (!(windows[k].first < windows[k].second) ||
            (k > 0 && !(windows[k - 1].second < windows[k].first))) {
            unmet("windows are not increasing");
        }
    }
    const SpectralDecomposition sd = hermitian_eig(h);
    std::vector<Eigen::Index> pcols;
    for (Eigen::Index i = 0; i < sd.values.size(); ++i) {
        const double e = sd.values[i];
        bool in_p = false;
        bool in_collar = false;
        for (const auto& [lo, hi] : windows) {
            if (e >= lo + delta / 2.0 && e <= hi - delta / 2.0) {
                in_p = true;
            } else if (e > lo - delta / 2.0 && e < hi + delta / 2.0) {
                in_collar = true;
            }
        }
        if (in_p) {
            pcols.push_back(i);
        } else if (in_collar) {
            unmet("H has an eigenvalue in a window collar");
        }
    }
    if (pcols.empty()) {
        unmet("P is empty");
    }
    const Operator pb = columns_of(sd, pcols);
    const double e = operator_norm(Operator(h - ht));
    const double nb = static_cast<double>(windows.size());
    const double rhs = 1.0 - nb * std::pow(2.0 * e / delta, 2);
    if (!(rhs > 0.0)) {
        unmet("overlap bound is non-positive");
    }
    Operator ptb(h.rows(), 0);
    for (const auto& [lo, hi] : windows) {
        const Operator w = window_spectrum(ht, lo, hi).vectors;
        Operator joined(h.rows(), ptb.cols() + w.cols());
        joined << ptb, w;
        ptb = joined;
    }
    const double ov_tilde = min_overlap(ptb, Operator(pb * pb.adjoint()));
    const double ov = min_overlap(pb, Operator(ptb * ptb.adjoint()));
    BoundCheck c;
    finish(c, {{rhs, ov_tilde}, {rhs, ov}});
    c.quantities = {{"norm_diff", e},
                    {"bound", rhs},
                    {"bands", nb},
                    {"min_overlap_tilde", ov_tilde},
                    {"min_overlap", ov}};
    return c;
}

const std::vector<std::string>& suite_kinds() {
    static const std::vector<std::string> kinds = {"weyl",     "sylvester",  "block_resolvent", "theorem1",
                                                   "theorem2", "corollary1", "corollary2"};
    return kinds;
}

namespace {

BoundInstance gen_weyl(Rng& rng, bool violate) {
    BoundInstance inst;
    const std::size_t d = randint(rng, 1, 32);
    const Operator h = hermitian_with_norm(d, uniform(rng, 0.5, 5.0), rng);
    Operator ht = h + hermitian_with_norm(d, uniform(rng, 1e-3, 2.0), rng);
    if (violate) {
        ht += scale_to(random_complex(d, d, rng), 0.5);
    }
    inst.matrices = {{"H", h}, {"Ht", ht}};
    return inst;
}

BoundInstance gen_sylvester(Rng& rng, bool violate) {
    BoundInstance inst;
    const std::size_t m = randint(rng, 1, 12);
    const std::size_t n = randint(rng, 1, 12);
    const double alpha = uniform(rng, 0.5, 2.0);
    const double beta = uniform(rng, 0.1, 2.0);
    const Operator a = hermitian_with_norm(m, alpha * uniform(rng, 0.3, 1.0), rng);
    std::vector<double> eigs;
    for (std::size_t k = 0; k < n; ++k) {
        const double mag = (alpha + beta) * (1.0 + uniform(rng, 0.0, 2.0));
        eigs.push_back(uniform(rng, 0.0, 1.0) < 0.5 ? -mag : mag);
    }
    if (violate) {
        eigs[0] = 0.5 * (alpha + beta);
    }
    inst.matrices = {{"A", a}, {"B", with_spectrum(eigs, rng)}, {"X", random_complex(m, n, rng)}};
    inst.params = {{"alpha", alpha}, {"beta", beta}};
    return inst;
}

Operator signed_block(std::size_t d, double min_abs, Rng& rng) {
    std::vector<double> eigs;
    for (std::size_t k = 0; k < d; ++k) {
        const double mag = min_abs * (1.0 + uniform(rng, 0.01, 1.0));
        eigs.push_back(uniform(rng, 0.0, 1.0) < 0.5 ? -mag : mag);
    }
    return with_spectrum(eigs, rng);
}

BoundInstance gen_block_resolvent(Rng& rng, bool violate) {
    BoundInstance inst;
    const std::size_t d1 = randint(rng, 1, 10);
    const std::size_t d2 = randint(rng, 1, 10);
    const std::size_t d = d1 + d2;
    const double g1 = uniform(rng, 0.5, 3.0);
    const double g2 = uniform(rng, 0.5, 3.0);
    const double gmin = std::min(g1, g2);
    Operator a = Operator::Zero(d, d);
    a.topLeftCorner(d1, d1) = signed_block(d1, g1, rng);
    a.bottomRightCorner(d2, d2) = signed_block(d2, g2, rng);
    Operator b = Operator::Zero(d, d);
    b.topLeftCorner(d1, d1) = hermitian_with_norm(d1, uniform(rng, 0.0, 0.49) * g1, rng);
    b.bottomRightCorner(d2, d2) = hermitian_with_norm(d2, uniform(rng, 0.0, 0.49) * g2, rng);
    const double b12 = violate ? 1.5 * gmin / 2.0 : uniform(rng, 0.0, 0.49) * gmin;
    const Operator off = scale_to(random_complex(d1, d2, rng), b12);
    b.topRightCorner(d1, d2) = off;
    b.bottomLeftCorner(d2, d1) = off.adjoint();
    const Operator u = random_unitary(d, rng);
    inst.matrices = {{"A", Operator(u * a * u.adjoint())},
                     {"B", Operator(u * b * u.adjoint())},
                     {"S1", Operator(u.leftCols(d1))}};
    inst.params = {{"G1", g1}, {"G2", g2}};
    return inst;
}

void put_window(BoundInstance& inst, const Operator& h, const Operator& v_or_ht, bool is_v, double w) {
    inst.matrices = {{"H", h}, {is_v ? "V" : "Ht", v_or_ht}};
    inst.params = {{"lambda_minus", -0.5}, {"lambda_plus", w + 0.5}, {"delta", 1.0}};
}

BoundInstance gen_theorem1(Rng& rng, bool violate) {
    BoundInstance inst;
    const double w = uniform(rng, 0.1, 0.8);
    const WindowDraw draw = draw_window_h(rng, randint(rng, 1, 3), w);
    const double vn = violate ? uniform(rng, 0.55, 0.8) : uniform(rng, 0.01, 0.25);
    put_window(inst, draw.h, hermitian_with_norm(draw.h.rows(), vn, rng), true, w);
    inst.params["grid"] = 64;
    return inst;
}

BoundInstance gen_theorem2(Rng& rng, bool violate) {
    BoundInstance inst;
    const double w = uniform(rng, 0.1, 2.0);
    std::vector<double> extra;
    if (violate) {
        extra.push_back(-0.5 + 0.2);
    }
    const WindowDraw draw = draw_window_h(rng, randint(rng, 1, 4), w, extra);
    const Operator e = hermitian_with_norm(draw.h.rows(), uniform(rng, 0.01, 0.45), rng);
    put_window(inst, draw.h, Operator(draw.h + e), false, w);
    return inst;
}

BoundInstance gen_corollary1(Rng& rng, bool violate) {
    BoundInstance inst;
    const double w = uniform(rng, 0.3, 0.9);
    const WindowDraw draw = draw_window_h(rng, randint(rng, violate ? 1 : 2, 3), w);
    const Operator v = hermitian_with_norm(draw.h.rows(), uniform(rng, 0.005, 0.1), rng);
    if (!violate) {
        put_window(inst, draw.h, v, true, w);
    } else {
        // Two rotated copies: every level of H_eff is doubly degenerate.
        const Operator u = random_unitary(2 * draw.h.rows(), rng);
        const Operator id2 = identity(2);
        put_window(inst, Operator(u * tensor(id2, draw.h) * u.adjoint()),
                   Operator(u * tensor(id2, v) * u.adjoint()), true, w);
    }
    inst.params["grid"] = 64;
    return inst;
}

BoundInstance gen_corollary2(Rng& rng, bool violate) {
    BoundInstance inst;
    const std::size_t bands = randint(rng, 2, 4);
    std::vector<double> eigs;
    for (std::size_t k = 0; k < bands; ++k) {
        const double base = 4.0 * static_cast<double>(k);
        inst.windows.emplace_back(base - 0.5, base + 1.5);
        const std::size_t np = randint(rng, 1, 3);
        for (std::size_t i = 0; i < np; ++i) {
            eigs.push_back(base + uniform(rng, 0.05, 0.95));
        }
        const std::size_t nq = randint(rng, 0, 2);
        for (std::size_t i = 0; i < nq; ++i) {
            eigs.push_back(base + uniform(rng, 2.05, 2.95));
        }
    }
    const std::size_t nlow = randint(rng, 1, 3);
    for (std::size_t i = 0; i < nlow; ++i) {
        eigs.push_back(uniform(rng, -3.0, -1.05));
    }
    if (violate) {
        eigs.push_back(1.6);
    }
    const Operator h = with_spectrum(eigs, rng);
    const double en = uniform(rng, 0.01, 0.45 / std::sqrt(static_cast<double>(bands)));
    inst.matrices = {{"H", h}, {"Ht", Operator(h + hermitian_with_norm(eigs.size(), en, rng))}};
    inst.params = {{"delta", 1.0}};
    return inst;
}

const Operator& mat(const BoundInstance& inst, const std::string& name) {
    auto it = inst.matrices.find(name);
    if (it == inst.matrices.end()) {
        throw ConfigError("bound instance lacks matrix " + name);
    }
    return it->second;
}

double par(const BoundInstance& inst, const std::string& name) {
    auto it = inst.params.find(name);
    if (it == inst.params.end()) {
        throw ConfigError("bound instance lacks parameter " + name);
    }
    return it->second;
}

WindowInstance window_of(const BoundInstance& inst) {
    WindowInstance w;
    w.h = mat(inst, "H");
    w.v = mat(inst, "V");
    w.lambda_minus = par(inst, "lambda_minus");
    w.lambda_plus = par(inst, "lambda_plus");
    w.delta = par(inst, "delta");
    return w;
}

nlohmann::json matrix_to_json(const Operator& m) {
    std::vector<double> re;
    std::vector<double> im;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Operator matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size()) {
        throw ParseError("matrix entry count does not match its shape");
    }
    Operator m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index k = 0; k < cols; ++k) {
            const std::size_t at = static_cast<std::size_t>(i * cols + k);
            m(i, k) = cplx(re[at], im[at]);
        }
    }
    return m;
}

double json_number(const nlohmann::json& j) {
    return j.is_null() ? -kInf : j.get<double>();
}

}  // namespace

BoundInstance generate_instance(const std::string& kind, std::uint64_t seed, bool violate) {
    Rng rng(seed);
    BoundInstance inst;
    if (kind == "weyl") {
        inst = gen_weyl(rng, violate);
    } else if (kind == "sylvester") {
        inst = gen_sylvester(rng, violate);
    } else if (kind == "block_resolvent") {
        inst = gen_block_resolvent(rng, violate);
    } else if (kind == "theorem1") {
        inst = gen_theorem1(rng, violate);
    } else if (kind == "theorem2") {
        inst = gen_theorem2(rng, violate);
    } else if (kind == "corollary1") {
        inst = gen_corollary1(rng, violate);
    } else if (kind == "corollary2") {
        inst = gen_corollary2(rng, violate);
    } else {
        throw ConfigError("unknown bound kind '" + kind + "'");
    }
    inst.kind = kind;
    inst.seed = seed;
    return inst;
}

BoundCheck evaluate(const BoundInstance& inst) {
    try {
        const std::string& k = inst.kind;
        if (k == "weyl") {
            return check_weyl(mat(inst, "H"), mat(inst, "Ht"));
        }
        if (k == "sylvester") {
            return check_sylvester(mat(inst, "A"), mat(inst, "B"), mat(inst, "X"), par(inst, "alpha"),
                                   par(inst, "beta"));
        }
        if (k == "block_resolvent") {
            return check_block_resolvent(mat(inst, "A"), mat(inst, "B"), Subspace::span(mat(inst, "S1")),
                                         par(inst, "G1"), par(inst, "G2"));
        }
        if (k == "theorem1" || k == "corollary1") {
            const WindowInstance w = window_of(inst);
            const int grid = static_cast<int>(par(inst, "grid"));
            const Operator heff = window_heff(w);
            const double gamma = self_consistent_gamma(w, heff, grid);
            return k == "theorem1" ? check_spectral_correspondence(w, heff, gamma, grid)
                                   : check_corollary1(w, heff, gamma, grid);
        }
        if (k == "theorem2") {
            return check_subspace_overlap(mat(inst, "H"), mat(inst, "Ht"), par(inst, "lambda_minus"),
                                          par(inst, "lambda_plus"), par(inst, "delta"));
        }
        if (k == "corollary2") {
            return check_corollary2(mat(inst, "H"), mat(inst, "Ht"), inst.windows, par(inst, "delta"));
        }
        throw ConfigError("unknown bound kind '" + k + "'");
    } catch (const HypothesisUnmet& e) {
        BoundCheck c;
        c.verdict = Verdict::kVacuous;
        c.note = e.what();
        return c;
    }
}

SuiteResult run_suite(const std::string& kind, std::size_t count, std::uint64_t seed, bool negative) {
    const auto results = parallel_map(count, [&](std::size_t i) {
        BoundInstance inst = generate_instance(kind, derive_seed(seed, i), negative);
        BoundCheck check = evaluate(inst);
        return std::make_pair(std::move(inst), std::move(check));
    });
    SuiteResult s;
    s.kind = kind;
    s.negative = negative;
    s.count = count;
    for (const auto& [inst, check] : results) {
        switch (check.verdict) {
            case Verdict::kPass:
                ++s.passes;
                break;
            case Verdict::kViolation:
                ++s.violations;
                s.failures.emplace_back(inst, check);
                break;
            case Verdict::kVacuous:
                ++s.vacuous;
                break;
        }
        if (check.verdict != Verdict::kVacuous) {
            s.min_margin = std::min(s.min_margin, check.margin);
        }
    }
    return s;
}

nlohmann::json instance_to_json(const BoundInstance& inst, const BoundCheck& check) {
    nlohmann::json mats = nlohmann::json::object();
    for (const auto& [name, m] : inst.matrices) {
        mats[name] = matrix_to_json(m);
    }
    nlohmann::json windows = nlohmann::json::array();
    for (const auto& [lo, hi] : inst.windows) {
        windows.push_back({lo, hi});
    }
    nlohmann::json chk = {{"verdict", verdict_name(check.verdict)},
                          {"margins", check.margins},
                          {"quantities", check.quantities},
                          {"note", check.note}};
    chk["margin"] = std::isfinite(check.margin) ? nlohmann::json(check.margin) : nlohmann::json();
    return {{"instance",
             {{"kind", inst.kind}, {"seed", inst.seed}, {"matrices", mats}, {"params", inst.params},
              {"windows", windows}}},
            {"check", chk}};
}

BoundInstance instance_from_json(const nlohmann::json& j) {
    const nlohmann::json& in = j.contains("instance") ? j.at("instance") : j;
    try {
        BoundInstance inst;
        inst.kind = in.at("kind").get<std::string>();
        inst.seed = in.value("seed", std::uint64_t{0});
        for (const auto& [name, m] : in.at("matrices").items()) {
            inst.matrices[name] = matrix_from_json(m);
        }
        if (in.contains("params")) {
            inst.params = in.at("params").get<std::map<std::string, double>>();
        }
        if (in.contains("windows")) {
            for (const auto& w : in.at("windows")) {
                inst.windows.emplace_back(w.at(0).get<double>(), w.at(1).get<double>());
            }
        }
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bound instance: ") + e.what());
    }
}

ReplayResult replay_dump(const nlohmann::json& dump) {
    ReplayResult r;
    r.check = evaluate(instance_from_json(dump));
    try {
        const nlohmann::json& rec = dump.at("check");
        for (const auto& m : rec.at("margins")) {
            r.recorded_margins.push_back(json_number(m));
        }
        r.recorded_verdict = rec.at("verdict").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bound dump: ") + e.what());
    }
    r.consistent = r.recorded_verdict == verdict_name(r.check.verdict) &&
                   r.recorded_margins.size() == r.check.margins.size();
    for (std::size_t i = 0; r.consistent && i < r.recorded_margins.size(); ++i) {
        const double want = r.recorded_margins[i];
        r.consistent = std::abs(r.check.margins[i] - want) <= kBoundSlack * (1.0 + std::abs(want));
    }
    return r;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("loglog_slope: need two or more matched points");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0)) {
            throw std::invalid_argument("loglog_slope: x values must be positive");
        }
        if (!(ys[i] > 0.0)) {
            return kInf;
        }
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) {
        throw std::invalid_argument("loglog_slope: x values are all equal");
    }
    return (n * sxy - sx * sy) / den;
}

namespace {

ScalingFit make_fit(std::string name, std::vector<double> rs, std::vector<double> residuals, double threshold) {
    ScalingFit f;
    f.name = std::move(name);
    f.exponent = loglog_slope(rs, residuals);
    f.rs = std::move(rs);
    f.residuals = std::move(residuals);
    f.threshold = threshold;
    f.pass = f.exponent >= threshold;
    return f;
}

// Step unitary for band j at omega0 = r * gap with the exact timing.
Operator band_unitary(const CoolingProblem& problem, std::size_t j, double r) {
    if (j == 0 || j > problem.L()) {
        throw std::invalid_argument("band index out of range");
    }
    ScheduleOptions opts;
    opts.omega0 = r * problem.band.gap;
    const CoolingSchedule sched = build_schedule(problem, opts);
    for (const auto& step : sched.steps) {
        if (step.j == j) {
            return step_unitary(problem, sched.omega0, step);
        }
    }
    throw std::invalid_argument("band is skipped by the schedule");
}

}  // namespace

ScalingFit lemma4_scaling(const CoolingProblem& problem, std::size_t j, const std::vector<double>& rs) {
    std::vector<double> res;
    for (double r : rs) {
        const Operator u = band_unitary(problem, j, r);
        const StateVector in = tensor(problem.band_states[j], bath::down());
        const StateVector target = tensor(problem.band_states[0], bath::up());
        const double amp = std::abs(target.dot(u * in));
        res.push_back(std::sqrt(std::max(0.0, 2.0 - 2.0 * amp)));
    }
    return make_fit("lemma4", rs, std::move(res), 0.9);
}

ScalingFit lemma5_scaling(const CoolingProblem& problem, std::size_t j, const std::vector<double>& rs) {
    Operator m(2 * static_cast<Eigen::Index>(problem.system_dim()), static_cast<Eigen::Index>(j));
    for (std::size_t k = 0; k < j; ++k) {
        m.col(static_cast<Eigen::Index>(k)) = tensor(problem.band_states[k], bath::down());
    }
    const Subspace ms = Subspace::span(m);
    const Operator leak = Operator::Identity(m.rows(), m.rows()) - ms.projector();
    std::vector<double> res;
    for (double r : rs) {
        const Operator u = band_unitary(problem, j, r);
        res.push_back(operator_norm(Operator(leak * u * ms.basis())));
    }
    return make_fit("lemma5", rs, std::move(res), 0.9);
}

ScalingFit lemma8_scaling(const ProbProblem& problem, const std::vector<double>& rs) {
    const QutritModel& md = problem.model;
    const StateVector p1t0 = md.p1.projector() * (problem.t_s * md.ground);
    if (!(p1t0.norm() > 0.0)) {
        throw std::invalid_argument("lemma8: T_S does not couple |0> to P1");
    }
    const StateVector one = p1t0 / p1t0.norm();
    const StateVector one_c = tensor(one, bath::center());
    const StateVector zero_b = tensor(md.ground, bath::bright());
    std::vector<double> res;
    for (double r : rs) {
        const double omega0 = r * md.gap;
        const Composite comp = qutrit_bath(md.h_system, md.omega1, Operator(omega0 * problem.t_s));
        const SpectralDecomposition sd = hermitian_eig(comp.total());
        const double rabi = omega0 * p1t0.norm();
        double worst = 0.0;
        for (double phi : {M_PI / 4.0, M_PI / 2.0}) {
            const StateVector out = sd.propagate(one_c, phi / rabi);
            const StateVector target = std::cos(phi) * one_c - cplx(0.0, std::sin(phi)) * zero_b;
            worst = std::max(worst, std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(target.dot(out)))));
        }
        res.push_back(worst);
    }
    return make_fit("lemma8", rs, std::move(res), 0.9);
}

ScalingFit lemma9_scaling(const ProbProblem& problem, const std::vector<double>& rs) {
    std::vector<double> res;
    for (double r : rs) {
        res.push_back(verification_leakage(problem.model, r * problem.model.gap));
    }
    return make_fit("lemma9", rs, std::move(res), 1.8);
}

bool ProtocolLemmaReport::pass() const {
    return std::all_of(fits.begin(), fits.end(), [](const ScalingFit& f) { return f.pass; });
}

ProtocolLemmaReport check_protocol_lemmas(const CoolingProblem* deterministic, const ProbProblem* probabilistic,
                                          const std::vector<double>& rs) {
    if (rs.size() < 3) {
        throw std::invalid_argument("check_protocol_lemmas: need at least three r values");
    }
    ProtocolLemmaReport rep;
    if (deterministic != nullptr) {
        rep.fits.push_back(lemma4_scaling(*deterministic, deterministic->L(), rs));
        rep.fits.push_back(lemma5_scaling(*deterministic, deterministic->L(), rs));
    }
    if (probabilistic != nullptr) {
        rep.fits.push_back(lemma8_scaling(*probabilistic, rs));
        rep.fits.push_back(lemma9_scaling(*probabilistic, rs));
    }
    return rep;
}

}  // namespace qsc
