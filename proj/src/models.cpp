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

#include "qsc/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "qsc/errors.hpp"

namespace qsc {

std::size_t dimension_cap() {
    if (const char* env = std::getenv("QSC_MAX_DIM")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::size_t{1} << 14;
}

namespace {

void check_cap(std::size_t dim, std::size_t cap, const char* what) {
    if (dim > cap) {
        std::ostringstream msg;
        msg << what << ": dimension " << dim << " exceeds the cap " << cap;
        throw DimensionTooLarge(msg.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------

void GroverModel::validate() const {
    if (n == 0 || n > 30) {
        throw std::invalid_argument("grover: n must be between 1 and 30");
    }
    std::set<std::uint64_t> unique(marked.begin(), marked.end());
    if (unique.empty() || unique.size() != marked.size() || unique.size() >= dim()) {
        throw std::invalid_argument("grover: need 1 <= |marked| < 2^n distinct strings");
    }
    if (*unique.rbegin() >= dim()) {
        throw std::invalid_argument("grover: marked string out of range");
    }
    if (!(omega1 > 0.0) || !(omega0 > 0.0)) {
        throw std::invalid_argument("grover: omega1 and omega0 must be positive");
    }
}

GroverSystem build_grover(const GroverModel& model) {
    model.validate();
    const std::size_t dim = model.dim();
    check_cap(dim, dimension_cap(), "build_grover");
    std::set<std::uint64_t> marked(model.marked.begin(), model.marked.end());
    GroverSystem out;
    out.h_system = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    Operator b0(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(marked.size()));
    Operator b1(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim - marked.size()));
    b0.setZero();
    b1.setZero();
    Eigen::Index c0 = 0;
    Eigen::Index c1 = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        auto ii = static_cast<Eigen::Index>(i);
        if (marked.count(i)) {
            b0(ii, c0++) = 1.0;
        } else {
            out.h_system(ii, ii) = model.omega1;
            b1(ii, c1++) = 1.0;
        }
    }
    out.p0 = Subspace(std::move(b0));
    out.p1 = Subspace(std::move(b1));
    return out;
}

StateVector uniform_state(std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    return StateVector::Constant(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

// ---------------------------------------------------------------------------

double ClockModel::delta1() const {
    const double l1 = static_cast<double>(L() + 1);
    return h * omega * M_PI * M_PI / (2.0 * static_cast<double>(n()) * l1 * l1);
}

void ClockModel::validate() const {
    circuit.validate();
    if (L() == 0) {
        throw std::invalid_argument("clock: circuit must contain at least one gate");
    }
    if (!(h > 0.0) || h > 1.0) {
        throw std::invalid_argument("clock: h must lie in (0, 1]");
    }
    if (!(omega > 0.0)) {
        throw std::invalid_argument("clock: omega must be positive");
    }
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < L(); ++j) {
        spacing = std::min(spacing, clock_omega(L(), omega, j + 1) - clock_omega(L(), omega, j));
    }
    if (!(delta1() < spacing)) {
        throw std::invalid_argument("clock: input penalty exceeds the H_prop level spacing");
    }
}

namespace {

// Clock qubit l (1-based) sits at bit L - l of the full index.
inline bool clock_bit(std::size_t idx, std::size_t L, std::size_t l) { return (idx >> (L - l)) & 1U; }

}  // namespace

ClockTerms clock_terms(const ClockModel& model, std::size_t cap) {
    model.validate();
    const std::size_t n = model.n();
    const std::size_t L = model.L();
    if (n + L > 30) {
        throw DimensionTooLarge("clock: too many qubits");
    }
    const std::size_t dim = model.dim();
    check_cap(dim, cap, "build_clock");
    const std::size_t clock_mask = (std::size_t{1} << L) - 1;
    const auto D = static_cast<Eigen::Index>(dim);

    ClockTerms t;
    t.prop = Operator::Zero(D, D);
    t.input = Operator::Zero(D, D);
    t.clock = Operator::Zero(D, D);

    for (std::size_t idx = 0; idx < dim; ++idx) {
        auto i = static_cast<Eigen::Index>(idx);
        const std::size_t reg = idx >> L;
        if (!clock_bit(idx, L, 1)) {
            t.input(i, i) = static_cast<double>(std::popcount(reg));
        }
        double c = 0.0;
        for (std::size_t l = 1; l < L; ++l) {
            if (!clock_bit(idx, L, l) && clock_bit(idx, L, l + 1)) {
                c += 1.0;
            }
        }
        t.clock(i, i) = c;
    }

    for (std::size_t l = 1; l <= L; ++l) {
        const Operator u = embed_gate(model.circuit.gates[l - 1], n);
        for (std::size_t idx = 0; idx < dim; ++idx) {
            bool left_ok = (l == 1) || clock_bit(idx, L, l - 1);
            bool right_ok = (l == L) || !clock_bit(idx, L, l + 1);
            if (!left_ok || !right_ok) {
                continue;
            }
            auto i = static_cast<Eigen::Index>(idx);
            t.prop(i, i) += 0.5;
            if (clock_bit(idx, L, l)) {
                continue;
            }
            // |..1 0 0..> -> |..1 1 0..> with U_l on the register.
            const std::size_t clock = (idx & clock_mask) | (std::size_t{1} << (L - l));
            const std::size_t reg = idx >> L;
            for (std::size_t r2 = 0; r2 < (std::size_t{1} << n); ++r2) {
                cplx amp = u(static_cast<Eigen::Index>(r2), static_cast<Eigen::Index>(reg));
                if (amp == cplx(0.0)) {
                    continue;
                }
                auto j = static_cast<Eigen::Index>((r2 << L) | clock);
                t.prop(j, i) -= 0.5 * amp;
                t.prop(i, j) -= 0.5 * std::conj(amp);
            }
        }
    }
    return t;
}

Operator build_clock(const ClockModel& model, std::size_t cap) {
    ClockTerms t = clock_terms(model, cap);
    return model.omega * t.prop + model.delta1() * t.input + 2.0 * model.omega * t.clock;
}

std::size_t clock_index(const ClockModel& model, std::size_t reg, std::size_t l) {
    const std::size_t L = model.L();
    const std::size_t clock = ((std::size_t{1} << l) - 1) << (L - l);
    return (reg << L) | clock;
}

Subspace legal_clock_subspace(const ClockModel& model) {
    const std::size_t nreg = std::size_t{1} << model.n();
    const std::size_t L = model.L();
    Operator basis = Operator::Zero(static_cast<Eigen::Index>(model.dim()),
                                    static_cast<Eigen::Index>(nreg * (L + 1)));
    Eigen::Index c = 0;
    for (std::size_t reg = 0; reg < nreg; ++reg) {
        for (std::size_t l = 0; l <= L; ++l) {
            basis(static_cast<Eigen::Index>(clock_index(model, reg, l)), c++) = 1.0;
        }
    }
    return Subspace(std::move(basis));
}

double clock_omega(std::size_t L, double omega, std::size_t j) {
    return omega * (1.0 - std::cos(static_cast<double>(j) * M_PI / static_cast<double>(L + 1)));
}

double clock_overlap(std::size_t L, std::size_t j) {
    const double l1 = static_cast<double>(L + 1);
    if (j == 0) {
        return 1.0 / std::sqrt(l1);
    }
    return std::sqrt(2.0 / l1) * std::cos(static_cast<double>(j) * M_PI / (2.0 * l1));
}

double clock_shift_factor(std::size_t L, std::size_t j) {
    const double l1 = static_cast<double>(L + 1);
    const double c = std::cos(static_cast<double>(j) * M_PI / (2.0 * l1));
    return (j == 0 ? 1.0 : 2.0) / l1 * c * c;
}

StateVector clock_band_state(const ClockModel& model, std::size_t k) {
    const std::size_t L = model.L();
    if (k > L) {
        throw std::invalid_argument("clock_band_state: k exceeds L");
    }
    const double l1 = static_cast<double>(L + 1);
    const double norm = std::sqrt((k == 0 ? 1.0 : 2.0) / l1);
    StateVector out = StateVector::Zero(static_cast<Eigen::Index>(model.dim()));
    StateVector reg = basis_vector(std::size_t{1} << model.n(), 0);
    for (std::size_t l = 0; l <= L; ++l) {
        if (l > 0) {
            reg = embed_gate(model.circuit.gates[l - 1], model.n()) * reg;
        }
        const double c = norm * std::cos((static_cast<double>(l) + 0.5) * static_cast<double>(k) * M_PI / l1);
        for (Eigen::Index r = 0; r < reg.size(); ++r) {
            out[static_cast<Eigen::Index>(clock_index(model, static_cast<std::size_t>(r), l))] += c * reg[r];
        }
    }
    return out;
}

StateVector history_state(const ClockModel& model) { return clock_band_state(model, 0); }

StateVector clock_fiducial(const ClockModel& model) { return basis_vector(model.dim(), 0); }

Operator clock_coupling(const ClockModel& model) {
    const std::size_t dim = model.dim();
    const std::size_t L = model.L();
    Operator t = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t idx = 0; idx < dim; ++idx) {
        if (!clock_bit(idx, L, 1)) {
            t(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = 1.0;
        }
    }
    return t;
}

double band_gap(const SpectralDecomposition& sd, const std::vector<double>& omegas) {
    const double scale = 1.0 + sd.values.cwiseAbs().maxCoeff();
    double gap = std::numeric_limits<double>::infinity();
    for (double w : omegas) {
        Eigen::Index best = 0;
        (sd.values.array() - w).abs().minCoeff(&best);
        if (std::abs(sd.values[best] - w) > tol::kResidual * scale) {
            std::ostringstream msg;
            msg << "band_gap: level " << w << " not found in the spectrum";
            throw std::runtime_error(msg.str());
        }
        for (Eigen::Index k = 0; k < sd.values.size(); ++k) {
            if (k != best) {
                gap = std::min(gap, std::abs(sd.values[k] - w));
            }
        }
    }
    return gap;
}

ClockSpectrum clock_spectrum(const ClockModel& model, std::size_t cap) {
    const Operator h = build_clock(model, cap);
    const SpectralDecomposition sd = hermitian_eig(h);
    const std::size_t L = model.L();
    ClockSpectrum out;
    for (std::size_t j = 0; j <= L; ++j) {
        out.omegas.push_back(clock_omega(L, model.omega, j));
        out.xs.push_back(clock_overlap(L, j));
        out.hs.push_back(clock_shift_factor(L, j));
    }
    out.delta = band_gap(sd, out.omegas);
    out.h_norm = sd.values.cwiseAbs().maxCoeff();
    return out;
}

// ---------------------------------------------------------------------------

namespace bath {
StateVector down() { return basis_vector(2, 0); }
StateVector up() { return basis_vector(2, 1); }
StateVector center() { return basis_vector(3, 0); }
StateVector left() { return basis_vector(3, 1); }
StateVector right() { return basis_vector(3, 2); }
StateVector bright() { return (left() + right()) / std::sqrt(2.0); }
StateVector dark() { return (left() - right()) / std::sqrt(2.0); }
Operator sigma_x() {
    Operator s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}
}  // namespace bath

Composite qubit_bath(const Operator& h_s, double omega_b, const Operator& t_s) {
    require_hermitian(h_s, "H_S");
    require_hermitian(t_s, "T_S");
    if (h_s.rows() != t_s.rows()) {
        throw DimensionMismatch("qubit_bath: H_S and T_S differ in dimension");
    }
    const auto d = static_cast<std::size_t>(h_s.rows());
    Composite c;
    c.system_dim = d;
    c.bath_dim = 2;
    c.h = tensor(h_s, identity(2)) + omega_b * tensor(identity(d), projector(bath::up()));
    c.v = tensor(t_s, bath::sigma_x());
    return c;
}

Composite qutrit_bath(const Operator& h_s, double omega1, const Operator& t_s) {
    require_hermitian(h_s, "H_S");
    require_hermitian(t_s, "T_S");
    if (h_s.rows() != t_s.rows()) {
        throw DimensionMismatch("qutrit_bath: H_S and T_S differ in dimension");
    }
    const auto d = static_cast<std::size_t>(h_s.rows());
    const Operator pc = projector(bath::center());
    const Operator pl = projector(bath::left());
    const Operator pr = projector(bath::right());
    Composite c;
    c.system_dim = d;
    c.bath_dim = 3;
    c.h = tensor(h_s, Operator(pc + pr - pl)) + omega1 * tensor(identity(d), Operator(pr + pl));
    c.v = tensor(t_s, Operator(outer(bath::center(), bath::bright()) + outer(bath::bright(), bath::center())));
    return c;
}

Operator verification_hamiltonian(const Operator& h_s, double omega1, double omega0) {
    const auto d = static_cast<std::size_t>(h_s.rows());
    Composite c = qutrit_bath(h_s, omega1, Operator::Zero(h_s.rows(), h_s.cols()));
    Operator hop = outer(bath::left(), bath::right()) + outer(bath::right(), bath::left());
    return c.h + omega0 * tensor(identity(d), hop);
}

// ---------------------------------------------------------------------------

FiducialDecomposition decompose_fiducial(const StateVector& f, const std::vector<Subspace>& bands) {
    FiducialDecomposition out;
    double captured = 0.0;
    for (const auto& band : bands) {
        if (band.ambient_dim() != static_cast<std::size_t>(f.size())) {
            throw DimensionMismatch("decompose_fiducial: band dimension differs from F");
        }
        StateVector proj = band.embed(StateVector(band.basis().adjoint() * f));
        double x = proj.norm();
        out.xs.push_back(x);
        captured += x * x;
        if (x > 0.0) {
            out.band_states.push_back(proj / x);
        } else {
            out.band_states.push_back(StateVector::Zero(f.size()));
        }
    }
    out.f_perp = std::sqrt(std::max(0.0, f.squaredNorm() - captured));
    return out;
}

FiducialDecomposition decompose_fiducial(const StateVector& f, const SpectralDecomposition& sd) {
    std::vector<Subspace> bands;
    const double scale = 1.0 + sd.values.cwiseAbs().maxCoeff();
    Eigen::Index start = 0;
    const Eigen::Index m = sd.values.size();
    while (start < m) {
        Eigen::Index end = start + 1;
        while (end < m && sd.values[end] - sd.values[end - 1] < tol::kDegenerate * scale) {
            ++end;
        }
        bands.emplace_back(Operator(sd.vectors.middleCols(start, end - start)));
        start = end;
    }
    return decompose_fiducial(f, bands);
}

// ---------------------------------------------------------------------------

QutritModel make_qutrit_model(const Operator& h_s, double omega1, double halfwidth) {
    const SpectralDecomposition sd = hermitian_eig(h_s);
    const double scale = 1.0 + sd.values.cwiseAbs().maxCoeff();
    if (sd.dim() < 3) {
        throw std::invalid_argument("qutrit model: system too small");
    }
    if (std::abs(sd.values[0]) > tol::kResidual * scale) {
        throw std::invalid_argument("qutrit model: ground energy must be zero");
    }
    if (sd.values[1] - sd.values[0] < tol::kResidual * scale) {
        throw std::invalid_argument("qutrit model: ground state is degenerate");
    }
    QutritModel m;
    m.h_system = h_s;
    m.ground = sd.vectors.col(0);
    m.omega1 = omega1;
    std::vector<Eigen::Index> in_p1;
    double gap = omega1;
    for (Eigen::Index k = 1; k < sd.values.size(); ++k) {
        if (std::abs(sd.values[k] - omega1) <= halfwidth) {
            in_p1.push_back(k);
        } else {
            gap = std::min({gap, std::abs(sd.values[k]), std::abs(sd.values[k] - omega1)});
        }
    }
    if (in_p1.empty()) {
        throw std::invalid_argument("qutrit model: no eigenvalue near omega1");
    }
    Operator basis(sd.vectors.rows(), static_cast<Eigen::Index>(in_p1.size()));
    for (std::size_t c = 0; c < in_p1.size(); ++c) {
        basis.col(static_cast<Eigen::Index>(c)) = sd.vectors.col(in_p1[c]);
    }
    m.p1 = Subspace(std::move(basis));
    m.gap = gap;
    return m;
}

QutritModel clock_qutrit_model(const ClockModel& model, std::size_t cap) {
    const Operator h = build_clock(model, cap);
    const double w1 = clock_omega(model.L(), model.omega, 1);
    QutritModel m = make_qutrit_model(h, w1, tol::kResidual * (1.0 + operator_norm(h)));
    // Replace numerically chosen vectors by the analytic ones (same spans).
    m.ground = history_state(model);
    m.p1 = Subspace(Operator(clock_band_state(model, 1)));
    return m;
}

}  // namespace qsc
