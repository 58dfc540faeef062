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

#include "qsc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qsc/errors.hpp"

namespace qsc {

double hermiticity_defect(const Operator& a) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("hermiticity_defect: matrix is not square");
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const Operator& a, const char* what) {
    if (a.size() == 0) {
        return;
    }
    double defect = hermiticity_defect(a);
    if (defect <= tol::kHermitian) {
        return;
    }
    if (defect > tol::kHermitian * (1.0 + operator_norm(a))) {
        std::ostringstream msg;
        msg << what << " is not Hermitian (defect " << defect << ")";
        throw NonHermitianInput(msg.str());
    }
}

Operator SpectralDecomposition::reconstruct() const {
    return vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint();
}

Operator SpectralDecomposition::propagator(double t) const {
    Eigen::VectorXcd phases(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        phases[k] = std::polar(1.0, -t * values[k]);
    }
    return vectors * phases.asDiagonal() * vectors.adjoint();
}

StateVector SpectralDecomposition::propagate(const StateVector& psi, double t) const {
    StateVector c = vectors.adjoint() * psi;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        c[k] *= std::polar(1.0, -t * values[k]);
    }
    return vectors * c;
}

double SpectralDecomposition::residual(const Operator& h) const {
    Operator r = h * vectors - vectors * values.cast<cplx>().asDiagonal();
    return r.colwise().norm().maxCoeff();
}

SpectralDecomposition hermitian_eig(const Operator& h) {
    if (h.rows() != h.cols()) {
        throw DimensionMismatch("hermitian_eig: matrix is not square");
    }
    require_hermitian(h, "hermitian_eig input");
    SpectralDecomposition sd;
    if (h.rows() == 0) {
        return sd;
    }
    Operator sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(sym, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw Error("hermitian_eig: QR iteration did not converge");
    }
    sd.values = solver.eigenvalues();
    sd.vectors = solver.eigenvectors();
    return sd;
}

Operator evolve(const Operator& h, double t) {
    if (t == 0.0) {
        require_hermitian(h, "evolve generator");
        return identity(static_cast<std::size_t>(h.rows()));
    }
    return hermitian_eig(h).propagator(t);
}

double operator_norm(const Operator& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::BDCSVD<Operator> svd(a);
    return svd.singularValues()(0);
}

double hermitian_norm(const Operator& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Operator sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Operator tensor(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    StateVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a[i] * b;
    }
    return out;
}

Operator tensor(std::initializer_list<Operator> factors) {
    Operator out = Operator::Identity(1, 1);
    for (const auto& f : factors) {
        out = tensor(out, f);
    }
    return out;
}

Operator identity(std::size_t dim) {
    return Operator::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

StateVector basis_vector(std::size_t dim, std::size_t index) {
    StateVector v = StateVector::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return v;
}

Operator outer(const StateVector& a, const StateVector& b) { return a * b.adjoint(); }

Operator projector(const StateVector& v) { return v * v.adjoint(); }

Operator partial_trace(const Operator& rho, const std::vector<std::size_t>& dims,
                       const std::vector<std::size_t>& keep) {
    std::size_t total = 1;
    for (auto d : dims) {
        total *= d;
    }
    if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != total) {
        throw DimensionMismatch("partial_trace: dims do not match the operator");
    }
    std::vector<bool> kept(dims.size(), false);
    for (auto k : keep) {
        if (k >= dims.size()) {
            throw DimensionMismatch("partial_trace: keep index out of range");
        }
        kept[k] = true;
    }
    std::size_t dk = 1;
    std::size_t dt = 1;
    for (std::size_t s = 0; s < dims.size(); ++s) {
        (kept[s] ? dk : dt) *= dims[s];
    }

    // Full index for each (kept, traced) pair.
    std::vector<Eigen::Index> index(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        std::size_t k = 0;
        std::size_t t = 0;
        std::size_t kstride = 1;
        std::size_t tstride = 1;
        for (std::size_t s = dims.size(); s-- > 0;) {
            std::size_t digit = rem % dims[s];
            rem /= dims[s];
            if (kept[s]) {
                k += digit * kstride;
                kstride *= dims[s];
            } else {
                t += digit * tstride;
                tstride *= dims[s];
            }
        }
        index[k * dt + t] = static_cast<Eigen::Index>(i);
    }

    Operator out = Operator::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t a = 0; a < dk; ++a) {
        for (std::size_t b = 0; b < dk; ++b) {
            cplx acc = 0.0;
            for (std::size_t t = 0; t < dt; ++t) {
                acc += rho(index[a * dt + t], index[b * dt + t]);
            }
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
        }
    }
    return out;
}

bool DensityDiagnostics::valid() const {
    return trace_residual <= tol::kNormalization && hermiticity <= tol::kHermitian &&
           min_eigenvalue >= -tol::kPositivity;
}

DensityDiagnostics inspect_density(const Operator& rho) {
    DensityDiagnostics d;
    d.trace_residual = std::abs(rho.trace() - cplx(1.0, 0.0));
    d.hermiticity = hermiticity_defect(rho);
    Operator sym = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(sym, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = solver.eigenvalues().minCoeff();
    return d;
}

Subspace::Subspace(Operator basis) : basis_(std::move(basis)) {
    if (basis_.cols() > 0) {
        Operator gram = basis_.adjoint() * basis_;
        double defect = (gram - Operator::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
        if (defect > tol::kHermitian * std::max<double>(1.0, static_cast<double>(basis_.cols()))) {
            throw std::invalid_argument("Subspace: basis is not orthonormal");
        }
    }
}

Subspace Subspace::empty(std::size_t ambient_dim) {
    return Subspace(Operator(static_cast<Eigen::Index>(ambient_dim), 0));
}

Subspace Subspace::full(std::size_t ambient_dim) { return Subspace(identity(ambient_dim)); }

Subspace Subspace::span(const Operator& vectors, double rank_tol) {
    if (vectors.cols() == 0) {
        return empty(static_cast<std::size_t>(vectors.rows()));
    }
    Eigen::BDCSVD<Operator> svd(vectors, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s[rank] > rank_tol * std::max(1.0, s[0])) {
        ++rank;
    }
    return Subspace(Operator(svd.matrixU().leftCols(rank)));
}

Operator Subspace::projector() const { return basis_ * basis_.adjoint(); }

Subspace Subspace::complement() const {
    const Eigen::Index m = basis_.rows();
    const Eigen::Index k = basis_.cols();
    if (k == 0) {
        return full(static_cast<std::size_t>(m));
    }
    Eigen::HouseholderQR<Operator> qr(basis_);
    Operator q = qr.householderQ() * Operator::Identity(m, m);
    return Subspace(Operator(q.rightCols(m - k)));
}

Operator Subspace::restrict(const Operator& a) const { return basis_.adjoint() * a * basis_; }

StateVector Subspace::embed(const StateVector& coords) const { return basis_ * coords; }

Operator Subspace::embed(const Operator& block) const { return basis_ * block * basis_.adjoint(); }

double Subspace::weight(const StateVector& v) const { return (basis_.adjoint() * v).squaredNorm(); }

Subspace subspace_from_eigenwindow(const SpectralDecomposition& sd, double lo, double hi) {
    if (!(lo < hi)) {
        throw std::invalid_argument("subspace_from_eigenwindow: lo must be below hi");
    }
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < sd.values.size(); ++k) {
        if (sd.values[k] > lo && sd.values[k] < hi) {
            cols.push_back(k);
        }
    }
    Operator basis(sd.vectors.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        basis.col(static_cast<Eigen::Index>(c)) = sd.vectors.col(cols[c]);
    }
    return Subspace(std::move(basis));
}

Subspace direct_sum(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim() != b.ambient_dim()) {
        throw DimensionMismatch("direct_sum: ambient dimensions differ");
    }
    Operator basis(static_cast<Eigen::Index>(a.ambient_dim()),
                   static_cast<Eigen::Index>(a.rank() + b.rank()));
    basis << a.basis(), b.basis();
    return Subspace(std::move(basis));
}

}  // namespace qsc
