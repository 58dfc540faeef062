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

#ifndef QSC_LINALG_HPP
#define QSC_LINALG_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qsc {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Global numerical tolerances.
namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kNormalization = 1e-10;
inline constexpr double kResidual = 1e-9;
inline constexpr double kPositivity = 1e-9;
inline constexpr double kDegenerate = 1e-10;
}  // namespace tol

/// max |a_ij - conj(a_ji)|.
double hermiticity_defect(const Operator& a);

/// Throws NonHermitianInput when the defect exceeds kHermitian * (1 + |a|).
void require_hermitian(const Operator& a, const char* what = "operator");

/// Eigenvalues ascending, eigenvectors as columns.
struct SpectralDecomposition {
    RealVector values;
    Operator vectors;

    std::size_t dim() const { return static_cast<std::size_t>(values.size()); }
    Operator reconstruct() const;
    /// V diag(exp(-i t lambda)) V^dagger.
    Operator propagator(double t) const;
    /// Applies the propagator to a vector without forming it.
    StateVector propagate(const StateVector& psi, double t) const;
    /// max_k |H v_k - lambda_k v_k|.
    double residual(const Operator& h) const;
};

SpectralDecomposition hermitian_eig(const Operator& h);

/// exp(-i t h) for Hermitian h.
Operator evolve(const Operator& h, double t);

/// Largest singular value.
double operator_norm(const Operator& a);
double hermitian_norm(const Operator& a);

Operator tensor(const Operator& a, const Operator& b);
StateVector tensor(const StateVector& a, const StateVector& b);
Operator tensor(std::initializer_list<Operator> factors);

Operator identity(std::size_t dim);
StateVector basis_vector(std::size_t dim, std::size_t index);
Operator outer(const StateVector& a, const StateVector& b);
Operator projector(const StateVector& v);

/// Traces out every subsystem not listed in `keep`. Subsystem 0 is the most
/// significant factor of the row index.
Operator partial_trace(const Operator& rho, const std::vector<std::size_t>& dims,
                       const std::vector<std::size_t>& keep);

struct DensityDiagnostics {
    double trace_residual = 0.0;
    double hermiticity = 0.0;
    double min_eigenvalue = 0.0;
    bool valid() const;
};
DensityDiagnostics inspect_density(const Operator& rho);

/// Span of orthonormal columns.
class Subspace {
   public:
    Subspace() = default;
    /// Orthonormality is checked, not enforced.
    explicit Subspace(Operator basis);
    static Subspace empty(std::size_t ambient_dim);
    static Subspace full(std::size_t ambient_dim);
    /// Orthonormalises an arbitrary spanning set (rank-revealing).
    static Subspace span(const Operator& vectors, double rank_tol = 1e-10);

    const Operator& basis() const { return basis_; }
    std::size_t ambient_dim() const { return static_cast<std::size_t>(basis_.rows()); }
    std::size_t rank() const { return static_cast<std::size_t>(basis_.cols()); }
    bool is_empty() const { return basis_.cols() == 0; }

    Operator projector() const;
    Subspace complement() const;
    /// B^dagger A B.
    Operator restrict(const Operator& a) const;
    /// B x.
    StateVector embed(const StateVector& coords) const;
    Operator embed(const Operator& block) const;
    double weight(const StateVector& v) const;

   private:
    Operator basis_;
};

Subspace subspace_from_eigenwindow(const SpectralDecomposition& sd, double lo, double hi);
Subspace direct_sum(const Subspace& a, const Subspace& b);

}  // namespace qsc

#endif
