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

#include "qsc/random.hpp"

#include <cmath>

namespace qsc {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Operator random_complex(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Operator m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            double re = normal(rng);
            double im = normal(rng);
            m(i, j) = cplx(re, im) / std::sqrt(2.0);
        }
    }
    return m;
}

StateVector random_state(std::size_t dim, Rng& rng) {
    StateVector v = random_complex(dim, 1, rng).col(0);
    return v / v.norm();
}

StateVector random_state(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    return random_state(dim, rng);
}

Operator random_unitary(std::size_t dim, Rng& rng) {
    Operator z = random_complex(dim, dim, rng);
    Eigen::HouseholderQR<Operator> qr(z);
    Operator q = qr.householderQ() * Operator::Identity(z.rows(), z.cols());
    Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < z.cols(); ++k) {
        cplx d = r(k, k);
        double a = std::abs(d);
        if (a > 0.0) {
            q.col(k) *= d / a;
        }
    }
    return q;
}

Operator random_hermitian(std::size_t dim, Rng& rng) {
    Operator z = random_complex(dim, dim, rng);
    return 0.5 * (z + z.adjoint());
}

}  // namespace qsc
