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

#ifndef QSC_RANDOM_HPP
#define QSC_RANDOM_HPP

#include <cstdint>
#include <random>

#include "qsc/linalg.hpp"

namespace qsc {

using Rng = std::mt19937_64;

/// splitmix64 finaliser applied to (master, index); gives per-trial seeds that
/// do not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Haar-random unit vector (normalised complex Gaussian).
StateVector random_state(std::size_t dim, std::uint64_t seed);
StateVector random_state(std::size_t dim, Rng& rng);

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
Operator random_unitary(std::size_t dim, Rng& rng);

/// GUE-style Hermitian matrix with unit-variance entries.
Operator random_hermitian(std::size_t dim, Rng& rng);

Operator random_complex(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace qsc

#endif
