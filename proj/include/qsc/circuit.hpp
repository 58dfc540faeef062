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

#ifndef QSC_CIRCUIT_HPP
#define QSC_CIRCUIT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qsc/linalg.hpp"

namespace qsc {

struct Gate {
    std::string name;
    Operator unitary;              // 2x2 or 4x4
    std::vector<std::size_t> targets;  // register qubits, 0 = most significant
};

/// Ordered gate list U_1 ... U_L acting on an n-qubit register.
struct CircuitSpec {
    std::size_t n = 0;
    std::vector<Gate> gates;

    std::size_t length() const { return gates.size(); }
    /// Throws std::invalid_argument on non-unitary gates or bad targets.
    void validate() const;
};

/// I, X, Y, Z, H, S, SDG, T, TDG (one qubit); CNOT/CX, CZ, SWAP (two qubits).
Operator named_gate(const std::string& name);

/// Gate lifted to the full 2^n register.
Operator embed_gate(const Gate& gate, std::size_t n);

/// U_l ... U_1 on the register (l = 0 gives the identity).
Operator circuit_prefix(const CircuitSpec& circuit, std::size_t l);

/// Parses the line format documented in docs/circuit_format.md.
/// Throws ParseError with a line number on malformed input.
CircuitSpec parse_circuit(std::istream& in);
CircuitSpec parse_circuit_string(const std::string& text);
CircuitSpec load_circuit(const std::string& path);

CircuitSpec identity_circuit(std::size_t n, std::size_t length);

/// Haar-random gates: single-qubit gates when n = 1, otherwise two-qubit
/// gates on uniformly drawn ordered pairs.
CircuitSpec random_circuit(std::size_t n, std::size_t length, std::uint64_t seed);

/// Appends `count` identity gates.
CircuitSpec pad_with_identities(const CircuitSpec& circuit, std::size_t count);

}  // namespace qsc

#endif
