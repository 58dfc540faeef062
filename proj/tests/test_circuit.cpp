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

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "qsc/circuit.hpp"
#include "qsc/errors.hpp"

using namespace qsc;

namespace {

std::string parse_error(const std::string& text) {
    try {
        parse_circuit_string(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Circuit, NamedGates) {
    const auto c = parse_circuit_string("# bell\nqubits 2\nG H 0\nG CNOT 0 1\n");
    EXPECT_EQ(c.n, 2u);
    ASSERT_EQ(c.length(), 2u);
    const Operator u = circuit_prefix(c, 2);
    // |00> -> (|00> + |11>)/sqrt2
    EXPECT_NEAR(std::abs(u(0, 0)), 1 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(std::abs(u(3, 0)), 1 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(std::abs(u(1, 0)), 0.0, 1e-14);
}

TEST(Circuit, TargetZeroIsMostSignificant) {
    const auto c = parse_circuit_string("qubits 2\nG X 0\n");
    const Operator u = circuit_prefix(c, 1);
    EXPECT_NEAR(std::abs(u(2, 0)), 1.0, 1e-15);  // |00> -> |10>
}

TEST(Circuit, MatrixLiteral) {
    const auto c = parse_circuit_string("qubits 1\nG [ 0 0 1 0 1 0 0 0 ] 0\n");
    EXPECT_LE((c.gates[0].unitary - named_gate("X")).norm(), 1e-15);
}

TEST(Circuit, PrefixZeroIsIdentity) {
    const auto c = random_circuit(2, 3, 7);
    EXPECT_LE((circuit_prefix(c, 0) - Operator::Identity(4, 4)).norm(), 1e-15);
    const Operator u = circuit_prefix(c, 3);
    EXPECT_LE((u * u.adjoint() - Operator::Identity(4, 4)).norm(), 1e-12);
}

TEST(Circuit, RandomIsSeeded) {
    const auto a = random_circuit(2, 4, 11);
    const auto b = random_circuit(2, 4, 11);
    EXPECT_EQ((circuit_prefix(a, 4) - circuit_prefix(b, 4)).norm(), 0.0);
}

TEST(Circuit, PaddingKeepsProduct) {
    const auto c = random_circuit(1, 2, 3);
    const auto p = pad_with_identities(c, 3);
    EXPECT_EQ(p.length(), 5u);
    EXPECT_LE((circuit_prefix(p, 5) - circuit_prefix(c, 2)).norm(), 1e-14);
    EXPECT_EQ(identity_circuit(2, 3).length(), 3u);
}

TEST(CircuitParse, ReportsLineNumbers) {
    EXPECT_NE(parse_error("qubits 1\n\nG FOO 0\n").find("unknown gate"), std::string::npos);
    EXPECT_NE(parse_error("G X 0\n").find("line 1"), std::string::npos);
    EXPECT_NE(parse_error("qubits 1\n# c\nG X 3\n").find("line 3"), std::string::npos);
    EXPECT_NE(parse_error("qubits 2\nG CNOT 1 1\n").find("repeated"), std::string::npos);
    EXPECT_NE(parse_error("qubits 1\nG [ 1 0 1 0 0 0 1 0 ] 0\n").find("unitary"), std::string::npos);
    EXPECT_NE(parse_error("qubits 1\nG [ 1 0 0 0 ] 0\n").find("8 (2x2)"), std::string::npos);
    EXPECT_NE(parse_error("qubits 1\n").find("no gates"), std::string::npos);
    EXPECT_NE(parse_error("qubits 0\nG X 0\n").find("at least one"), std::string::npos);
    EXPECT_NE(parse_error("qubits 1\nG X 0 junk\n").find("line 2"), std::string::npos);
}

TEST(CircuitParse, MissingFile) {
    EXPECT_THROW(load_circuit("/nonexistent/circuit.txt"), ParseError);
}
