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

#include "qsc/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "qsc/errors.hpp"
#include "qsc/random.hpp"

namespace qsc {

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << "circuit line " << line << ": " << what;
    throw ParseError(msg.str());
}

std::size_t parse_index(const std::string& tok, std::size_t line) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); })) {
        parse_fail(line, "expected a qubit index, got '" + tok + "'");
    }
    return static_cast<std::size_t>(std::stoul(tok));
}

double parse_real(const std::string& tok, std::size_t line) {
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) {
            parse_fail(line, "bad number '" + tok + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        parse_fail(line, "bad number '" + tok + "'");
    }
}

// Splits on whitespace and treats '[' and ']' as separate tokens.
std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else if (c == '[' || c == ']') {
            flush();
            out.emplace_back(1, c);
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return out;
}

}  // namespace

void CircuitSpec::validate() const {
    if (n == 0) {
        throw std::invalid_argument("circuit: register must have at least one qubit");
    }
    for (std::size_t l = 0; l < gates.size(); ++l) {
        const Gate& g = gates[l];
        std::size_t k = g.targets.size();
        if (k != 1 && k != 2) {
            throw std::invalid_argument("circuit: gates act on one or two qubits");
        }
        auto d = static_cast<Eigen::Index>(std::size_t{1} << k);
        if (g.unitary.rows() != d || g.unitary.cols() != d) {
            throw std::invalid_argument("circuit: gate matrix size does not match its targets");
        }
        for (auto t : g.targets) {
            if (t >= n) {
                throw std::invalid_argument("circuit: target out of range");
            }
        }
        if (k == 2 && g.targets[0] == g.targets[1]) {
            throw std::invalid_argument("circuit: repeated target");
        }
        double defect = (g.unitary.adjoint() * g.unitary - Operator::Identity(d, d)).cwiseAbs().maxCoeff();
        if (defect > tol::kHermitian) {
            throw std::invalid_argument("circuit: gate " + std::to_string(l + 1) + " is not unitary");
        }
    }
}

Operator named_gate(const std::string& raw) {
    const std::string name = upper(raw);
    const cplx i(0.0, 1.0);
    const double s = 1.0 / std::sqrt(2.0);
    Operator u;
    if (name == "I" || name == "ID") {
        u = Operator::Identity(2, 2);
    } else if (name == "X") {
        u.resize(2, 2);
        u << 0, 1, 1, 0;
    } else if (name == "Y") {
        u.resize(2, 2);
        u << 0, -i, i, 0;
    } else if (name == "Z") {
        u.resize(2, 2);
        u << 1, 0, 0, -1;
    } else if (name == "H") {
        u.resize(2, 2);
        u << s, s, s, -s;
    } else if (name == "S") {
        u.resize(2, 2);
        u << 1, 0, 0, i;
    } else if (name == "SDG") {
        u.resize(2, 2);
        u << 1, 0, 0, -i;
    } else if (name == "T") {
        u.resize(2, 2);
        u << 1, 0, 0, std::polar(1.0, M_PI / 4);
    } else if (name == "TDG") {
        u.resize(2, 2);
        u << 1, 0, 0, std::polar(1.0, -M_PI / 4);
    } else if (name == "CNOT" || name == "CX") {
        u = Operator::Zero(4, 4);
        u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
    } else if (name == "CZ") {
        u = Operator::Identity(4, 4);
        u(3, 3) = -1.0;
    } else if (name == "SWAP") {
        u = Operator::Zero(4, 4);
        u(0, 0) = u(1, 2) = u(2, 1) = u(3, 3) = 1.0;
    } else {
        throw ParseError("unknown gate name '" + raw + "'");
    }
    return u;
}

Operator embed_gate(const Gate& gate, std::size_t n) {
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t k = gate.targets.size();
    Operator out = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t sub = 0;
        for (auto t : gate.targets) {
            sub = (sub << 1) | ((col >> (n - 1 - t)) & 1U);
        }
        for (std::size_t row_sub = 0; row_sub < (std::size_t{1} << k); ++row_sub) {
            cplx amp = gate.unitary(static_cast<Eigen::Index>(row_sub), static_cast<Eigen::Index>(sub));
            if (amp == cplx(0.0)) {
                continue;
            }
            std::size_t row = col;
            for (std::size_t p = 0; p < k; ++p) {
                std::size_t bit = (row_sub >> (k - 1 - p)) & 1U;
                std::size_t mask = std::size_t{1} << (n - 1 - gate.targets[p]);
                row = bit ? (row | mask) : (row & ~mask);
            }
            out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += amp;
        }
    }
    return out;
}

Operator circuit_prefix(const CircuitSpec& circuit, std::size_t l) {
    Operator u = identity(std::size_t{1} << circuit.n);
    for (std::size_t k = 0; k < l; ++k) {
        u = embed_gate(circuit.gates[k], circuit.n) * u;
    }
    return u;
}

CircuitSpec parse_circuit(std::istream& in) {
    CircuitSpec spec;
    bool have_n = false;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) {
            raw.erase(hash);
        }
        auto toks = tokenize(raw);
        if (toks.empty()) {
            continue;
        }
        const std::string head = upper(toks[0]);
        if (head == "QUBITS") {
            if (toks.size() != 2 || have_n) {
                parse_fail(line, "expected a single 'qubits <n>' header");
            }
            spec.n = parse_index(toks[1], line);
            if (spec.n == 0) {
                parse_fail(line, "register must have at least one qubit");
            }
            have_n = true;
            continue;
        }
        if (head != "G") {
            parse_fail(line, "unknown directive '" + toks[0] + "'");
        }
        if (!have_n) {
            parse_fail(line, "'qubits <n>' must precede the first gate");
        }
        if (toks.size() < 3) {
            parse_fail(line, "gate needs a name or matrix and at least one target");
        }
        Gate g;
        std::size_t pos = 1;
        if (toks[1] == "[") {
            std::vector<double> vals;
            pos = 2;
            while (pos < toks.size() && toks[pos] != "]") {
                vals.push_back(parse_real(toks[pos], line));
                ++pos;
            }
            if (pos == toks.size()) {
                parse_fail(line, "unterminated matrix literal");
            }
            ++pos;
            Eigen::Index d = 0;
            if (vals.size() == 8) {
                d = 2;
            } else if (vals.size() == 32) {
                d = 4;
            } else {
                parse_fail(line, "matrix literal needs 8 (2x2) or 32 (4x4) numbers");
            }
            g.name = "matrix";
            g.unitary.resize(d, d);
            for (Eigen::Index r = 0; r < d; ++r) {
                for (Eigen::Index c = 0; c < d; ++c) {
                    auto idx = static_cast<std::size_t>(2 * (r * d + c));
                    g.unitary(r, c) = cplx(vals[idx], vals[idx + 1]);
                }
            }
        } else {
            g.name = upper(toks[1]);
            try {
                g.unitary = named_gate(toks[1]);
            } catch (const ParseError& e) {
                parse_fail(line, e.what());
            }
            pos = 2;
        }
        for (; pos < toks.size(); ++pos) {
            g.targets.push_back(parse_index(toks[pos], line));
        }
        std::size_t want = g.unitary.rows() == 2 ? 1 : 2;
        if (g.targets.size() != want) {
            parse_fail(line, "gate expects " + std::to_string(want) + " target(s)");
        }
        for (auto t : g.targets) {
            if (t >= spec.n) {
                parse_fail(line, "target " + std::to_string(t) + " out of range");
            }
        }
        if (want == 2 && g.targets[0] == g.targets[1]) {
            parse_fail(line, "repeated target");
        }
        double defect = (g.unitary.adjoint() * g.unitary -
                         Operator::Identity(g.unitary.rows(), g.unitary.cols()))
                            .cwiseAbs()
                            .maxCoeff();
        if (defect > tol::kHermitian) {
            parse_fail(line, "matrix is not unitary");
        }
        spec.gates.push_back(std::move(g));
    }
    if (!have_n) {
        throw ParseError("circuit: missing 'qubits <n>' header");
    }
    if (spec.gates.empty()) {
        throw ParseError("circuit: no gates");
    }
    return spec;
}

CircuitSpec parse_circuit_string(const std::string& text) {
    std::istringstream in(text);
    return parse_circuit(in);
}

CircuitSpec load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open circuit file '" + path + "'");
    }
    return parse_circuit(in);
}

CircuitSpec identity_circuit(std::size_t n, std::size_t length) {
    CircuitSpec spec;
    spec.n = n;
    for (std::size_t l = 0; l < length; ++l) {
        spec.gates.push_back(Gate{"I", named_gate("I"), {0}});
    }
    return spec;
}

CircuitSpec random_circuit(std::size_t n, std::size_t length, std::uint64_t seed) {
    Rng rng(seed);
    CircuitSpec spec;
    spec.n = n;
    for (std::size_t l = 0; l < length; ++l) {
        Gate g;
        g.name = "haar";
        if (n == 1) {
            g.unitary = random_unitary(2, rng);
            g.targets = {0};
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            std::size_t a = pick(rng);
            std::size_t b = pick(rng);
            while (b == a) {
                b = pick(rng);
            }
            g.unitary = random_unitary(4, rng);
            g.targets = {a, b};
        }
        spec.gates.push_back(std::move(g));
    }
    return spec;
}

CircuitSpec pad_with_identities(const CircuitSpec& circuit, std::size_t count) {
    CircuitSpec out = circuit;
    for (std::size_t c = 0; c < count; ++c) {
        out.gates.push_back(Gate{"I", named_gate("I"), {0}});
    }
    return out;
}

}  // namespace qsc
