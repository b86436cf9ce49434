// Copyright 2026 The QEC713 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qec713/circuit.hpp"

#include <algorithm>
#include <sstream>

namespace qec713 {

Instruction Instruction::prep(int q) {
  Instruction i;
  i.kind = Kind::PrepZero;
  i.q = q;
  i.noisy = false;
  return i;
}

Instruction Instruction::gate1q(Gate1Q g, int q, bool noisy) {
  Instruction i;
  i.kind = Kind::Gate1Q;
  i.gate = g;
  i.q = q;
  i.noisy = noisy;
  return i;
}

Instruction Instruction::cnot(int c, int t, bool noisy) {
  Instruction i;
  i.kind = Kind::Cnot;
  i.q = c;
  i.q2 = t;
  i.noisy = noisy;
  return i;
}

Instruction Instruction::measure(int q, Basis b, int outcome) {
  Instruction i;
  i.kind = Kind::MeasurePostselect;
  i.q = q;
  i.basis = b;
  i.outcome = outcome;
  i.noisy = false;
  return i;
}

Instruction Instruction::discard(int q) {
  Instruction i;
  i.kind = Kind::Discard;
  i.q = q;
  i.noisy = false;
  return i;
}

void Circuit::validate() const {
  if (width < 1) throw std::invalid_argument("circuit: width must be positive");
  std::vector<bool> discarded(width + 1, false);
  std::vector<bool> measured(width + 1, false);
  auto check_q = [&](int q) {
    if (q < 1 || q > width) throw std::invalid_argument("circuit: qubit out of range");
    if (discarded[q]) throw std::invalid_argument("circuit: instruction touches a discarded qubit");
  };
  for (const Instruction& ins : instructions) {
    switch (ins.kind) {
      case Instruction::Kind::Gate1Q:
        check_q(ins.q);
        measured[ins.q] = false;
        break;
      case Instruction::Kind::Cnot:
        check_q(ins.q);
        check_q(ins.q2);
        if (ins.q == ins.q2) throw std::invalid_argument("circuit: CNOT control equals target");
        measured[ins.q] = measured[ins.q2] = false;
        break;
      case Instruction::Kind::PrepZero:
        check_q(ins.q);
        measured[ins.q] = false;
        break;
      case Instruction::Kind::MeasurePostselect:
        check_q(ins.q);
        if (ins.outcome != 0 && ins.outcome != 1)
          throw std::invalid_argument("circuit: outcome must be 0 or 1");
        measured[ins.q] = true;
        break;
      case Instruction::Kind::Discard:
        check_q(ins.q);
        if (!measured[ins.q])
          throw std::invalid_argument("circuit: DISCARD without preceding measurement");
        discarded[ins.q] = true;
        break;
    }
  }
}

Circuit Circuit::reversed_inverse() const {
  Circuit out;
  out.width = width;
  out.label = label.empty() ? "" : label + "-inverse";
  out.instructions.reserve(instructions.size());
  for (auto it = instructions.rbegin(); it != instructions.rend(); ++it) {
    Instruction ins = *it;
    switch (ins.kind) {
      case Instruction::Kind::Gate1Q:
        if (ins.gate == Gate1Q::S) ins.gate = Gate1Q::Sdg;
        else if (ins.gate == Gate1Q::Sdg) ins.gate = Gate1Q::S;
        break;
      case Instruction::Kind::Cnot:
        break;
      default:
        throw std::invalid_argument("reversed_inverse: circuit has non-gate instructions");
    }
    ins.noisy = false;
    out.instructions.push_back(ins);
  }
  return out;
}

int Circuit::count_gates() const {
  int n = 0;
  for (const Instruction& ins : instructions) {
    if (ins.kind == Instruction::Kind::Gate1Q || ins.kind == Instruction::Kind::Cnot) ++n;
  }
  return n;
}

CircuitParseError::CircuitParseError(int line_no, const std::string& what)
    : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') break;
    out.push_back(tok);
  }
  return out;
}

int parse_qubit(const std::string& tok, int width, int line_no) {
  std::size_t pos = 0;
  int q = 0;
  try {
    q = std::stoi(tok, &pos);
  } catch (const std::exception&) {
    throw CircuitParseError(line_no, "expected qubit index, got '" + tok + "'");
  }
  if (pos != tok.size()) throw CircuitParseError(line_no, "expected qubit index, got '" + tok + "'");
  if (q < 1 || q > width)
    throw CircuitParseError(line_no, "qubit " + tok + " out of range 1.." + std::to_string(width));
  return q;
}

int parse_expect(const std::string& tok, int line_no) {
  if (tok == "expect=0") return 0;
  if (tok == "expect=1") return 1;
  throw CircuitParseError(line_no, "expected expect=0|1, got '" + tok + "'");
}

}  // namespace

Circuit parse_circuit(const std::string& text) {
  Circuit c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> tok = tokenize(line);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok[0] != "qubits" || tok.size() != 2)
        throw CircuitParseError(line_no, "expected header 'qubits N'");
      try {
        c.width = std::stoi(tok[1]);
      } catch (const std::exception&) {
        throw CircuitParseError(line_no, "bad qubit count '" + tok[1] + "'");
      }
      if (c.width < 1 || c.width > 24)
        throw CircuitParseError(line_no, "qubit count out of range");
      have_header = true;
      continue;
    }
    const std::string& op = tok[0];
    auto arity = [&](std::size_t n) {
      if (tok.size() != n + 1)
        throw CircuitParseError(line_no, op + " takes " + std::to_string(n) + " argument(s)");
    };
    if (op == "H" || op == "X" || op == "Z" || op == "S" || op == "SDG") {
      arity(1);
      Gate1Q g = op == "H"   ? Gate1Q::H
                 : op == "X" ? Gate1Q::X
                 : op == "Z" ? Gate1Q::Z
                 : op == "S" ? Gate1Q::S
                             : Gate1Q::Sdg;
      c.instructions.push_back(Instruction::gate1q(g, parse_qubit(tok[1], c.width, line_no)));
    } else if (op == "CNOT") {
      arity(2);
      int ctrl = parse_qubit(tok[1], c.width, line_no);
      int tgt = parse_qubit(tok[2], c.width, line_no);
      if (ctrl == tgt) throw CircuitParseError(line_no, "CNOT control equals target");
      c.instructions.push_back(Instruction::cnot(ctrl, tgt));
    } else if (op == "PREP") {
      arity(1);
      c.instructions.push_back(Instruction::prep(parse_qubit(tok[1], c.width, line_no)));
    } else if (op == "MEASZ" || op == "MEASX") {
      arity(2);
      int q = parse_qubit(tok[1], c.width, line_no);
      int expect = parse_expect(tok[2], line_no);
      c.instructions.push_back(
          Instruction::measure(q, op == "MEASZ" ? Basis::Z : Basis::X, expect));
    } else if (op == "DISCARD") {
      arity(1);
      c.instructions.push_back(Instruction::discard(parse_qubit(tok[1], c.width, line_no)));
    } else {
      throw CircuitParseError(line_no, "unknown mnemonic '" + op + "'");
    }
  }
  if (!have_header) throw CircuitParseError(line_no, "missing 'qubits N' header");
  c.validate();
  return c;
}

std::string serialize_circuit(const Circuit& c) {
  std::ostringstream out;
  out << "qubits " << c.width << "\n";
  for (const Instruction& ins : c.instructions) {
    switch (ins.kind) {
      case Instruction::Kind::Gate1Q:
        out << gate_name(ins.gate) << " " << ins.q << "\n";
        break;
      case Instruction::Kind::Cnot:
        out << "CNOT " << ins.q << " " << ins.q2 << "\n";
        break;
      case Instruction::Kind::PrepZero:
        out << "PREP " << ins.q << "\n";
        break;
      case Instruction::Kind::MeasurePostselect:
        out << (ins.basis == Basis::Z ? "MEASZ " : "MEASX ") << ins.q
            << " expect=" << ins.outcome << "\n";
        break;
      case Instruction::Kind::Discard:
        out << "DISCARD " << ins.q << "\n";
        break;
    }
  }
  return out.str();
}

namespace {

/// Reset channel: trace the qubit out and re-prepare |0> in place.
void reset_qubit(DensityMatrix& rho, int q) {
  const std::uint64_t mask = rho.qubit_mask(q);
  const std::size_t dim = rho.dim();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      if (j & mask) continue;
      rho.at(i, j) += rho.at(i | mask, j | mask);
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      if ((i & mask) || (j & mask)) rho.at(i, j) = cplx(0);
    }
  }
}

}  // namespace

DensityMatrix execute_circuit(DensityMatrix rho, const Circuit& c, const PauliProbs* probs) {
  c.validate();
  if (rho.n_qubits() != c.width)
    throw std::invalid_argument("execute_circuit: register width mismatch");
  const bool noisy_run = probs != nullptr && !probs->is_zero();
  for (const Instruction& ins : c.instructions) {
    switch (ins.kind) {
      case Instruction::Kind::Gate1Q:
        rho.apply_1q(gate_matrix(ins.gate), ins.q);
        if (noisy_run && ins.noisy) apply_pauli_channel(rho, ins.q, *probs);
        break;
      case Instruction::Kind::Cnot:
        rho.apply_cnot(ins.q, ins.q2);
        if (noisy_run && ins.noisy) {
          apply_pauli_channel(rho, ins.q, *probs);
          apply_pauli_channel(rho, ins.q2, *probs);
        }
        break;
      case Instruction::Kind::PrepZero:
        reset_qubit(rho, ins.q);
        break;
      case Instruction::Kind::MeasurePostselect: {
        auto [projected, p] = rho.postselect(ins.q, ins.outcome, ins.basis);
        rho = std::move(projected);
        break;
      }
      case Instruction::Kind::Discard:
        reset_qubit(rho, ins.q);
        break;
    }
  }
  return rho;
}

}  // namespace qec713
