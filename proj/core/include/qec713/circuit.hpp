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

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qec713/noise.hpp"

namespace qec713 {

struct Instruction {
  enum class Kind { PrepZero, Gate1Q, Cnot, MeasurePostselect, Discard };

  Kind kind = Kind::Gate1Q;
  Gate1Q gate = Gate1Q::H;  // Kind::Gate1Q
  int q = 0;                // primary qubit (1-based)
  int q2 = 0;               // CNOT target
  Basis basis = Basis::Z;   // MeasurePostselect
  int outcome = 0;          // MeasurePostselect
  bool noisy = true;        // whether the error model attaches to this gate

  static Instruction prep(int q);
  static Instruction gate1q(Gate1Q g, int q, bool noisy = true);
  static Instruction cnot(int c, int t, bool noisy = true);
  static Instruction measure(int q, Basis b, int outcome);
  static Instruction discard(int q);

  bool operator==(const Instruction&) const = default;
};

/// Ordered instruction list over a fixed-width register. Discarded qubits may
/// not be touched again; a discard must directly follow a measurement of the
/// same qubit (possibly after other instructions not involving it).
struct Circuit {
  int width = 0;
  std::vector<Instruction> instructions;
  std::string label;

  /// Throws std::invalid_argument on range/arity/discard violations.
  void validate() const;

  /// Inverse circuit: reversed gate order, S <-> Sdg. Only defined for pure
  /// gate circuits (no prep/measure/discard). Result instructions are marked
  /// noiseless; this is how the ideal decoder is derived from the encoder.
  Circuit reversed_inverse() const;

  int count_gates() const;
};

struct CircuitParseError : std::runtime_error {
  CircuitParseError(int line, const std::string& what);
  int line;
};

/// Line format: header "qubits N", then one instruction per line:
///   H q | X q | Z q | S q | SDG q | CNOT c t | PREP q |
///   MEASZ q expect=0|1 | MEASX q expect=0|1 | DISCARD q
/// '#' starts a comment; blank lines are ignored.
Circuit parse_circuit(const std::string& text);

/// Canonical text form; parse(serialize(c)) == c.
std::string serialize_circuit(const Circuit& c);

/// Dense execution result. `state` is normalized; postselect_prob is the
/// product of all postselection branch probabilities.
struct SimOutcome {
  DensityMatrix state;
  double postselect_prob = 1.0;
  std::string label;
};

/// Runs a circuit on rho. Gates marked noisy get the Pauli channels when
/// `probs` is non-null; measurements postselect (accumulating trace_weight);
/// DISCARD traces the qubit out (the returned matrix keeps full width with the
/// discarded qubit reset to |0>, so indices stay stable).
/// Returns the unnormalized state; trace_weight carries the acceptance.
DensityMatrix execute_circuit(DensityMatrix rho, const Circuit& c, const PauliProbs* probs);

}  // namespace qec713
