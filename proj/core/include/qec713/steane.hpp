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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qec713/circuit.hpp"
#include "qec713/noise.hpp"

namespace qec713 {

/// Stabilizer generator supports of the [7,1,3] code (1-based qubits).
/// Both the X-type and Z-type generators live on these supports; the
/// syndrome (s1,s2,s3) read as a binary number is the index of the faulty
/// qubit. Logical operators are X_L = X1 X2 X3 and Z_L = Z1 Z2 Z3.
inline constexpr std::array<std::array<int, 4>, 3> kStabilizerSupports = {{
    {4, 5, 6, 7},
    {2, 3, 6, 7},
    {1, 3, 5, 7},
}};

enum class LogicalGate { H, X, P };

/// Seven-qubit encoder. Data enters on qubit 1; qubits 2-7 start in |0>.
Circuit steane_encoder();

/// Exact inverse of the encoder, always run noiselessly.
Circuit steane_decoder();

/// Transversal logical gate: H on all seven qubits, X on qubits 1-3, or
/// Sdg on all seven qubits for the logical phase gate.
Circuit logical_gate_circuit(LogicalGate g);

/// Five-qubit Shor-state preparation: GHZ fan-out from qubit 1, two parity
/// checks (qubits 1,4 and 1,2) against a reusable verification qubit 5, then
/// Hadamards on qubits 1-4. Verification qubit is discarded.
Circuit shor_state_prep();

/// Shor-state preparation without the final Hadamards: the variant used for
/// phase-flip checks, where those Hadamards cancel against the ancilla-side
/// Hadamards of the reversed-CNOT construction.
Circuit shor_state_prep_phase();

/// Eleven-qubit syndrome-extraction template (data 1-7, ancilla 8-11) for
/// generator `gen` (0-2). Bit-flip checks couple data->ancilla and measure Z;
/// phase-flip checks couple ancilla->data and measure X. All four ancilla
/// outcomes are postselected to zero and the ancillas discarded.
enum class CheckKind { BitFlip, PhaseFlip };
Circuit syndrome_check_circuit(CheckKind kind, int gen);

/// Circuits used by the FT round; overridable from .sqc files.
struct RoundCircuits {
  Circuit shor_prep_bit;
  Circuit shor_prep_phase;
  std::array<Circuit, 3> bit_checks;
  std::array<Circuit, 3> phase_checks;

  static RoundCircuits defaults();
};

/// One extraction in a round schedule.
struct CheckStep {
  CheckKind kind;
  int gen;  // 0-2
};

/// Each check twice, bit-flip generators first.
std::vector<CheckStep> default_round_schedule();

/// Noiseless recovery: project onto the 64 joint syndrome sectors, apply the
/// Hamming correction for each, and sum the branches. Deterministic and
/// trace-preserving.
DensityMatrix perfect_qec(const DensityMatrix& rho7);

/// One fault-tolerant noisy QEC round: for every scheduled check, prepare a
/// fresh verified Shor ancilla, couple it to the data with noisy CNOTs,
/// measure all four ancilla qubits, and postselect the all-zero outcome.
/// No correction is applied (only the all-zero branch is analyzed).
///
/// The all-zero outcome of a Shor-coupled measurement has noiseless
/// probability 1/8, so each retained branch is rescaled by 8; the reported
/// postselect_prob is the acceptance relative to the noiseless baseline and
/// equals 1 at probs = 0. The renormalized state is unaffected.
SimOutcome ft_qec_round(const DensityMatrix& rho7, const PauliProbs& probs,
                        const RoundCircuits& circuits = RoundCircuits::defaults(),
                        const std::vector<CheckStep>& schedule = default_round_schedule());

enum class ExperimentId {
  Encode,
  GateH,
  GateX,
  GateP,
  PerfectQec,
  PerfectQecH,
  PerfectQecX,
  PerfectQecP,
  NoisyQec,
  NoisyQecTwice,
  NoisyQecAfterX,
};

std::string experiment_name(ExperimentId id);
std::optional<ExperimentId> parse_experiment(const std::string& name);

/// Circuits an experiment run depends on; defaults everywhere unless
/// overridden from files.
struct ExperimentCircuits {
  Circuit encoder;
  RoundCircuits round;

  static ExperimentCircuits defaults();
};

struct ExperimentResult {
  double f7 = 0.0;
  double f1 = 0.0;
  double postselect_prob = 1.0;
};

/// Dense-backend run of one experiment:
///  f7  = Tr[rho_ideal rho_noisy] against the ideally processed seven-qubit
///        state (for gate experiments: noisy encode + ideal gate on both
///        sides of the trace, per the fidelity definition used throughout);
///  f1  = overlap of the perfectly decoded, traced-out logical qubit with the
///        ideal logical state (gate experiments compare the two decoded
///        one-qubit states);
///  postselect_prob = 1 for experiments without postselection.
ExperimentResult run_experiment(ExperimentId id, const StatePrep& prep,
                                const PauliProbs& probs,
                                const ExperimentCircuits& circuits = ExperimentCircuits::defaults());

/// <P> for the Pauli string X^{xmask} Z^{zmask}; test and analysis helper.
double pauli_expectation(const DensityMatrix& rho, std::uint64_t xmask, std::uint64_t zmask);

}  // namespace qec713
