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

#include "qec713/steane.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qec713 {

namespace {

constexpr int kDataQubits = 7;
constexpr int kAncillaQubits = 4;

std::uint64_t mask7(int q) { return std::uint64_t{1} << (kDataQubits - q); }

std::uint64_t support_mask(int gen) {
  std::uint64_t m = 0;
  for (int q : kStabilizerSupports[gen]) m |= mask7(q);
  return m;
}

DensityMatrix encoded_input(const StatePrep& prep) {
  PureState one = pure_state(prep);
  PureState seven;
  seven.n_qubits = kDataQubits;
  seven.amplitudes.assign(std::size_t{1} << kDataQubits, cplx(0));
  seven.amplitudes[0] = one.amplitudes[0];
  seven.amplitudes[std::size_t{1} << (kDataQubits - 1)] = one.amplitudes[1];
  return to_density(seven);
}

}  // namespace

Circuit steane_encoder() {
  Circuit c;
  c.width = kDataQubits;
  c.label = "encoder";
  auto& ins = c.instructions;
  for (int q : {5, 6, 7}) ins.push_back(Instruction::gate1q(Gate1Q::H, q));
  ins.push_back(Instruction::cnot(1, 2));
  ins.push_back(Instruction::cnot(1, 3));
  ins.push_back(Instruction::cnot(5, 2));
  ins.push_back(Instruction::cnot(5, 3));
  ins.push_back(Instruction::cnot(5, 4));
  ins.push_back(Instruction::cnot(6, 1));
  ins.push_back(Instruction::cnot(6, 3));
  ins.push_back(Instruction::cnot(6, 4));
  ins.push_back(Instruction::cnot(7, 1));
  ins.push_back(Instruction::cnot(7, 2));
  ins.push_back(Instruction::cnot(7, 4));
  return c;
}

Circuit steane_decoder() {
  Circuit c = steane_encoder().reversed_inverse();
  c.label = "decoder";
  return c;
}

Circuit logical_gate_circuit(LogicalGate g) {
  Circuit c;
  c.width = kDataQubits;
  switch (g) {
    case LogicalGate::H:
      c.label = "logical-h";
      for (int q = 1; q <= 7; ++q) c.instructions.push_back(Instruction::gate1q(Gate1Q::H, q));
      break;
    case LogicalGate::X:
      c.label = "logical-x";
      for (int q = 1; q <= 3; ++q) c.instructions.push_back(Instruction::gate1q(Gate1Q::X, q));
      break;
    case LogicalGate::P:
      c.label = "logical-p";
      for (int q = 1; q <= 7; ++q) c.instructions.push_back(Instruction::gate1q(Gate1Q::Sdg, q));
      break;
  }
  return c;
}

namespace {

Circuit shor_prep_common(bool with_hadamards) {
  Circuit c;
  c.width = 5;
  c.label = with_hadamards ? "shor-prep" : "shor-prep-phase";
  auto& ins = c.instructions;
  ins.push_back(Instruction::gate1q(Gate1Q::H, 1));
  ins.push_back(Instruction::cnot(1, 2));
  ins.push_back(Instruction::cnot(1, 3));
  ins.push_back(Instruction::cnot(1, 4));
  // Parity of qubits 1 and 4 onto the verification qubit.
  ins.push_back(Instruction::cnot(1, 5));
  ins.push_back(Instruction::cnot(4, 5));
  ins.push_back(Instruction::measure(5, Basis::Z, 0));
  ins.push_back(Instruction::prep(5));
  // Parity of qubits 1 and 2.
  ins.push_back(Instruction::cnot(1, 5));
  ins.push_back(Instruction::cnot(2, 5));
  ins.push_back(Instruction::measure(5, Basis::Z, 0));
  if (with_hadamards) {
    for (int q = 1; q <= 4; ++q) ins.push_back(Instruction::gate1q(Gate1Q::H, q));
  }
  ins.push_back(Instruction::discard(5));
  return c;
}

}  // namespace

Circuit shor_state_prep() { return shor_prep_common(true); }

Circuit shor_state_prep_phase() { return shor_prep_common(false); }

Circuit syndrome_check_circuit(CheckKind kind, int gen) {
  if (gen < 0 || gen > 2) throw std::invalid_argument("syndrome_check_circuit: gen must be 0..2");
  Circuit c;
  c.width = kDataQubits + kAncillaQubits;
  c.label = (kind == CheckKind::BitFlip ? "syndrome-bit-" : "syndrome-phase-") +
            std::to_string(gen + 1);
  const auto& support = kStabilizerSupports[gen];
  for (int i = 0; i < 4; ++i) {
    if (kind == CheckKind::BitFlip) {
      c.instructions.push_back(Instruction::cnot(support[i], 8 + i));
    } else {
      c.instructions.push_back(Instruction::cnot(8 + i, support[i]));
    }
  }
  const Basis basis = kind == CheckKind::BitFlip ? Basis::Z : Basis::X;
  for (int i = 0; i < 4; ++i) {
    c.instructions.push_back(Instruction::measure(8 + i, basis, 0));
  }
  for (int i = 0; i < 4; ++i) {
    c.instructions.push_back(Instruction::discard(8 + i));
  }
  return c;
}

RoundCircuits RoundCircuits::defaults() {
  RoundCircuits rc;
  rc.shor_prep_bit = shor_state_prep();
  rc.shor_prep_phase = shor_state_prep_phase();
  for (int g = 0; g < 3; ++g) {
    rc.bit_checks[g] = syndrome_check_circuit(CheckKind::BitFlip, g);
    rc.phase_checks[g] = syndrome_check_circuit(CheckKind::PhaseFlip, g);
  }
  return rc;
}

std::vector<CheckStep> default_round_schedule() {
  std::vector<CheckStep> s;
  for (int g = 0; g < 3; ++g) {
    s.push_back({CheckKind::BitFlip, g});
    s.push_back({CheckKind::BitFlip, g});
  }
  for (int g = 0; g < 3; ++g) {
    s.push_back({CheckKind::PhaseFlip, g});
    s.push_back({CheckKind::PhaseFlip, g});
  }
  return s;
}

DensityMatrix perfect_qec(const DensityMatrix& rho7) {
  if (rho7.n_qubits() != kDataQubits)
    throw std::invalid_argument("perfect_qec: expects a seven-qubit state");
  const std::size_t dim = rho7.dim();
  std::vector<cplx> acc(dim * dim, cplx(0));
  for (int s = 0; s < 8; ++s) {
    for (int t = 0; t < 8; ++t) {
      DensityMatrix sector = rho7;
      for (int g = 0; g < 3; ++g) {
        int s_bit = (s >> (2 - g)) & 1;
        sector.project_pauli_string(0, support_mask(g), s_bit ? -1 : +1);
      }
      // Projected states are positive, so a vanished trace means the sector
      // is empty and the remaining projections cannot resurrect it.
      if (sector.trace_real() < 1e-300) continue;
      for (int g = 0; g < 3; ++g) {
        int t_bit = (t >> (2 - g)) & 1;
        sector.project_pauli_string(support_mask(g), 0, t_bit ? -1 : +1);
      }
      std::uint64_t xm = s ? mask7(s) : 0;
      std::uint64_t zm = t ? mask7(t) : 0;
      if (xm || zm) sector.conjugate_pauli(xm, zm);
      const auto& entries = sector.entries();
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += entries[k];
    }
  }
  return DensityMatrix(kDataQubits, std::move(acc), rho7.trace_weight());
}

SimOutcome ft_qec_round(const DensityMatrix& rho7, const PauliProbs& probs,
                        const RoundCircuits& circuits, const std::vector<CheckStep>& schedule) {
  if (rho7.n_qubits() != kDataQubits)
    throw std::invalid_argument("ft_qec_round: expects a seven-qubit state");
  probs.validate();
  DensityMatrix data = rho7;
  for (const CheckStep& step : schedule) {
    const Circuit& prep =
        step.kind == CheckKind::BitFlip ? circuits.shor_prep_bit : circuits.shor_prep_phase;
    DensityMatrix anc = execute_circuit(DensityMatrix::zero_state(prep.width), prep, &probs);
    anc = anc.partial_trace({1, 2, 3, 4});
    DensityMatrix joint = kron(data, anc);
    const Circuit& check = step.kind == CheckKind::BitFlip ? circuits.bit_checks[step.gen]
                                                           : circuits.phase_checks[step.gen];
    joint = execute_circuit(std::move(joint), check, &probs);
    data = joint.partial_trace({1, 2, 3, 4, 5, 6, 7});
    // All-zero outcome of a Shor-coupled measurement has noiseless
    // probability 1/8; report acceptance relative to that baseline.
    data.scale(8.0);
    if (data.trace_weight() < 1e-300)
      throw std::runtime_error("ft_qec_round: postselection weight vanished");
  }
  SimOutcome out;
  out.postselect_prob = data.trace_weight();
  data.normalize();
  out.state = std::move(data);
  out.label = "ft-qec-round";
  return out;
}

std::string experiment_name(ExperimentId id) {
  switch (id) {
    case ExperimentId::Encode: return "encode";
    case ExperimentId::GateH: return "gate-h";
    case ExperimentId::GateX: return "gate-x";
    case ExperimentId::GateP: return "gate-p";
    case ExperimentId::PerfectQec: return "perfect-qec";
    case ExperimentId::PerfectQecH: return "perfect-qec-h";
    case ExperimentId::PerfectQecX: return "perfect-qec-x";
    case ExperimentId::PerfectQecP: return "perfect-qec-p";
    case ExperimentId::NoisyQec: return "noisy-qec";
    case ExperimentId::NoisyQecTwice: return "noisy-qec-2";
    case ExperimentId::NoisyQecAfterX: return "noisy-qec-x";
  }
  return "?";
}

std::optional<ExperimentId> parse_experiment(const std::string& name) {
  for (ExperimentId id :
       {ExperimentId::Encode, ExperimentId::GateH, ExperimentId::GateX, ExperimentId::GateP,
        ExperimentId::PerfectQec, ExperimentId::PerfectQecH, ExperimentId::PerfectQecX,
        ExperimentId::PerfectQecP, ExperimentId::NoisyQec, ExperimentId::NoisyQecTwice,
        ExperimentId::NoisyQecAfterX}) {
    if (experiment_name(id) == name) return id;
  }
  return std::nullopt;
}

ExperimentCircuits ExperimentCircuits::defaults() {
  ExperimentCircuits ec;
  ec.encoder = steane_encoder();
  ec.round = RoundCircuits::defaults();
  return ec;
}

namespace {

std::optional<LogicalGate> experiment_gate(ExperimentId id) {
  switch (id) {
    case ExperimentId::GateH:
    case ExperimentId::PerfectQecH:
      return LogicalGate::H;
    case ExperimentId::GateX:
    case ExperimentId::PerfectQecX:
    case ExperimentId::NoisyQecAfterX:
      return LogicalGate::X;
    case ExperimentId::GateP:
    case ExperimentId::PerfectQecP:
      return LogicalGate::P;
    default:
      return std::nullopt;
  }
}

Mat2 logical_gate_matrix(LogicalGate g) {
  switch (g) {
    case LogicalGate::H: return gate_matrix(Gate1Q::H);
    case LogicalGate::X: return gate_matrix(Gate1Q::X);
    case LogicalGate::P: return gate_matrix(Gate1Q::S);
  }
  return identity2();
}

double decoded_overlap(const DensityMatrix& rho7, const Circuit& decoder, const PureState& ref1) {
  DensityMatrix dec = execute_circuit(rho7, decoder, nullptr);
  DensityMatrix one = dec.partial_trace({1});
  return fidelity(one, to_density(ref1));
}

}  // namespace

ExperimentResult run_experiment(ExperimentId id, const StatePrep& prep, const PauliProbs& probs,
                                const ExperimentCircuits& circuits) {
  probs.validate();
  const Circuit decoder = circuits.encoder.reversed_inverse();
  const DensityMatrix input = encoded_input(prep);
  const DensityMatrix ideal_enc = execute_circuit(input, circuits.encoder, nullptr);
  const DensityMatrix noisy_enc = execute_circuit(input, circuits.encoder, &probs);
  const PureState psi = pure_state(prep);

  ExperimentResult r;
  const auto gate = experiment_gate(id);
  switch (id) {
    case ExperimentId::Encode: {
      r.f7 = fidelity(noisy_enc, ideal_enc);
      r.f1 = decoded_overlap(noisy_enc, decoder, psi);
      break;
    }
    case ExperimentId::GateH:
    case ExperimentId::GateX:
    case ExperimentId::GateP: {
      const Circuit gc = logical_gate_circuit(*gate);
      DensityMatrix ideal_side = execute_circuit(noisy_enc, gc, nullptr);
      DensityMatrix noisy_side = execute_circuit(noisy_enc, gc, &probs);
      r.f7 = fidelity(ideal_side, noisy_side);
      DensityMatrix a = execute_circuit(ideal_side, decoder, nullptr).partial_trace({1});
      DensityMatrix b = execute_circuit(noisy_side, decoder, nullptr).partial_trace({1});
      r.f1 = fidelity(a, b);
      break;
    }
    case ExperimentId::PerfectQec: {
      DensityMatrix corrected = perfect_qec(noisy_enc);
      r.f7 = fidelity(corrected, ideal_enc);
      r.f1 = decoded_overlap(corrected, decoder, psi);
      break;
    }
    case ExperimentId::PerfectQecH:
    case ExperimentId::PerfectQecX:
    case ExperimentId::PerfectQecP: {
      const Circuit gc = logical_gate_circuit(*gate);
      DensityMatrix noisy_gate = execute_circuit(noisy_enc, gc, &probs);
      DensityMatrix corrected = perfect_qec(noisy_gate);
      DensityMatrix ideal_ref = execute_circuit(ideal_enc, gc, nullptr);
      r.f7 = fidelity(corrected, ideal_ref);
      r.f1 = decoded_overlap(corrected, decoder, apply_mat2(logical_gate_matrix(*gate), psi));
      break;
    }
    case ExperimentId::NoisyQec: {
      SimOutcome out = ft_qec_round(noisy_enc, probs, circuits.round);
      r.f7 = fidelity(out.state, ideal_enc);
      r.f1 = decoded_overlap(out.state, decoder, psi);
      r.postselect_prob = out.postselect_prob;
      break;
    }
    case ExperimentId::NoisyQecTwice: {
      SimOutcome first = ft_qec_round(noisy_enc, probs, circuits.round);
      SimOutcome second = ft_qec_round(first.state, probs, circuits.round);
      r.f7 = fidelity(second.state, ideal_enc);
      r.f1 = decoded_overlap(second.state, decoder, psi);
      r.postselect_prob = first.postselect_prob * second.postselect_prob;
      break;
    }
    case ExperimentId::NoisyQecAfterX: {
      const Circuit gc = logical_gate_circuit(LogicalGate::X);
      DensityMatrix noisy_gate = execute_circuit(noisy_enc, gc, &probs);
      SimOutcome out = ft_qec_round(noisy_gate, probs, circuits.round);
      DensityMatrix ideal_ref = execute_circuit(ideal_enc, gc, nullptr);
      r.f7 = fidelity(out.state, ideal_ref);
      r.f1 = decoded_overlap(out.state, decoder, apply_mat2(pauli_x(), psi));
      r.postselect_prob = out.postselect_prob;
      break;
    }
  }
  return r;
}

double pauli_expectation(const DensityMatrix& rho, std::uint64_t xmask, std::uint64_t zmask) {
  const std::size_t dim = rho.dim();
  cplx s(0);
  for (std::size_t i = 0; i < dim; ++i) {
    int sign = std::popcount(zmask & (i ^ xmask)) & 1;
    cplx v = rho.at(i ^ xmask, i);
    s += sign ? -v : v;
  }
  return s.real();
}

}  // namespace qec713
