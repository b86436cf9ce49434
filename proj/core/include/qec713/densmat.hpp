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

#include <cstdint>
#include <utility>
#include <vector>

#include "qec713/gates.hpp"

namespace qec713 {

/// Initial one-qubit state cos(alpha)|0> + e^{i beta} sin(alpha)|1>.
struct StatePrep {
  double alpha = 0.0;
  double beta = 0.0;
};

enum class Basis { Z, X };

/// Pure n-qubit state. Qubit 1 is the most significant bit of the
/// amplitude index; this convention is used across the whole library.
struct PureState {
  int n_qubits = 0;
  std::vector<cplx> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
  double norm() const;
};

PureState pure_state(const StatePrep& prep);

/// One-qubit state after a logical gate, e.g. the reference for decoded
/// fidelities. g applied to pure_state(prep).
PureState apply_mat2(const Mat2& u, const PureState& one_qubit);

/// Dense density matrix with an explicit unnormalized trace. Postselection
/// multiplies trace_weight by the branch probability; renormalization is the
/// caller's single final step, so sequential branch probabilities compose
/// without repeated division.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(int n_qubits, std::vector<cplx> entries, double trace_weight);

  /// |0...0><0...0| on n qubits.
  static DensityMatrix zero_state(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return dim_; }
  double trace_weight() const { return trace_weight_; }

  cplx& at(std::size_t i, std::size_t j) { return m_[i * dim_ + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }
  const std::vector<cplx>& entries() const { return m_; }

  /// Index mask of 1-based qubit q (qubit 1 = most significant bit).
  std::uint64_t qubit_mask(int q) const;

  /// rho <- (U_q) rho (U_q)^dag. U must be unitary within 1e-12.
  void apply_1q(const Mat2& u, int q);

  /// rho <- CNOT rho CNOT^dag with control c, target t.
  void apply_cnot(int c, int t);

  /// Conjugation by the Pauli string X^{xmask} Z^{zmask} (masks in index space).
  void conjugate_pauli(std::uint64_t xmask, std::uint64_t zmask);

  /// rho <- (1/4)(rho + s G rho + s rho G + G rho G) for a generator G that is
  /// a pure X-string or pure Z-string; s = +-1. One commuting projector factor
  /// of a stabilizer-sector projection.
  void project_pauli_string(std::uint64_t xmask, std::uint64_t zmask, int sign);

  /// Reduced state on `keep` (ordered, 1-based, output qubit k is keep[k]).
  /// trace_weight carries over.
  DensityMatrix partial_trace(const std::vector<int>& keep) const;

  /// Projects qubit q onto `outcome` in `basis`. Returns the unnormalized
  /// projected state (trace_weight scaled by the branch probability) and the
  /// branch probability.
  std::pair<DensityMatrix, double> postselect(int q, int outcome, Basis basis) const;

  double trace_real() const;
  void scale(double s);
  void normalize();

  double max_hermiticity_defect() const;

 private:
  void check_qubit(int q) const;

  int n_qubits_ = 0;
  std::size_t dim_ = 0;
  std::vector<cplx> m_;
  double trace_weight_ = 0.0;
};

DensityMatrix to_density(const PureState& psi);

/// Tr[rho sigma] for normalized states of equal dimension; real within 1e-10,
/// clamped to [0, 1 + 1e-9].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

DensityMatrix kron(const DensityMatrix& high, const DensityMatrix& low);

}  // namespace qec713
