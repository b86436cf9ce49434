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

#include "qec713/densmat.hpp"

namespace qec713 {

/// Non-equiprobable Pauli error probabilities. p0 = 1 - px - py - pz.
struct PauliProbs {
  double px = 0.0;
  double py = 0.0;
  double pz = 0.0;

  double p0() const { return 1.0 - px - py - pz; }
  bool is_zero() const { return px == 0.0 && py == 0.0 && pz == 0.0; }
  void validate() const;
};

/// rho <- sum_a p_a sigma_a rho sigma_a on qubit q (the error channel alone,
/// no gate).
void apply_pauli_channel(DensityMatrix& rho, int q, const PauliProbs& probs);

/// Noisy one-qubit gate: U first, then the Pauli channel on q.
DensityMatrix apply_noisy_1q(const DensityMatrix& rho, const Mat2& u, int q,
                             const PauliProbs& probs);

/// Noisy CNOT: the gate, then independent Pauli channels on control and
/// target (the 16-branch two-qubit mixture factorizes).
DensityMatrix apply_noisy_cnot(const DensityMatrix& rho, int c, int t,
                               const PauliProbs& probs);

}  // namespace qec713
