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

#include "qec713/noise.hpp"

#include <stdexcept>

#include "qec713/parallel.hpp"

namespace qec713 {

void PauliProbs::validate() const {
  auto ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!ok(px) || !ok(py) || !ok(pz) || !ok(p0()))
    throw std::invalid_argument("PauliProbs: probabilities must lie in [0,1] with p0 >= 0");
}

void apply_pauli_channel(DensityMatrix& rho, int q, const PauliProbs& probs) {
  probs.validate();
  if (probs.is_zero()) return;
  const std::uint64_t mask = rho.qubit_mask(q);
  const std::size_t dim = rho.dim();
  // On each 2x2 sub-block (A=00, B=01, C=10, D=11) of the target qubit:
  //   A' = (p0+pz) A + (px+py) D      B' = (p0-pz) B + (px-py) C
  // and symmetrically for D', C'.
  const double keep_d = probs.p0() + probs.pz;
  const double flip_d = probs.px + probs.py;
  const double keep_o = probs.p0() - probs.pz;
  const double flip_o = probs.px - probs.py;
  parallel_for(dim >> 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      std::size_t i0 = ((k & ~(mask - 1)) << 1) | (k & (mask - 1));
      std::size_t i1 = i0 | mask;
      for (std::size_t j0 = 0; j0 < dim; ++j0) {
        if (j0 & mask) continue;
        std::size_t j1 = j0 | mask;
        cplx a = rho.at(i0, j0), bb = rho.at(i0, j1);
        cplx c = rho.at(i1, j0), d = rho.at(i1, j1);
        rho.at(i0, j0) = keep_d * a + flip_d * d;
        rho.at(i1, j1) = flip_d * a + keep_d * d;
        rho.at(i0, j1) = keep_o * bb + flip_o * c;
        rho.at(i1, j0) = flip_o * bb + keep_o * c;
      }
    }
  });
}

DensityMatrix apply_noisy_1q(const DensityMatrix& rho, const Mat2& u, int q,
                             const PauliProbs& probs) {
  probs.validate();
  DensityMatrix out = rho;
  out.apply_1q(u, q);
  apply_pauli_channel(out, q, probs);
  return out;
}

DensityMatrix apply_noisy_cnot(const DensityMatrix& rho, int c, int t,
                               const PauliProbs& probs) {
  probs.validate();
  DensityMatrix out = rho;
  out.apply_cnot(c, t);
  apply_pauli_channel(out, c, probs);
  apply_pauli_channel(out, t, probs);
  return out;
}

}  // namespace qec713
