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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "qec713/noise.hpp"
#include "test_util.hpp"

using namespace qec713;
using namespace testutil;

namespace {

/// Four-branch sum of Eq.-style one-qubit noise, built from explicit
/// Kronecker operators.
CMat noisy_1q_oracle(const DensityMatrix& rho, const Mat2& u, int q, const PauliProbs& p) {
  const int n = rho.n_qubits();
  CMat gated = conjugate(embed_1q(u, q, n), to_cmat(rho));
  const double w[4] = {p.p0(), p.px, p.py, p.pz};
  const char letters[4] = {'I', 'X', 'Y', 'Z'};
  CMat acc(gated.size(), std::vector<cplx>(gated.size()));
  for (int a = 0; a < 4; ++a) {
    std::string s(n, 'I');
    s[q - 1] = letters[a];
    CMat term = conjugate(pauli_string(s), gated);
    for (std::size_t i = 0; i < acc.size(); ++i)
      for (std::size_t j = 0; j < acc.size(); ++j) acc[i][j] += w[a] * term[i][j];
  }
  return acc;
}

/// Sixteen-branch two-qubit sum for the CNOT channel.
CMat noisy_cnot_oracle(const DensityMatrix& rho, int c, int t, const PauliProbs& p) {
  const int n = rho.n_qubits();
  CMat op(rho.dim(), std::vector<cplx>(rho.dim()));
  for (std::size_t b = 0; b < rho.dim(); ++b) {
    std::size_t cm = std::size_t{1} << (n - c), tm = std::size_t{1} << (n - t);
    op[(b & cm) ? (b ^ tm) : b][b] = 1.0;
  }
  CMat gated = conjugate(op, to_cmat(rho));
  const double w[4] = {p.p0(), p.px, p.py, p.pz};
  const char letters[4] = {'I', 'X', 'Y', 'Z'};
  CMat acc(gated.size(), std::vector<cplx>(gated.size()));
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      std::string s(n, 'I');
      s[c - 1] = letters[a];
      s[t - 1] = letters[b];
      CMat term = conjugate(pauli_string(s), gated);
      for (std::size_t i = 0; i < acc.size(); ++i)
        for (std::size_t j = 0; j < acc.size(); ++j) acc[i][j] += w[a] * w[b] * term[i][j];
    }
  }
  return acc;
}

DensityMatrix one_qubit_zero() {
  PureState psi{1, {cplx(1), cplx(0)}};
  return to_density(psi);
}

}  // namespace

TEST_CASE("PauliProbs validation") {
  CHECK_NOTHROW(PauliProbs{0.1, 0.2, 0.3}.validate());
  CHECK_THROWS_AS((PauliProbs{-0.1, 0, 0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PauliProbs{0.5, 0.4, 0.2}.validate()), std::invalid_argument);
  CHECK(PauliProbs{0.1, 0.2, 0.3}.p0() == Catch::Approx(0.4));
}

TEST_CASE("noisy identity gate with a single bit-flip probability") {
  PauliProbs p{0.25, 0, 0};
  DensityMatrix out = apply_noisy_1q(one_qubit_zero(), identity2(), 1, p);
  CHECK(std::abs(out.at(0, 0) - 0.75) < 1e-14);
  CHECK(std::abs(out.at(1, 1) - 0.25) < 1e-14);
  CHECK(std::abs(out.at(0, 1)) < 1e-14);
}

TEST_CASE("zero probabilities reduce to the bare gate") {
  std::mt19937 rng(5);
  DensityMatrix rho = random_density(2, rng);
  DensityMatrix bare = rho;
  bare.apply_1q(gate_matrix(Gate1Q::H), 2);
  DensityMatrix out = apply_noisy_1q(rho, gate_matrix(Gate1Q::H), 2, {0, 0, 0});
  CHECK(max_abs_diff(out, bare) < 1e-13);

  DensityMatrix cn = apply_noisy_cnot(rho, 1, 2, {0, 0, 0});
  DensityMatrix bare2 = rho;
  bare2.apply_cnot(1, 2);
  CHECK(max_abs_diff(cn, bare2) < 1e-13);
}

TEST_CASE("one-qubit channel equals the explicit four-branch sum") {
  PauliProbs p{0.01, 0.02, 0.03};
  std::mt19937 rng(21);
  DensityMatrix h0 = apply_noisy_1q(one_qubit_zero(), gate_matrix(Gate1Q::H), 1, p);
  CHECK(max_abs_diff(to_cmat(h0), noisy_1q_oracle(one_qubit_zero(), gate_matrix(Gate1Q::H), 1, p)) <
        1e-13);
  for (int n : {2, 3}) {
    for (int q = 1; q <= n; ++q) {
      DensityMatrix rho = random_density(n, rng);
      DensityMatrix got = apply_noisy_1q(rho, gate_matrix(Gate1Q::Sdg), q, p);
      CHECK(max_abs_diff(to_cmat(got), noisy_1q_oracle(rho, gate_matrix(Gate1Q::Sdg), q, p)) <
            1e-13);
      CHECK(std::abs(got.trace_real() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("noisy CNOT equals the explicit sixteen-branch sum") {
  PauliProbs p{0.01, 0.02, 0.03};
  std::mt19937 rng(22);

  // |00> with bit flips only: weights (1-px)^2, px(1-px), (1-px)px, px^2.
  PauliProbs bitflip{0.1, 0, 0};
  PureState zz{2, {cplx(1), 0, 0, 0}};
  DensityMatrix out = apply_noisy_cnot(to_density(zz), 1, 2, bitflip);
  CHECK(std::abs(out.at(0b00, 0b00) - 0.81) < 1e-13);
  CHECK(std::abs(out.at(0b10, 0b10) - 0.09) < 1e-13);
  CHECK(std::abs(out.at(0b01, 0b01) - 0.09) < 1e-13);
  CHECK(std::abs(out.at(0b11, 0b11) - 0.01) < 1e-13);

  for (auto [c, t] : {std::pair{1, 2}, std::pair{2, 1}, std::pair{1, 3}}) {
    int n = std::max({2, c, t});
    DensityMatrix rho = random_density(n, rng);
    DensityMatrix got = apply_noisy_cnot(rho, c, t, p);
    CHECK(max_abs_diff(to_cmat(got), noisy_cnot_oracle(rho, c, t, p)) < 1e-13);
    CHECK(std::abs(got.trace_real() - 1.0) < 1e-12);
  }
}

TEST_CASE("channels fix the maximally mixed state") {
  std::vector<cplx> mixed(16, cplx(0));
  for (int i = 0; i < 4; ++i) mixed[i * 4 + i] = 0.25;
  DensityMatrix mm(2, mixed, 1.0);
  PauliProbs p{0.05, 0.07, 0.11};
  DensityMatrix a = apply_noisy_1q(mm, gate_matrix(Gate1Q::H), 1, p);
  DensityMatrix b = apply_noisy_cnot(mm, 2, 1, p);
  CHECK(max_abs_diff(a, mm) < 1e-13);
  CHECK(max_abs_diff(b, mm) < 1e-13);
}

TEST_CASE("single-probability channels match the closed forms") {
  // Phase flip on |+><+|: off-diagonals scale by 1 - 2 pz.
  PureState plus{1, {cplx(kInvSqrt2), cplx(kInvSqrt2)}};
  PauliProbs pz{0, 0, 0.2};
  DensityMatrix out = apply_noisy_1q(to_density(plus), identity2(), 1, pz);
  CHECK(std::abs(out.at(0, 1) - 0.5 * (1 - 2 * 0.2)) < 1e-14);
  CHECK(std::abs(out.at(0, 0) - 0.5) < 1e-14);
}

TEST_CASE("invalid probabilities are rejected") {
  DensityMatrix rho = one_qubit_zero();
  CHECK_THROWS_AS(apply_noisy_1q(rho, identity2(), 1, {0.7, 0.4, 0}), std::invalid_argument);
}
