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

#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "qec713/densmat.hpp"
#include "test_util.hpp"

using namespace qec713;
using namespace testutil;

namespace {
const double kPi = 3.14159265358979323846;

DensityMatrix basis_state(int n, std::size_t idx) {
  PureState psi;
  psi.n_qubits = n;
  psi.amplitudes.assign(std::size_t{1} << n, cplx(0));
  psi.amplitudes[idx] = 1.0;
  return to_density(psi);
}
}  // namespace

TEST_CASE("pure_state evaluates cos/sin amplitudes") {
  PureState zero = pure_state({0.0, 1.3});
  CHECK(std::abs(zero.amplitudes[0] - 1.0) < 1e-15);
  CHECK(std::abs(zero.amplitudes[1]) < 1e-15);

  PureState one = pure_state({kPi / 2, 0.0});
  CHECK(std::abs(one.amplitudes[0]) < 1e-15);
  CHECK(std::abs(one.amplitudes[1] - 1.0) < 1e-15);

  PureState plus_i = pure_state({kPi / 4, kPi / 2});
  CHECK(std::abs(plus_i.amplitudes[0] - kInvSqrt2) < 1e-15);
  CHECK(std::abs(plus_i.amplitudes[1] - cplx(0, kInvSqrt2)) < 1e-15);
}

TEST_CASE("to_density forms the projector") {
  DensityMatrix zero = basis_state(1, 0);
  CHECK(std::abs(zero.at(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(zero.at(1, 1)) < 1e-15);

  PureState plus{1, {cplx(kInvSqrt2), cplx(kInvSqrt2)}};
  DensityMatrix dp = to_density(plus);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(dp.at(i, j) - 0.5) < 1e-15);

  PureState bell{2, {cplx(kInvSqrt2), 0, 0, cplx(kInvSqrt2)}};
  DensityMatrix db = to_density(bell);
  CHECK(std::abs(db.at(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(db.at(0, 3) - 0.5) < 1e-15);
  CHECK(std::abs(db.at(3, 0) - 0.5) < 1e-15);
  CHECK(std::abs(db.at(3, 3) - 0.5) < 1e-15);
  CHECK(std::abs(db.at(1, 1)) < 1e-15);

  PureState unnorm{1, {cplx(1), cplx(1)}};
  CHECK_THROWS_AS(to_density(unnorm), std::invalid_argument);
}

TEST_CASE("apply_1q basics") {
  DensityMatrix rho = basis_state(1, 0);
  rho.apply_1q(gate_matrix(Gate1Q::H), 1);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(rho.at(i, j) - 0.5) < 1e-12);

  DensityMatrix flip = basis_state(1, 0);
  flip.apply_1q(pauli_x(), 1);
  CHECK(std::abs(flip.at(1, 1) - 1.0) < 1e-15);

  // Any unitary fixes the maximally mixed state.
  std::vector<cplx> mixed = {cplx(0.5), 0, 0, cplx(0.5)};
  DensityMatrix mm(1, mixed, 1.0);
  Mat2 u = {cplx(0.6, 0.0), cplx(0.0, 0.8), cplx(0.0, 0.8), cplx(0.6, 0.0)};
  mm.apply_1q(u, 1);
  CHECK(std::abs(mm.at(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(mm.at(0, 1)) < 1e-12);

  Mat2 bad = {cplx(1), cplx(1), cplx(0), cplx(1)};
  CHECK_THROWS_AS(mm.apply_1q(bad, 1), std::invalid_argument);
  CHECK_THROWS_AS(mm.apply_1q(u, 2), std::out_of_range);
}

TEST_CASE("apply_cnot on basis and superposition states") {
  DensityMatrix rho = basis_state(2, 0b10);
  rho.apply_cnot(1, 2);
  CHECK(std::abs(rho.at(3, 3) - 1.0) < 1e-15);

  DensityMatrix same = basis_state(2, 0);
  same.apply_cnot(1, 2);
  CHECK(std::abs(same.at(0, 0) - 1.0) < 1e-15);

  // |+0> -> Bell.
  DensityMatrix plus0 = basis_state(2, 0);
  plus0.apply_1q(gate_matrix(Gate1Q::H), 1);
  plus0.apply_cnot(1, 2);
  PureState bell{2, {cplx(kInvSqrt2), 0, 0, cplx(kInvSqrt2)}};
  CHECK(max_abs_diff(plus0, to_density(bell)) < 1e-12);

  CHECK_THROWS_AS(plus0.apply_cnot(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(plus0.apply_cnot(0, 1), std::out_of_range);
}

TEST_CASE("qubit-local application equals explicit Kronecker conjugation") {
  std::mt19937 rng(12345);
  const Mat2 gates[] = {gate_matrix(Gate1Q::H), gate_matrix(Gate1Q::S), pauli_y()};
  for (int n = 1; n <= 3; ++n) {
    for (int q = 1; q <= n; ++q) {
      for (const Mat2& u : gates) {
        DensityMatrix rho = random_density(n, rng);
        CMat expect = conjugate(embed_1q(u, q, n), to_cmat(rho));
        DensityMatrix got = rho;
        got.apply_1q(u, q);
        CHECK(max_abs_diff(to_cmat(got), expect) < 1e-12);
        CHECK(std::abs(got.trace_real() - rho.trace_real()) < 1e-12);
        CHECK(got.max_hermiticity_defect() < 1e-12);
      }
    }
  }
  // CNOT against the permutation matrix, all ordered pairs on 3 qubits.
  CMat cnot2 = identity(4);
  std::swap(cnot2[2], cnot2[3]);
  for (int c = 1; c <= 3; ++c) {
    for (int t = 1; t <= 3; ++t) {
      if (c == t) continue;
      DensityMatrix rho = random_density(3, rng);
      // Build the embedded CNOT by permuting basis states directly.
      CMat op(8, std::vector<cplx>(8));
      for (std::size_t b = 0; b < 8; ++b) {
        std::size_t cm = std::size_t{1} << (3 - c), tm = std::size_t{1} << (3 - t);
        std::size_t to = (b & cm) ? (b ^ tm) : b;
        op[to][b] = 1.0;
      }
      CMat expect = conjugate(op, to_cmat(rho));
      DensityMatrix got = rho;
      got.apply_cnot(c, t);
      CHECK(max_abs_diff(to_cmat(got), expect) < 1e-12);
    }
  }
}

TEST_CASE("partial_trace") {
  PureState bell{2, {cplx(kInvSqrt2), 0, 0, cplx(kInvSqrt2)}};
  DensityMatrix rb = to_density(bell).partial_trace({1});
  CHECK(std::abs(rb.at(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(rb.at(0, 1)) < 1e-12);

  // |0> x |+>, keep qubit 2.
  PureState zp{2, {cplx(kInvSqrt2), cplx(kInvSqrt2), 0, 0}};
  DensityMatrix rp = to_density(zp).partial_trace({2});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(rp.at(i, j) - 0.5) < 1e-12);

  // Product state reduces to its factors (brute-force contraction oracle is
  // the kron construction itself).
  std::mt19937 rng(777);
  DensityMatrix a = random_density(1, rng);
  DensityMatrix b = random_density(1, rng);
  DensityMatrix ab = kron(a, b);
  CHECK(max_abs_diff(ab.partial_trace({1}), a) < 1e-12);
  CHECK(max_abs_diff(ab.partial_trace({2}), b) < 1e-12);

  CHECK_THROWS_AS(ab.partial_trace({}), std::invalid_argument);
  CHECK_THROWS_AS(ab.partial_trace({3}), std::out_of_range);
}

TEST_CASE("postselect returns unnormalized branch and probability") {
  PureState plus{1, {cplx(kInvSqrt2), cplx(kInvSqrt2)}};
  auto [branch, p] = to_density(plus).postselect(1, 0, Basis::Z);
  CHECK(std::abs(p - 0.5) < 1e-12);
  CHECK(std::abs(branch.trace_weight() - 0.5) < 1e-12);
  CHECK(std::abs(branch.at(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(branch.at(1, 1)) < 1e-12);

  auto [dead, p0] = basis_state(1, 0).postselect(1, 1, Basis::Z);
  CHECK(p0 < 1e-15);
  CHECK(std::abs(dead.trace_weight()) < 1e-15);

  auto [xbranch, px] = basis_state(1, 0).postselect(1, 0, Basis::X);
  CHECK(std::abs(px - 0.5) < 1e-12);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(xbranch.at(i, j) - 0.25) < 1e-12);
}

TEST_CASE("postselection completeness") {
  std::mt19937 rng(42);
  for (int n : {1, 2, 3}) {
    DensityMatrix rho = random_density(n, rng);
    for (int q = 1; q <= n; ++q) {
      for (Basis basis : {Basis::Z, Basis::X}) {
        auto [b0, p0] = rho.postselect(q, 0, basis);
        auto [b1, p1] = rho.postselect(q, 1, basis);
        CHECK(std::abs(p0 + p1 - 1.0) < 1e-12);
        CMat sum = to_cmat(b0);
        CMat other = to_cmat(b1);
        for (std::size_t i = 0; i < sum.size(); ++i)
          for (std::size_t j = 0; j < sum.size(); ++j) sum[i][j] += other[i][j];
        CHECK(max_abs_diff(sum, to_cmat(rho)) < 1e-12);
      }
    }
  }
}

TEST_CASE("fidelity") {
  DensityMatrix zero = basis_state(1, 0);
  DensityMatrix one = basis_state(1, 1);
  CHECK(fidelity(zero, zero) == Catch::Approx(1.0).margin(1e-12));
  CHECK(fidelity(zero, one) == Catch::Approx(0.0).margin(1e-12));

  std::vector<cplx> mixed = {cplx(0.5), 0, 0, cplx(0.5)};
  DensityMatrix mm(1, mixed, 1.0);
  CHECK(fidelity(mm, mm) == Catch::Approx(0.5).margin(1e-12));

  std::mt19937 rng(9);
  DensityMatrix a = random_density(2, rng);
  DensityMatrix b = random_density(2, rng);
  CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) < 1e-12);

  CHECK_THROWS_AS(fidelity(zero, random_density(2, rng)), std::invalid_argument);
  DensityMatrix unnorm = zero;
  unnorm.scale(0.5);
  CHECK_THROWS_AS(fidelity(unnorm, zero), std::invalid_argument);
}

TEST_CASE("eigenvalues stay positive on small instances") {
  std::mt19937 rng(31);
  for (int n : {1, 2, 3}) {
    DensityMatrix rho = random_density(n, rng);
    rho.apply_1q(gate_matrix(Gate1Q::H), 1);
    if (n > 1) rho.apply_cnot(1, 2);
    auto [b, p] = rho.postselect(1, 0, Basis::X);
    Eigen::MatrixXcd m(b.dim(), b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j) m(i, j) = b.at(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}
