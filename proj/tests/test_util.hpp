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

// Brute-force linear-algebra oracles shared by the test suites. Everything
// here builds full-dimension operators with explicit Kronecker products and
// stays deliberately independent of the library's stride kernels.

#pragma once

#include <complex>
#include <random>
#include <vector>

#include "qec713/densmat.hpp"

namespace testutil {

using qec713::cplx;
using CMat = std::vector<std::vector<cplx>>;

inline CMat identity(std::size_t n) {
  CMat m(n, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline CMat from_mat2(const qec713::Mat2& u) {
  return {{u[0], u[1]}, {u[2], u[3]}};
}

inline CMat kron(const CMat& a, const CMat& b) {
  std::size_t ra = a.size(), ca = a[0].size();
  std::size_t rb = b.size(), cb = b[0].size();
  CMat out(ra * rb, std::vector<cplx>(ca * cb));
  for (std::size_t i = 0; i < ra; ++i)
    for (std::size_t j = 0; j < ca; ++j)
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < cb; ++l) out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
  return out;
}

inline CMat matmul(const CMat& a, const CMat& b) {
  std::size_t n = a.size(), m = b[0].size(), k = b.size();
  CMat out(n, std::vector<cplx>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
  return out;
}

inline CMat dagger(const CMat& a) {
  CMat out(a[0].size(), std::vector<cplx>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) out[j][i] = std::conj(a[i][j]);
  return out;
}

/// Operator for a one-qubit gate on qubit q (1-based, qubit 1 = MSB).
inline CMat embed_1q(const qec713::Mat2& u, int q, int n) {
  CMat op = identity(1);
  for (int k = 1; k <= n; ++k) op = kron(op, k == q ? from_mat2(u) : identity(2));
  return op;
}

inline CMat to_cmat(const qec713::DensityMatrix& rho) {
  CMat out(rho.dim(), std::vector<cplx>(rho.dim()));
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j) out[i][j] = rho.at(i, j);
  return out;
}

inline qec713::DensityMatrix from_cmat(int n_qubits, const CMat& m, double weight) {
  std::size_t dim = m.size();
  std::vector<cplx> flat(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) flat[i * dim + j] = m[i][j];
  return qec713::DensityMatrix(n_qubits, std::move(flat), weight);
}

inline CMat conjugate(const CMat& op, const CMat& rho) {
  return matmul(matmul(op, rho), dagger(op));
}

inline double max_abs_diff(const CMat& a, const CMat& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j)
      worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
  return worst;
}

inline double max_abs_diff(const qec713::DensityMatrix& a, const qec713::DensityMatrix& b) {
  return max_abs_diff(to_cmat(a), to_cmat(b));
}

/// Random normalized pure state from a fixed-seed generator.
inline qec713::PureState random_pure(int n_qubits, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  qec713::PureState psi;
  psi.n_qubits = n_qubits;
  psi.amplitudes.resize(std::size_t{1} << n_qubits);
  double norm2 = 0.0;
  for (cplx& a : psi.amplitudes) {
    a = cplx(g(rng), g(rng));
    norm2 += std::norm(a);
  }
  for (cplx& a : psi.amplitudes) a /= std::sqrt(norm2);
  return psi;
}

/// Random full-rank-ish density matrix: a mixture of a few random pure states.
inline qec713::DensityMatrix random_density(int n_qubits, std::mt19937& rng, int n_terms = 3) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> w(n_terms);
  double total = 0.0;
  for (double& x : w) {
    x = u(rng);
    total += x;
  }
  std::size_t dim = std::size_t{1} << n_qubits;
  CMat acc(dim, std::vector<cplx>(dim));
  for (int t = 0; t < n_terms; ++t) {
    qec713::PureState psi = random_pure(n_qubits, rng);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        acc[i][j] += (w[t] / total) * psi.amplitudes[i] * std::conj(psi.amplitudes[j]);
  }
  return from_cmat(n_qubits, acc, 1.0);
}

inline CMat pauli_mat(char p) {
  switch (p) {
    case 'I': return identity(2);
    case 'X': return from_mat2(qec713::pauli_x());
    case 'Y': return from_mat2(qec713::pauli_y());
    default: return from_mat2(qec713::pauli_z());
  }
}

/// Pauli string operator from a per-qubit letter string, index 0 = qubit 1.
inline CMat pauli_string(const std::string& letters) {
  CMat op = identity(1);
  for (char c : letters) op = kron(op, pauli_mat(c));
  return op;
}

inline cplx trace_product(const CMat& a, const CMat& b) {
  cplx s(0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) s += a[i][j] * b[j][i];
  return s;
}

}  // namespace testutil
