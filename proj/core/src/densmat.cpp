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

#include "qec713/densmat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qec713/parallel.hpp"

namespace qec713 {

namespace {

void check_unitary(const Mat2& u) {
  // Rows of U U^dag against the identity (Frobenius-style max-entry check).
  cplx d00 = u[0] * std::conj(u[0]) + u[1] * std::conj(u[1]);
  cplx d01 = u[0] * std::conj(u[2]) + u[1] * std::conj(u[3]);
  cplx d11 = u[2] * std::conj(u[2]) + u[3] * std::conj(u[3]);
  double defect = std::max({std::abs(d00 - 1.0), std::abs(d01), std::abs(d11 - 1.0)});
  if (defect > 1e-12) throw std::invalid_argument("apply_1q: matrix is not unitary");
}

int parity(std::uint64_t v) { return std::popcount(v) & 1; }

}  // namespace

double PureState::norm() const {
  double s = 0.0;
  for (const cplx& a : amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

PureState pure_state(const StatePrep& prep) {
  PureState psi;
  psi.n_qubits = 1;
  psi.amplitudes = {cplx(std::cos(prep.alpha)),
                    std::polar(std::sin(prep.alpha), prep.beta)};
  return psi;
}

PureState apply_mat2(const Mat2& u, const PureState& psi) {
  if (psi.n_qubits != 1) throw std::invalid_argument("apply_mat2: expects one qubit");
  PureState out = psi;
  out.amplitudes[0] = u[0] * psi.amplitudes[0] + u[1] * psi.amplitudes[1];
  out.amplitudes[1] = u[2] * psi.amplitudes[0] + u[3] * psi.amplitudes[1];
  return out;
}

DensityMatrix::DensityMatrix(int n_qubits, std::vector<cplx> entries, double trace_weight)
    : n_qubits_(n_qubits),
      dim_(std::size_t{1} << n_qubits),
      m_(std::move(entries)),
      trace_weight_(trace_weight) {
  if (n_qubits < 1) throw std::invalid_argument("DensityMatrix: need at least one qubit");
  if (m_.size() != dim_ * dim_) throw std::invalid_argument("DensityMatrix: bad entry count");
}

DensityMatrix DensityMatrix::zero_state(int n_qubits) {
  std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<cplx> m(dim * dim, cplx(0));
  m[0] = cplx(1);
  return DensityMatrix(n_qubits, std::move(m), 1.0);
}

std::uint64_t DensityMatrix::qubit_mask(int q) const {
  return std::uint64_t{1} << (n_qubits_ - q);
}

void DensityMatrix::check_qubit(int q) const {
  if (q < 1 || q > n_qubits_) throw std::out_of_range("qubit index out of range");
}

void DensityMatrix::apply_1q(const Mat2& u, int q) {
  check_qubit(q);
  check_unitary(u);
  const std::uint64_t mask = qubit_mask(q);
  const std::size_t dim = dim_;
  const cplx u00 = u[0], u01 = u[1], u10 = u[2], u11 = u[3];
  // Row pass: rho <- U rho (columns in place, row pairs combined).
  parallel_for(dim >> 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      // k-th index without the qubit bit.
      std::size_t i0 = ((k & ~(mask - 1)) << 1) | (k & (mask - 1));
      std::size_t i1 = i0 | mask;
      cplx* r0 = m_.data() + i0 * dim;
      cplx* r1 = m_.data() + i1 * dim;
      for (std::size_t j = 0; j < dim; ++j) {
        cplx a = r0[j], b2 = r1[j];
        r0[j] = u00 * a + u01 * b2;
        r1[j] = u10 * a + u11 * b2;
      }
    }
  });
  // Column pass: rho <- rho U^dag.
  const cplx c00 = std::conj(u00), c01 = std::conj(u01);
  const cplx c10 = std::conj(u10), c11 = std::conj(u11);
  parallel_for(dim, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      cplx* row = m_.data() + i * dim;
      for (std::size_t j0 = 0; j0 < dim; ++j0) {
        if (j0 & mask) continue;
        std::size_t j1 = j0 | mask;
        cplx a = row[j0], b2 = row[j1];
        row[j0] = a * c00 + b2 * c01;
        row[j1] = a * c10 + b2 * c11;
      }
    }
  });
}

void DensityMatrix::apply_cnot(int c, int t) {
  check_qubit(c);
  check_qubit(t);
  if (c == t) throw std::invalid_argument("apply_cnot: control equals target");
  const std::uint64_t cm = qubit_mask(c), tm = qubit_mask(t);
  const std::size_t dim = dim_;
  // Involutive index permutation; swap each orbit pair once.
  auto map = [&](std::size_t i) { return (i & cm) ? (i ^ tm) : i; };
  parallel_for(dim, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      std::size_t pi = map(i);
      cplx* row = m_.data() + i * dim;
      cplx* prow = m_.data() + pi * dim;
      for (std::size_t j = 0; j < dim; ++j) {
        std::size_t pj = map(j);
        if (pi > i || (pi == i && pj > j)) {
          std::swap(row[j], prow[pj]);
        }
      }
    }
  });
}

void DensityMatrix::conjugate_pauli(std::uint64_t xmask, std::uint64_t zmask) {
  const std::size_t dim = dim_;
  if (xmask == 0) {
    parallel_for(dim, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        cplx* row = m_.data() + i * dim;
        for (std::size_t j = 0; j < dim; ++j) {
          if (parity(zmask & (i ^ j))) row[j] = -row[j];
        }
      }
    });
    return;
  }
  // (P rho P)(i,j) = s(i) s(j) rho(i^x, j^x) with s(k) = (-1)^{z.(k^x)};
  // the sign depends only on i^j for the pair, so swap entries along the
  // involution and fix signs.
  parallel_for(dim, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      std::size_t pi = i ^ xmask;
      cplx* row = m_.data() + i * dim;
      cplx* prow = m_.data() + pi * dim;
      for (std::size_t j = 0; j < dim; ++j) {
        std::size_t pj = j ^ xmask;
        if (pi > i || (pi == i && pj > j)) std::swap(row[j], prow[pj]);
      }
    }
  });
  parallel_for(dim, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      cplx* row = m_.data() + i * dim;
      for (std::size_t j = 0; j < dim; ++j) {
        int s = parity(zmask & (i ^ xmask)) ^ parity(zmask & (j ^ xmask));
        if (s) row[j] = -row[j];
      }
    }
  });
}

void DensityMatrix::project_pauli_string(std::uint64_t xmask, std::uint64_t zmask, int sign) {
  if (xmask != 0 && zmask != 0)
    throw std::invalid_argument("project_pauli_string: mixed X/Z strings unsupported");
  const std::size_t dim = dim_;
  const double s = sign >= 0 ? 1.0 : -1.0;
  if (xmask == 0) {
    // Diagonal generator: entry factor (1 + s(-1)^{z.i})(1 + s(-1)^{z.j})/4.
    parallel_for(dim, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        double fi = 0.5 * (1.0 + s * (parity(zmask & i) ? -1.0 : 1.0));
        cplx* row = m_.data() + i * dim;
        for (std::size_t j = 0; j < dim; ++j) {
          double fj = 0.5 * (1.0 + s * (parity(zmask & j) ? -1.0 : 1.0));
          row[j] *= fi * fj;
        }
      }
    });
    return;
  }
  std::vector<cplx> out(m_.size());
  parallel_for(dim, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const cplx* row = m_.data() + i * dim;
      const cplx* xrow = m_.data() + (i ^ xmask) * dim;
      cplx* orow = out.data() + i * dim;
      for (std::size_t j = 0; j < dim; ++j) {
        orow[j] = 0.25 * (row[j] + s * xrow[j] + s * row[j ^ xmask] + xrow[j ^ xmask]);
      }
    }
  });
  m_ = std::move(out);
}

DensityMatrix DensityMatrix::partial_trace(const std::vector<int>& keep) const {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  std::uint64_t seen = 0;
  for (int q : keep) {
    check_qubit(q);
    if (seen & qubit_mask(q)) throw std::invalid_argument("partial_trace: duplicate qubit");
    seen |= qubit_mask(q);
  }
  const int nk = static_cast<int>(keep.size());
  std::vector<int> env;
  for (int q = 1; q <= n_qubits_; ++q) {
    if (!(seen & qubit_mask(q))) env.push_back(q);
  }
  const std::size_t kd = std::size_t{1} << nk;
  const std::size_t ed = std::size_t{1} << env.size();
  auto expand = [&](std::size_t a, std::size_t e) {
    std::uint64_t idx = 0;
    for (int k = 0; k < nk; ++k) {
      if (a & (std::size_t{1} << (nk - 1 - k))) idx |= qubit_mask(keep[k]);
    }
    for (std::size_t k = 0; k < env.size(); ++k) {
      if (e & (std::size_t{1} << (env.size() - 1 - k))) idx |= qubit_mask(env[k]);
    }
    return idx;
  };
  std::vector<cplx> out(kd * kd, cplx(0));
  for (std::size_t a = 0; a < kd; ++a) {
    for (std::size_t b = 0; b < kd; ++b) {
      cplx s(0);
      for (std::size_t e = 0; e < ed; ++e) {
        s += at(expand(a, e), expand(b, e));
      }
      out[a * kd + b] = s;
    }
  }
  return DensityMatrix(nk, std::move(out), trace_weight_);
}

std::pair<DensityMatrix, double> DensityMatrix::postselect(int q, int outcome, Basis basis) const {
  check_qubit(q);
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("postselect: outcome must be 0 or 1");
  const std::uint64_t mask = qubit_mask(q);
  const std::size_t dim = dim_;
  DensityMatrix out = *this;
  if (basis == Basis::Z) {
    const std::uint64_t want = outcome ? mask : 0;
    parallel_for(dim, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        cplx* row = out.m_.data() + i * dim;
        if ((i & mask) != want) {
          std::fill(row, row + dim, cplx(0));
        } else {
          for (std::size_t j = 0; j < dim; ++j) {
            if ((j & mask) != want) row[j] = cplx(0);
          }
        }
      }
    });
  } else {
    // Projector (I + s X_q)/2: every 2x2 block collapses to its average.
    const double s = outcome == 0 ? 1.0 : -1.0;
    parallel_for(dim >> 1, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        std::size_t i0 = ((k & ~(mask - 1)) << 1) | (k & (mask - 1));
        std::size_t i1 = i0 | mask;
        cplx* r0 = out.m_.data() + i0 * dim;
        cplx* r1 = out.m_.data() + i1 * dim;
        for (std::size_t j0 = 0; j0 < dim; ++j0) {
          if (j0 & mask) continue;
          std::size_t j1 = j0 | mask;
          cplx avg = 0.25 * (r0[j0] + s * r0[j1] + s * r1[j0] + r1[j1]);
          r0[j0] = avg;
          r0[j1] = s * avg;
          r1[j0] = s * avg;
          r1[j1] = avg;
        }
      }
    });
  }
  double new_weight = out.trace_real();
  double p = trace_weight_ > 0 ? new_weight / trace_weight_ : 0.0;
  p = std::clamp(p, 0.0, 1.0);
  out.trace_weight_ = new_weight;
  return {std::move(out), p};
}

double DensityMatrix::trace_real() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += at(i, i).real();
  return s;
}

void DensityMatrix::scale(double s) {
  for (cplx& v : m_) v *= s;
  trace_weight_ *= s;
}

void DensityMatrix::normalize() {
  double tr = trace_real();
  if (tr < 1e-300) throw std::runtime_error("normalize: vanishing trace (degenerate postselection)");
  for (cplx& v : m_) v /= tr;
  trace_weight_ = 1.0;
}

double DensityMatrix::max_hermiticity_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      worst = std::max(worst, std::abs(at(i, j) - std::conj(at(j, i))));
    }
  }
  return worst;
}

DensityMatrix to_density(const PureState& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("to_density: state is not normalized");
  std::size_t dim = psi.dim();
  std::vector<cplx> m(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      m[i * dim + j] = psi.amplitudes[i] * std::conj(psi.amplitudes[j]);
    }
  }
  return DensityMatrix(psi.n_qubits, std::move(m), 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  if (std::abs(rho.trace_real() - 1.0) > 1e-9 || std::abs(sigma.trace_real() - 1.0) > 1e-9)
    throw std::invalid_argument("fidelity: states must be normalized");
  const std::size_t dim = rho.dim();
  cplx s(0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      s += rho.at(i, j) * sigma.at(j, i);
    }
  }
  if (std::abs(s.imag()) > 1e-10) throw std::runtime_error("fidelity: non-real trace product");
  return std::clamp(s.real(), 0.0, 1.0 + 1e-9);
}

DensityMatrix kron(const DensityMatrix& high, const DensityMatrix& low) {
  const std::size_t dh = high.dim(), dl = low.dim();
  const std::size_t dim = dh * dl;
  std::vector<cplx> m(dim * dim);
  parallel_for(dh, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      for (std::size_t j = 0; j < dh; ++j) {
        const cplx hij = high.at(i, j);
        for (std::size_t k = 0; k < dl; ++k) {
          cplx* dst = m.data() + (i * dl + k) * dim + j * dl;
          const cplx* src = &low.at(k, 0);
          for (std::size_t l = 0; l < dl; ++l) dst[l] = hij * src[l];
        }
      }
    }
  });
  return DensityMatrix(high.n_qubits() + low.n_qubits(), std::move(m),
                       high.trace_weight() * low.trace_weight());
}

}  // namespace qec713
