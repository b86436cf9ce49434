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
#include <functional>
#include <string_view>
#include <vector>

#include "qec713/steane.hpp"

namespace qec713 {

/// Monomials of the degree-2 truncation in (px, py, pz), in the fixed order
/// used by every table, report and CSV column.
enum Monomial : int {
  kOne = 0,
  kPx,
  kPy,
  kPz,
  kPx2,
  kPxPy,
  kPy2,
  kPxPz,
  kPyPz,
  kPz2,
  kNumMonomials,
};

std::string_view monomial_name(Monomial m);

/// Polynomial in (px, py, pz) truncated at total degree 2.
struct TruncatedPoly {
  std::array<double, kNumMonomials> c{};

  static TruncatedPoly constant(double v);
  /// px + py + pz.
  static TruncatedPoly prob_sum();
  /// Weight of an error-free site product (1 - px - py - pz)^n, truncated.
  static TruncatedPoly zero_weight(int n);
  static TruncatedPoly monomial(Monomial m, double v = 1.0);

  TruncatedPoly& operator+=(const TruncatedPoly& o);
  TruncatedPoly& operator-=(const TruncatedPoly& o);
  TruncatedPoly& operator*=(double s);
  friend TruncatedPoly operator+(TruncatedPoly a, const TruncatedPoly& b) { return a += b; }
  friend TruncatedPoly operator-(TruncatedPoly a, const TruncatedPoly& b) { return a -= b; }
  friend TruncatedPoly operator*(TruncatedPoly a, double s) { return a *= s; }

  /// Product truncated at total degree 2.
  TruncatedPoly mul(const TruncatedPoly& o) const;
  /// 1/this via the truncated geometric series; requires nonzero constant term.
  TruncatedPoly inverse() const;
  TruncatedPoly div(const TruncatedPoly& d) const { return mul(d.inverse()); }

  double eval(const PauliProbs& p) const;
};

enum class Pauli : int { X = 0, Y = 1, Z = 2 };

/// One inserted error in an enumeration over a circuit's noisy sites.
struct ErrorLocation {
  int instruction = 0;  // index into Circuit::instructions
  enum class Site { Single, Control, Target } site = Site::Single;
  Pauli pauli = Pauli::X;
};

/// Error sites of a circuit: one per noisy one-qubit gate, two per noisy CNOT.
int count_error_sites(const Circuit& c);

/// Streams every error configuration of total order <= 2: the zero config
/// (weight (1-s)^L truncated), all 3L singles (weight p (1-s)^{L-1}), and all
/// 9 C(L,2) distinct-site doubles (weight p q). The enumerated weights sum to
/// one in truncated arithmetic.
void enumerate_configs(const Circuit& c,
                       const std::function<void(const TruncatedPoly&,
                                                const std::vector<ErrorLocation>&)>& fn);

struct PolyPair {
  TruncatedPoly f7;
  TruncatedPoly f1;
  /// Acceptance probability relative to the noiseless baseline; the constant
  /// polynomial 1 for experiments without postselection.
  TruncatedPoly acceptance;
};

struct PerturbOptions {
  /// 1 drops the double-error configurations (first-order coefficients only;
  /// second-order entries are then meaningless).
  int max_order = 2;
};

/// Independent second-order backend: enumerates Pauli configurations over all
/// noisy sites of the experiment, propagates each branch as a pure statevector
/// through every measurement path, and assembles exact fidelity polynomials,
/// renormalizing postselected experiments by truncated series division.
PolyPair fidelity_polynomial(ExperimentId id, const StatePrep& prep,
                             const PerturbOptions& opts = {},
                             const ExperimentCircuits& circuits = ExperimentCircuits::defaults());

double poly_eval(const TruncatedPoly& p, const PauliProbs& probs);

}  // namespace qec713
