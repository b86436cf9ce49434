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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qec713/perturb.hpp"

namespace qec713 {

/// Coefficient over the angular basis {1, cos 4a, cos 2b sin^2 2a}.
struct AngularCoeff {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double eval(const StatePrep& prep) const;
};

enum class FidelityKind { SevenQubit, OneQubit };

std::string kind_name(FidelityKind k);

/// Full angular-resolved second-order fidelity: one AngularCoeff per monomial.
struct FidelityPolynomial {
  ExperimentId experiment = ExperimentId::Encode;
  FidelityKind kind = FidelityKind::SevenQubit;
  std::array<AngularCoeff, kNumMonomials> coeffs{};

  TruncatedPoly at(const StatePrep& prep) const;
};

struct ReferenceEntry {
  std::string label;
  ExperimentId experiment;
  FidelityKind kind;
  FidelityPolynomial poly;
  /// Monomials whose transcription carries a known defect in the source;
  /// their diffs are reported but never gate `matched`.
  std::vector<Monomial> advisory;
  std::string note;
};

/// Transcribed reference expansions, keyed by (experiment, kind).
class ReferenceTable {
 public:
  /// Built-in table (identical to the shipped data file).
  static const ReferenceTable& builtin();
  static ReferenceTable from_json(const std::string& text);

  const ReferenceEntry* find(ExperimentId id, FidelityKind kind) const;
  const ReferenceEntry* find_label(const std::string& label) const;
  const std::vector<ReferenceEntry>& entries() const { return entries_; }

 private:
  std::vector<ReferenceEntry> entries_;
};

struct MonomialDiff {
  Monomial monomial;
  AngularCoeff computed;
  AngularCoeff reference;
  double abs_diff = 0.0;  // max over (a, b, c)
  bool advisory = false;
};

struct ComparisonReport {
  ExperimentId experiment;
  FidelityKind kind;
  std::string label;
  std::vector<MonomialDiff> monomials;
  double max_abs_diff = 0.0;  // over non-advisory entries
  bool matched = false;
  double tolerance = 0.0;
  std::string circuit_note;
};

/// Per-monomial diff against the table; matched <=> max non-advisory diff
/// <= tolerance. Throws std::out_of_range if the entry is missing.
ComparisonReport compare_reference(const FidelityPolynomial& computed,
                                   const ReferenceTable& table, double tolerance);

/// Least-squares degree-2 fit of an evaluator over a probability stencil.
/// Default stencil: p_i in {0, h, 2h}, h = 5e-4, at most two nonzero
/// coordinates (19 points).
std::vector<PauliProbs> default_fit_stencil(double h = 5e-4);
TruncatedPoly fit_coefficients(const std::function<double(const PauliProbs&)>& evaluator,
                               const std::vector<PauliProbs>& stencil = default_fit_stencil());

struct AngularSample {
  double alpha;
  double beta;
  double value;
};

struct AngularFit {
  AngularCoeff coeff;
  double residual = 0.0;  // max abs residual over the samples
};

/// Solves value = a + b cos4a + c cos2b sin^2 2a in least squares. A residual
/// above 1e-8 signals that the sampled quantity leaves the three-term basis.
AngularFit angular_decompose(const std::vector<AngularSample>& samples);

/// (alpha, beta) grid for coefficient extraction: alpha in {0, pi/8, pi/4},
/// beta in {0, pi/4}.
std::vector<StatePrep> default_angular_grid();

/// Runs the perturbative backend over the grid and fits every monomial onto
/// the angular basis. max_residual reports the worst fit residual.
struct ExtractedPolynomial {
  FidelityPolynomial poly;
  double max_residual = 0.0;
};
ExtractedPolynomial extract_fidelity_polynomial(
    ExperimentId id, FidelityKind kind,
    const std::vector<StatePrep>& grid = default_angular_grid(),
    const PerturbOptions& opts = {},
    const ExperimentCircuits& circuits = ExperimentCircuits::defaults());

/// Both kinds from one backend pass over the grid.
struct ExtractedPair {
  ExtractedPolynomial seven;
  ExtractedPolynomial one;
};
ExtractedPair extract_fidelity_pair(
    ExperimentId id, const std::vector<StatePrep>& grid = default_angular_grid(),
    const PerturbOptions& opts = {},
    const ExperimentCircuits& circuits = ExperimentCircuits::defaults());

struct RegionPoint {
  double px, py, pz;
  double f_before, f_after;
  bool improved;
};

enum class RegionBackend { Dense, Perturb, ReferenceFirstOrder };

/// Fidelity-improvement scan over a (px, pz) grid at fixed py: F7 of the
/// noisily encoded state before vs after a noisy QEC round. The perturbative
/// backend computes both polynomials once and evaluates them across the grid;
/// the reference backend evaluates the transcribed first-order terms.
std::vector<RegionPoint> region_scan(const StatePrep& prep,
                                     const std::vector<double>& px_grid,
                                     double py,
                                     const std::vector<double>& pz_grid,
                                     RegionBackend backend);

}  // namespace qec713
