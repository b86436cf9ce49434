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

#include "qec713/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qec713 {

extern const char* kReferenceExpansionsJson;  // generated from the data file

double AngularCoeff::eval(const StatePrep& prep) const {
  const double s2a = std::sin(2.0 * prep.alpha);
  return a + b * std::cos(4.0 * prep.alpha) + c * std::cos(2.0 * prep.beta) * s2a * s2a;
}

std::string kind_name(FidelityKind k) {
  return k == FidelityKind::SevenQubit ? "7-qubit" : "1-qubit";
}

TruncatedPoly FidelityPolynomial::at(const StatePrep& prep) const {
  TruncatedPoly p;
  for (int m = 0; m < kNumMonomials; ++m) p.c[m] = coeffs[m].eval(prep);
  return p;
}

namespace {

double parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  double num = std::stod(s.substr(0, slash));
  double den = std::stod(s.substr(slash + 1));
  if (den == 0.0) throw std::invalid_argument("reference table: zero denominator");
  return num / den;
}

Monomial monomial_from_name(const std::string& name) {
  for (int m = 0; m < kNumMonomials; ++m) {
    if (monomial_name(static_cast<Monomial>(m)) == name) return static_cast<Monomial>(m);
  }
  throw std::invalid_argument("reference table: unknown monomial '" + name + "'");
}

}  // namespace

ReferenceTable ReferenceTable::from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  ReferenceTable table;
  for (const auto& e : doc.at("entries")) {
    ReferenceEntry entry;
    entry.label = e.at("label").get<std::string>();
    auto id = parse_experiment(e.at("experiment").get<std::string>());
    if (!id) throw std::invalid_argument("reference table: unknown experiment");
    entry.experiment = *id;
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "7-qubit") entry.kind = FidelityKind::SevenQubit;
    else if (kind == "1-qubit") entry.kind = FidelityKind::OneQubit;
    else throw std::invalid_argument("reference table: unknown kind");
    entry.poly.experiment = entry.experiment;
    entry.poly.kind = entry.kind;
    for (const auto& [name, abc] : e.at("monomials").items()) {
      Monomial m = monomial_from_name(name);
      entry.poly.coeffs[m].a = parse_rational(abc.at(0).get<std::string>());
      entry.poly.coeffs[m].b = parse_rational(abc.at(1).get<std::string>());
      entry.poly.coeffs[m].c = parse_rational(abc.at(2).get<std::string>());
    }
    if (e.contains("advisory")) {
      for (const auto& name : e.at("advisory")) {
        entry.advisory.push_back(monomial_from_name(name.get<std::string>()));
      }
    }
    if (e.contains("note")) entry.note = e.at("note").get<std::string>();
    table.entries_.push_back(std::move(entry));
  }
  return table;
}

const ReferenceTable& ReferenceTable::builtin() {
  static const ReferenceTable table = ReferenceTable::from_json(kReferenceExpansionsJson);
  return table;
}

const ReferenceEntry* ReferenceTable::find(ExperimentId id, FidelityKind kind) const {
  for (const auto& e : entries_) {
    if (e.experiment == id && e.kind == kind) return &e;
  }
  return nullptr;
}

const ReferenceEntry* ReferenceTable::find_label(const std::string& label) const {
  for (const auto& e : entries_) {
    if (e.label == label) return &e;
  }
  return nullptr;
}

ComparisonReport compare_reference(const FidelityPolynomial& computed, const ReferenceTable& table,
                                   double tolerance) {
  const ReferenceEntry* ref = table.find(computed.experiment, computed.kind);
  if (!ref) {
    throw std::out_of_range("compare_reference: no reference entry for " +
                            experiment_name(computed.experiment) + " (" +
                            kind_name(computed.kind) + ")");
  }
  ComparisonReport report;
  report.experiment = computed.experiment;
  report.kind = computed.kind;
  report.label = ref->label;
  report.tolerance = tolerance;
  for (int m = 0; m < kNumMonomials; ++m) {
    MonomialDiff d;
    d.monomial = static_cast<Monomial>(m);
    d.computed = computed.coeffs[m];
    d.reference = ref->poly.coeffs[m];
    d.abs_diff = std::max({std::abs(d.computed.a - d.reference.a),
                           std::abs(d.computed.b - d.reference.b),
                           std::abs(d.computed.c - d.reference.c)});
    d.advisory = std::find(ref->advisory.begin(), ref->advisory.end(), d.monomial) !=
                 ref->advisory.end();
    if (!d.advisory) report.max_abs_diff = std::max(report.max_abs_diff, d.abs_diff);
    report.monomials.push_back(d);
  }
  report.matched = report.max_abs_diff <= tolerance;
  return report;
}

std::vector<PauliProbs> default_fit_stencil(double h) {
  std::vector<PauliProbs> pts;
  pts.push_back({0, 0, 0});
  const double vals[2] = {h, 2 * h};
  for (int axis = 0; axis < 3; ++axis) {
    for (double v : vals) {
      PauliProbs p{};
      (axis == 0 ? p.px : axis == 1 ? p.py : p.pz) = v;
      pts.push_back(p);
    }
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      for (double va : vals) {
        for (double vb : vals) {
          PauliProbs p{};
          (a == 0 ? p.px : a == 1 ? p.py : p.pz) = va;
          (b == 0 ? p.px : b == 1 ? p.py : p.pz) = vb;
          pts.push_back(p);
        }
      }
    }
  }
  return pts;
}

TruncatedPoly fit_coefficients(const std::function<double(const PauliProbs&)>& evaluator,
                               const std::vector<PauliProbs>& stencil) {
  const int n = static_cast<int>(stencil.size());
  if (n < kNumMonomials) throw std::invalid_argument("fit_coefficients: stencil too small");
  Eigen::MatrixXd design(n, kNumMonomials);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const PauliProbs& p = stencil[i];
    design(i, kOne) = 1.0;
    design(i, kPx) = p.px;
    design(i, kPy) = p.py;
    design(i, kPz) = p.pz;
    design(i, kPx2) = p.px * p.px;
    design(i, kPxPy) = p.px * p.py;
    design(i, kPy2) = p.py * p.py;
    design(i, kPxPz) = p.px * p.pz;
    design(i, kPyPz) = p.py * p.pz;
    design(i, kPz2) = p.pz * p.pz;
    rhs(i) = evaluator(p);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < kNumMonomials)
    throw std::invalid_argument("fit_coefficients: singular design (stencil too small)");
  Eigen::VectorXd x = qr.solve(rhs);
  TruncatedPoly out;
  for (int m = 0; m < kNumMonomials; ++m) out.c[m] = x(m);
  return out;
}

AngularFit angular_decompose(const std::vector<AngularSample>& samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 3) throw std::invalid_argument("angular_decompose: need at least three samples");
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const double s2a = std::sin(2.0 * samples[i].alpha);
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(4.0 * samples[i].alpha);
    design(i, 2) = std::cos(2.0 * samples[i].beta) * s2a * s2a;
    rhs(i) = samples[i].value;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw std::invalid_argument("angular_decompose: rank-deficient grid");
  Eigen::VectorXd x = qr.solve(rhs);
  AngularFit fit;
  fit.coeff = {x(0), x(1), x(2)};
  Eigen::VectorXd res = design * x - rhs;
  fit.residual = res.cwiseAbs().maxCoeff();
  return fit;
}

std::vector<StatePrep> default_angular_grid() {
  const double pi = 3.14159265358979323846;
  std::vector<StatePrep> grid;
  for (double alpha : {0.0, pi / 8, pi / 4}) {
    for (double beta : {0.0, pi / 4}) {
      grid.push_back({alpha, beta});
    }
  }
  return grid;
}

ExtractedPair extract_fidelity_pair(ExperimentId id, const std::vector<StatePrep>& grid,
                                    const PerturbOptions& opts,
                                    const ExperimentCircuits& circuits) {
  std::vector<PolyPair> per_point;
  per_point.reserve(grid.size());
  for (const StatePrep& prep : grid) {
    per_point.push_back(fidelity_polynomial(id, prep, opts, circuits));
  }
  ExtractedPair out;
  for (FidelityKind kind : {FidelityKind::SevenQubit, FidelityKind::OneQubit}) {
    ExtractedPolynomial& dst = kind == FidelityKind::SevenQubit ? out.seven : out.one;
    dst.poly.experiment = id;
    dst.poly.kind = kind;
    for (int m = 0; m < kNumMonomials; ++m) {
      std::vector<AngularSample> samples;
      samples.reserve(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const TruncatedPoly& p =
            kind == FidelityKind::SevenQubit ? per_point[i].f7 : per_point[i].f1;
        samples.push_back({grid[i].alpha, grid[i].beta, p.c[m]});
      }
      AngularFit fit = angular_decompose(samples);
      dst.poly.coeffs[m] = fit.coeff;
      dst.max_residual = std::max(dst.max_residual, fit.residual);
    }
  }
  return out;
}

ExtractedPolynomial extract_fidelity_polynomial(ExperimentId id, FidelityKind kind,
                                                const std::vector<StatePrep>& grid,
                                                const PerturbOptions& opts,
                                                const ExperimentCircuits& circuits) {
  ExtractedPair pair = extract_fidelity_pair(id, grid, opts, circuits);
  return kind == FidelityKind::SevenQubit ? pair.seven : pair.one;
}

std::vector<RegionPoint> region_scan(const StatePrep& prep, const std::vector<double>& px_grid,
                                     double py, const std::vector<double>& pz_grid,
                                     RegionBackend backend) {
  std::vector<RegionPoint> rows;
  rows.reserve(px_grid.size() * pz_grid.size());

  TruncatedPoly before_poly, after_poly;
  bool have_polys = false;
  if (backend == RegionBackend::Perturb) {
    before_poly = fidelity_polynomial(ExperimentId::Encode, prep).f7;
    after_poly = fidelity_polynomial(ExperimentId::NoisyQec, prep).f7;
    have_polys = true;
  } else if (backend == RegionBackend::ReferenceFirstOrder) {
    const ReferenceTable& table = ReferenceTable::builtin();
    const ReferenceEntry* enc = table.find(ExperimentId::Encode, FidelityKind::SevenQubit);
    const ReferenceEntry* qec = table.find(ExperimentId::NoisyQec, FidelityKind::SevenQubit);
    if (!enc || !qec) throw std::out_of_range("region_scan: missing reference entries");
    for (const auto* entry : {enc, qec}) {
      TruncatedPoly& dst = entry == enc ? before_poly : after_poly;
      dst = TruncatedPoly::constant(1.0);
      dst.c[kPx] = entry->poly.coeffs[kPx].eval(prep);
      dst.c[kPy] = entry->poly.coeffs[kPy].eval(prep);
      dst.c[kPz] = entry->poly.coeffs[kPz].eval(prep);
    }
    have_polys = true;
  }

  for (double px : px_grid) {
    for (double pz : pz_grid) {
      PauliProbs probs{px, py, pz};
      RegionPoint pt{px, py, pz, 0.0, 0.0, false};
      if (have_polys) {
        pt.f_before = before_poly.eval(probs);
        pt.f_after = after_poly.eval(probs);
      } else {
        pt.f_before = run_experiment(ExperimentId::Encode, prep, probs).f7;
        pt.f_after = run_experiment(ExperimentId::NoisyQec, prep, probs).f7;
      }
      pt.improved = pt.f_after > pt.f_before;
      rows.push_back(pt);
    }
  }
  return rows;
}

}  // namespace qec713
