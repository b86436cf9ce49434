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

#include "qec713/analysis.hpp"

using namespace qec713;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("fit recovers exact quadratics") {
  auto evaluator = [](const PauliProbs& p) { return 1.0 - 22.0 * p.px + 3.0 * p.px * p.px; };
  TruncatedPoly fit = fit_coefficients(evaluator);
  CHECK(fit.c[kOne] == Catch::Approx(1.0).margin(1e-10));
  CHECK(fit.c[kPx] == Catch::Approx(-22.0).margin(1e-9));
  CHECK(fit.c[kPx2] == Catch::Approx(3.0).epsilon(1e-6));
  for (int m : {kPy, kPz, kPxPy, kPy2, kPxPz, kPyPz, kPz2}) {
    CHECK(std::abs(fit.c[m]) < 1e-9);
  }

  TruncatedPoly flat = fit_coefficients([](const PauliProbs&) { return 1.0; });
  for (int m = 1; m < kNumMonomials; ++m) CHECK(std::abs(flat.c[m]) < 1e-12);

  std::vector<PauliProbs> tiny(default_fit_stencil().begin(), default_fit_stencil().begin() + 5);
  CHECK_THROWS_AS(fit_coefficients(evaluator, tiny), std::invalid_argument);
}

TEST_CASE("angular decomposition over the three-term basis") {
  auto samples_of = [](const std::function<double(double, double)>& f) {
    std::vector<AngularSample> out;
    for (const StatePrep& prep : default_angular_grid()) {
      out.push_back({prep.alpha, prep.beta, f(prep.alpha, prep.beta)});
    }
    return out;
  };

  AngularFit fit =
      angular_decompose(samples_of([](double a, double) { return 23.0 - 2.0 * std::cos(4 * a); }));
  CHECK(fit.coeff.a == Catch::Approx(23.0).margin(1e-10));
  CHECK(fit.coeff.b == Catch::Approx(-2.0).margin(1e-10));
  CHECK(std::abs(fit.coeff.c) < 1e-10);
  CHECK(fit.residual < 1e-10);

  AngularFit flat = angular_decompose(samples_of([](double, double) { return 7.0; }));
  CHECK(flat.coeff.a == Catch::Approx(7.0).margin(1e-12));
  CHECK(std::abs(flat.coeff.b) < 1e-12);

  AngularFit cb = angular_decompose(samples_of([](double a, double b) {
    double s = std::sin(2 * a);
    return 3.0 * std::cos(2 * b) * s * s;
  }));
  CHECK(std::abs(cb.coeff.a) < 1e-12);
  CHECK(std::abs(cb.coeff.b) < 1e-12);
  CHECK(cb.coeff.c == Catch::Approx(3.0).margin(1e-10));

  std::vector<AngularSample> degenerate = {{0, 0, 1}, {0, 0.1, 1}, {0, 0.2, 1}};
  CHECK_THROWS_AS(angular_decompose(degenerate), std::invalid_argument);
}

TEST_CASE("reference table covers the full appendix") {
  const ReferenceTable& table = ReferenceTable::builtin();
  CHECK(table.entries().size() == 18);

  const ReferenceEntry* a1 = table.find_label("A1");
  REQUIRE(a1 != nullptr);
  CHECK(a1->experiment == ExperimentId::Encode);
  CHECK(a1->poly.coeffs[kPx].a == -22.0);
  CHECK(a1->poly.coeffs[kPz].a == -23.0);
  CHECK(a1->poly.coeffs[kPz].b == 2.0);
  CHECK(a1->poly.coeffs[kPx2].a == 257.5);

  const ReferenceEntry* a12 = table.find(ExperimentId::NoisyQec, FidelityKind::SevenQubit);
  REQUIRE(a12 != nullptr);
  CHECK(a12->label == "A12");
  CHECK(a12->poly.coeffs[kPx].a == -55.0);
  CHECK(a12->poly.coeffs[kPy].a == -7.0);
  CHECK(a12->poly.coeffs[kPz].a == -9.0);

  const ReferenceEntry* a4 = table.find_label("A4");
  REQUIRE(a4 != nullptr);
  REQUIRE(a4->advisory.size() == 1);
  CHECK(a4->advisory[0] == kPxPz);

  // Perfect-QEC expansions exist only for the seven-qubit fidelity.
  CHECK(table.find(ExperimentId::PerfectQec, FidelityKind::OneQubit) == nullptr);

  // Every label is unique.
  for (const auto& e : table.entries()) {
    int count = 0;
    for (const auto& f : table.entries()) {
      if (f.label == e.label) ++count;
    }
    CHECK(count == 1);
  }
}

TEST_CASE("comparison reports") {
  const ReferenceTable& table = ReferenceTable::builtin();
  const ReferenceEntry* a8 = table.find(ExperimentId::PerfectQec, FidelityKind::SevenQubit);
  REQUIRE(a8 != nullptr);

  ComparisonReport same = compare_reference(a8->poly, table, 1e-12);
  CHECK(same.matched);
  CHECK(same.max_abs_diff == 0.0);
  CHECK(same.label == "A8");

  FidelityPolynomial off = a8->poly;
  off.coeffs[kPz].a += 0.5;
  ComparisonReport diff = compare_reference(off, table, 1e-6);
  CHECK_FALSE(diff.matched);
  CHECK(diff.max_abs_diff == Catch::Approx(0.5));

  // Advisory monomials never gate `matched`.
  const ReferenceEntry* a4 = table.find_label("A4");
  FidelityPolynomial adv = a4->poly;
  adv.coeffs[kPxPz].a += 100.0;
  ComparisonReport advrep = compare_reference(adv, table, 1e-9);
  CHECK(advrep.matched);

  FidelityPolynomial missing;
  missing.experiment = ExperimentId::PerfectQec;
  missing.kind = FidelityKind::OneQubit;
  CHECK_THROWS_AS(compare_reference(missing, table, 1e-9), std::out_of_range);
}

TEST_CASE("first-order region scan reproduces the benefit/loss corners") {
  std::vector<RegionPoint> rows =
      region_scan({0.0, 0.0}, {1e-5}, 1e-4, {1e-4}, RegionBackend::ReferenceFirstOrder);
  REQUIRE(rows.size() == 1);
  // Losses from the transcribed first-order terms at alpha = 0:
  // encode 22 px + 25 py + 21 pz, post-QEC 55 px + 7 py + 7 pz.
  CHECK(1.0 - rows[0].f_before == Catch::Approx(4.82e-3).margin(1e-12));
  CHECK(1.0 - rows[0].f_after == Catch::Approx(1.95e-3).margin(1e-12));
  CHECK(rows[0].improved);

  rows = region_scan({0.0, 0.0}, {1e-4}, 1e-5, {1e-5}, RegionBackend::ReferenceFirstOrder);
  REQUIRE(rows.size() == 1);
  CHECK(1.0 - rows[0].f_before == Catch::Approx(2.66e-3).margin(1e-12));
  CHECK(1.0 - rows[0].f_after == Catch::Approx(5.64e-3).margin(1e-12));
  CHECK_FALSE(rows[0].improved);

  std::vector<RegionPoint> zero =
      region_scan({0.0, 0.0}, {0.0}, 0.0, {0.0}, RegionBackend::ReferenceFirstOrder);
  CHECK(zero[0].f_before == 1.0);
  CHECK(zero[0].f_after == 1.0);
  CHECK_FALSE(zero[0].improved);
}

TEST_CASE("fit idempotence on a reference polynomial") {
  const ReferenceTable& table = ReferenceTable::builtin();
  const ReferenceEntry* a1 = table.find(ExperimentId::Encode, FidelityKind::SevenQubit);
  REQUIRE(a1 != nullptr);
  StatePrep prep{kPi / 8, kPi / 4};
  TruncatedPoly truth = a1->poly.at(prep);
  TruncatedPoly fit = fit_coefficients([&](const PauliProbs& p) { return truth.eval(p); });
  for (int m = 0; m < kNumMonomials; ++m) {
    CHECK(fit.c[m] == Catch::Approx(truth.c[m]).margin(1e-6));
  }
}

TEST_CASE("kind names") {
  CHECK(kind_name(FidelityKind::SevenQubit) == "7-qubit");
  CHECK(kind_name(FidelityKind::OneQubit) == "1-qubit");
}
