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
#include <complex>
#include <string_view>

namespace qec713 {

using cplx = std::complex<double>;

/// 2x2 unitary, row-major: m[0]=u00, m[1]=u01, m[2]=u10, m[3]=u11.
using Mat2 = std::array<cplx, 4>;

enum class Gate1Q { H, X, Z, S, Sdg };

Mat2 gate_matrix(Gate1Q g);
std::string_view gate_name(Gate1Q g);

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

inline Mat2 pauli_x() { return {cplx(0), cplx(1), cplx(1), cplx(0)}; }
inline Mat2 pauli_y() { return {cplx(0), cplx(0, -1), cplx(0, 1), cplx(0)}; }
inline Mat2 pauli_z() { return {cplx(1), cplx(0), cplx(0), cplx(-1)}; }
inline Mat2 identity2() { return {cplx(1), cplx(0), cplx(0), cplx(1)}; }

}  // namespace qec713
