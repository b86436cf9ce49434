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

#include "qec713/gates.hpp"

namespace qec713 {

Mat2 gate_matrix(Gate1Q g) {
  switch (g) {
    case Gate1Q::H:
      return {cplx(kInvSqrt2), cplx(kInvSqrt2), cplx(kInvSqrt2), cplx(-kInvSqrt2)};
    case Gate1Q::X:
      return pauli_x();
    case Gate1Q::Z:
      return pauli_z();
    case Gate1Q::S:
      return {cplx(1), cplx(0), cplx(0), cplx(0, 1)};
    case Gate1Q::Sdg:
      return {cplx(1), cplx(0), cplx(0), cplx(0, -1)};
  }
  return identity2();
}

std::string_view gate_name(Gate1Q g) {
  switch (g) {
    case Gate1Q::H: return "H";
    case Gate1Q::X: return "X";
    case Gate1Q::Z: return "Z";
    case Gate1Q::S: return "S";
    case Gate1Q::Sdg: return "SDG";
  }
  return "?";
}

}  // namespace qec713
