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

#include "qec713/perturb.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "qec713/parallel.hpp"

namespace qec713 {

std::string_view monomial_name(Monomial m) {
  switch (m) {
    case kOne: return "1";
    case kPx: return "px";
    case kPy: return "py";
    case kPz: return "pz";
    case kPx2: return "px2";
    case kPxPy: return "pxpy";
    case kPy2: return "py2";
    case kPxPz: return "pxpz";
    case kPyPz: return "pypz";
    case kPz2: return "pz2";
    default: return "?";
  }
}

namespace {

constexpr int kDegree[kNumMonomials] = {0, 1, 1, 1, 2, 2, 2, 2, 2, 2};

// Product of two degree-1 monomials.
int mono_product(int a, int b) {
  if (a > b) std::swap(a, b);
  if (a == kPx) return b == kPx ? kPx2 : (b == kPy ? kPxPy : kPxPz);
  if (a == kPy) return b == kPy ? kPy2 : kPyPz;
  return kPz2;
}

Monomial pauli_monomial(Pauli p) {
  switch (p) {
    case Pauli::X: return kPx;
    case Pauli::Y: return kPy;
    case Pauli::Z: return kPz;
  }
  return kPx;
}

Monomial pauli_pair_monomial(Pauli p, Pauli q) {
  return static_cast<Monomial>(mono_product(pauli_monomial(p), pauli_monomial(q)));
}

}  // namespace

TruncatedPoly TruncatedPoly::constant(double v) {
  TruncatedPoly p;
  p.c[kOne] = v;
  return p;
}

TruncatedPoly TruncatedPoly::prob_sum() {
  TruncatedPoly p;
  p.c[kPx] = p.c[kPy] = p.c[kPz] = 1.0;
  return p;
}

TruncatedPoly TruncatedPoly::zero_weight(int n) {
  // (1 - s)^n truncated at degree 2, s = px + py + pz.
  TruncatedPoly p;
  const double n2 = 0.5 * n * (n - 1);
  p.c[kOne] = 1.0;
  p.c[kPx] = p.c[kPy] = p.c[kPz] = -n;
  p.c[kPx2] = p.c[kPy2] = p.c[kPz2] = n2;
  p.c[kPxPy] = p.c[kPxPz] = p.c[kPyPz] = 2.0 * n2;
  return p;
}

TruncatedPoly TruncatedPoly::monomial(Monomial m, double v) {
  TruncatedPoly p;
  p.c[m] = v;
  return p;
}

TruncatedPoly& TruncatedPoly::operator+=(const TruncatedPoly& o) {
  for (int i = 0; i < kNumMonomials; ++i) c[i] += o.c[i];
  return *this;
}

TruncatedPoly& TruncatedPoly::operator-=(const TruncatedPoly& o) {
  for (int i = 0; i < kNumMonomials; ++i) c[i] -= o.c[i];
  return *this;
}

TruncatedPoly& TruncatedPoly::operator*=(double s) {
  for (double& v : c) v *= s;
  return *this;
}

TruncatedPoly TruncatedPoly::mul(const TruncatedPoly& o) const {
  TruncatedPoly out;
  for (int i = 0; i < kNumMonomials; ++i) {
    if (c[i] == 0.0) continue;
    for (int j = 0; j < kNumMonomials; ++j) {
      if (o.c[j] == 0.0) continue;
      int deg = kDegree[i] + kDegree[j];
      if (deg > 2) continue;
      int target;
      if (i == kOne) target = j;
      else if (j == kOne) target = i;
      else target = mono_product(i, j);
      out.c[target] += c[i] * o.c[j];
    }
  }
  return out;
}

TruncatedPoly TruncatedPoly::inverse() const {
  const double c0 = c[kOne];
  if (c0 == 0.0) throw std::invalid_argument("TruncatedPoly: inverse needs a nonzero constant term");
  TruncatedPoly u = *this;
  u.c[kOne] = 0.0;
  u *= 1.0 / c0;
  TruncatedPoly out = TruncatedPoly::constant(1.0);
  out -= u;
  out += u.mul(u);
  out *= 1.0 / c0;
  return out;
}

double TruncatedPoly::eval(const PauliProbs& p) const {
  return c[kOne] + c[kPx] * p.px + c[kPy] * p.py + c[kPz] * p.pz + c[kPx2] * p.px * p.px +
         c[kPxPy] * p.px * p.py + c[kPy2] * p.py * p.py + c[kPxPz] * p.px * p.pz +
         c[kPyPz] * p.py * p.pz + c[kPz2] * p.pz * p.pz;
}

double poly_eval(const TruncatedPoly& p, const PauliProbs& probs) { return p.eval(probs); }

int count_error_sites(const Circuit& c) {
  int n = 0;
  for (const Instruction& ins : c.instructions) {
    if (!ins.noisy) continue;
    if (ins.kind == Instruction::Kind::Gate1Q) n += 1;
    else if (ins.kind == Instruction::Kind::Cnot) n += 2;
  }
  return n;
}

namespace {

TruncatedPoly single_weight(int total_sites, Pauli p) {
  // p_P (1-s)^{L-1} truncated: the degree-2 tail couples p_P to every
  // first-order variable.
  TruncatedPoly w = TruncatedPoly::monomial(pauli_monomial(p));
  const double tail = -(total_sites - 1.0);
  const int base = pauli_monomial(p);
  for (int other : {kPx, kPy, kPz}) {
    w.c[mono_product(base, other)] += tail;
  }
  return w;
}

constexpr Pauli kPaulis[3] = {Pauli::X, Pauli::Y, Pauli::Z};

}  // namespace

void enumerate_configs(const Circuit& c,
                       const std::function<void(const TruncatedPoly&,
                                                const std::vector<ErrorLocation>&)>& fn) {
  std::vector<ErrorLocation> locs;
  for (int idx = 0; idx < static_cast<int>(c.instructions.size()); ++idx) {
    const Instruction& ins = c.instructions[idx];
    if (!ins.noisy) continue;
    if (ins.kind == Instruction::Kind::Gate1Q) {
      locs.push_back({idx, ErrorLocation::Site::Single, Pauli::X});
    } else if (ins.kind == Instruction::Kind::Cnot) {
      locs.push_back({idx, ErrorLocation::Site::Control, Pauli::X});
      locs.push_back({idx, ErrorLocation::Site::Target, Pauli::X});
    }
  }
  const int L = static_cast<int>(locs.size());
  fn(TruncatedPoly::zero_weight(L), {});
  for (int i = 0; i < L; ++i) {
    for (Pauli p : kPaulis) {
      ErrorLocation e = locs[i];
      e.pauli = p;
      fn(single_weight(L, p), {e});
    }
  }
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      for (Pauli p : kPaulis) {
        for (Pauli q : kPaulis) {
          ErrorLocation a = locs[i], b = locs[j];
          a.pauli = p;
          b.pauli = q;
          fn(TruncatedPoly::monomial(pauli_pair_monomial(p, q)), {a, b});
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Statevector propagation engine.

namespace {

using Vec = std::vector<cplx>;

void sv_apply_1q(Vec& v, const Mat2& u, std::uint64_t m) {
  const std::size_t dim = v.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & m) continue;
    cplx a = v[i], b = v[i | m];
    v[i] = u[0] * a + u[1] * b;
    v[i | m] = u[2] * a + u[3] * b;
  }
}

void sv_apply_cnot(Vec& v, std::uint64_t cm, std::uint64_t tm) {
  const std::size_t dim = v.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & cm) && !(i & tm)) std::swap(v[i], v[i | tm]);
  }
}

void sv_apply_pauli(Vec& v, Pauli p, std::uint64_t m) {
  const std::size_t dim = v.size();
  switch (p) {
    case Pauli::X:
      for (std::size_t i = 0; i < dim; ++i) {
        if (!(i & m)) std::swap(v[i], v[i | m]);
      }
      break;
    case Pauli::Z:
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & m) v[i] = -v[i];
      }
      break;
    case Pauli::Y:
      // X then Z; the dropped global phase never reaches an observable.
      for (std::size_t i = 0; i < dim; ++i) {
        if (!(i & m)) {
          cplx a = v[i];
          v[i] = -v[i | m];
          v[i | m] = a;
        }
      }
      break;
  }
}

void sv_apply_pauli_string(Vec& v, std::uint64_t xmask, std::uint64_t zmask) {
  const std::size_t dim = v.size();
  auto sign_of = [&](std::size_t i) { return (std::popcount(i & zmask) & 1) ? -1.0 : 1.0; };
  if (xmask == 0) {
    for (std::size_t i = 0; i < dim; ++i) v[i] *= sign_of(i);
    return;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t j = i ^ xmask;
    if (j < i) continue;
    cplx a = v[i], b = v[j];
    v[j] = sign_of(i) * a;
    v[i] = sign_of(j) * b;
  }
}

double sv_norm_sq(const Vec& v) {
  double s = 0.0;
  for (const cplx& a : v) s += std::norm(a);
  return s;
}

cplx sv_dot(const Vec& a, const Vec& b) {
  cplx s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

constexpr double kKillThreshold = 1e-9;

struct Step {
  enum class Op {
    MainGate,
    MainCnot,
    SideBegin,
    SideGate,
    SideCnot,
    SidePostselect,   // in place on the side register
    Merge,            // drop the side verify bit, tensor side into main
    JointPostselect,  // contract one main qubit (bit position), rescale
  };
  Op op;
  Mat2 u{};
  std::uint64_t m1 = 0, m2 = 0;
  Basis basis = Basis::Z;
  int outcome = 0;
  int bit = 0;             // JointPostselect: bit position to contract
  int side_bits = 0;       // SideBegin
  double amp_scale = 1.0;  // JointPostselect
};

struct Site {
  int step;  // error applies after this step
  bool on_side;
  std::uint64_t mask;
};

struct Program {
  std::vector<Step> steps;
  std::vector<Site> sites;
};

struct PropState {
  Vec main;
  Vec side;
  bool alive = true;
};

bool exec_step(PropState& st, const Step& s) {
  switch (s.op) {
    case Step::Op::MainGate:
      sv_apply_1q(st.main, s.u, s.m1);
      return true;
    case Step::Op::MainCnot:
      sv_apply_cnot(st.main, s.m1, s.m2);
      return true;
    case Step::Op::SideBegin:
      st.side.assign(std::size_t{1} << s.side_bits, cplx(0));
      st.side[0] = cplx(1);
      return true;
    case Step::Op::SideGate:
      sv_apply_1q(st.side, s.u, s.m1);
      return true;
    case Step::Op::SideCnot:
      sv_apply_cnot(st.side, s.m1, s.m2);
      return true;
    case Step::Op::SidePostselect: {
      const std::uint64_t m = s.m1;
      if (s.basis == Basis::Z) {
        const std::uint64_t want = s.outcome ? m : 0;
        for (std::size_t i = 0; i < st.side.size(); ++i) {
          if ((i & m) != want) st.side[i] = cplx(0);
        }
      } else {
        const double sg = s.outcome == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < st.side.size(); ++i) {
          if (i & m) continue;
          cplx avg = 0.5 * (st.side[i] + sg * st.side[i | m]);
          st.side[i] = avg;
          st.side[i | m] = sg * avg;
        }
      }
      return sv_norm_sq(st.side) > kKillThreshold;
    }
    case Step::Op::Merge: {
      // Verify qubit is the lowest side bit and sits in |0>.
      const std::size_t half = st.side.size() >> 1;
      Vec merged(st.main.size() * half);
      for (std::size_t i = 0; i < st.main.size(); ++i) {
        for (std::size_t k = 0; k < half; ++k) {
          merged[i * half + k] = st.main[i] * st.side[k << 1];
        }
      }
      st.main = std::move(merged);
      st.side.clear();
      return true;
    }
    case Step::Op::JointPostselect: {
      const int p = s.bit;
      const std::size_t low_mask = (std::size_t{1} << p) - 1;
      Vec out(st.main.size() >> 1);
      if (s.basis == Basis::Z) {
        const std::size_t sel = static_cast<std::size_t>(s.outcome) << p;
        for (std::size_t k = 0; k < out.size(); ++k) {
          std::size_t idx = ((k & ~low_mask) << 1) | sel | (k & low_mask);
          out[k] = st.main[idx] * s.amp_scale;
        }
      } else {
        const double sg = s.outcome == 0 ? 1.0 : -1.0;
        const double f = kInvSqrt2 * s.amp_scale;
        for (std::size_t k = 0; k < out.size(); ++k) {
          std::size_t i0 = ((k & ~low_mask) << 1) | (k & low_mask);
          out[k] = (st.main[i0] + sg * st.main[i0 | (std::size_t{1} << p)]) * f;
        }
      }
      st.main = std::move(out);
      return sv_norm_sq(st.main) > kKillThreshold;
    }
  }
  return true;
}

void apply_site_error(PropState& st, const Site& site, Pauli p) {
  sv_apply_pauli(site.on_side ? st.side : st.main, p, site.mask);
}

// --- Program construction --------------------------------------------------

constexpr int kDataQubits = 7;

std::uint64_t mask_for(int q, int width) { return std::uint64_t{1} << (width - q); }

void append_main_circuit(Program& prog, const Circuit& c, bool with_sites) {
  for (const Instruction& ins : c.instructions) {
    Step s;
    switch (ins.kind) {
      case Instruction::Kind::Gate1Q:
        s.op = Step::Op::MainGate;
        s.u = gate_matrix(ins.gate);
        s.m1 = mask_for(ins.q, c.width);
        prog.steps.push_back(s);
        if (with_sites && ins.noisy) {
          prog.sites.push_back({static_cast<int>(prog.steps.size()) - 1, false, s.m1});
        }
        break;
      case Instruction::Kind::Cnot:
        s.op = Step::Op::MainCnot;
        s.m1 = mask_for(ins.q, c.width);
        s.m2 = mask_for(ins.q2, c.width);
        prog.steps.push_back(s);
        if (with_sites && ins.noisy) {
          prog.sites.push_back({static_cast<int>(prog.steps.size()) - 1, false, s.m1});
          prog.sites.push_back({static_cast<int>(prog.steps.size()) - 1, false, s.m2});
        }
        break;
      default:
        throw std::invalid_argument("perturb: unsupported instruction in a unitary segment");
    }
  }
}

void append_extraction(Program& prog, const Circuit& prep, const Circuit& check) {
  // Shor-state preparation on the side register. The prep circuit must
  // discard exactly its last qubit (the verification qubit).
  const int sw = prep.width;
  {
    Step s;
    s.op = Step::Op::SideBegin;
    s.side_bits = sw;
    prog.steps.push_back(s);
  }
  struct LastMeas {
    Basis basis;
    int outcome;
  };
  std::vector<std::optional<LastMeas>> last_meas(sw + 1);
  bool discarded = false;
  for (const Instruction& ins : prep.instructions) {
    switch (ins.kind) {
      case Instruction::Kind::Gate1Q: {
        Step s;
        s.op = Step::Op::SideGate;
        s.u = gate_matrix(ins.gate);
        s.m1 = mask_for(ins.q, sw);
        prog.steps.push_back(s);
        if (ins.noisy) prog.sites.push_back({static_cast<int>(prog.steps.size()) - 1, true, s.m1});
        break;
      }
      case Instruction::Kind::Cnot: {
        Step s;
        s.op = Step::Op::SideCnot;
        s.m1 = mask_for(ins.q, sw);
        s.m2 = mask_for(ins.q2, sw);
        prog.steps.push_back(s);
        if (ins.noisy) {
          prog.sites.push_back({static_cast<int>(prog.steps.size()) - 1, true, s.m1});
          prog.sites.push_back({static_cast<int>(prog.steps.size()) - 1, true, s.m2});
        }
        break;
      }
      case Instruction::Kind::MeasurePostselect: {
        Step s;
        s.op = Step::Op::SidePostselect;
        s.m1 = mask_for(ins.q, sw);
        s.basis = ins.basis;
        s.outcome = ins.outcome;
        prog.steps.push_back(s);
        last_meas[ins.q] = LastMeas{ins.basis, ins.outcome};
        break;
      }
      case Instruction::Kind::PrepZero: {
        // Exact on a just-postselected (hence disentangled) qubit: rotate the
        // known state back to |0> with noiseless gates.
        auto& lm = last_meas[ins.q];
        if (lm) {
          if (lm->basis == Basis::X) {
            Step s;
            s.op = Step::Op::SideGate;
            s.u = gate_matrix(Gate1Q::H);
            s.m1 = mask_for(ins.q, sw);
            prog.steps.push_back(s);
          }
          if (lm->outcome == 1) {
            Step s;
            s.op = Step::Op::SideGate;
            s.u = gate_matrix(Gate1Q::X);
            s.m1 = mask_for(ins.q, sw);
            prog.steps.push_back(s);
          }
          lm.reset();
        }
        break;
      }
      case Instruction::Kind::Discard:
        if (ins.q != sw)
          throw std::invalid_argument("perturb: prep circuit must discard its last qubit");
        discarded = true;
        break;
    }
  }
  if (!discarded) throw std::invalid_argument("perturb: prep circuit must discard the verify qubit");
  {
    Step s;
    s.op = Step::Op::Merge;
    prog.steps.push_back(s);
  }

  // Coupling and measurement on the joint register (7 data + prep.width - 1
  // ancilla qubits). Labels shrink as measured ancillas are contracted.
  std::vector<int> live;
  for (int q = 1; q <= kDataQubits + sw - 1; ++q) live.push_back(q);
  auto bit_of = [&](int label) {
    for (std::size_t i = 0; i < live.size(); ++i) {
      if (live[i] == label) return static_cast<int>(live.size() - 1 - i);
    }
    throw std::invalid_argument("perturb: check circuit touches a contracted qubit");
  };
  std::vector<std::optional<LastMeas>> pending(check.width + 1);
  int rescale_countdown = 0;
  int n_meas = 0;
  for (const Instruction& ins : check.instructions) {
    if (ins.kind == Instruction::Kind::MeasurePostselect) ++n_meas;
  }
  if (n_meas != 4)
    throw std::invalid_argument("perturb: a syndrome check must measure exactly four ancillas");
  for (const Instruction& ins : check.instructions) {
    switch (ins.kind) {
      case Instruction::Kind::Cnot: {
        Step s;
        s.op = Step::Op::MainCnot;
        s.m1 = std::uint64_t{1} << bit_of(ins.q);
        s.m2 = std::uint64_t{1} << bit_of(ins.q2);
        prog.steps.push_back(s);
        if (ins.noisy) {
          prog.sites.push_back({static_cast<int>(prog.steps.size()) - 1, false, s.m1});
          prog.sites.push_back({static_cast<int>(prog.steps.size()) - 1, false, s.m2});
        }
        break;
      }
      case Instruction::Kind::Gate1Q: {
        Step s;
        s.op = Step::Op::MainGate;
        s.u = gate_matrix(ins.gate);
        s.m1 = std::uint64_t{1} << bit_of(ins.q);
        prog.steps.push_back(s);
        if (ins.noisy) prog.sites.push_back({static_cast<int>(prog.steps.size()) - 1, false, s.m1});
        break;
      }
      case Instruction::Kind::MeasurePostselect:
        pending[ins.q] = LastMeas{ins.basis, ins.outcome};
        break;
      case Instruction::Kind::Discard: {
        if (!pending[ins.q])
          throw std::invalid_argument("perturb: check circuit discards an unmeasured qubit");
        Step s;
        s.op = Step::Op::JointPostselect;
        s.basis = pending[ins.q]->basis;
        s.outcome = pending[ins.q]->outcome;
        s.bit = bit_of(ins.q);
        ++rescale_countdown;
        // The all-zero outcome of the four-qubit Shor measurement has a
        // noiseless probability of 1/8; rescale once per completed check.
        if (rescale_countdown == n_meas) s.amp_scale = std::sqrt(8.0);
        prog.steps.push_back(s);
        live.erase(std::find(live.begin(), live.end(), ins.q));
        break;
      }
      default:
        throw std::invalid_argument("perturb: unsupported instruction in a check circuit");
    }
  }
  if (live.size() != kDataQubits)
    throw std::invalid_argument("perturb: check circuit must contract all ancilla qubits");
}

// --- Scoring ---------------------------------------------------------------

std::uint64_t mask7(int q) { return std::uint64_t{1} << (kDataQubits - q); }

std::uint64_t gen_mask(int gen) {
  std::uint64_t m = 0;
  for (int q : kStabilizerSupports[gen]) m |= mask7(q);
  return m;
}

struct ScoreSpec {
  Vec ref7;                       // ideally processed seven-qubit state
  std::array<cplx, 2> ref1{};     // ideal logical state
  std::vector<Step> decode_steps; // noiseless decoder, main-register form
  bool recovery = false;          // apply perfect QEC before comparing
};

struct BranchScore {
  double f7 = 0.0;
  double norm_sq = 0.0;
  std::array<cplx, 4> m{};  // decoded qubit-1 reduced matrix, row-major
};

std::array<cplx, 4> reduce_decoded(Vec w, const std::vector<Step>& decode_steps) {
  PropState tmp;
  tmp.main = std::move(w);
  for (const Step& s : decode_steps) exec_step(tmp, s);
  const std::size_t env = tmp.main.size() >> 1;
  std::array<cplx, 4> m{};
  for (std::size_t e = 0; e < env; ++e) {
    cplx a0 = tmp.main[e];
    cplx a1 = tmp.main[env + e];
    m[0] += a0 * std::conj(a0);
    m[1] += a0 * std::conj(a1);
    m[2] += a1 * std::conj(a0);
    m[3] += a1 * std::conj(a1);
  }
  return m;
}

void project_generator(Vec& w, std::uint64_t xmask, std::uint64_t zmask, int sign) {
  Vec t = w;
  sv_apply_pauli_string(t, xmask, zmask);
  const double s = sign >= 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.5 * (w[i] + s * t[i]);
}

BranchScore score_branch(const Vec& v, const ScoreSpec& spec) {
  BranchScore out;
  out.norm_sq = sv_norm_sq(v);
  if (out.norm_sq < kKillThreshold) {
    out.norm_sq = 0.0;
    return out;
  }
  if (!spec.recovery) {
    out.f7 = std::norm(sv_dot(spec.ref7, v));
    out.m = reduce_decoded(v, spec.decode_steps);
    return out;
  }
  for (int s = 0; s < 8; ++s) {
    Vec ws = v;
    for (int g = 0; g < 3; ++g) {
      project_generator(ws, 0, gen_mask(g), ((s >> (2 - g)) & 1) ? -1 : +1);
    }
    if (sv_norm_sq(ws) < 1e-24) continue;
    for (int t = 0; t < 8; ++t) {
      Vec w = ws;
      for (int g = 0; g < 3; ++g) {
        project_generator(w, gen_mask(g), 0, ((t >> (2 - g)) & 1) ? -1 : +1);
      }
      if (sv_norm_sq(w) < 1e-24) continue;
      std::uint64_t xm = s ? mask7(s) : 0;
      std::uint64_t zm = t ? mask7(t) : 0;
      if (xm || zm) sv_apply_pauli_string(w, xm, zm);
      out.f7 += std::norm(sv_dot(spec.ref7, w));
      std::array<cplx, 4> m = reduce_decoded(std::move(w), spec.decode_steps);
      for (int k = 0; k < 4; ++k) out.m[k] += m[k];
    }
  }
  return out;
}

// --- Enumeration over a program ---------------------------------------------

struct Accumulator {
  TruncatedPoly n7;
  TruncatedPoly d;
  std::array<std::array<cplx, 4>, kNumMonomials> m{};

  void add(const TruncatedPoly& w, const BranchScore& s) {
    for (int k = 0; k < kNumMonomials; ++k) {
      if (w.c[k] == 0.0) continue;
      n7.c[k] += w.c[k] * s.f7;
      d.c[k] += w.c[k] * s.norm_sq;
      for (int e = 0; e < 4; ++e) m[k][e] += w.c[k] * s.m[e];
    }
  }

  void merge(const Accumulator& o) {
    n7 += o.n7;
    d += o.d;
    for (int k = 0; k < kNumMonomials; ++k) {
      for (int e = 0; e < 4; ++e) m[k][e] += o.m[k][e];
    }
  }
};

bool propagate(PropState& st, const Program& prog, int from_step) {
  for (std::size_t s = from_step; s < prog.steps.size(); ++s) {
    if (!exec_step(st, prog.steps[s])) return false;
  }
  return true;
}

/// Runs the full order<=2 enumeration. For every live configuration calls
/// sink(weight, final main vector) — dead (postselection-annihilated)
/// branches contribute exactly zero and are skipped. Configurations are
/// processed per first-error site; `site_done` merges per-site partials in
/// ascending site order so accumulation stays deterministic.
template <typename Sink>
void enumerate_program(const Program& prog, const PropState& initial, int max_order,
                       const std::function<Sink()>& make_sink,
                       const std::function<void(std::size_t, Sink&)>& site_done,
                       Sink& zero_sink) {
  const int L = static_cast<int>(prog.sites.size());
  // Ideal pass, with a snapshot after every site-bearing step.
  std::vector<PropState> snapshot(prog.steps.size());
  {
    PropState st = initial;
    std::size_t next_site = 0;
    for (std::size_t s = 0; s < prog.steps.size(); ++s) {
      if (!exec_step(st, prog.steps[s]))
        throw std::runtime_error("perturb: noiseless path annihilated by postselection");
      bool has_site = false;
      while (next_site < prog.sites.size() &&
             prog.sites[next_site].step == static_cast<int>(s)) {
        has_site = true;
        ++next_site;
      }
      if (has_site) snapshot[s] = st;
    }
    zero_sink.add_config(TruncatedPoly::zero_weight(L), st.main);
  }
  if (L == 0) return;

  std::vector<Sink> partials;
  partials.reserve(L);
  for (int i = 0; i < L; ++i) partials.push_back(make_sink());

  parallel_chunked(
      static_cast<std::size_t>(L), 1,
      [&](std::size_t chunk, std::size_t begin, std::size_t) {
        const int l = static_cast<int>(begin);
        Sink& sink = partials[chunk];
        const Site& first = prog.sites[l];
        for (Pauli p : kPaulis) {
          PropState cur = snapshot[first.step];
          apply_site_error(cur, first, p);
          if (max_order >= 2) {
            // Second error on the same step (the partner half of a CNOT).
            for (int m = l + 1; m < L && prog.sites[m].step == first.step; ++m) {
              for (Pauli q : kPaulis) {
                PropState br = cur;
                apply_site_error(br, prog.sites[m], q);
                if (propagate(br, prog, first.step + 1)) {
                  sink.add_config(TruncatedPoly::monomial(pauli_pair_monomial(p, q)), br.main);
                }
              }
            }
          }
          // Walk to the end, branching a second error at each later site.
          bool alive = true;
          std::size_t next = first.step + 1;
          int m = l + 1;
          while (m < L && prog.sites[m].step == first.step) ++m;
          for (; next < prog.steps.size(); ++next) {
            if (!exec_step(cur, prog.steps[next])) {
              alive = false;
              break;
            }
            if (max_order >= 2) {
              for (; m < L && prog.sites[m].step == static_cast<int>(next); ++m) {
                for (Pauli q : kPaulis) {
                  PropState br = cur;
                  apply_site_error(br, prog.sites[m], q);
                  if (propagate(br, prog, static_cast<int>(next) + 1)) {
                    sink.add_config(TruncatedPoly::monomial(pauli_pair_monomial(p, q)), br.main);
                  }
                }
              }
            } else {
              while (m < L && prog.sites[m].step == static_cast<int>(next)) ++m;
            }
          }
          if (alive) sink.add_config(single_weight(L, p), cur.main);
        }
      },
      [&](std::size_t chunk) { site_done(chunk, partials[chunk]); });
}

struct AccumSink {
  const ScoreSpec* spec;
  Accumulator acc;

  void add_config(const TruncatedPoly& w, const Vec& final_main) {
    acc.add(w, score_branch(final_main, *spec));
  }
};

struct Branch {
  TruncatedPoly weight;
  int degree;
  Vec vec;
  std::array<cplx, 4> m;
};

struct CollectSink {
  const ScoreSpec* spec;
  std::vector<Branch> branches;

  void add_config(const TruncatedPoly& w, const Vec& final_main) {
    double nrm = sv_norm_sq(final_main);
    if (nrm < kKillThreshold) return;
    Branch b;
    b.weight = w;
    b.degree = w.c[kOne] != 0.0 ? 0 : (w.c[kPx] != 0.0 || w.c[kPy] != 0.0 || w.c[kPz] != 0.0 ? 1 : 2);
    b.vec = final_main;
    b.m = reduce_decoded(final_main, spec->decode_steps);
    branches.push_back(std::move(b));
  }
};

// --- Experiment assembly -----------------------------------------------------

PropState initial_state(const StatePrep& prep) {
  PropState st;
  st.main.assign(std::size_t{1} << kDataQubits, cplx(0));
  st.main[0] = cplx(std::cos(prep.alpha));
  st.main[std::size_t{1} << (kDataQubits - 1)] = std::polar(std::sin(prep.alpha), prep.beta);
  return st;
}

std::vector<Step> decoder_steps(const Circuit& encoder) {
  Program p;
  append_main_circuit(p, encoder.reversed_inverse(), false);
  return std::move(p.steps);
}

Vec ideal_reference(const StatePrep& prep, const Circuit& encoder, const Circuit* gate) {
  Program p;
  append_main_circuit(p, encoder, false);
  if (gate) append_main_circuit(p, *gate, false);
  PropState st = initial_state(prep);
  propagate(st, p, 0);
  return st.main;
}

std::array<cplx, 2> logical_reference(const StatePrep& prep, ExperimentId id) {
  PureState one = pure_state(prep);
  switch (id) {
    case ExperimentId::GateH:
    case ExperimentId::PerfectQecH:
      one = apply_mat2(gate_matrix(Gate1Q::H), one);
      break;
    case ExperimentId::GateX:
    case ExperimentId::PerfectQecX:
    case ExperimentId::NoisyQecAfterX:
      one = apply_mat2(pauli_x(), one);
      break;
    case ExperimentId::GateP:
    case ExperimentId::PerfectQecP:
      one = apply_mat2(gate_matrix(Gate1Q::S), one);
      break;
    default:
      break;
  }
  return {one.amplitudes[0], one.amplitudes[1]};
}

std::optional<LogicalGate> gate_of(ExperimentId id) {
  switch (id) {
    case ExperimentId::GateH:
    case ExperimentId::PerfectQecH:
      return LogicalGate::H;
    case ExperimentId::GateX:
    case ExperimentId::PerfectQecX:
    case ExperimentId::NoisyQecAfterX:
      return LogicalGate::X;
    case ExperimentId::GateP:
    case ExperimentId::PerfectQecP:
      return LogicalGate::P;
    default:
      return std::nullopt;
  }
}

void append_round(Program& prog, const RoundCircuits& rc, const std::vector<CheckStep>& schedule) {
  for (const CheckStep& step : schedule) {
    const Circuit& prep =
        step.kind == CheckKind::BitFlip ? rc.shor_prep_bit : rc.shor_prep_phase;
    const Circuit& check = step.kind == CheckKind::BitFlip ? rc.bit_checks[step.gen]
                                                           : rc.phase_checks[step.gen];
    append_extraction(prog, prep, check);
  }
}

TruncatedPoly normalized_ratio(const TruncatedPoly& n, const TruncatedPoly& d) {
  TruncatedPoly f = n.div(d);
  if (std::abs(f.c[kOne] - 1.0) > 1e-9)
    throw std::runtime_error("perturb: noiseless fidelity is not 1");
  f.c[kOne] = 1.0;  // analytically exact for the noiseless run
  return f;
}

PolyPair assemble(const Accumulator& acc, const std::array<cplx, 2>& ref1) {
  TruncatedPoly f1n;
  for (int k = 0; k < kNumMonomials; ++k) {
    cplx v = std::conj(ref1[0]) * acc.m[k][0] * ref1[0] + std::conj(ref1[0]) * acc.m[k][1] * ref1[1] +
             std::conj(ref1[1]) * acc.m[k][2] * ref1[0] + std::conj(ref1[1]) * acc.m[k][3] * ref1[1];
    f1n.c[k] = v.real();
  }
  PolyPair out;
  out.f7 = normalized_ratio(acc.n7, acc.d);
  out.f1 = normalized_ratio(f1n, acc.d);
  out.acceptance = acc.d;
  if (std::abs(out.acceptance.c[kOne] - 1.0) > 1e-9)
    throw std::runtime_error("perturb: noiseless acceptance is not 1");
  out.acceptance.c[kOne] = 1.0;
  return out;
}

PolyPair single_ensemble(ExperimentId id, const StatePrep& prep, const PerturbOptions& opts,
                         const ExperimentCircuits& circuits) {
  Program prog;
  append_main_circuit(prog, circuits.encoder, true);
  const auto g = gate_of(id);
  Circuit gate_circuit;
  if (g) {
    gate_circuit = logical_gate_circuit(*g);
    append_main_circuit(prog, gate_circuit, true);
  }
  int rounds = 0;
  if (id == ExperimentId::NoisyQec || id == ExperimentId::NoisyQecAfterX) rounds = 1;
  if (id == ExperimentId::NoisyQecTwice) rounds = 2;
  const auto schedule = default_round_schedule();
  for (int r = 0; r < rounds; ++r) append_round(prog, circuits.round, schedule);

  ScoreSpec spec;
  spec.ref7 = ideal_reference(prep, circuits.encoder, g ? &gate_circuit : nullptr);
  spec.ref1 = logical_reference(prep, id);
  spec.decode_steps = decoder_steps(circuits.encoder);
  spec.recovery = id == ExperimentId::PerfectQec || id == ExperimentId::PerfectQecH ||
                  id == ExperimentId::PerfectQecX || id == ExperimentId::PerfectQecP;

  AccumSink zero{&spec, {}};
  Accumulator total;
  std::function<AccumSink()> make = [&] { return AccumSink{&spec, {}}; };
  std::function<void(std::size_t, AccumSink&)> done = [&](std::size_t, AccumSink& s) {
    total.merge(s.acc);
  };
  enumerate_program<AccumSink>(prog, initial_state(prep), opts.max_order, make, done, zero);
  total.merge(zero.acc);
  return assemble(total, spec.ref1);
}

std::vector<Branch> collect_branches(const Program& prog, const PropState& init, int max_order,
                                     const ScoreSpec& spec) {
  CollectSink zero{&spec, {}};
  std::vector<Branch> all;
  std::function<CollectSink()> make = [&] { return CollectSink{&spec, {}}; };
  std::function<void(std::size_t, CollectSink&)> done = [&](std::size_t, CollectSink& s) {
    for (Branch& b : s.branches) all.push_back(std::move(b));
  };
  enumerate_program<CollectSink>(prog, init, max_order, make, done, zero);
  // Zero config first, then per-site branches (already appended in order).
  std::vector<Branch> out;
  out.reserve(all.size() + zero.branches.size());
  for (Branch& b : zero.branches) out.push_back(std::move(b));
  for (Branch& b : all) out.push_back(std::move(b));
  return out;
}

PolyPair cross_ensemble(ExperimentId id, const StatePrep& prep, const PerturbOptions& opts,
                        const ExperimentCircuits& circuits) {
  const LogicalGate g = *gate_of(id);
  const Circuit gate_noisy = logical_gate_circuit(g);
  Circuit gate_ideal = gate_noisy;
  for (Instruction& ins : gate_ideal.instructions) ins.noisy = false;

  ScoreSpec spec;  // ref7 unused for cross fidelities
  spec.ref1 = logical_reference(prep, id);
  spec.decode_steps = decoder_steps(circuits.encoder);

  Program prog_ideal;
  append_main_circuit(prog_ideal, circuits.encoder, true);
  append_main_circuit(prog_ideal, gate_ideal, true);
  Program prog_noisy;
  append_main_circuit(prog_noisy, circuits.encoder, true);
  append_main_circuit(prog_noisy, gate_noisy, true);

  const PropState init = initial_state(prep);
  std::vector<Branch> side_a = collect_branches(prog_ideal, init, opts.max_order, spec);
  std::vector<Branch> side_b = collect_branches(prog_noisy, init, opts.max_order, spec);

  TruncatedPoly f7n, f1n;
  for (const Branch& a : side_a) {
    for (const Branch& b : side_b) {
      if (a.degree + b.degree > 2) continue;
      TruncatedPoly w = a.weight.mul(b.weight);
      double ov = std::norm(sv_dot(a.vec, b.vec));
      cplx tr = a.m[0] * b.m[0] + a.m[1] * b.m[2] + a.m[2] * b.m[1] + a.m[3] * b.m[3];
      for (int k = 0; k < kNumMonomials; ++k) {
        if (w.c[k] == 0.0) continue;
        f7n.c[k] += w.c[k] * ov;
        f1n.c[k] += w.c[k] * tr.real();
      }
    }
  }
  PolyPair out;
  out.f7 = normalized_ratio(f7n, TruncatedPoly::constant(1.0));
  out.f1 = normalized_ratio(f1n, TruncatedPoly::constant(1.0));
  out.acceptance = TruncatedPoly::constant(1.0);
  return out;
}

}  // namespace

PolyPair fidelity_polynomial(ExperimentId id, const StatePrep& prep, const PerturbOptions& opts,
                             const ExperimentCircuits& circuits) {
  if (opts.max_order < 1 || opts.max_order > 2)
    throw std::invalid_argument("fidelity_polynomial: max_order must be 1 or 2");
  switch (id) {
    case ExperimentId::GateH:
    case ExperimentId::GateX:
    case ExperimentId::GateP:
      return cross_ensemble(id, prep, opts, circuits);
    default:
      return single_ensemble(id, prep, opts, circuits);
  }
}

}  // namespace qec713
