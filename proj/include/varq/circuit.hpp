// Copyright 2026 The varq Authors.
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

// Parametrised circuits, binding and adjoint-mode gradients.
//
// A rotation family gate is U(a) = exp(-i a K) where the angle a is an
// AngleExpr of the parameter vector. Keeping K lets the adjoint method
// differentiate every family, including the ones without a two-eigenvalue
// shift rule.

#ifndef VARQ_CIRCUIT_HPP_
#define VARQ_CIRCUIT_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "varq/pauli.hpp"
#include "varq/statevector.hpp"

namespace varq {

/// coef * 2 acos(sin(p[b]/2) / tan(p[a]/2)).
struct NonlinearAngle {
  double coefficient = 1.0;
  int slot_a = 0;
  int slot_b = 0;
};

inline double nonlinear_angle_value(double ta, double tb) {
  const double t = std::tan(ta / 2);
  if (!std::isfinite(t) || std::abs(t) < 1e-300) throw std::domain_error("angle expression undefined: tan(theta_a/2) = 0");
  const double u = std::sin(tb / 2) / t;
  if (!(std::abs(u) <= 1.0)) throw std::domain_error("angle expression undefined: |sin(theta_b/2)/tan(theta_a/2)| > 1");
  return 2.0 * std::acos(u);
}

/// Affine combination of slots plus optional nonlinear pieces.
struct AngleExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> linear;
  std::vector<NonlinearAngle> nonlinear;

  static AngleExpr slot(int k, double c = 1.0) { return AngleExpr{0.0, {{k, c}}, {}}; }
  static AngleExpr fixed(double v) { return AngleExpr{v, {}, {}}; }

  bool is_constant() const { return linear.empty() && nonlinear.empty(); }
  bool is_plain_slot() const {
    return constant == 0.0 && nonlinear.empty() && linear.size() == 1 && linear[0].second == 1.0;
  }

  AngleExpr& operator+=(const AngleExpr& o) {
    constant += o.constant;
    for (const auto& l : o.linear) {
      auto it = std::find_if(linear.begin(), linear.end(), [&](const auto& x) { return x.first == l.first; });
      if (it == linear.end()) {
        linear.push_back(l);
      } else {
        it->second += l.second;
      }
    }
    nonlinear.insert(nonlinear.end(), o.nonlinear.begin(), o.nonlinear.end());
    return *this;
  }
  AngleExpr& operator*=(double c) {
    constant *= c;
    for (auto& l : linear) l.second *= c;
    for (auto& nl : nonlinear) nl.coefficient *= c;
    return *this;
  }

  /// Throws std::domain_error outside the nonlinear pieces' domain.
  double value(std::span<const double> p) const {
    double v = constant;
    for (const auto& [k, c] : linear) v += c * p[k];
    for (const NonlinearAngle& nl : nonlinear) v += nl.coefficient * nonlinear_angle_value(p[nl.slot_a], p[nl.slot_b]);
    return v;
  }

  /// Appends scale * d(value)/d(slot) entries.
  void gradient(std::span<const double> p, double scale, std::vector<std::pair<int, double>>& out) const {
    for (const auto& [k, c] : linear) out.emplace_back(k, scale * c);
    for (const NonlinearAngle& nl : nonlinear) {
      const double ta = p[nl.slot_a], tb = p[nl.slot_b];
      const double t = std::tan(ta / 2);
      const double u = std::sin(tb / 2) / t;
      const double den = 1.0 - u * u;
      if (den <= 0.0) continue;
      const double dfdu = -2.0 / std::sqrt(den);
      const double s = std::sin(ta / 2);
      const double dua = -std::sin(tb / 2) / (2.0 * s * s);
      const double dub = std::cos(tb / 2) / (2.0 * t);
      out.emplace_back(nl.slot_a, scale * nl.coefficient * dfdu * dua);
      out.emplace_back(nl.slot_b, scale * nl.coefficient * dfdu * dub);
    }
  }

  void collect_slots(std::vector<int>& out) const {
    for (const auto& l : linear) out.push_back(l.first);
    for (const auto& nl : nonlinear) {
      out.push_back(nl.slot_a);
      out.push_back(nl.slot_b);
    }
  }
};

enum class GateFamily {
  kFixed,
  kRX,    // exp(-i a X/2)
  kRY,    // exp(-i a Y/2)
  kRZ,    // exp(-i a Z/2)
  kHop,   // exp(-i a (XX+YY)/2)
  kCRZ,   // controlled RZ(a), control = targets[0]
  kRXY,   // exp(+i a XY/2)
  kRYX,   // exp(+i a YX/2)
  kUCRY,  // uniformly controlled RY: controls..., target
};

inline const char* family_name(GateFamily f) {
  switch (f) {
    case GateFamily::kFixed: return "fixed";
    case GateFamily::kRX: return "rx";
    case GateFamily::kRY: return "ry";
    case GateFamily::kRZ: return "rz";
    case GateFamily::kHop: return "hop";
    case GateFamily::kCRZ: return "crz";
    case GateFamily::kRXY: return "rxy";
    case GateFamily::kRYX: return "ryx";
    case GateFamily::kUCRY: return "ucry";
  }
  return "?";
}

/// Shift constant r of the generator (eigenvalues +-r), 0 if none.
inline double family_shift_r(GateFamily f) {
  switch (f) {
    case GateFamily::kRX:
    case GateFamily::kRY:
    case GateFamily::kRZ:
    case GateFamily::kRXY:
    case GateFamily::kRYX: return 0.5;
    default: return 0.0;
  }
}

namespace detail {

inline CVector kron2(const CVector& a, const CVector& b) {
  CVector m(16);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m[(2 * i + k) * 4 + (2 * j + l)] = a[2 * i + j] * b[2 * k + l];
  return m;
}

inline const CVector kPx = {0.0, 1.0, 1.0, 0.0};
inline const CVector kPy = {0.0, cplx(0, -1), cplx(0, 1), 0.0};
inline const CVector kPz = {1.0, 0.0, 0.0, -1.0};

}  // namespace detail

/// Generator K with U(a) = exp(-i a K).
inline CVector family_generator(GateFamily f) {
  using namespace detail;
  auto scaled = [](CVector m, cplx c) {
    for (cplx& x : m) x *= c;
    return m;
  };
  switch (f) {
    case GateFamily::kRX: return scaled(kPx, 0.5);
    case GateFamily::kRY:
    case GateFamily::kUCRY: return scaled(kPy, 0.5);
    case GateFamily::kRZ: return scaled(kPz, 0.5);
    case GateFamily::kHop: {
      CVector m = kron2(kPx, kPx);
      const CVector yy = kron2(kPy, kPy);
      for (int i = 0; i < 16; ++i) m[i] = 0.5 * (m[i] + yy[i]);
      return m;
    }
    case GateFamily::kCRZ: {
      CVector m(16, 0.0);
      m[10] = 0.5;
      m[15] = -0.5;
      return m;
    }
    case GateFamily::kRXY: return scaled(kron2(kPx, kPy), -0.5);
    case GateFamily::kRYX: return scaled(kron2(kPy, kPx), -0.5);
    default: throw std::invalid_argument("fixed gates have no generator");
  }
}

/// Closed-form exp(-i a K) for each family.
inline GateOp family_gate(GateFamily f, const std::vector<int>& t, double a) {
  const double c = std::cos(a / 2), s = std::sin(a / 2);
  const cplx I(0, 1);
  switch (f) {
    case GateFamily::kRX: return gates::RX(t[0], a);
    case GateFamily::kRY:
    case GateFamily::kUCRY: return gates::RY(t[0], a);
    case GateFamily::kRZ: return gates::RZ(t[0], a);
    case GateFamily::kHop: {
      const double ca = std::cos(a), sa = std::sin(a);
      return make_gate("hop", t, {1, 0, 0, 0, 0, ca, -I * sa, 0, 0, -I * sa, ca, 0, 0, 0, 0, 1});
    }
    case GateFamily::kCRZ:
      return make_gate("crz", t, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, std::polar(1.0, -a / 2), 0, 0, 0, 0, std::polar(1.0, a / 2)});
    case GateFamily::kRXY:
    case GateFamily::kRYX: {
      // cos(a/2) I + i sin(a/2) P
      CVector m = f == GateFamily::kRXY ? detail::kron2(detail::kPx, detail::kPy) : detail::kron2(detail::kPy, detail::kPx);
      for (int i = 0; i < 16; ++i) m[i] = I * s * m[i] + ((i % 5 == 0) ? c : 0.0);
      return make_gate(family_name(f), t, std::move(m));
    }
    default: throw std::invalid_argument("not a rotation family");
  }
}

struct GateTemplate {
  GateFamily family = GateFamily::kFixed;
  std::vector<int> targets;  // kUCRY: controls then target
  GateOp fixed;              // kFixed only
  std::vector<AngleExpr> angles;  // one, or 2^k for kUCRY (pattern order, first control = most significant bit)

  int num_controls() const { return family == GateFamily::kUCRY ? static_cast<int>(targets.size()) - 1 : 0; }
};

/// Approximate CNOT cost of a template after decomposition.
inline int template_cnot_cost(const GateTemplate& g) {
  switch (g.family) {
    case GateFamily::kFixed: return g.fixed.name == "cx" ? 1 : (g.fixed.arity() == 2 ? 3 : 0);
    case GateFamily::kHop: return 3;
    case GateFamily::kCRZ:
    case GateFamily::kRXY:
    case GateFamily::kRYX: return 2;
    case GateFamily::kUCRY: return g.num_controls() == 0 ? 0 : (1 << g.num_controls());
    default: return 0;
  }
}

class ParametrizedCircuit {
 public:
  ParametrizedCircuit() = default;
  ParametrizedCircuit(int n, int num_params, std::string kind = "custom", int layers = 0)
      : n_(n), num_params_(num_params), kind_(std::move(kind)), layers_(layers) {
    if (n < 1) throw std::invalid_argument("circuit needs at least one qubit");
    if (num_params < 0) throw std::invalid_argument("negative parameter count");
  }

  int num_qubits() const { return n_; }
  int num_params() const { return num_params_; }
  const std::string& kind() const { return kind_; }
  int layers() const { return layers_; }
  const std::vector<GateTemplate>& gates() const { return gates_; }

  void add_fixed(GateOp g) {
    check_targets(g.targets);
    GateTemplate t;
    t.family = GateFamily::kFixed;
    t.targets = g.targets;
    t.fixed = std::move(g);
    gates_.push_back(std::move(t));
  }

  void add_rotation(GateFamily f, std::vector<int> targets, AngleExpr angle) {
    if (f == GateFamily::kFixed || f == GateFamily::kUCRY) throw std::invalid_argument("not a single-angle family");
    const std::size_t arity = (f == GateFamily::kRX || f == GateFamily::kRY || f == GateFamily::kRZ) ? 1 : 2;
    if (targets.size() != arity) throw std::invalid_argument("wrong number of targets for gate family");
    if (arity == 2 && targets[0] == targets[1]) throw std::invalid_argument("gate targets must be distinct");
    check_targets(targets);
    check_expr(angle);
    gates_.push_back(GateTemplate{f, std::move(targets), {}, {std::move(angle)}});
  }

  /// Uniformly controlled RY; angles[p] applies when the controls read p.
  void add_ucry(std::vector<int> controls, int target, std::vector<AngleExpr> angles) {
    if (angles.size() != (std::size_t{1} << controls.size())) throw std::invalid_argument("ucry needs 2^k angles");
    controls.push_back(target);
    check_targets(controls);
    for (const AngleExpr& a : angles) check_expr(a);
    gates_.push_back(GateTemplate{GateFamily::kUCRY, std::move(controls), {}, std::move(angles)});
  }

  /// Every slot in [0, num_params) referenced at least once.
  void validate() const {
    std::vector<int> used;
    for (const GateTemplate& g : gates_)
      for (const AngleExpr& a : g.angles) a.collect_slots(used);
    std::vector<bool> seen(num_params_, false);
    for (int k : used) seen[k] = true;
    for (int k = 0; k < num_params_; ++k)
      if (!seen[k]) throw std::logic_error("parameter slot " + std::to_string(k) + " is never used");
  }

  /// Per-slot shift constant when the slot drives exactly one gate of a
  /// two-eigenvalue family with unit coefficient, else 0.
  std::vector<double> shift_constants() const {
    std::vector<int> uses(num_params_, 0);
    std::vector<double> r(num_params_, 0.0);
    for (const GateTemplate& g : gates_) {
      for (const AngleExpr& a : g.angles) {
        std::vector<int> s;
        a.collect_slots(s);
        for (int k : s) ++uses[k];
        if (g.family != GateFamily::kUCRY && a.is_plain_slot()) r[a.linear[0].first] = family_shift_r(g.family);
      }
    }
    for (int k = 0; k < num_params_; ++k)
      if (uses[k] != 1) r[k] = 0.0;
    return r;
  }

  int cnot_count() const {
    // RXY(a) followed by RYX(b) on the same pair is one R_p gate (2 CNOTs).
    int c = 0;
    for (std::size_t i = 0; i < gates_.size(); ++i) {
      const GateTemplate& g = gates_[i];
      if (i > 0 && g.family == GateFamily::kRYX && gates_[i - 1].family == GateFamily::kRXY &&
          gates_[i - 1].targets == g.targets)
        continue;
      c += template_cnot_cost(g);
    }
    return c;
  }

  int parametrised_gate_count() const {
    int c = 0;
    for (const GateTemplate& g : gates_)
      if (g.family != GateFamily::kFixed) c += g.family == GateFamily::kUCRY ? static_cast<int>(g.angles.size()) : 1;
    return c;
  }

  /// Copy acting on qubits [qubit_offset, qubit_offset + n) of an
  /// `total_qubits` register, reading slots shifted by param_offset.
  ParametrizedCircuit embedded(int total_qubits, int qubit_offset, int total_params, int param_offset) const {
    ParametrizedCircuit c(total_qubits, total_params, kind_, layers_);
    if (qubit_offset + n_ > total_qubits || param_offset + num_params_ > total_params)
      throw std::invalid_argument("embedding out of range");
    for (GateTemplate g : gates_) {
      for (int& t : g.targets) t += qubit_offset;
      if (g.family == GateFamily::kFixed) {
        for (int& t : g.fixed.targets) t += qubit_offset;
      }
      for (AngleExpr& a : g.angles) {
        for (auto& l : a.linear) l.first += param_offset;
        for (auto& nl : a.nonlinear) {
          nl.slot_a += param_offset;
          nl.slot_b += param_offset;
        }
      }
      c.gates_.push_back(std::move(g));
    }
    return c;
  }

  /// Appends another circuit on the same register and parameter space.
  void append(const ParametrizedCircuit& o) {
    if (o.n_ != n_ || o.num_params_ != num_params_) throw std::invalid_argument("circuit shapes differ");
    gates_.insert(gates_.end(), o.gates_.begin(), o.gates_.end());
  }

  void set_metadata(std::string kind, int layers) {
    kind_ = std::move(kind);
    layers_ = layers;
  }

 private:
  void check_targets(const std::vector<int>& t) const {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < 0 || t[i] >= n_) throw std::out_of_range("gate target out of range");
      for (std::size_t j = 0; j < i; ++j)
        if (t[i] == t[j]) throw std::invalid_argument("gate targets must be distinct");
    }
  }
  void check_expr(const AngleExpr& a) const {
    std::vector<int> s;
    a.collect_slots(s);
    for (int k : s)
      if (k < 0 || k >= num_params_) throw std::out_of_range("parameter slot out of range");
  }

  int n_ = 0;
  int num_params_ = 0;
  std::string kind_ = "custom";
  int layers_ = 0;
  std::vector<GateTemplate> gates_;
};

/// A concrete gate plus what the adjoint pass needs.
struct BoundGate {
  GateOp op;
  GateFamily family = GateFamily::kFixed;
  std::vector<std::pair<int, double>> dangle;  // d(angle)/d(slot)
};

namespace detail {

inline std::uint64_t gray(std::uint64_t j) { return j ^ (j >> 1); }

// Ry(phi_j), CNOT(c_j -> target) for j = 0..2^k-1 with
// phi_j = 2^-k sum_p (-1)^{popcount(p & gray(j))} a_p.
inline void bind_ucry(const GateTemplate& g, std::span<const double> p, bool with_grad, std::vector<BoundGate>& out) {
  const int k = g.num_controls();
  const int target = g.targets.back();
  const std::size_t m = std::size_t{1} << k;
  std::vector<double> a(m);
  for (std::size_t i = 0; i < m; ++i) a[i] = g.angles[i].value(p);
  for (std::size_t j = 0; j < m; ++j) {
    const std::uint64_t gj = gray(j);
    double phi = 0.0;
    BoundGate bg;
    for (std::size_t q = 0; q < m; ++q) {
      const double sgn = (std::popcount(q & gj) & 1) ? -1.0 : 1.0;
      phi += sgn * a[q];
      if (with_grad) g.angles[q].gradient(p, sgn / static_cast<double>(m), bg.dangle);
    }
    phi /= static_cast<double>(m);
    bg.op = gates::RY(target, phi);
    bg.op.shift_r = 0.0;
    bg.family = GateFamily::kRY;
    out.push_back(std::move(bg));
    if (k == 0) break;
    const std::uint64_t diff = gj ^ gray((j + 1) % m);
    const int bitpos = std::countr_zero(diff);
    const int control = g.targets[k - 1 - bitpos];
    out.push_back(BoundGate{gates::CNOT(control, target), GateFamily::kFixed, {}});
  }
}

}  // namespace detail

inline std::vector<BoundGate> bind_detailed(const ParametrizedCircuit& c, std::span<const double> params,
                                            bool with_grad = true) {
  if (static_cast<int>(params.size()) != c.num_params())
    throw std::invalid_argument("expected " + std::to_string(c.num_params()) + " parameters, got " +
                                std::to_string(params.size()));
  std::vector<BoundGate> out;
  out.reserve(c.gates().size());
  for (const GateTemplate& g : c.gates()) {
    switch (g.family) {
      case GateFamily::kFixed: out.push_back(BoundGate{g.fixed, GateFamily::kFixed, {}}); break;
      case GateFamily::kUCRY: detail::bind_ucry(g, params, with_grad, out); break;
      default: {
        const AngleExpr& a = g.angles[0];
        BoundGate bg{family_gate(g.family, g.targets, a.value(params)), g.family, {}};
        if (a.is_plain_slot()) {
          bg.op.parameter_slot = a.linear[0].first;
          bg.op.shift_r = family_shift_r(g.family);
        }
        if (with_grad) a.gradient(params, 1.0, bg.dangle);
        out.push_back(std::move(bg));
      }
    }
  }
  return out;
}

/// Concrete gate sequence with every slot substituted.
inline std::vector<GateOp> bind_parameters(const ParametrizedCircuit& c, std::span<const double> params) {
  std::vector<GateOp> out;
  for (BoundGate& b : bind_detailed(c, params, false)) out.push_back(std::move(b.op));
  return out;
}

inline QubitState run_circuit(const ParametrizedCircuit& c, std::span<const double> params,
                              const QubitState* initial = nullptr) {
  QubitState s = initial ? *initial : QubitState::zero(c.num_qubits());
  if (s.num_qubits() != c.num_qubits()) throw std::invalid_argument("initial state has wrong size");
  for (const BoundGate& b : bind_detailed(c, params, false)) apply_gate_inplace(s, b.op);
  return s;
}

/// out = O in, for a Hermitian observable.
using ObservableApply = std::function<void(const CVector&, CVector&)>;

inline ObservableApply observable_of(const PauliHamiltonian& h) {
  return [&h](const CVector& in, CVector& out) { apply_hamiltonian(h, in, out); };
}

struct ValueAndGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

/// <psi(p)|O|psi(p)> and its exact gradient by the adjoint method.
inline ValueAndGradient adjoint_gradient(const ParametrizedCircuit& c, std::span<const double> params,
                                         const ObservableApply& observable, const QubitState* initial = nullptr) {
  const std::vector<BoundGate> bound = bind_detailed(c, params, true);
  QubitState psi = initial ? *initial : QubitState::zero(c.num_qubits());
  for (const BoundGate& b : bound) apply_gate_inplace(psi, b.op);
  const int n = c.num_qubits();
  CVector& v = psi.mutable_amplitudes();
  CVector lam;
  observable(v, lam);
  ValueAndGradient out;
  out.gradient.assign(c.num_params(), 0.0);
  cplx e = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) e += std::conj(v[i]) * lam[i];
  out.value = e.real();
  CVector mu;
  for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
    const BoundGate& b = *it;
    if (b.family != GateFamily::kFixed && !b.dangle.empty()) {
      mu = v;
      apply_matrix_inplace(mu, n, b.op.targets, family_generator(b.family));
      cplx ip = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) ip += std::conj(lam[i]) * mu[i];
      const double dE = 2.0 * ip.imag();
      for (const auto& [k, d] : b.dangle) out.gradient[k] += dE * d;
    }
    const GateOp inv = b.op.adjoint();
    apply_matrix_inplace(v, n, inv.targets, inv.matrix);
    apply_matrix_inplace(lam, n, inv.targets, inv.matrix);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text dump: one gate per line, "name targets... angle-token...".
// Angle tokens: "p<k>" for a bare slot, a literal for a constant, otherwise
// "expr[c|k:w,...|w:a:b,...]".

inline std::string angle_token(const AngleExpr& a) {
  if (a.is_plain_slot()) return "p" + std::to_string(a.linear[0].first);
  if (a.is_constant()) return format_double_short(a.constant);
  std::string s = "expr[" + format_double_short(a.constant) + "|";
  for (std::size_t i = 0; i < a.linear.size(); ++i)
    s += (i ? "," : "") + std::to_string(a.linear[i].first) + ":" + format_double_short(a.linear[i].second);
  s += "|";
  for (std::size_t i = 0; i < a.nonlinear.size(); ++i)
    s += (i ? "," : "") + format_double_short(a.nonlinear[i].coefficient) + ":" + std::to_string(a.nonlinear[i].slot_a) +
         ":" + std::to_string(a.nonlinear[i].slot_b);
  return s + "]";
}

inline void write_circuit(std::ostream& os, const ParametrizedCircuit& c) {
  os << "qubits=" << c.num_qubits() << " params=" << c.num_params() << " kind=" << c.kind() << " layers=" << c.layers()
     << '\n';
  for (const GateTemplate& g : c.gates()) {
    os << (g.family == GateFamily::kFixed ? g.fixed.name : family_name(g.family));
    for (int t : g.targets) os << ' ' << t;
    if (g.family == GateFamily::kUCRY) os << " ;";
    for (const AngleExpr& a : g.angles) os << ' ' << angle_token(a);
    os << '\n';
  }
}

}  // namespace varq

#endif  // VARQ_CIRCUIT_HPP_
