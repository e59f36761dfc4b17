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

// Dense statevector simulation.
//
// Bit ordering: qubit 0 is the most significant bit of the basis index, so
// the amplitude of |q0 q1 ... q_{n-1}> sits at index q0*2^{n-1} + ... + q_{n-1}.
// Two-qubit matrices act on the local index 2*bit(targets[0]) + bit(targets[1]).

#ifndef VARQ_STATEVECTOR_HPP_
#define VARQ_STATEVECTOR_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "varq/rng.hpp"

namespace varq {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr int kMaxDensityQubits = 8;

namespace detail {

inline std::uint64_t insert_zero_bit(std::uint64_t x, int bit) {
  const std::uint64_t low = x & ((std::uint64_t{1} << bit) - 1);
  return ((x >> bit) << (bit + 1)) | low;
}

inline int popcount_parity(std::uint64_t x) { return std::popcount(x) & 1; }

// 2x2 row-major matrix on qubit q.
inline void apply_1q(CVector& v, int n, int q, const cplx* m) {
  const int bit = n - 1 - q;
  const std::uint64_t stride = std::uint64_t{1} << bit;
  const std::uint64_t dim = v.size();
  const cplx m00 = m[0], m01 = m[1], m10 = m[2], m11 = m[3];
  for (std::uint64_t base = 0; base < dim; base += 2 * stride) {
    for (std::uint64_t j = base; j < base + stride; ++j) {
      const cplx a0 = v[j];
      const cplx a1 = v[j + stride];
      v[j] = m00 * a0 + m01 * a1;
      v[j + stride] = m10 * a0 + m11 * a1;
    }
  }
}

// 4x4 row-major matrix on (q0, q1), q0 the high local bit.
inline void apply_2q(CVector& v, int n, int q0, int q1, const cplx* m) {
  const int b0 = n - 1 - q0;
  const int b1 = n - 1 - q1;
  const int lo = std::min(b0, b1);
  const int hi = std::max(b0, b1);
  const std::uint64_t s0 = std::uint64_t{1} << b0;
  const std::uint64_t s1 = std::uint64_t{1} << b1;
  const std::uint64_t quarter = v.size() >> 2;
  for (std::uint64_t k = 0; k < quarter; ++k) {
    const std::uint64_t i00 = insert_zero_bit(insert_zero_bit(k, lo), hi);
    const std::uint64_t idx[4] = {i00, i00 | s1, i00 | s0, i00 | s0 | s1};
    const cplx a[4] = {v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]};
    for (int r = 0; r < 4; ++r) {
      const cplx* row = m + 4 * r;
      v[idx[r]] = row[0] * a[0] + row[1] * a[1] + row[2] * a[2] + row[3] * a[3];
    }
  }
}

}  // namespace detail

/// A single- or two-qubit gate with a concrete matrix. Parametrised gates
/// remember the slot they were bound from and, when the generator has two
/// eigenvalues +-r, the shift constant r.
struct GateOp {
  std::string name;
  std::vector<int> targets;
  CVector matrix;  // row-major, 2x2 or 4x4
  int parameter_slot = -1;
  double shift_r = 0.0;

  int arity() const { return static_cast<int>(targets.size()); }

  bool is_unitary(double tol = kNormTolerance) const {
    const int d = arity() == 1 ? 2 : 4;
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        cplx acc = 0.0;
        for (int k = 0; k < d; ++k) acc += std::conj(matrix[k * d + r]) * matrix[k * d + c];
        if (std::abs(acc - (r == c ? 1.0 : 0.0)) > tol) return false;
      }
    }
    return true;
  }

  GateOp adjoint() const {
    GateOp g = *this;
    const int d = arity() == 1 ? 2 : 4;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) g.matrix[r * d + c] = std::conj(matrix[c * d + r]);
    g.name = name + "_dg";
    return g;
  }
};

/// Validating constructor: throws on bad shape, repeated targets or a
/// non-unitary matrix.
inline GateOp make_gate(std::string name, std::vector<int> targets, CVector matrix) {
  if (targets.empty() || targets.size() > 2) throw std::invalid_argument("gate must act on 1 or 2 qubits");
  const std::size_t d = targets.size() == 1 ? 2 : 4;
  if (matrix.size() != d * d) throw std::invalid_argument("gate matrix has wrong size");
  if (targets.size() == 2 && targets[0] == targets[1]) throw std::invalid_argument("gate targets must be distinct");
  for (int t : targets)
    if (t < 0) throw std::invalid_argument("negative target index");
  GateOp g{std::move(name), std::move(targets), std::move(matrix)};
  if (!g.is_unitary()) throw std::invalid_argument("gate matrix is not unitary: " + g.name);
  return g;
}

namespace gates {

inline GateOp H(int q) {
  const double s = 1.0 / std::sqrt(2.0);
  return make_gate("h", {q}, {s, s, s, -s});
}
inline GateOp X(int q) { return make_gate("x", {q}, {0.0, 1.0, 1.0, 0.0}); }
inline GateOp Y(int q) { return make_gate("y", {q}, {0.0, cplx(0, -1), cplx(0, 1), 0.0}); }
inline GateOp Z(int q) { return make_gate("z", {q}, {1.0, 0.0, 0.0, -1.0}); }
inline GateOp S(int q) { return make_gate("s", {q}, {1.0, 0.0, 0.0, cplx(0, 1)}); }
inline GateOp Sdg(int q) { return make_gate("sdg", {q}, {1.0, 0.0, 0.0, cplx(0, -1)}); }
inline GateOp RX(int q, double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return make_gate("rx", {q}, {c, cplx(0, -s), cplx(0, -s), c});
}
inline GateOp RY(int q, double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return make_gate("ry", {q}, {c, -s, s, c});
}
inline GateOp RZ(int q, double t) {
  return make_gate("rz", {q}, {std::polar(1.0, -t / 2), 0.0, 0.0, std::polar(1.0, t / 2)});
}
inline GateOp CNOT(int c, int t) {
  return make_gate("cx", {c, t}, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
}
inline GateOp CZ(int a, int b) {
  return make_gate("cz", {a, b}, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1});
}
inline GateOp SWAP(int a, int b) {
  return make_gate("swap", {a, b}, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1});
}

}  // namespace gates

/// Dense pure state over 2^n amplitudes.
class QubitState {
 public:
  QubitState() = default;

  static QubitState zero(int n) {
    if (n < 1 || n > 30) throw std::invalid_argument("qubit count out of range");
    QubitState s;
    s.n_ = n;
    s.amps_.assign(std::size_t{1} << n, 0.0);
    s.amps_[0] = 1.0;
    return s;
  }

  static QubitState basis(int n, std::uint64_t index) {
    QubitState s = zero(n);
    if (index >= s.amps_.size()) throw std::invalid_argument("basis index out of range");
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
  }

  /// Throws unless the length is a power of two and the norm is 1 within 1e-10.
  static QubitState from_amplitudes(CVector amps) {
    const std::size_t d = amps.size();
    if (d < 2 || (d & (d - 1)) != 0) throw std::invalid_argument("amplitude count must be 2^n, n >= 1");
    QubitState s;
    s.n_ = std::countr_zero(d);
    s.amps_ = std::move(amps);
    if (std::abs(s.norm_squared() - 1.0) > kNormTolerance) throw std::invalid_argument("state is not normalised");
    return s;
  }

  /// Like from_amplitudes but rescales to unit norm first.
  static QubitState normalized(CVector amps) {
    double nn = 0.0;
    for (const cplx& a : amps) nn += std::norm(a);
    if (nn <= 0.0) throw std::invalid_argument("zero vector");
    const double inv = 1.0 / std::sqrt(nn);
    for (cplx& a : amps) a *= inv;
    return from_amplitudes(std::move(amps));
  }

  int num_qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  const CVector& amplitudes() const { return amps_; }
  CVector& mutable_amplitudes() { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const {
    double s = 0.0;
    for (const cplx& a : amps_) s += std::norm(a);
    return s;
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
    return p;
  }

  /// Tensor product, this register first (most significant).
  QubitState tensor(const QubitState& other) const {
    QubitState s;
    s.n_ = n_ + other.n_;
    s.amps_.resize(amps_.size() * other.amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i)
      for (std::size_t j = 0; j < other.amps_.size(); ++j) s.amps_[i * other.amps_.size() + j] = amps_[i] * other.amps_[j];
    return s;
  }

 private:
  int n_ = 0;
  CVector amps_;
};

inline cplx inner_product(const QubitState& a, const QubitState& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// Applies the gate matrix in place. Also used for non-unitary operators
/// (generators) by the gradient code, so no unitarity check here.
inline void apply_matrix_inplace(CVector& v, int n, const std::vector<int>& targets, const CVector& m) {
  for (int t : targets)
    if (t < 0 || t >= n) throw std::out_of_range("gate target out of range");
  if (targets.size() == 1) {
    detail::apply_1q(v, n, targets[0], m.data());
  } else {
    detail::apply_2q(v, n, targets[0], targets[1], m.data());
  }
}

inline void apply_gate_inplace(QubitState& s, const GateOp& g) {
  apply_matrix_inplace(s.mutable_amplitudes(), s.num_qubits(), g.targets, g.matrix);
}

inline QubitState apply_gate(QubitState s, const GateOp& g) {
  apply_gate_inplace(s, g);
  return s;
}

inline QubitState apply_gates(QubitState s, const std::vector<GateOp>& gs) {
  for (const GateOp& g : gs) apply_gate_inplace(s, g);
  return s;
}

/// Parses a label string over {I, X, Y, Z}; throws on anything else.
inline void check_pauli_labels(std::string_view labels) {
  for (char c : labels)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') throw std::invalid_argument(std::string("invalid Pauli label: ") + c);
}

/// <psi|P|psi> by rotating a scratch copy into the Z basis (H for X, S^dag
/// then H for Y) and summing the parity-weighted probabilities.
inline double expectation_pauli(const QubitState& state, std::string_view labels) {
  check_pauli_labels(labels);
  const int n = state.num_qubits();
  if (static_cast<int>(labels.size()) != n) throw std::invalid_argument("label length must equal qubit count");
  CVector v = state.amplitudes();
  std::uint64_t mask = 0;
  for (int q = 0; q < n; ++q) {
    const char c = labels[q];
    if (c == 'I') continue;
    mask |= std::uint64_t{1} << (n - 1 - q);
    if (c == 'X') {
      detail::apply_1q(v, n, q, gates::H(q).matrix.data());
    } else if (c == 'Y') {
      detail::apply_1q(v, n, q, gates::Sdg(q).matrix.data());
      detail::apply_1q(v, n, q, gates::H(q).matrix.data());
    }
  }
  double acc = 0.0;
  for (std::size_t b = 0; b < v.size(); ++b) {
    const double p = std::norm(v[b]);
    acc += detail::popcount_parity(b & mask) ? -p : p;
  }
  return acc;
}

/// Basis index to bit string, qubit 0 first.
inline std::string bitstring(std::uint64_t index, int n) {
  std::string s(n, '0');
  for (int q = 0; q < n; ++q)
    if ((index >> (n - 1 - q)) & 1) s[q] = '1';
  return s;
}

struct ShotCounts {
  int num_qubits = 0;
  std::map<std::uint64_t, std::uint64_t> counts;  // basis index -> count
  std::uint64_t total_shots = 0;

  std::uint64_t count(std::string_view bits) const {
    std::uint64_t idx = 0;
    for (char c : bits) idx = (idx << 1) | (c == '1' ? 1 : 0);
    auto it = counts.find(idx);
    return it == counts.end() ? 0 : it->second;
  }

  std::map<std::string, std::uint64_t> by_bitstring() const {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [k, v] : counts) out[bitstring(k, num_qubits)] = v;
    return out;
  }
};

/// Multinomial sample of |amplitude|^2 by sequential conditional binomials
/// in basis order; a fixed seed gives identical counts.
inline ShotCounts sample_probabilities(const std::vector<double>& probs, int n, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("shots must be >= 1");
  Rng rng(seed);
  ShotCounts out;
  out.num_qubits = n;
  out.total_shots = shots;
  std::uint64_t remaining = shots;
  double mass_left = 0.0;
  for (double p : probs) mass_left += p;
  for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
    const double p = std::max(0.0, probs[i]);
    std::uint64_t k;
    if (i + 1 == probs.size() || p >= mass_left) {
      k = remaining;
    } else {
      std::binomial_distribution<std::uint64_t> bin(remaining, std::clamp(p / mass_left, 0.0, 1.0));
      k = bin(rng.engine());
    }
    if (k > 0) out.counts[i] = k;
    remaining -= k;
    mass_left -= p;
    if (mass_left <= 0.0 && remaining > 0) {  // rounding leftovers go to the last seen outcome
      out.counts[i] += remaining;
      remaining = 0;
    }
  }
  return out;
}

inline ShotCounts sample_counts(const QubitState& state, std::uint64_t shots, std::uint64_t seed) {
  return sample_probabilities(state.probabilities(), state.num_qubits(), shots, seed);
}

// ---------------------------------------------------------------------------
// Density-matrix utilities (diagnostics only, n <= 8).

struct DensityMatrix {
  int num_qubits = 0;
  Eigen::MatrixXcd entries;

  /// Checks Hermiticity, unit trace and positivity within tol.
  void validate(double tol = kNormTolerance) const {
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    if (entries.rows() != d || entries.cols() != d) throw std::invalid_argument("density matrix has wrong shape");
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > tol) throw std::invalid_argument("density matrix not Hermitian");
    if (std::abs(entries.trace() - cplx(1.0)) > tol) throw std::invalid_argument("density matrix trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw std::invalid_argument("density matrix not positive semidefinite");
  }
};

inline void check_density_size(int n) {
  if (n < 1 || n > kMaxDensityQubits) throw std::invalid_argument("density matrices are limited to 1..8 qubits");
}

inline DensityMatrix make_density(Eigen::MatrixXcd m) {
  const Eigen::Index d = m.rows();
  if (d < 2 || (d & (d - 1)) != 0 || m.cols() != d) throw std::invalid_argument("density matrix must be 2^n x 2^n");
  DensityMatrix r{static_cast<int>(std::countr_zero(static_cast<std::uint64_t>(d))), std::move(m)};
  check_density_size(r.num_qubits);
  r.validate();
  return r;
}

inline Eigen::VectorXcd to_eigen(const QubitState& s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i) v[static_cast<Eigen::Index>(i)] = s[i];
  return v;
}

inline DensityMatrix pure_density(const QubitState& s) {
  check_density_size(s.num_qubits());
  const Eigen::VectorXcd v = to_eigen(s);
  return DensityMatrix{s.num_qubits(), v * v.adjoint()};
}

/// Amplitudes reshaped to a (kept x traced) matrix; rho_kept = M M^dag.
inline Eigen::MatrixXcd split_amplitudes(const QubitState& state, const std::vector<int>& keep) {
  const int n = state.num_qubits();
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index{1} << nk, Eigen::Index{1} << nt);
  for (std::uint64_t b = 0; b < state.dim(); ++b) {
    std::uint64_t ik = 0, it = 0;
    for (int j = 0; j < nk; ++j) ik = (ik << 1) | ((b >> (n - 1 - keep[j])) & 1);
    for (int j = 0; j < nt; ++j) it = (it << 1) | ((b >> (n - 1 - traced[j])) & 1);
    m(static_cast<Eigen::Index>(ik), static_cast<Eigen::Index>(it)) = state[b];
  }
  return m;
}

/// Partial trace over `traced`; the remaining qubits keep their relative order.
inline DensityMatrix density_from_circuit_reduction(const QubitState& state, const std::vector<int>& traced) {
  const int n = state.num_qubits();
  std::vector<int> keep;
  for (int q = 0; q < n; ++q) {
    const bool t = std::find(traced.begin(), traced.end(), q) != traced.end();
    if (!t) keep.push_back(q);
  }
  for (int q : traced)
    if (q < 0 || q >= n) throw std::out_of_range("traced qubit out of range");
  if (keep.empty()) throw std::invalid_argument("cannot trace out every qubit");
  check_density_size(static_cast<int>(keep.size()));
  const Eigen::MatrixXcd m = split_amplitudes(state, keep);
  return DensityMatrix{static_cast<int>(keep.size()), m * m.adjoint()};
}

namespace detail {

inline Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.eigenvalues().minCoeff() < -tol) throw std::invalid_argument("input is not positive semidefinite");
  const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, computed as the squared trace norm
/// of sqrt(rho) sqrt(sigma) so rank-deficient inputs stay accurate.
inline double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.entries.rows() != sigma.entries.rows()) throw std::invalid_argument("dimension mismatch");
  const double tol = 1e-9;
  const Eigen::MatrixXcd a = detail::psd_sqrt(rho.entries, tol);
  const Eigen::MatrixXcd b = detail::psd_sqrt(sigma.entries, tol);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a * b);
  const double t = svd.singularValues().sum();
  return std::clamp(t * t, 0.0, 1.0);
}

/// Natural-log entropy of a probability vector, 0 ln 0 = 0.
inline double shannon_entropy(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p)
    if (x > 0.0) s -= x * std::log(x);
  return s;
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.entries, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return shannon_entropy(ev);
}

inline double purity(const DensityMatrix& rho) { return (rho.entries * rho.entries).trace().real(); }

/// Entanglement entropy of qubits [0, cut) against [cut, n) from the
/// Schmidt coefficients; no density matrix is formed.
inline double bipartite_entropy(const QubitState& state, int cut) {
  const int n = state.num_qubits();
  if (cut <= 0 || cut >= n) throw std::invalid_argument("cut must satisfy 0 < cut < n");
  const Eigen::Index rows = Eigen::Index{1} << cut;
  const Eigen::Index cols = Eigen::Index{1} << (n - cut);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = state[static_cast<std::size_t>(r * cols + c)];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  std::vector<double> p;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s = svd.singularValues()[i];
    p.push_back(s * s);
  }
  return shannon_entropy(p);
}

/// Partial transpose on one qubit.
inline Eigen::MatrixXcd partial_transpose(const DensityMatrix& rho, int qubit) {
  const int n = rho.num_qubits;
  const Eigen::Index d = Eigen::Index{1} << n;
  const Eigen::Index bit = Eigen::Index{1} << (n - 1 - qubit);
  Eigen::MatrixXcd out(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const Eigen::Index rb = r & bit, cb = c & bit;
      out((r & ~bit) | cb, (c & ~bit) | rb) = rho.entries(r, c);
    }
  }
  return out;
}

}  // namespace varq

#endif  // VARQ_STATEVECTOR_HPP_
