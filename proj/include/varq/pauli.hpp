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

// Pauli-string algebra and Hermitian Pauli Hamiltonians.
//
// A Pauli string is stored as an (x, z) mask pair using the statevector bit
// convention (qubit q <-> bit n-1-q). X = (1,0), Z = (0,1), Y = (1,1); the Y
// label means the Hermitian Y, not XZ.

#ifndef VARQ_PAULI_HPP_
#define VARQ_PAULI_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "varq/statevector.hpp"

namespace varq {

inline constexpr double kPruneTolerance = 1e-14;

struct PauliMasks {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  auto operator<=>(const PauliMasks&) const = default;
};

inline PauliMasks masks_from_labels(std::string_view labels) {
  check_pauli_labels(labels);
  const int n = static_cast<int>(labels.size());
  PauliMasks m;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    if (labels[q] == 'X' || labels[q] == 'Y') m.x |= bit;
    if (labels[q] == 'Z' || labels[q] == 'Y') m.z |= bit;
  }
  return m;
}

inline std::string labels_from_masks(PauliMasks m, int n) {
  std::string s(n, 'I');
  for (int q = 0; q < n; ++q) {
    const int b = n - 1 - q;
    const bool x = (m.x >> b) & 1, z = (m.z >> b) & 1;
    s[q] = x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }
  return s;
}

inline cplx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

/// Product of two Pauli strings: a * b = phase * c.
inline std::pair<cplx, PauliMasks> multiply_paulis(PauliMasks a, PauliMasks b) {
  // Write P = i^{|x&z|} X^x Z^z. Moving Z^{z_a} past X^{x_b} costs (-1)^{|z_a & x_b|}.
  const PauliMasks c{a.x ^ b.x, a.z ^ b.z};
  int k = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) - std::popcount(c.x & c.z);
  k += 2 * std::popcount(a.z & b.x);
  return {i_power(k), c};
}

inline bool paulis_commute(PauliMasks a, PauliMasks b) {
  return ((std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) & 1) == 0;
}

/// True when the strings commute qubit by qubit (same label or an identity).
inline bool qubitwise_commute(PauliMasks a, PauliMasks b) {
  const std::uint64_t sa = a.x | a.z, sb = b.x | b.z;
  const std::uint64_t both = sa & sb;
  return ((a.x ^ b.x) & both) == 0 && ((a.z ^ b.z) & both) == 0;
}

/// General complex linear combination of Pauli strings, closed under
/// multiplication. Used to build Hamiltonians from ladder operators.
class PauliSum {
 public:
  explicit PauliSum(int n = 0) : n_(n) {
    if (n < 0 || n > 62) throw std::invalid_argument("qubit count out of range");
  }

  static PauliSum identity(int n, cplx c = 1.0) {
    PauliSum s(n);
    s.add(PauliMasks{}, c);
    return s;
  }

  static PauliSum single(int n, int q, char label, cplx c = 1.0) {
    if (q < 0 || q >= n) throw std::out_of_range("qubit index out of range");
    std::string l(n, 'I');
    l[q] = label;
    PauliSum s(n);
    s.add(masks_from_labels(l), c);
    return s;
  }

  static PauliSum from_label(std::string_view labels, cplx c = 1.0) {
    PauliSum s(static_cast<int>(labels.size()));
    s.add(masks_from_labels(labels), c);
    return s;
  }

  /// (X + iY)/2 = |0><1| on qubit q (lowers the bit value).
  static PauliSum sigma_plus(int n, int q) { return single(n, q, 'X', 0.5) + single(n, q, 'Y', cplx(0, 0.5)); }
  /// (X - iY)/2 = |1><0|.
  static PauliSum sigma_minus(int n, int q) { return single(n, q, 'X', 0.5) + single(n, q, 'Y', cplx(0, -0.5)); }
  /// (1 - Z)/2, the occupation of qubit q.
  static PauliSum number(int n, int q) { return identity(n, 0.5) + single(n, q, 'Z', -0.5); }

  int num_qubits() const { return n_; }
  const std::map<PauliMasks, cplx>& terms() const { return terms_; }

  void add(PauliMasks m, cplx c) {
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) it->second += c;
  }

  PauliSum& operator+=(const PauliSum& o) {
    check_size(o);
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  PauliSum& operator-=(const PauliSum& o) { return *this += o * cplx(-1.0); }
  PauliSum& operator*=(cplx c) {
    for (auto& [m, v] : terms_) v *= c;
    return *this;
  }

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cplx c) { return a *= c; }
  friend PauliSum operator*(cplx c, PauliSum a) { return a *= c; }

  friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    a.check_size(b);
    PauliSum out(a.n_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        const auto [phase, mc] = multiply_paulis(ma, mb);
        out.add(mc, phase * ca * cb);
      }
    }
    return out;
  }

  PauliSum adjoint() const {
    PauliSum out(n_);
    for (const auto& [m, c] : terms_) out.add(m, std::conj(c));
    return out;
  }

  PauliSum pruned(double tol = kPruneTolerance) const {
    PauliSum out(n_);
    for (const auto& [m, c] : terms_)
      if (std::abs(c) >= tol) out.add(m, c);
    return out;
  }

 private:
  void check_size(const PauliSum& o) const {
    if (o.n_ != n_) throw std::invalid_argument("Pauli sums act on different registers");
  }

  int n_;
  std::map<PauliMasks, cplx> terms_;
};

struct PauliTerm {
  double coefficient = 0.0;
  std::string labels;
  PauliMasks masks;
};

/// Canonical Hermitian Hamiltonian: real coefficients, no identity term
/// (kept in identity_offset), unique label strings sorted lexicographically,
/// |w| < 1e-14 dropped.
class PauliHamiltonian {
 public:
  PauliHamiltonian() = default;

  PauliHamiltonian(int n, const std::vector<std::pair<std::string, double>>& terms, double offset = 0.0)
      : n_(n), offset_(offset) {
    if (n < 1 || n > 62) throw std::invalid_argument("qubit count out of range");
    std::map<std::string, double> merged;
    for (const auto& [l, c] : terms) {
      if (static_cast<int>(l.size()) != n) throw std::invalid_argument("label length must equal qubit count");
      check_pauli_labels(l);
      if (l.find_first_not_of('I') == std::string::npos) {
        offset_ += c;
      } else {
        merged[l] += c;
      }
    }
    for (const auto& [l, c] : merged)
      if (std::abs(c) >= kPruneTolerance) terms_.push_back({c, l, masks_from_labels(l)});
  }

  /// Throws if any coefficient has an imaginary part above `tol`.
  static PauliHamiltonian from_sum(const PauliSum& s, double tol = 1e-12) {
    std::vector<std::pair<std::string, double>> t;
    double offset = 0.0;
    for (const auto& [m, c] : s.terms()) {
      if (std::abs(c.imag()) > tol) throw std::invalid_argument("Pauli sum is not Hermitian");
      if (m.x == 0 && m.z == 0) {
        offset += c.real();
      } else {
        t.emplace_back(labels_from_masks(m, s.num_qubits()), c.real());
      }
    }
    return PauliHamiltonian(s.num_qubits(), t, offset);
  }

  int num_qubits() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  double identity_offset() const { return offset_; }

  PauliSum to_sum() const {
    PauliSum s = PauliSum::identity(n_, offset_);
    for (const PauliTerm& t : terms_) s.add(t.masks, t.coefficient);
    return s.pruned();
  }

  bool is_real_matrix() const {
    for (const PauliTerm& t : terms_)
      if (std::popcount(t.masks.x & t.masks.z) & 1) return false;
    return true;
  }

  bool is_diagonal() const {
    for (const PauliTerm& t : terms_)
      if (t.masks.x != 0) return false;
    return true;
  }

  friend PauliHamiltonian operator+(const PauliHamiltonian& a, const PauliHamiltonian& b) {
    return from_sum(a.to_sum() + b.to_sum());
  }
  friend PauliHamiltonian operator*(double c, const PauliHamiltonian& a) {
    std::vector<std::pair<std::string, double>> t;
    for (const PauliTerm& p : a.terms_) t.emplace_back(p.labels, c * p.coefficient);
    return PauliHamiltonian(a.n_, t, c * a.offset_);
  }

  bool operator==(const PauliHamiltonian& o) const {
    if (n_ != o.n_ || offset_ != o.offset_ || terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].labels != o.terms_[i].labels || terms_[i].coefficient != o.terms_[i].coefficient) return false;
    return true;
  }

 private:
  int n_ = 0;
  std::vector<PauliTerm> terms_;
  double offset_ = 0.0;
};

namespace detail {

// phase of P|b> = i^{|x&z|} (-1)^{|b&z|} |b^x>
inline cplx pauli_phase(PauliMasks m, std::uint64_t b) {
  const cplx base = i_power(std::popcount(m.x & m.z));
  return (std::popcount(b & m.z) & 1) ? -base : base;
}

}  // namespace detail

/// out = H |in>, including the identity offset.
inline void apply_hamiltonian(const PauliHamiltonian& h, const CVector& in, CVector& out) {
  const std::size_t dim = in.size();
  if (dim != (std::size_t{1} << h.num_qubits())) throw std::invalid_argument("dimension mismatch");
  out.assign(dim, 0.0);
  for (std::size_t b = 0; b < dim; ++b) out[b] = h.identity_offset() * in[b];
  for (const PauliTerm& t : h.terms()) {
    const cplx base = t.coefficient * i_power(std::popcount(t.masks.x & t.masks.z));
    for (std::size_t b = 0; b < dim; ++b) {
      const cplx v = (std::popcount(b & t.masks.z) & 1) ? -base : base;
      out[b ^ t.masks.x] += v * in[b];
    }
  }
}

inline double expectation(const PauliHamiltonian& h, const QubitState& s) {
  if (s.num_qubits() != h.num_qubits()) throw std::invalid_argument("dimension mismatch");
  CVector hv;
  apply_hamiltonian(h, s.amplitudes(), hv);
  cplx acc = 0.0;
  for (std::size_t b = 0; b < hv.size(); ++b) acc += std::conj(s[b]) * hv[b];
  return acc.real();
}

/// <psi|P|psi> for a single string using the mask form.
inline cplx expectation_masks(PauliMasks m, const CVector& v) {
  cplx acc = 0.0;
  for (std::size_t b = 0; b < v.size(); ++b) acc += std::conj(v[b ^ m.x]) * detail::pauli_phase(m, b) * v[b];
  return acc;
}

inline Eigen::MatrixXcd to_matrix(const PauliHamiltonian& h) {
  if (h.num_qubits() > 14) throw std::invalid_argument("dense matrices are limited to 14 qubits");
  const Eigen::Index d = Eigen::Index{1} << h.num_qubits();
  Eigen::MatrixXcd m = h.identity_offset() * Eigen::MatrixXcd::Identity(d, d);
  for (const PauliTerm& t : h.terms())
    for (Eigen::Index b = 0; b < d; ++b)
      m(b ^ static_cast<Eigen::Index>(t.masks.x), b) += t.coefficient * detail::pauli_phase(t.masks, b);
  return m;
}

/// Dense matrix of a single Pauli string (oracle use).
inline Eigen::MatrixXcd pauli_matrix(std::string_view labels) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (char c : labels) {
    Eigen::Matrix2cd p;
    switch (c) {
      case 'I': p << 1, 0, 0, 1; break;
      case 'X': p << 0, 1, 1, 0; break;
      case 'Y': p << 0, cplx(0, -1), cplx(0, 1), 0; break;
      case 'Z': p << 1, 0, 0, -1; break;
      default: throw std::invalid_argument("invalid Pauli label");
    }
    Eigen::MatrixXcd k(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) k.block(2 * i, 2 * j, 2, 2) = m(i, j) * p;
    m = std::move(k);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Text serialization: header "qubits=<n> offset=<c>", then "coef\tlabels".

inline std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

/// Shortest representation that round-trips exactly.
inline std::string format_double_short(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("bad number: " + std::string(s));
  return v;
}

inline void write_hamiltonian(std::ostream& os, const PauliHamiltonian& h) {
  os << "qubits=" << h.num_qubits() << " offset=" << format_double_short(h.identity_offset()) << '\n';
  for (const PauliTerm& t : h.terms()) os << format_double_short(t.coefficient) << '\t' << t.labels << '\n';
}

inline PauliHamiltonian read_hamiltonian(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("missing header");
  int n = 0;
  double offset = 0.0;
  {
    std::istringstream hs(line);
    std::string a, b;
    hs >> a >> b;
    if (a.rfind("qubits=", 0) != 0 || b.rfind("offset=", 0) != 0) throw std::invalid_argument("bad header: " + line);
    n = std::stoi(a.substr(7));
    offset = parse_double(b.substr(7));
  }
  std::vector<std::pair<std::string, double>> terms;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw std::invalid_argument("bad term line: " + line);
    terms.emplace_back(line.substr(tab + 1), parse_double(std::string_view(line).substr(0, tab)));
  }
  return PauliHamiltonian(n, terms, offset);
}

}  // namespace varq

#endif  // VARQ_PAULI_HPP_
