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

// Model Hamiltonians: spin chains and the SU(N) Hubbard ring.

#ifndef VARQ_MODELS_HPP_
#define VARQ_MODELS_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "varq/pauli.hpp"

namespace varq {

namespace detail {

inline std::string two_site(int n, int a, char la, int b, char lb) {
  std::string s(n, 'I');
  s[a] = la;
  s[b] = lb;
  return s;
}

inline std::string one_site(int n, int a, char la) {
  std::string s(n, 'I');
  s[a] = la;
  return s;
}

inline void check_chain(int n) {
  if (n < 2) throw std::invalid_argument("spin chains need n >= 2");
  if (n > 62) throw std::invalid_argument("spin chain too long");
}

// Bonds (i, i+1), plus (n-1, 0) when periodic. n = 2 periodic yields the
// same bond twice; it is kept, so its coefficient doubles on merging.
inline std::vector<std::pair<int, int>> chain_bonds(int n, bool periodic) {
  std::vector<std::pair<int, int>> b;
  for (int i = 0; i + 1 < n; ++i) b.emplace_back(i, i + 1);
  if (periodic) b.emplace_back(n - 1, 0);
  return b;
}

}  // namespace detail

/// -sum X_i X_{i+1} - h sum Z_i.
inline PauliHamiltonian build_ising(int n, double h, bool periodic = true) {
  detail::check_chain(n);
  std::vector<std::pair<std::string, double>> t;
  for (auto [a, b] : detail::chain_bonds(n, periodic)) t.emplace_back(detail::two_site(n, a, 'X', b, 'X'), -1.0);
  for (int i = 0; i < n; ++i) t.emplace_back(detail::one_site(n, i, 'Z'), -h);
  return PauliHamiltonian(n, t);
}

/// -sum [(1+g)/2 XX + (1-g)/2 YY] - h sum Z.
inline PauliHamiltonian build_xy(int n, double gamma, double h, bool periodic = true) {
  detail::check_chain(n);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  std::vector<std::pair<std::string, double>> t;
  for (auto [a, b] : detail::chain_bonds(n, periodic)) {
    t.emplace_back(detail::two_site(n, a, 'X', b, 'X'), -(1.0 + gamma) / 2.0);
    t.emplace_back(detail::two_site(n, a, 'Y', b, 'Y'), -(1.0 - gamma) / 2.0);
  }
  for (int i = 0; i < n; ++i) t.emplace_back(detail::one_site(n, i, 'Z'), -h);
  return PauliHamiltonian(n, t);
}

/// -(1/4) sum (XX + YY + delta ZZ) - h sum Z.
inline PauliHamiltonian build_xxz(int n, double delta, double h, bool periodic = true) {
  detail::check_chain(n);
  std::vector<std::pair<std::string, double>> t;
  for (auto [a, b] : detail::chain_bonds(n, periodic)) {
    t.emplace_back(detail::two_site(n, a, 'X', b, 'X'), -0.25);
    t.emplace_back(detail::two_site(n, a, 'Y', b, 'Y'), -0.25);
    t.emplace_back(detail::two_site(n, a, 'Z', b, 'Z'), -0.25 * delta);
  }
  for (int i = 0; i < n; ++i) t.emplace_back(detail::one_site(n, i, 'Z'), -h);
  return PauliHamiltonian(n, t);
}

// ---------------------------------------------------------------------------
// SU(N) Hubbard ring. Qubit s*L + i holds colour s on site i; bit value 1
// means occupied.

/// Sign attached to hops that wrap around the ring.
enum class BoundaryParity {
  kFermionic,  // (-1)^(N_s - 1): -1 iff N_s even
  kOddMinus,   // -1 iff N_s odd
};

struct HubbardSpec {
  int L = 2;
  int N = 1;
  std::vector<double> t = {1.0};  // t[r-1] is the range-r hopping
  double U = 0.0;
  std::vector<double> V;  // V[r-1] is the range-r density coupling
  double phi = 0.0;       // flux in units of the flux quantum
  std::vector<int> Ns = {1};
  BoundaryParity parity = BoundaryParity::kFermionic;

  int num_qubits() const { return N * L; }
  int qubit(int colour, int site) const { return colour * L + site; }

  void validate() const {
    if (L < 2) throw std::invalid_argument("Hubbard ring needs L >= 2");
    if (N < 1) throw std::invalid_argument("Hubbard model needs N >= 1");
    if (N * L > 62) throw std::invalid_argument("register too large");
    if (static_cast<int>(Ns.size()) != N) throw std::invalid_argument("Ns must list one particle count per colour");
    for (int n : Ns)
      if (n < 0 || n > L) throw std::invalid_argument("particle count must lie in [0, L]");
    if (static_cast<int>(t.size()) > L / 2) throw std::invalid_argument("hopping range exceeds floor(L/2)");
    if (static_cast<int>(V.size()) > L / 2) throw std::invalid_argument("interaction range exceeds floor(L/2)");
    if (U < 0.0) throw std::invalid_argument("U must be non-negative");
    for (double v : V)
      if (v < 0.0) throw std::invalid_argument("V must be non-negative");
    if (!std::isfinite(phi)) throw std::invalid_argument("flux must be finite");
  }

  /// Sign for the hop from site i over range r in colour s.
  double hop_parity(int s, int i, int r) const {
    if (i + r < L || L == 2 || Ns[s] == 0) return 1.0;
    const bool even = Ns[s] % 2 == 0;
    if (parity == BoundaryParity::kFermionic) return even ? -1.0 : 1.0;
    return even ? 1.0 : -1.0;
  }

  bool operator==(const HubbardSpec&) const = default;
};

namespace detail {

// sum over hops of  coef(s, i, r) * sigma+_a sigma-_b Z_interior + h.c.,
// with a = (s, i), b = (s, i + r mod L) and Z on the ring sites strictly
// between them.
template <class Coef>
PauliSum hubbard_hopping(const HubbardSpec& spec, Coef coef) {
  const int n = spec.num_qubits();
  PauliSum acc(n);
  for (int s = 0; s < spec.N; ++s) {
    for (int r = 1; r <= static_cast<int>(spec.t.size()); ++r) {
      for (int i = 0; i < spec.L; ++i) {
        const cplx c = coef(s, i, r);
        if (c == 0.0) continue;
        const int a = spec.qubit(s, i);
        const int b = spec.qubit(s, (i + r) % spec.L);
        PauliSum op = PauliSum::sigma_plus(n, a) * PauliSum::sigma_minus(n, b);
        for (int k = 1; k < r; ++k) op = op * PauliSum::single(n, spec.qubit(s, (i + k) % spec.L), 'Z');
        op *= c;
        acc += op + op.adjoint();
      }
    }
  }
  return acc;
}

}  // namespace detail

/// Qubit Hamiltonian of the SU(N) Hubbard ring with flux phi.
inline PauliHamiltonian build_hubbard(const HubbardSpec& spec) {
  spec.validate();
  const int n = spec.num_qubits();
  const double theta = 2.0 * std::numbers::pi * spec.phi / spec.L;
  PauliSum h = detail::hubbard_hopping(spec, [&](int s, int i, int r) {
    return -spec.t[r - 1] * spec.hop_parity(s, i, r) * std::polar(1.0, theta);
  });
  auto nocc = [&](int s, int i) { return PauliSum::number(n, spec.qubit(s, i)); };
  if (spec.U != 0.0) {
    for (int i = 0; i < spec.L; ++i)
      for (int s = 0; s < spec.N; ++s)
        for (int s2 = s + 1; s2 < spec.N; ++s2) h += spec.U * (nocc(s, i) * nocc(s2, i));
  }
  for (int r = 1; r <= static_cast<int>(spec.V.size()); ++r) {
    const double v = spec.V[r - 1];
    if (v == 0.0) continue;
    for (int i = 0; i < spec.L; ++i)
      for (int s = 0; s < spec.N; ++s)
        for (int s2 = 0; s2 < spec.N; ++s2) h += v * (nocc(s, i) * nocc(s2, (i + r) % spec.L));
  }
  return PauliHamiltonian::from_sum(h.pruned());
}

/// dH/dphi; the persistent current is I = -<dH/dphi>.
inline PauliHamiltonian build_hubbard_flux_derivative(const HubbardSpec& spec) {
  spec.validate();
  const double k = 2.0 * std::numbers::pi / spec.L;
  const double theta = k * spec.phi;
  PauliSum h = detail::hubbard_hopping(spec, [&](int s, int i, int r) {
    return -spec.t[r - 1] * spec.hop_parity(s, i, r) * cplx(0.0, k) * std::polar(1.0, theta);
  });
  return PauliHamiltonian::from_sum(h.pruned());
}

/// Per-colour particle number sum_i (1 - Z_{sL+i})/2.
inline PauliHamiltonian colour_number_operator(const HubbardSpec& spec, int colour) {
  const int n = spec.num_qubits();
  PauliSum acc(n);
  for (int i = 0; i < spec.L; ++i) acc += PauliSum::number(n, spec.qubit(colour, i));
  return PauliHamiltonian::from_sum(acc);
}

/// Basis indices whose per-colour Hamming weights equal Ns.
inline std::vector<std::uint64_t> hubbard_sector_basis(const HubbardSpec& spec) {
  spec.validate();
  const int n = spec.num_qubits();
  std::vector<std::uint64_t> out;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
    bool ok = true;
    for (int s = 0; s < spec.N && ok; ++s) {
      const int shift = n - (s + 1) * spec.L;
      const std::uint64_t rail = (b >> shift) & ((std::uint64_t{1} << spec.L) - 1);
      ok = std::popcount(rail) == spec.Ns[s];
    }
    if (ok) out.push_back(b);
  }
  return out;
}

/// Number of Pauli terms of the nearest-neighbour model with all couplings on.
inline int hubbard_term_count_formula(int N, int L) { return 3 * N * L * (N + 3) / 2; }

}  // namespace varq

#endif  // VARQ_MODELS_HPP_
