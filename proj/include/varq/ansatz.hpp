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

// Ansatz builders.

#ifndef VARQ_ANSATZ_HPP_
#define VARQ_ANSATZ_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "varq/circuit.hpp"
#include "varq/models.hpp"

namespace varq {

enum class EntanglerTopology { kLinear, kAlternating, kRing };

inline int hva_params_per_layer(int N, int L) { return 3 * N * L - N - L; }
inline int hva_cnots_per_layer(int N, int L) { return 5 * N * L - 3 * N - 2 * L; }

/// Number-preserving Hubbard ansatz. Colour s starts with its Ns[s]
/// particles on the lowest sites, followed by RZ on each occupied line, then
/// per layer: HOP on open-chain neighbours of each colour, CRZ between
/// neighbouring colours on each site, RZ on every qubit.
inline ParametrizedCircuit build_hva_hubbard(const HubbardSpec& spec, int layers) {
  spec.validate();
  if (layers < 1) throw std::invalid_argument("layers must be >= 1");
  const int n = spec.num_qubits();
  int occupied = 0;
  for (int k : spec.Ns) occupied += k;
  if (occupied == 0) return ParametrizedCircuit(n, 0, "hva_hubbard", layers);
  const int per_layer = hva_params_per_layer(spec.N, spec.L);
  ParametrizedCircuit c(n, occupied + layers * per_layer, "hva_hubbard", layers);
  int slot = 0;
  for (int s = 0; s < spec.N; ++s)
    for (int i = 0; i < spec.Ns[s]; ++i) c.add_fixed(gates::X(spec.qubit(s, i)));
  for (int s = 0; s < spec.N; ++s)
    for (int i = 0; i < spec.Ns[s]; ++i) c.add_rotation(GateFamily::kRZ, {spec.qubit(s, i)}, AngleExpr::slot(slot++));
  for (int l = 0; l < layers; ++l) {
    for (int s = 0; s < spec.N; ++s)
      for (int i = 0; i + 1 < spec.L; ++i)
        c.add_rotation(GateFamily::kHop, {spec.qubit(s, i), spec.qubit(s, i + 1)}, AngleExpr::slot(slot++));
    for (int i = 0; i < spec.L; ++i)
      for (int s = 0; s + 1 < spec.N; ++s)
        c.add_rotation(GateFamily::kCRZ, {spec.qubit(s, i), spec.qubit(s + 1, i)}, AngleExpr::slot(slot++));
    for (int q = 0; q < n; ++q) c.add_rotation(GateFamily::kRZ, {q}, AngleExpr::slot(slot++));
  }
  c.validate();
  return c;
}

namespace detail {

inline void ry_layer(ParametrizedCircuit& c, int n, int& slot) {
  for (int q = 0; q < n; ++q) c.add_rotation(GateFamily::kRY, {q}, AngleExpr::slot(slot++));
}

inline std::vector<std::pair<int, int>> entangler_pairs(int n, EntanglerTopology t) {
  std::vector<std::pair<int, int>> p;
  if (t == EntanglerTopology::kLinear || t == EntanglerTopology::kRing) {
    for (int i = 0; i + 1 < n; ++i) p.emplace_back(i, i + 1);
    if (t == EntanglerTopology::kRing && n > 2) p.emplace_back(n - 1, 0);
  } else {
    for (int i = 0; i + 1 < n; i += 2) p.emplace_back(i, i + 1);
    for (int i = 1; i + 1 < n; i += 2) p.emplace_back(i, i + 1);
  }
  return p;
}

}  // namespace detail

/// Per layer: RY on every qubit, then CNOTs; one closing RY layer.
inline ParametrizedCircuit build_hw_efficient_ry(int n, int layers,
                                                 EntanglerTopology topology = EntanglerTopology::kLinear) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (layers < 1) throw std::invalid_argument("layers must be >= 1");
  ParametrizedCircuit c(n, n * (layers + 1), "hw_efficient_ry", layers);
  int slot = 0;
  for (int l = 0; l < layers; ++l) {
    detail::ry_layer(c, n, slot);
    for (auto [a, b] : detail::entangler_pairs(n, topology)) c.add_fixed(gates::CNOT(a, b));
  }
  detail::ry_layer(c, n, slot);
  c.validate();
  return c;
}

/// Entangler-free RY on every qubit (n parameters).
inline ParametrizedCircuit build_product_ry(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  ParametrizedCircuit c(n, n, "product_ry", 0);
  int slot = 0;
  detail::ry_layer(c, n, slot);
  return c;
}

/// R_p(a, b) = RYX(b) RXY(a) on (q0, q1).
inline void add_parity_gate(ParametrizedCircuit& c, int q0, int q1, int slot_a, int slot_b) {
  c.add_rotation(GateFamily::kRXY, {q0, q1}, AngleExpr::slot(slot_a));
  c.add_rotation(GateFamily::kRYX, {q0, q1}, AngleExpr::slot(slot_b));
}

inline std::vector<std::pair<int, int>> brickwall_bonds(int n) {
  std::vector<std::pair<int, int>> b;
  if (n == 2) return {{0, 1}, {1, 0}};
  for (int i = 0; i + 1 < n; i += 2) b.emplace_back(i, i + 1);
  for (int i = 1; i + 1 < n; i += 2) b.emplace_back(i, i + 1);
  b.emplace_back(n - 1, 0);
  return b;
}

/// Even-odd then odd-even sublayers of R_p on a ring; 2n parameters per layer.
inline ParametrizedCircuit build_parity_brickwall(int n, int layers) {
  if (n < 2) throw std::invalid_argument("parity brick-wall needs n >= 2");
  if (layers < 1) throw std::invalid_argument("layers must be >= 1");
  ParametrizedCircuit c(n, 2 * n * layers, "parity_brickwall", layers);
  int slot = 0;
  for (int l = 0; l < layers; ++l) {
    for (auto [a, b] : brickwall_bonds(n)) {
      add_parity_gate(c, a, b, slot, slot + 1);
      slot += 2;
    }
  }
  c.validate();
  return c;
}

/// Grover-Rudolph tree: slot 2^d - 1 + p rotates qubit d when qubits
/// 0..d-1 read the pattern p (qubit 0 most significant).
inline ParametrizedCircuit build_grover_rudolph(int n) {
  if (n < 1 || n > 12) throw std::invalid_argument("Grover-Rudolph ansatz supports 1 <= n <= 12");
  const int np = (1 << n) - 1;
  ParametrizedCircuit c(n, np, "grover_rudolph", 1);
  for (int d = 0; d < n; ++d) {
    std::vector<int> controls;
    for (int q = 0; q < d; ++q) controls.push_back(q);
    std::vector<AngleExpr> angles;
    for (int p = 0; p < (1 << d); ++p) angles.push_back(AngleExpr::slot((1 << d) - 1 + p));
    c.add_ucry(controls, d, angles);
  }
  return c;
}

/// Angles loading `probabilities` (length 2^n) through build_grover_rudolph.
/// Zero-mass subtrees get angle 0.
inline std::vector<double> compute_gr_angles(const std::vector<double>& probabilities) {
  const std::size_t d = probabilities.size();
  if (d < 2 || (d & (d - 1)) != 0) throw std::invalid_argument("need 2^n probabilities with n >= 1");
  for (double p : probabilities)
    if (p < 0.0 || !std::isfinite(p)) throw std::invalid_argument("probabilities must be non-negative");
  const int n = std::countr_zero(d);
  // mass[level][prefix]
  std::vector<std::vector<double>> mass(n + 1);
  mass[n] = probabilities;
  for (int lv = n - 1; lv >= 0; --lv) {
    mass[lv].resize(std::size_t{1} << lv);
    for (std::size_t k = 0; k < mass[lv].size(); ++k) mass[lv][k] = mass[lv + 1][2 * k] + mass[lv + 1][2 * k + 1];
  }
  std::vector<double> theta(d - 1, 0.0);
  for (int lv = 0; lv < n; ++lv) {
    for (std::size_t k = 0; k < mass[lv].size(); ++k) {
      const double left = mass[lv + 1][2 * k], right = mass[lv + 1][2 * k + 1];
      theta[(std::size_t{1} << lv) - 1 + k] = (left + right > 0.0) ? 2.0 * std::atan2(std::sqrt(right), std::sqrt(left)) : 0.0;
    }
  }
  return theta;
}

// ---------------------------------------------------------------------------
// Reduced Grover-Rudolph loader for the 4-qubit periodic XY chain.

/// Tree slots left free, in parameter order.
inline const std::vector<int>& gr_xy_free_slots() {
  static const std::vector<int> s = {0, 1, 2, 3, 5, 6, 7};
  return s;
}

/// Fixed angle for the two slots whose branch energies differ by 4.
inline double gr_xy_fixed_angle(double beta) { return 2.0 * std::atan(std::exp(-2.0 * beta)); }

/// 7-parameter loader: slots 8, 9, 12, 13 = pi/2; slots 11, 14 fixed by
/// beta; slot 10 tied to slot 7; slot 4 = 2 acos(sin(t3/2)/tan(t1/2)).
inline ParametrizedCircuit build_gr_xy_reduced(double h, double gamma, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  (void)h;  // the fixed angles depend on beta only
  const double half_pi = std::numbers::pi / 2;
  std::vector<AngleExpr> slot(15);
  const auto& free = gr_xy_free_slots();
  for (std::size_t k = 0; k < free.size(); ++k) slot[free[k]] = AngleExpr::slot(static_cast<int>(k));
  slot[4] = AngleExpr{0.0, {}, {NonlinearAngle{1.0, 1, 3}}};
  slot[8] = slot[9] = slot[12] = slot[13] = AngleExpr::fixed(half_pi);
  slot[11] = slot[14] = AngleExpr::fixed(gr_xy_fixed_angle(beta));
  slot[10] = AngleExpr::slot(6);
  ParametrizedCircuit c(4, 7, "grover_rudolph_xy_reduced", 1);
  for (int d = 0; d < 4; ++d) {
    std::vector<int> controls;
    for (int q = 0; q < d; ++q) controls.push_back(q);
    std::vector<AngleExpr> angles(slot.begin() + ((1 << d) - 1), slot.begin() + ((1 << (d + 1)) - 1));
    c.add_ucry(controls, d, angles);
  }
  c.validate();
  return c;
}

/// Eigenvalues of build_xy(4, gamma, h, periodic) in the loader's basis
/// order: positive-parity levels ascending, then the negative-parity list.
inline std::vector<double> gr_xy_labelled_energies(double gamma, double h) {
  const double s2 = std::sqrt(2.0);
  const double a = std::sqrt(gamma * gamma + 2 * h * (h - s2) + 1);
  const double b = std::sqrt(gamma * gamma + 2 * h * (h + s2) + 1);
  const double r = std::sqrt(gamma * gamma + h * h);
  std::vector<double> e = {(-a - b) / s2, (a - b) / s2, 0, 0, 0, 0, (-a + b) / s2, (a + b) / s2,
                           -1 - r,        1 - r,        -h, -h, h, h, -1 + r,       1 + r};
  for (double& x : e) x *= 2.0;
  return e;
}

inline std::vector<double> boltzmann(const std::vector<double>& energies, double beta) {
  double e0 = energies[0];
  for (double e : energies) e0 = std::min(e0, e);
  std::vector<double> p(energies.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) z += p[i] = std::exp(-beta * (energies[i] - e0));
  for (double& x : p) x /= z;
  return p;
}

}  // namespace varq

#endif  // VARQ_ANSATZ_HPP_
