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

// Exact-diagonalization oracles.

#ifndef VARQ_EXACT_HPP_
#define VARQ_EXACT_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <stdexcept>
#include <vector>

#include "varq/pauli.hpp"
#include "varq/statevector.hpp"

namespace varq {

inline constexpr int kMaxExactQubits = 14;
inline constexpr int kMaxGibbsQubits = 10;

struct EigenSolution {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // columns; empty unless requested

  double ground_energy() const { return eigenvalues[0]; }

  QubitState state(Eigen::Index k) const {
    if (eigenvectors.cols() <= k) throw std::out_of_range("eigenvector not retained");
    CVector v(eigenvectors.rows());
    for (Eigen::Index i = 0; i < eigenvectors.rows(); ++i) v[i] = eigenvectors(i, k);
    return QubitState::normalized(std::move(v));
  }
};

namespace detail {

inline EigenSolution diagonalize_dense(const Eigen::MatrixXcd& m, bool real, bool vectors) {
  EigenSolution out;
  const auto opts = vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  if (real) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real(), opts);
    out.eigenvalues = es.eigenvalues();
    if (vectors) out.eigenvectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, opts);
    out.eigenvalues = es.eigenvalues();
    if (vectors) out.eigenvectors = es.eigenvectors();
  }
  return out;
}

}  // namespace detail

/// Full dense Hermitian eigendecomposition, ascending.
inline EigenSolution exact_diagonalize(const PauliHamiltonian& h, bool keep_vectors = false) {
  if (h.num_qubits() > kMaxExactQubits) throw std::invalid_argument("exact diagonalization is limited to 14 qubits");
  return detail::diagonalize_dense(to_matrix(h), h.is_real_matrix(), keep_vectors);
}

/// Matrix of H restricted to span{|b> : b in basis}; H must leave the span
/// invariant (e.g. a particle-number sector). Individual Pauli terms may
/// leak out of the span as long as the leaks cancel.
inline Eigen::MatrixXcd restricted_matrix(const PauliHamiltonian& h, const std::vector<std::uint64_t>& basis) {
  const std::size_t dim = std::size_t{1} << h.num_qubits();
  std::vector<Eigen::Index> pos(dim, -1);
  for (std::size_t k = 0; k < basis.size(); ++k) pos[basis[k]] = static_cast<Eigen::Index>(k);
  const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd out = h.identity_offset() * Eigen::MatrixXcd::Identity(m, m);
  std::map<std::pair<std::uint64_t, Eigen::Index>, cplx> leak;
  for (const PauliTerm& t : h.terms()) {
    for (Eigen::Index c = 0; c < m; ++c) {
      const std::uint64_t b = basis[c];
      const Eigen::Index r = pos[b ^ t.masks.x];
      const cplx v = t.coefficient * detail::pauli_phase(t.masks, b);
      if (r < 0) {
        leak[{b ^ t.masks.x, c}] += v;
      } else {
        out(r, c) += v;
      }
    }
  }
  for (const auto& [key, v] : leak)
    if (std::abs(v) > 1e-10) throw std::invalid_argument("Hamiltonian does not preserve the subspace");
  return out;
}

/// Eigendecomposition inside a basis-state subspace. Eigenvectors are
/// embedded back into the full register.
inline EigenSolution exact_diagonalize_subspace(const PauliHamiltonian& h, const std::vector<std::uint64_t>& basis,
                                                bool keep_vectors = false) {
  if (basis.empty()) throw std::invalid_argument("empty subspace");
  EigenSolution sub = detail::diagonalize_dense(restricted_matrix(h, basis), h.is_real_matrix(), keep_vectors);
  if (!keep_vectors) return sub;
  EigenSolution out;
  out.eigenvalues = sub.eigenvalues;
  out.eigenvectors = Eigen::MatrixXcd::Zero(Eigen::Index{1} << h.num_qubits(), sub.eigenvectors.cols());
  for (std::size_t k = 0; k < basis.size(); ++k) out.eigenvectors.row(basis[k]) = sub.eigenvectors.row(k);
  return out;
}

struct GibbsState {
  DensityMatrix rho;
  std::vector<double> energies;       // ascending
  std::vector<double> probabilities;  // aligned with energies
  double beta = 0.0;
  double log_partition = 0.0;  // ln Z

  /// -ln Z / beta; undefined at beta = 0.
  double free_energy() const {
    if (beta <= 0.0) throw std::domain_error("free energy needs beta > 0");
    return -log_partition / beta;
  }
  double entropy() const { return shannon_entropy(probabilities); }
  double energy() const {
    double e = 0.0;
    for (std::size_t i = 0; i < energies.size(); ++i) e += probabilities[i] * energies[i];
    return e;
  }
};

/// exp(-beta H)/Z from the eigendecomposition, shifted by the ground energy
/// so large beta cannot overflow; underflowing weights become 0.
inline GibbsState exact_gibbs(const PauliHamiltonian& h, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and >= 0");
  if (h.num_qubits() > kMaxGibbsQubits) throw std::invalid_argument("exact Gibbs states are limited to 10 qubits");
  const EigenSolution es = exact_diagonalize(h, true);
  const Eigen::Index d = es.eigenvalues.size();
  const double e0 = es.eigenvalues[0];
  GibbsState g;
  g.beta = beta;
  g.energies.assign(es.eigenvalues.data(), es.eigenvalues.data() + d);
  g.probabilities.resize(d);
  double z = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    g.probabilities[i] = std::exp(-beta * (es.eigenvalues[i] - e0));
    z += g.probabilities[i];
  }
  for (double& p : g.probabilities) p /= z;
  g.log_partition = std::log(z) - beta * e0;
  Eigen::VectorXd p = Eigen::Map<Eigen::VectorXd>(g.probabilities.data(), d);
  g.rho.num_qubits = h.num_qubits();
  g.rho.entries = es.eigenvectors * p.asDiagonal() * es.eigenvectors.adjoint();
  return g;
}

/// Eigenvalue multiset comparison after sorting.
inline double max_spectrum_deviation(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace varq

#endif  // VARQ_EXACT_HPP_
