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

// Closest fully separable state search (variational separability verifier),
// destructive SWAP overlaps, X-MEMS references and the Gilbert baseline.
//
// Product components use cos(theta)|0> + e^{i phi} sin(theta)|1> per qubit,
// with theta in [0, pi) and phi in [0, 2 pi). The Bloch polar angle is
// 2 theta.

#ifndef VARQ_VSV_HPP_
#define VARQ_VSV_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "varq/optimize.hpp"
#include "varq/rng.hpp"
#include "varq/statevector.hpp"

namespace varq {

namespace detail {

inline double wrap_angle(double v, double period) {
  double r = std::fmod(v, period);
  if (r < 0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

inline std::array<cplx, 2> qubit_factor(double theta, double phi) {
  return {cplx(std::cos(theta), 0.0), std::polar(std::sin(theta), phi)};
}

inline cplx factor_inner(const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

inline QubitState product_of(const std::vector<std::array<cplx, 2>>& f) {
  const int n = static_cast<int>(f.size());
  CVector v(std::size_t{1} << n);
  for (std::uint64_t b = 0; b < v.size(); ++b) {
    cplx a = 1.0;
    for (int q = 0; q < n; ++q) a *= f[q][(b >> (n - 1 - q)) & 1];
    v[b] = a;
  }
  QubitState s = QubitState::zero(n);
  s.mutable_amplitudes() = std::move(v);
  return s;
}

}  // namespace detail

/// One product pure state per row of angles.
inline QubitState separable_pure_state(std::span<const double> theta_row, std::span<const double> phi_row) {
  if (theta_row.empty() || theta_row.size() != phi_row.size())
    throw std::invalid_argument("separable_pure_state needs one theta and one phi per qubit");
  std::vector<std::array<cplx, 2>> f;
  for (std::size_t q = 0; q < theta_row.size(); ++q) f.push_back(detail::qubit_factor(theta_row[q], phi_row[q]));
  return detail::product_of(f);
}

/// Tr[(rho - sigma)^2] from the three traces; tiny negative rounding is clipped.
inline double hsd(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.entries.rows() != sigma.entries.rows() || rho.entries.cols() != sigma.entries.cols())
    throw std::invalid_argument("hsd: dimension mismatch");
  const double cross = (rho.entries * sigma.entries).trace().real();
  return std::max(0.0, purity(rho) + purity(sigma) - 2.0 * cross);
}

struct SeparableEnsemble {
  int n = 0;
  int s = 0;
  std::vector<double> p;
  std::vector<double> theta;  // s x n, row-major
  std::vector<double> phi;

  std::span<const double> theta_row(int i) const { return {theta.data() + static_cast<std::size_t>(i) * n, static_cast<std::size_t>(n)}; }
  std::span<const double> phi_row(int i) const { return {phi.data() + static_cast<std::size_t>(i) * n, static_cast<std::size_t>(n)}; }
  QubitState component(int i) const { return separable_pure_state(theta_row(i), phi_row(i)); }
  std::size_t num_params() const { return static_cast<std::size_t>(s) * (2 * n + 1); }

  std::uint64_t angles_hash() const {
    std::vector<double> all(theta);
    all.insert(all.end(), phi.begin(), phi.end());
    return hash_params(all) ^ mix64(static_cast<std::uint64_t>(n) << 32 | static_cast<std::uint64_t>(s));
  }

  void validate() const {
    if (n < 1 || s < 1) throw std::invalid_argument("ensemble needs n >= 1 and s >= 1");
    const std::size_t sn = static_cast<std::size_t>(s) * n;
    if (p.size() != static_cast<std::size_t>(s) || theta.size() != sn || phi.size() != sn)
      throw std::invalid_argument("ensemble arrays have wrong length");
    double t = 0.0;
    for (double x : p) {
      if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("ensemble weight outside [0, 1]");
      t += x;
    }
    if (std::abs(t - 1.0) > 1e-12) throw std::invalid_argument("ensemble weights do not sum to 1");
    for (double x : theta)
      if (!(x >= 0.0 && x < std::numbers::pi)) throw std::invalid_argument("theta outside [0, pi)");
    for (double x : phi)
      if (!(x >= 0.0 && x < 2.0 * std::numbers::pi)) throw std::invalid_argument("phi outside [0, 2 pi)");
  }
};

/// Ensemble from a flat [theta..., phi...] vector, wrapped into the angle box.
/// Weights default to uniform.
inline SeparableEnsemble make_ensemble(int n, int s, std::span<const double> angles, std::vector<double> p = {}) {
  const std::size_t sn = static_cast<std::size_t>(s) * n;
  if (angles.size() != 2 * sn) throw std::invalid_argument("angle vector must hold 2 s n entries");
  SeparableEnsemble e;
  e.n = n;
  e.s = s;
  e.theta.resize(sn);
  e.phi.resize(sn);
  for (std::size_t k = 0; k < sn; ++k) {
    e.theta[k] = detail::wrap_angle(angles[k], std::numbers::pi);
    e.phi[k] = detail::wrap_angle(angles[sn + k], 2.0 * std::numbers::pi);
  }
  e.p = p.empty() ? std::vector<double>(s, 1.0 / s) : std::move(p);
  return e;
}

inline DensityMatrix assemble_separable(const SeparableEnsemble& e) {
  check_density_size(e.n);
  const Eigen::Index d = Eigen::Index{1} << e.n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < e.s; ++i) {
    const Eigen::VectorXcd v = to_eigen(e.component(i));
    m += e.p[i] * v * v.adjoint();
  }
  return DensityMatrix{e.n, m};
}

// ---------------------------------------------------------------------------
// Destructive SWAP test

enum class OverlapKind { kExact, kShots };

struct OverlapMode {
  OverlapKind kind = OverlapKind::kExact;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  static OverlapMode exact() { return {}; }
  static OverlapMode sampled(std::uint64_t shots, std::uint64_t seed) { return {OverlapKind::kShots, shots, seed}; }
  bool is_exact() const { return kind == OverlapKind::kExact; }
  void validate() const {
    if (kind == OverlapKind::kShots && shots == 0) throw std::invalid_argument("shots mode needs shots >= 1");
  }
};

/// Outcome distribution of the 2n-qubit circuit: register a on qubits
/// 0..n-1, b on n..2n-1, CNOT(j, n+j) then H(j) for every pair.
inline std::vector<double> destructive_swap_distribution(const QubitState& a, const QubitState& b) {
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("destructive SWAP needs equal qubit counts");
  const int n = a.num_qubits();
  QubitState s = a.tensor(b);
  for (int j = 0; j < n; ++j) {
    apply_gate_inplace(s, gates::CNOT(j, n + j));
    apply_gate_inplace(s, gates::H(j));
  }
  return s.probabilities();
}

/// Per-shot value: -1 iff an odd number of pairs read 11.
inline int swap_outcome_sign(std::uint64_t outcome, int n) {
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  return (std::popcount((outcome >> n) & outcome & mask) & 1) ? -1 : 1;
}

namespace detail {

inline double swap_estimate(const std::vector<double>& probs, int n, std::uint64_t shots, std::uint64_t seed) {
  const ShotCounts c = sample_probabilities(probs, 2 * n, shots, seed);
  double acc = 0.0;
  for (const auto& [k, v] : c.counts) acc += static_cast<double>(swap_outcome_sign(k, n)) * static_cast<double>(v);
  return acc / static_cast<double>(shots);
}

// Spectral form of a mixed input, prepared once.
struct SwapTarget {
  int n = 0;
  std::vector<std::pair<double, QubitState>> terms;
  Eigen::MatrixXcd rho;

  explicit SwapTarget(const DensityMatrix& r) : n(r.num_qubits), rho(r.entries) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r.entries);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const double w = es.eigenvalues()[k];
      if (w <= 1e-14) continue;
      CVector v(static_cast<std::size_t>(es.eigenvectors().rows()));
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), k);
      terms.emplace_back(w, QubitState::normalized(std::move(v)));
    }
  }

  std::vector<double> distribution(const QubitState& b) const {
    std::vector<double> out(std::size_t{1} << (2 * n), 0.0);
    for (const auto& [w, st] : terms) {
      const std::vector<double> d = destructive_swap_distribution(st, b);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * d[i];
    }
    return out;
  }

  std::vector<double> self_distribution() const {
    std::vector<double> out(std::size_t{1} << (2 * n), 0.0);
    for (const auto& [wa, a] : terms)
      for (const auto& [wb, b] : terms) {
        const std::vector<double> d = destructive_swap_distribution(a, b);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += wa * wb * d[i];
      }
    return out;
  }

  double exact_cross(const QubitState& b) const {
    const Eigen::VectorXcd v = to_eigen(b);
    return (v.adjoint() * rho * v)(0, 0).real();
  }
};

}  // namespace detail

/// Estimate of |<a|b>|^2; exact mode returns the overlap without sampling.
inline double destructive_swap_overlap(const QubitState& a, const QubitState& b, const OverlapMode& mode) {
  mode.validate();
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("destructive SWAP needs equal qubit counts");
  if (mode.is_exact()) return std::norm(inner_product(a, b));
  return detail::swap_estimate(destructive_swap_distribution(a, b), a.num_qubits(), mode.shots, mode.seed);
}

inline double destructive_swap_overlap(const QubitState& a, const QubitState& b, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("shots mode needs shots >= 1");
  return destructive_swap_overlap(a, b, OverlapMode::sampled(shots, seed));
}

/// Estimate of Tr(rho |b><b|), sampling the mixture of eigenvector circuits.
inline double destructive_swap_overlap(const DensityMatrix& rho, const QubitState& b, const OverlapMode& mode) {
  mode.validate();
  if (rho.num_qubits != b.num_qubits()) throw std::invalid_argument("destructive SWAP needs equal qubit counts");
  const detail::SwapTarget t(rho);
  if (mode.is_exact()) return t.exact_cross(b);
  return detail::swap_estimate(t.distribution(b), b.num_qubits(), mode.shots, mode.seed);
}

// ---------------------------------------------------------------------------
// Overlap cache

struct OverlapCache {
  double rho_purity = 0.0;
  std::vector<double> cross;  // <psi_i|rho|psi_i>, clamped to [0, 1]
  Eigen::MatrixXd gram;       // |<psi_i|psi_j>|^2, clamped, unit diagonal
  std::vector<double> raw_cross;
  Eigen::MatrixXd raw_gram;
  double raw_purity = 0.0;
  OverlapMode mode;
  std::uint64_t angles_hash = 0;
  int circuits = 0;
};

namespace detail {

inline std::vector<std::array<cplx, 2>> factors_of(const SeparableEnsemble& e, int i) {
  std::vector<std::array<cplx, 2>> f(e.n);
  for (int q = 0; q < e.n; ++q) f[q] = qubit_factor(e.theta[i * e.n + q], e.phi[i * e.n + q]);
  return f;
}

// Entry k of a shots-mode cache uses Rng(seed).split(stream).split(k):
// k < s for cross terms, then the upper gram triangle row by row.
inline OverlapCache build_cache(const SwapTarget& t, double purity_value, double raw_purity, const SeparableEnsemble& e,
                                const OverlapMode& mode, std::uint64_t stream) {
  mode.validate();
  if (t.n != e.n) throw std::invalid_argument("ensemble and state sizes differ");
  const int s = e.s;
  OverlapCache c;
  c.mode = mode;
  c.angles_hash = e.angles_hash();
  c.rho_purity = purity_value;
  c.raw_purity = raw_purity;
  c.cross.resize(s);
  c.raw_cross.resize(s);
  c.gram = Eigen::MatrixXd::Identity(s, s);
  std::vector<QubitState> comps;
  for (int i = 0; i < s; ++i) comps.push_back(e.component(i));
  const Rng base = Rng(mode.seed).split(stream);
  for (int i = 0; i < s; ++i) {
    const double v = mode.is_exact() ? t.exact_cross(comps[i])
                                     : swap_estimate(t.distribution(comps[i]), e.n, mode.shots, base.split(i).seed());
    c.raw_cross[i] = v;
    c.cross[i] = std::clamp(v, 0.0, 1.0);
  }
  std::vector<std::vector<std::array<cplx, 2>>> f;
  if (mode.is_exact())
    for (int i = 0; i < s; ++i) f.push_back(factors_of(e, i));
  c.raw_gram = c.gram;
  std::uint64_t k = static_cast<std::uint64_t>(s);
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j, ++k) {
      double v;
      if (mode.is_exact()) {
        cplx o = 1.0;
        for (int q = 0; q < e.n; ++q) o *= factor_inner(f[i][q], f[j][q]);
        v = std::norm(o);
      } else {
        v = swap_estimate(destructive_swap_distribution(comps[i], comps[j]), e.n, mode.shots, base.split(k).seed());
      }
      c.raw_gram(i, j) = c.raw_gram(j, i) = v;
      c.gram(i, j) = c.gram(j, i) = std::clamp(v, 0.0, 1.0);
    }
  if (!mode.is_exact()) c.circuits = s + s * (s - 1) / 2;
  return c;
}

inline std::pair<double, double> purity_estimate(const SwapTarget& t, const OverlapMode& mode) {
  const double exact = (t.rho * t.rho).trace().real();
  if (mode.is_exact()) return {exact, exact};
  const double raw = swap_estimate(t.self_distribution(), t.n, mode.shots, Rng(mode.seed).split(~std::uint64_t{0}).seed());
  return {std::clamp(raw, 0.0, 1.0), raw};
}

}  // namespace detail

/// Overlap cache for the ensemble's current angles. The purity estimate in
/// shots mode uses its own stream, independent of `stream`.
inline OverlapCache build_overlap_cache(const DensityMatrix& rho, const SeparableEnsemble& e, const OverlapMode& mode,
                                        std::uint64_t stream = 0) {
  e.validate();
  if (rho.num_qubits != e.n) throw std::invalid_argument("ensemble and state sizes differ");
  const detail::SwapTarget t(rho);
  const auto [pur, raw] = detail::purity_estimate(t, mode);
  return detail::build_cache(t, pur, raw, e, mode, stream);
}

namespace detail {

inline double quadratic_hsd(double purity_value, const Eigen::MatrixXd& g, const std::vector<double>& c,
                            std::span<const double> p) {
  double v = purity_value;
  for (std::size_t i = 0; i < p.size(); ++i) {
    v -= 2.0 * p[i] * c[i];
    for (std::size_t j = 0; j < p.size(); ++j)
      v += p[i] * p[j] * g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return v;
}

}  // namespace detail

/// Tr rho^2 + p^T G p - 2 p.c from the cache. Throws on a stale cache.
inline double ensemble_hsd(const DensityMatrix& rho, const SeparableEnsemble& e, const OverlapCache& cache) {
  if (rho.num_qubits != e.n) throw std::invalid_argument("ensemble and state sizes differ");
  if (cache.angles_hash != e.angles_hash()) throw std::invalid_argument("stale overlap cache");
  if (cache.gram.rows() != e.s || static_cast<int>(cache.cross.size()) != e.s || static_cast<int>(e.p.size()) != e.s)
    throw std::invalid_argument("cache and ensemble sizes differ");
  return detail::quadratic_hsd(cache.rho_purity, cache.gram, cache.cross, e.p);
}

// ---------------------------------------------------------------------------
// Lower level: min_p p^T G p - 2 c.p over the probability simplex

struct SimplexQpResult {
  std::vector<double> p;
  double value = 0.0;  // p^T G p - 2 c.p
  int iterations = 0;
  bool used_fallback = false;
};

/// Largest violation of the simplex KKT conditions with w = G p - c:
/// w_i equal on the support, w_i >= that level off it.
inline double simplex_kkt_residual(const Eigen::MatrixXd& g, const std::vector<double>& c, const std::vector<double>& p,
                                   double support_tol = 1e-12) {
  const Eigen::Index s = g.rows();
  Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.data(), s);
  const Eigen::VectorXd w = g * pv - Eigen::Map<const Eigen::VectorXd>(c.data(), s);
  const double nu = pv.dot(w);
  double r = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    r = std::max(r, nu - w[i]);
    if (pv[i] > support_tol) r = std::max(r, std::abs(w[i] - nu));
  }
  return r;
}

/// Euclidean projection onto the probability simplex.
inline std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0) tau = t;
  }
  for (double& x : v) x = std::max(0.0, x - tau);
  return v;
}

namespace detail {

inline SimplexQpResult simplex_projected_gradient(const Eigen::MatrixXd& g, const std::vector<double>& c) {
  const int s = static_cast<int>(g.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const double lmax = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-12);
  std::vector<double> p(s, 1.0 / s);
  SimplexQpResult r;
  for (int it = 0; it < 200000; ++it) {
    std::vector<double> q(s);
    for (int i = 0; i < s; ++i) {
      double w = -c[i];
      for (int j = 0; j < s; ++j) w += g(i, j) * p[j];
      q[i] = p[i] - w / lmax;
    }
    q = project_simplex(std::move(q));
    double dmax = 0.0;
    for (int i = 0; i < s; ++i) dmax = std::max(dmax, std::abs(q[i] - p[i]));
    p = std::move(q);
    r.iterations = it + 1;
    if (dmax < 1e-15) break;
  }
  r.p = std::move(p);
  r.used_fallback = true;
  return r;
}

}  // namespace detail

/// Primal active-set method over simplex faces. Indefinite G (possible with
/// clamped shot estimates) or a stalled active set fall back to projected
/// gradient.
inline SimplexQpResult solve_simplex_qp(const Eigen::MatrixXd& g, const std::vector<double>& c, double tol = 1e-12) {
  const int s = static_cast<int>(g.rows());
  if (s < 1 || g.cols() != s || static_cast<int>(c.size()) != s) throw std::invalid_argument("QP size mismatch");
  auto finish = [&](SimplexQpResult r) {
    double t = 0.0;
    for (double& x : r.p) t += (x = std::max(0.0, x));
    for (double& x : r.p) x /= t;
    r.value = detail::quadratic_hsd(0.0, g, c, r.p);
    return r;
  };
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12) return finish(detail::simplex_projected_gradient(g, c));

  int k0 = 0;
  for (int i = 1; i < s; ++i)
    if (g(i, i) - 2 * c[i] < g(k0, k0) - 2 * c[k0]) k0 = i;
  std::vector<double> p(s, 0.0);
  p[k0] = 1.0;
  std::vector<char> in(s, 0);
  in[k0] = 1;
  SimplexQpResult r;
  const int max_iter = 20 * s + 100;
  for (int it = 0; it < max_iter; ++it) {
    r.iterations = it + 1;
    std::vector<int> idx;
    for (int i = 0; i < s; ++i)
      if (in[i]) idx.push_back(i);
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs(m + 1);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) k(a, b) = g(idx[a], idx[b]);
      k(a, m) = k(m, a) = 1.0;
      rhs[a] = c[idx[a]];
    }
    rhs[m] = 1.0;
    const Eigen::VectorXd sol = k.completeOrthogonalDecomposition().solve(rhs);
    std::vector<double> q(s, 0.0);
    bool feasible = true;
    for (int a = 0; a < m; ++a) {
      q[idx[a]] = sol[a];
      if (sol[a] < -tol) feasible = false;
    }
    if (feasible) {
      for (int a = 0; a < m; ++a) p[idx[a]] = std::max(0.0, q[idx[a]]);
      double nu = 0.0;
      std::vector<double> w(s);
      for (int i = 0; i < s; ++i) {
        w[i] = -c[i];
        for (int j = 0; j < s; ++j) w[i] += g(i, j) * p[j];
        nu += p[i] * w[i];
      }
      int best = -1;
      double worst = -tol;
      for (int i = 0; i < s; ++i)
        if (!in[i] && w[i] - nu < worst) {
          worst = w[i] - nu;
          best = i;
        }
      if (best < 0) {
        r.p = p;
        return finish(r);
      }
      in[best] = 1;
    } else {
      double alpha = 1.0;
      int block = -1;
      for (int a = 0; a < m; ++a) {
        const int i = idx[a];
        if (q[i] < p[i] && q[i] < 0.0) {
          const double t = p[i] / (p[i] - q[i]);
          if (t < alpha) {
            alpha = t;
            block = i;
          }
        }
      }
      for (int a = 0; a < m; ++a) p[idx[a]] += alpha * (q[idx[a]] - p[idx[a]]);
      if (block >= 0) p[block] = 0.0;
      for (int a = 0; a < m; ++a)
        if (p[idx[a]] <= 0.0 && m > 1) {
          p[idx[a]] = 0.0;
          in[idx[a]] = 0;
        }
    }
  }
  return finish(detail::simplex_projected_gradient(g, c));
}

// ---------------------------------------------------------------------------
// Upper level

struct VsvOptions {
  int s = 0;  // components; 0 = 2^n
  OptimizerConfig upper;
  double lower_tolerance = 1e-12;
  OverlapMode mode;
  int runs = 1;
  std::uint64_t seed = 0;
  // Exact mode: after each run, move a zero-weight component to the product
  // state of lowest <psi|sigma - rho|psi> and polish again, while that lowers
  // the cost. Zero-weight components have zero gradient otherwise.
  bool revive = true;
  int revive_starts = 16;
};

/// GSA over the angle box with a quasi-Newton polish on the exact envelope
/// gradient.
inline OptimizerConfig vsv_default_upper() {
  OptimizerConfig c;
  c.kind = OptimizerKind::kGsa;
  c.max_evaluations = 200000;
  c.gsa.max_iterations = 1000;
  c.gsa.polish_evaluations = 50000;
  return c;
}

inline VsvOptions vsv_default_options() {
  VsvOptions o;
  o.upper = vsv_default_upper();
  return o;
}

struct VsvResult {
  SeparableEnsemble ensemble;
  double hse = 0.0;        // cost at the returned ensemble; a fresh estimate in shots mode
  double hse_raw = 0.0;    // same weights with unclamped shot estimates
  double hse_exact = 0.0;  // hsd(rho, assembled ensemble)
  OptimizationResult optimization;  // best run
  int best_run = 0;
  std::vector<double> run_values;
  std::uint64_t evaluations = 0;  // all runs
  std::uint64_t circuits = 0;
};

namespace detail {

struct VsvProblem {
  SwapTarget target;
  double purity_value = 0.0;
  double raw_purity = 0.0;
  int n = 0, s = 0;
  OverlapMode mode;
  double lower_tolerance = 1e-12;
  std::shared_ptr<std::uint64_t> counter = std::make_shared<std::uint64_t>(0);
  std::shared_ptr<std::uint64_t> circuits = std::make_shared<std::uint64_t>(0);

  VsvProblem(const DensityMatrix& rho, int s_, const OverlapMode& m, double tol)
      : target(rho), n(rho.num_qubits), s(s_), mode(m), lower_tolerance(tol) {
    std::tie(purity_value, raw_purity) = purity_estimate(target, mode);
  }

  struct Eval {
    SeparableEnsemble e;
    OverlapCache cache;
    double value = 0.0;
  };

  Eval evaluate(std::span<const double> x, std::uint64_t stream) const {
    Eval r;
    r.e = make_ensemble(n, s, x);
    r.cache = build_cache(target, purity_value, raw_purity, r.e, mode, stream);
    const SimplexQpResult q = solve_simplex_qp(r.cache.gram, r.cache.cross, lower_tolerance);
    r.e.p = q.p;
    r.value = purity_value + q.value;
    *circuits += static_cast<std::uint64_t>(r.cache.circuits);
    return r;
  }

  // Envelope gradient: the weights are optimal, so only the explicit angle
  // dependence of gram and cross contributes.
  ValueAndGradient value_and_gradient(std::span<const double> x) const {
    const Eval ev = evaluate(x, 0);
    const SeparableEnsemble& e = ev.e;
    const std::size_t sn = static_cast<std::size_t>(s) * n;
    ValueAndGradient out;
    out.value = ev.value;
    out.gradient.assign(2 * sn, 0.0);
    std::vector<std::vector<std::array<cplx, 2>>> f(s), dth(s), dph(s);
    for (int i = 0; i < s; ++i) {
      for (int q = 0; q < n; ++q) {
        const double t = e.theta[i * n + q], ph = e.phi[i * n + q];
        f[i].push_back(qubit_factor(t, ph));
        dth[i].push_back({cplx(-std::sin(t), 0.0), std::polar(std::cos(t), ph)});
        dph[i].push_back({0.0, cplx(0.0, 1.0) * std::polar(std::sin(t), ph)});
      }
    }
    for (int i = 0; i < s; ++i) {
      if (e.p[i] == 0.0) continue;
      for (int j = 0; j < s; ++j) {
        if (j == i || e.p[j] == 0.0) continue;
        std::vector<cplx> ov(n);
        for (int q = 0; q < n; ++q) ov[q] = factor_inner(f[i][q], f[j][q]);
        std::vector<cplx> pre(n + 1, 1.0), suf(n + 1, 1.0);
        for (int q = 0; q < n; ++q) pre[q + 1] = pre[q] * ov[q];
        for (int q = n - 1; q >= 0; --q) suf[q] = suf[q + 1] * ov[q];
        const cplx o = pre[n];
        const double w = 2.0 * e.p[i] * e.p[j];
        for (int q = 0; q < n; ++q) {
          const cplx rest = pre[q] * suf[q + 1];
          const double gt = 2.0 * (std::conj(o) * factor_inner(dth[i][q], f[j][q]) * rest).real();
          const double gp = 2.0 * (std::conj(o) * factor_inner(dph[i][q], f[j][q]) * rest).real();
          out.gradient[i * n + q] += w * gt;
          out.gradient[sn + i * n + q] += w * gp;
        }
      }
      const Eigen::VectorXcd psi = to_eigen(product_of(f[i]));
      const Eigen::VectorXcd rp = target.rho * psi;
      for (int q = 0; q < n; ++q) {
        for (int which = 0; which < 2; ++which) {
          std::vector<std::array<cplx, 2>> fd = f[i];
          fd[q] = which == 0 ? dth[i][q] : dph[i][q];
          const Eigen::VectorXcd dpsi = to_eigen(product_of(fd));
          const double dc = 2.0 * dpsi.dot(rp).real();
          out.gradient[(which == 0 ? 0 : sn) + i * n + q] -= 2.0 * e.p[i] * dc;
        }
      }
    }
    return out;
  }
};

}  // namespace detail

namespace detail {

// Product state minimising <psi|m|psi> over [theta..., phi...].
inline std::pair<std::vector<double>, double> min_product_expectation(const Eigen::MatrixXcd& m, int n, int starts,
                                                                      Rng rng) {
  Objective o;
  o.arity = 2 * n;
  auto vg = [m, n](std::span<const double> x) {
    std::vector<std::array<cplx, 2>> f(n), dt(n), dp(n);
    for (int q = 0; q < n; ++q) {
      f[q] = qubit_factor(x[q], x[n + q]);
      dt[q] = {cplx(-std::sin(x[q]), 0.0), std::polar(std::cos(x[q]), x[n + q])};
      dp[q] = {0.0, cplx(0.0, 1.0) * std::polar(std::sin(x[q]), x[n + q])};
    }
    const Eigen::VectorXcd psi = to_eigen(product_of(f));
    const Eigen::VectorXcd mp = m * psi;
    ValueAndGradient out;
    out.value = psi.dot(mp).real();
    out.gradient.assign(2 * n, 0.0);
    for (int q = 0; q < n; ++q)
      for (int which = 0; which < 2; ++which) {
        std::vector<std::array<cplx, 2>> fd = f;
        fd[q] = which == 0 ? dt[q] : dp[q];
        out.gradient[which * n + q] = 2.0 * to_eigen(product_of(fd)).dot(mp).real();
      }
    return out;
  };
  o.value_and_gradient = vg;
  o.evaluate = [vg](std::span<const double> x) { return vg(x).value; };
  OptimizerConfig c;
  c.kind = OptimizerKind::kQuasiNewton;
  c.max_evaluations = 5000;
  std::pair<std::vector<double>, double> best{{}, std::numeric_limits<double>::infinity()};
  for (int k = 0; k < starts; ++k) {
    std::vector<double> x(2 * n);
    for (int q = 0; q < n; ++q) {
      x[q] = rng.uniform(0.0, std::numbers::pi);
      x[n + q] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    const OptimizationResult r = quasi_newton_minimize(o, x, c);
    if (r.best_value < best.second) best = {r.best_params, r.best_value};
  }
  return best;
}

inline void revive_components(const VsvProblem& prob, const Objective& obj, const DensityMatrix& rho,
                              OptimizationResult& res, const VsvOptions& opt, Rng rng) {
  const int n = prob.n, s = prob.s;
  const std::size_t sn = static_cast<std::size_t>(s) * n;
  OptimizerConfig qc;
  qc.kind = OptimizerKind::kQuasiNewton;
  qc.max_evaluations = std::max<std::uint64_t>(1000, opt.upper.gsa.polish_evaluations);
  for (int round = 0; round < 4 * s; ++round) {
    const VsvProblem::Eval ev = prob.evaluate(res.best_params, 0);
    const int dead = static_cast<int>(std::min_element(ev.e.p.begin(), ev.e.p.end()) - ev.e.p.begin());
    const Eigen::MatrixXcd m = assemble_separable(ev.e).entries - rho.entries;
    const double level = (assemble_separable(ev.e).entries * m).trace().real();
    const auto [y, v] = min_product_expectation(m, n, opt.revive_starts, rng.split(round));
    if (!(v < level - 1e-12)) return;
    std::vector<double> x = res.best_params;
    for (int q = 0; q < n; ++q) {
      x[dead * n + q] = y[q];
      x[sn + dead * n + q] = y[n + q];
    }
    const OptimizationResult q = quasi_newton_minimize(obj, x, qc);
    res.evaluations_used += q.evaluations_used;
    res.iterations += q.iterations;
    if (!(q.best_value < res.best_value - 1e-15)) return;
    res.best_value = q.best_value;
    res.best_params = q.best_params;
    res.final_params = q.best_params;
    res.history.push_back({res.evaluations_used, q.best_value, hash_params(q.best_params)});
  }
}

}  // namespace detail

/// Bilevel search: the upper optimizer proposes angles, the lower level
/// solves the weight QP exactly. Runs restart from independent seeds.
inline VsvResult vsv_minimize(const DensityMatrix& rho, const VsvOptions& opt) {
  rho.validate(1e-9);
  check_density_size(rho.num_qubits);
  opt.mode.validate();
  const int n = rho.num_qubits;
  const int s = opt.s == 0 ? (1 << n) : opt.s;
  if (s < 1) throw std::invalid_argument("vsv needs s >= 1");
  if (opt.runs < 1) throw std::invalid_argument("vsv needs runs >= 1");
  auto prob = std::make_shared<detail::VsvProblem>(rho, s, opt.mode, opt.lower_tolerance);
  const int d = 2 * s * n;
  Objective obj;
  obj.arity = d;
  obj.stochastic = !opt.mode.is_exact();
  obj.circuits_per_evaluation = opt.mode.is_exact() ? 0 : s + s * (s - 1) / 2;
  obj.shots_per_evaluation = opt.mode.is_exact() ? 0 : opt.mode.shots * obj.circuits_per_evaluation;
  obj.evaluate = [prob](std::span<const double> x) { return prob->evaluate(x, ++*prob->counter).value; };
  if (opt.mode.is_exact()) {
    obj.value_and_gradient = [prob](std::span<const double> x) { return prob->value_and_gradient(x); };
  } else {
    obj.shift_r.assign(d, 0.0);
  }
  Bounds box;
  box.lower.assign(d, 0.0);
  box.upper.assign(d, std::numbers::pi);
  for (int k = s * n; k < d; ++k) box.upper[k] = 2.0 * std::numbers::pi;
  OptimizerConfig upper = opt.upper;
  if (!opt.mode.is_exact()) {
    upper.gsa.local_polish = false;
    if (upper.kind == OptimizerKind::kQuasiNewton) upper.quasi_newton.gradient = GradientMode::kFiniteDifference;
  }
  MultiStartResult ms;
  for (int run = 0; run < opt.runs; ++run) {
    const std::uint64_t rs = run_seed(opt.seed, run);
    RunRecord rec{run, rs, minimize(obj, initial_point(rs, box), run_config(upper, rs), &box)};
    if (opt.mode.is_exact() && opt.revive) detail::revive_components(*prob, obj, rho, rec.result, opt, Rng(rs).split(2));
    if (run == 0 || rec.result.best_value < ms.best.best_value) {
      ms.best = rec.result;
      ms.best_run = run;
    }
    ms.runs.push_back(std::move(rec));
  }

  VsvResult r;
  r.best_run = ms.best_run;
  r.optimization = ms.best;
  for (const RunRecord& rec : ms.runs) {
    r.run_values.push_back(rec.result.best_value);
    r.evaluations += rec.result.evaluations_used;
  }
  const detail::VsvProblem::Eval ev = prob->evaluate(ms.best.best_params, ++*prob->counter);
  r.ensemble = ev.e;
  r.hse = ev.value;
  r.hse_raw = detail::quadratic_hsd(ev.cache.raw_purity, ev.cache.raw_gram, ev.cache.raw_cross, ev.e.p);
  r.hse_exact = hsd(rho, assemble_separable(ev.e));
  r.circuits = *prob->circuits;
  return r;
}

inline VsvResult vsv_minimize(const DensityMatrix& rho, int s, const OptimizerConfig& upper, double lower_tolerance,
                              const OverlapMode& mode) {
  VsvOptions o;
  o.s = s;
  o.upper = upper;
  o.lower_tolerance = lower_tolerance;
  o.mode = mode;
  o.seed = upper.seed;
  return vsv_minimize(rho, o);
}

// ---------------------------------------------------------------------------
// Analytic references

inline QubitState ghz_state(int n) {
  if (n < 1) throw std::invalid_argument("ghz_state needs n >= 1");
  CVector v(std::size_t{1} << n, 0.0);
  v.front() = v.back() = 1.0 / std::numbers::sqrt2;
  return QubitState::from_amplitudes(std::move(v));
}

inline double ghz_hse_analytic(int n) {
  if (n < 2) throw std::invalid_argument("ghz_hse_analytic needs n >= 2");
  const double N = std::ldexp(1.0, n);
  return (N - 2.0) / (2.0 * N + std::ldexp(1.0, 3 - n) - 4.0);
}

struct XMemsSpec {
  int n = 2;
  cplx gamma = 0.0;

  int half_dim() const { return 1 << (n - 1); }
  void validate() const {
    if (n < 2 || n > kMaxDensityQubits) throw std::invalid_argument("X-MEMS needs 2 <= n <= 8");
    if (std::abs(gamma) > 0.5 + 1e-15) throw std::invalid_argument("X-MEMS needs |gamma| <= 1/2");
  }
  /// (f, g); the branch switches at |gamma| = 1/(N+1).
  std::pair<double, double> fg() const {
    const double N = half_dim();
    const double a = std::abs(gamma);
    if (a <= 1.0 / (N + 1.0)) return {1.0 / (N + 1.0), 1.0 / (N + 1.0)};
    return {a, (1.0 - 2.0 * a) / (N - 1.0)};
  }
};

/// diag(f, g x (N-1), 0 x (N-1), f) with gamma, gamma* on the corners.
inline DensityMatrix xmems_state(const XMemsSpec& spec) {
  spec.validate();
  const Eigen::Index d = Eigen::Index{1} << spec.n;
  const Eigen::Index N = d / 2;
  const auto [f, g] = spec.fg();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  m(0, 0) = m(d - 1, d - 1) = f;
  for (Eigen::Index i = 1; i < N; ++i) m(i, i) = g;
  m(0, d - 1) = spec.gamma;
  m(d - 1, 0) = std::conj(spec.gamma);
  return DensityMatrix{spec.n, m};
}

/// diag(a/2, b/(N-1) x (N-1), (1-a-b)/(N-1) x (N-1), a/2) with d, d* on the corners.
inline DensityMatrix xmems_css_matrix(int n, double a, double b, cplx dcorner) {
  check_density_size(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  const Eigen::Index N = dim / 2;
  const double k = static_cast<double>(N - 1);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  m(0, 0) = m(dim - 1, dim - 1) = a / 2.0;
  for (Eigen::Index i = 1; i < N; ++i) m(i, i) = b / k;
  for (Eigen::Index i = N; i < dim - 1; ++i) m(i, i) = (1.0 - a - b) / k;
  m(0, dim - 1) = dcorner;
  m(dim - 1, 0) = std::conj(dcorner);
  return DensityMatrix{n, m};
}

enum class XMemsBranch { kAuto, kLow, kHigh };

struct XMemsCss {
  DensityMatrix css;
  double hse = 0.0;
  double a = 0.0, b = 0.0;
  cplx d = 0.0;
};

/// Closed-form two-qubit CSS; kAuto switches branch at |gamma| = 1/3.
inline XMemsCss xmems_css_2qubit(cplx gamma, XMemsBranch branch = XMemsBranch::kAuto) {
  XMemsSpec{2, gamma}.validate();
  const double g = std::abs(gamma);
  const bool high = branch == XMemsBranch::kHigh || (branch == XMemsBranch::kAuto && g > 1.0 / 3.0);
  XMemsCss r;
  if (!high) {
    const double q = std::sqrt(1.0 + 36.0 * g * g);
    r.a = (7.0 - q) / 9.0;
    r.b = (1.0 + 12.0 * g * g + q) / (6.0 * q);
    r.d = gamma / 3.0 * (1.0 + 2.0 / q);
    r.hse = 2.0 / 27.0 * (1.0 + 18.0 * g * g - q);
  } else {
    const double q = std::sqrt(1.0 - 4.0 * g + 8.0 * g * g);
    r.a = (1.0 + 4.0 * g - q) / 3.0;
    r.b = (3.0 - 6.0 * g + (3.0 - 12.0 * g + 16.0 * g * g) / q) / 6.0;
    r.d = gamma * (2.0 - 4.0 * g + q) / (3.0 * q);
    r.hse = 2.0 / 3.0 * (1.0 - 4.0 * g + 6.0 * g * g + (2.0 * g - 1.0) * q);
  }
  r.css = xmems_css_matrix(2, r.a, r.b, r.d);
  return r;
}

/// n-qubit CSS in the (a, b, d) family by nested ternary search over the
/// convex reduced distance, |d| pinned to min(|gamma|, a/2, sqrt(b(1-a-b))/(N-1)).
inline XMemsCss xmems_css_numeric(const XMemsSpec& spec) {
  spec.validate();
  const double N = spec.half_dim();
  const double k = N - 1.0;
  const auto [f, g] = spec.fg();
  const double gm = std::abs(spec.gamma);
  auto dmag = [&](double a, double b) {
    const double c = std::max(0.0, 1.0 - a - b);
    return std::min({gm, a / 2.0, std::sqrt(std::max(0.0, b * c)) / k});
  };
  auto cost = [&](double a, double b) {
    const double c = 1.0 - a - b;
    const double m = dmag(a, b);
    return 2.0 * (f - a / 2.0) * (f - a / 2.0) + k * (g - b / k) * (g - b / k) + c * c / k + 2.0 * (gm - m) * (gm - m);
  };
  auto ternary = [](double lo, double hi, auto&& fn) {
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (fn(m1) <= fn(m2)) hi = m2;
      else lo = m1;
    }
    return 0.5 * (lo + hi);
  };
  auto best_b = [&](double a) { return ternary(0.0, 1.0 - a, [&](double b) { return cost(a, b); }); };
  XMemsCss r;
  r.a = ternary(0.0, 1.0, [&](double a) { return cost(a, best_b(a)); });
  r.b = best_b(r.a);
  const double m = dmag(r.a, r.b);
  r.d = gm > 0.0 ? spec.gamma / gm * m : cplx(0.0);
  r.css = xmems_css_matrix(spec.n, r.a, r.b, r.d);
  r.hse = hsd(xmems_state(spec), r.css);
  const double c = 1.0 - r.a - r.b;
  if (std::norm(r.d) > r.b * c / (k * k) + 1e-12) throw std::runtime_error("X-MEMS CSS violates the separability bound");
  return r;
}

// ---------------------------------------------------------------------------
// Quantum Gilbert algorithm

struct QgaStats {
  std::uint64_t trials = 0;
  std::uint64_t preselected = 0;
  std::uint64_t successes = 0;
  // Overlaps a device run would need: Tr(rho sigma_n) plus one per stored
  // component, for every trial.
  std::uint64_t overlap_evaluations = 0;
};

struct QgaResult {
  DensityMatrix css;
  std::vector<double> hsd_history;           // entry 0 is the initial guess
  std::vector<std::uint64_t> history_trials;  // trial index of each entry
  std::vector<double> p_history;
  QgaStats stats;

  double hsd() const { return hsd_history.back(); }
  /// First trial reaching hsd <= level, or 0 if never.
  std::uint64_t trials_to_reach(double level) const {
    for (std::size_t i = 0; i < hsd_history.size(); ++i)
      if (hsd_history[i] <= level) return history_trials[i];
    return 0;
  }
};

inline QubitState haar_product_state(int n, Rng& rng) {
  std::vector<std::array<cplx, 2>> f(n);
  for (auto& q : f) {
    cplx a(rng.normal(), rng.normal()), b(rng.normal(), rng.normal());
    const double nn = std::sqrt(std::norm(a) + std::norm(b));
    q = {a / nn, b / nn};
  }
  return detail::product_of(f);
}

/// Line search on rho_n = p rho_{n-1} + (1-p) sigma_n after the preselection
/// Tr[(sigma_n - rho_{n-1})(rho - rho_{n-1})] > 0. Purity and overlap of the
/// iterate are updated by recursion; rho_{n-1} is kept dense for the
/// Tr(rho_{n-1} sigma_n) term.
inline QgaResult qga_run(const DensityMatrix& rho, const QubitState& sigma0, std::uint64_t max_trials, std::uint64_t seed) {
  rho.validate(1e-9);
  const int n = rho.num_qubits;
  if (sigma0.num_qubits() != n) throw std::invalid_argument("initial guess has the wrong qubit count");
  for (int cut = 1; cut < n; ++cut)
    if (bipartite_entropy(sigma0, cut) > 1e-10) throw std::invalid_argument("initial guess is not a product state");
  Rng rng(seed);
  const double r2 = purity(rho);
  const Eigen::VectorXcd v0 = to_eigen(sigma0);
  Eigen::MatrixXcd cur = v0 * v0.adjoint();
  double pur = 1.0;
  double ov = (v0.adjoint() * rho.entries * v0)(0, 0).real();
  QgaResult r;
  r.hsd_history.push_back(std::max(0.0, r2 + pur - 2.0 * ov));
  r.history_trials.push_back(0);
  std::uint64_t stored = 1;
  for (std::uint64_t t = 1; t <= max_trials; ++t) {
    ++r.stats.trials;
    r.stats.overlap_evaluations += 1 + stored;
    const Eigen::VectorXcd v = to_eigen(haar_product_state(n, rng));
    const double y = (v.adjoint() * rho.entries * v)(0, 0).real();  // Tr(rho sigma)
    const double x = (v.adjoint() * cur * v)(0, 0).real();           // Tr(rho_{n-1} sigma)
    if (!(pur + y > ov + x)) continue;
    ++r.stats.preselected;
    const double den = pur + 1.0 - 2.0 * x;
    if (!(den > 0.0)) continue;
    const double p = std::clamp((1.0 - x + ov - y) / den, 0.0, 1.0);
    const double nh = r2 + p * p * pur + (1 - p) * (1 - p) + 2 * p * (1 - p) * x - 2 * p * ov - 2 * (1 - p) * y;
    if (!(nh < r.hsd_history.back())) continue;
    cur = p * cur + (1.0 - p) * (v * v.adjoint());
    pur = p * p * pur + (1 - p) * (1 - p) + 2 * p * (1 - p) * x;
    ov = p * ov + (1 - p) * y;
    ++stored;
    ++r.stats.successes;
    r.hsd_history.push_back(std::max(0.0, nh));
    r.history_trials.push_back(t);
    r.p_history.push_back(p);
  }
  r.css = DensityMatrix{n, cur};
  return r;
}

}  // namespace varq

#endif  // VARQ_VSV_HPP_
