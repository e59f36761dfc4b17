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

// Variational Gibbs states on a 2n-qubit register: ancilla A on qubits
// 0..n-1, system S on n..2n-1. U_A prepares sum_i u_i |i>, transversal CNOTs
// copy it into S, U_S rotates S. The S marginal is
// sum_i |u_i|^2 U_S |i><i| U_S^dagger.
//
// Also: thermofield doubles, plug-in entropy estimation, the product-ansatz
// reachability check and the free-fermion XY spectrum.

#ifndef VARQ_GIBBS_HPP_
#define VARQ_GIBBS_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "varq/ansatz.hpp"
#include "varq/circuit.hpp"
#include "varq/exact.hpp"
#include "varq/grouping.hpp"
#include "varq/models.hpp"
#include "varq/optimize.hpp"
#include "varq/statevector.hpp"

namespace varq {

// ---------------------------------------------------------------------------
// Spin-chain models and default ansaetze

enum class SpinModel { kIsing, kXy, kXxz };

inline const char* spin_model_name(SpinModel m) {
  switch (m) {
    case SpinModel::kIsing: return "ising";
    case SpinModel::kXy: return "xy";
    case SpinModel::kXxz: return "xxz";
  }
  return "?";
}

inline SpinModel parse_spin_model(const std::string& s) {
  if (s == "ising") return SpinModel::kIsing;
  if (s == "xy") return SpinModel::kXy;
  if (s == "xxz") return SpinModel::kXxz;
  throw std::invalid_argument("unknown spin model '" + s + "'");
}

struct SpinChain {
  SpinModel model = SpinModel::kIsing;
  int n = 2;
  double h = 0.5;
  double gamma = 0.0;  // XY anisotropy
  double delta = 0.0;  // XXZ anisotropy
  bool periodic = true;

  PauliHamiltonian hamiltonian() const {
    switch (model) {
      case SpinModel::kIsing: return build_ising(n, h, periodic);
      case SpinModel::kXy: return build_xy(n, gamma, h, periodic);
      case SpinModel::kXxz: return build_xxz(n, delta, h, periodic);
    }
    throw std::logic_error("unhandled spin model");
  }
};

struct GibbsAnsatze {
  ParametrizedCircuit ancilla;
  ParametrizedCircuit system;
};

/// Ising: one linear hardware-efficient ancilla layer; XY and XXZ: n-1
/// layers with a closed CNOT ring. The system ansatz is always n-1 parity
/// brick-wall layers (at least one).
inline GibbsAnsatze default_gibbs_ansatze(SpinModel m, int n) {
  if (n < 2) throw std::invalid_argument("Gibbs ansaetze need n >= 2");
  const int ls = std::max(1, n - 1);
  if (m == SpinModel::kIsing) return {build_hw_efficient_ry(n, 1), build_parity_brickwall(n, ls)};
  return {build_hw_efficient_ry(n, ls, EntanglerTopology::kRing), build_parity_brickwall(n, ls)};
}

// ---------------------------------------------------------------------------
// Problem and result types

struct GibbsShots {
  std::uint64_t shots = 1024;  // per measurement group and for the ancilla register
  std::uint64_t seed = 0;
  bool miller_madow = false;
  GroupingStrategy grouping = GroupingStrategy::kQubitwise;
};

struct GibbsProblem {
  PauliHamiltonian hamiltonian;
  double beta = 1.0;
  ParametrizedCircuit ancilla;
  ParametrizedCircuit system;
  std::optional<GibbsShots> shots;  // statevector when empty
  OptimizerConfig optimizer;
  int runs = 1;
  std::uint64_t seed = 0;

  int num_qubits() const { return hamiltonian.num_qubits(); }
  int ancilla_params() const { return ancilla.num_params(); }
  int system_params() const { return system.num_params(); }
  int num_params() const { return ancilla_params() + system_params(); }
  bool statevector() const { return !shots.has_value(); }

  void validate() const {
    const int n = num_qubits();
    if (n < 1) throw std::invalid_argument("Gibbs problem needs a Hamiltonian");
    if (2 * n > kMaxExactQubits) throw std::invalid_argument("register too large for statevector Gibbs simulation");
    if (ancilla.num_qubits() != n || system.num_qubits() != n)
      throw std::invalid_argument("both ansaetze must act on the system size");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and >= 0");
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (shots && shots->shots == 0) throw std::invalid_argument("shots must be >= 1");
    optimizer.validate();
  }
};

inline GibbsProblem make_gibbs_problem(const SpinChain& chain, double beta, OptimizerConfig optimizer = {},
                                       int runs = 1, std::uint64_t seed = 0) {
  GibbsAnsatze a = default_gibbs_ansatze(chain.model, chain.n);
  GibbsProblem p;
  p.hamiltonian = chain.hamiltonian();
  p.beta = beta;
  p.ancilla = std::move(a.ancilla);
  p.system = std::move(a.system);
  p.optimizer = optimizer;
  p.runs = runs;
  p.seed = seed;
  return p;
}

struct GibbsRun {
  int run = 0;
  std::uint64_t seed = 0;
  double free_energy = 0.0;  // exact value at the run's best parameters
  double fidelity = 0.0;
  std::uint64_t evaluations = 0;
};

struct ThermalResult {
  std::vector<double> probabilities;  // ancilla distribution in basis order
  double entropy = 0.0;
  double energy = 0.0;
  double free_energy = 0.0;        // E - S/beta, or -S at beta = 0
  double exact_free_energy = 0.0;  // same convention for the exact Gibbs state
  DensityMatrix prepared_state;
  double fidelity_vs_exact = 0.0;  // of the lowest free-energy run
  double best_fidelity = 0.0;      // over all runs
  double mean_fidelity = 0.0;
  std::vector<double> ancilla_params;
  std::vector<double> system_params;
  std::vector<GibbsRun> runs;
  int best_run = 0;
  OptimizationResult optimization;

  std::vector<double> parameters() const {
    std::vector<double> x = ancilla_params;
    x.insert(x.end(), system_params.begin(), system_params.end());
    return x;
  }

  std::vector<double> sorted_probabilities() const {
    std::vector<double> p = probabilities;
    std::sort(p.begin(), p.end(), std::greater<>());
    return p;
  }
};

// ---------------------------------------------------------------------------
// Entropy estimation

struct EntropyEstimate {
  double entropy = 0.0;
  double variance = 0.0;
  std::uint64_t occupied_bins = 0;
  std::uint64_t shots = 0;
};

/// Plug-in entropy of the empirical distribution, with the variance estimate
/// sum (1 + ln q)^2 q (1 - q) / M.
inline EntropyEstimate entropy_ml(const ShotCounts& counts) {
  if (counts.total_shots == 0 || counts.counts.empty()) throw std::invalid_argument("entropy_ml needs counts");
  const double m = static_cast<double>(counts.total_shots);
  EntropyEstimate e;
  e.shots = counts.total_shots;
  for (const auto& [idx, k] : counts.counts) {
    if (k == 0) continue;
    const double q = static_cast<double>(k) / m;
    const double lq = std::log(q);
    e.entropy -= q * lq;
    e.variance += (1.0 + lq) * (1.0 + lq) * q * (1.0 - q) / m;
    ++e.occupied_bins;
  }
  const double bound = std::log(m) * std::log(m) / m;
  if (e.variance > bound + 1e-12) throw std::logic_error("entropy variance estimate exceeds (ln M)^2 / M");
  return e;
}

inline double miller_madow(double entropy_ml_value, std::uint64_t occupied_bins, std::uint64_t shots) {
  if (shots < 1) throw std::invalid_argument("miller_madow needs shots >= 1");
  const double b = static_cast<double>(occupied_bins);
  return entropy_ml_value + (std::max(b, 1.0) - 1.0) / (2.0 * static_cast<double>(shots));
}

// ---------------------------------------------------------------------------
// Circuit and objective

namespace detail {

inline PauliHamiltonian embed_hamiltonian(const PauliHamiltonian& h, int total, int offset) {
  std::vector<std::pair<std::string, double>> t;
  for (const PauliTerm& term : h.terms()) {
    std::string l(total, 'I');
    l.replace(offset, term.labels.size(), term.labels);
    t.emplace_back(std::move(l), term.coefficient);
  }
  return PauliHamiltonian(total, t, h.identity_offset());
}

// Entropy weights -ln p, with empty bins capped so gradients stay finite.
inline std::vector<double> log_weights(const std::vector<double>& p) {
  std::vector<double> w(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) w[i] = -std::log(std::max(p[i], 1e-300));
  return w;
}

inline ObservableApply diagonal_observable(std::vector<double> w) {
  return [w = std::move(w)](const CVector& in, CVector& out) {
    out.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = w[i] * in[i];
  };
}

// Shared, immutable pieces of one Gibbs problem.
struct GibbsEngine {
  int n = 0;
  int pa = 0;
  int ps = 0;
  double beta = 0.0;
  ParametrizedCircuit full;
  ParametrizedCircuit ancilla;
  PauliHamiltonian h2;
  std::vector<MeasurementGroup> groups;

  explicit GibbsEngine(const GibbsProblem& p)
      : n(p.num_qubits()), pa(p.ancilla_params()), ps(p.system_params()), beta(p.beta), ancilla(p.ancilla) {
    p.validate();
    const int total = pa + ps;
    full = ParametrizedCircuit(2 * n, total, "gibbs", 0);
    full.append(p.ancilla.embedded(2 * n, 0, total, 0));
    for (int i = 0; i < n; ++i) full.add_fixed(gates::CNOT(i, n + i));
    full.append(p.system.embedded(2 * n, n, total, pa));
    h2 = embed_hamiltonian(p.hamiltonian, 2 * n, n);
    if (p.shots) groups = group_commuting(h2, p.shots->grouping);
  }

  void check(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != pa + ps) throw std::invalid_argument("parameter count does not match the ansaetze");
  }

  std::vector<double> probabilities(std::span<const double> x) const {
    return run_circuit(ancilla, x.subspan(0, pa)).probabilities();
  }

  double combine(double energy, double entropy) const { return beta > 0.0 ? energy - entropy / beta : -entropy; }

  double free_energy(std::span<const double> x) const {
    check(x);
    const double s = shannon_entropy(probabilities(x));
    const double e = beta > 0.0 ? expectation(h2, run_circuit(full, x)) : 0.0;
    return combine(e, s);
  }

  ValueAndGradient value_and_gradient(std::span<const double> x) const {
    check(x);
    ValueAndGradient out;
    out.gradient.assign(pa + ps, 0.0);
    const std::vector<double> p = probabilities(x);
    const ValueAndGradient s = adjoint_gradient(ancilla, x.subspan(0, pa), diagonal_observable(log_weights(p)));
    const double entropy = shannon_entropy(p);
    if (beta > 0.0) {
      const ValueAndGradient e = adjoint_gradient(full, x, observable_of(h2));
      out.value = combine(e.value, entropy);
      out.gradient = e.gradient;
      for (int k = 0; k < pa; ++k) out.gradient[k] -= s.gradient[k] / beta;
    } else {
      out.value = -entropy;
      for (int k = 0; k < pa; ++k) out.gradient[k] = -s.gradient[k];
    }
    return out;
  }

  // Shot estimate; energy groups use stream split(0), the ancilla split(1).
  double free_energy_shots(std::span<const double> x, const GibbsShots& m, std::uint64_t seed) const {
    check(x);
    const Rng root(seed);
    const ShotCounts c = sample_probabilities(probabilities(x), n, m.shots, root.split(1).seed());
    const EntropyEstimate est = entropy_ml(c);
    const double s = m.miller_madow ? miller_madow(est.entropy, est.occupied_bins, est.shots) : est.entropy;
    double e = 0.0;
    if (beta > 0.0) e = grouped_expectation_shots(h2, groups, run_circuit(full, x), m.shots, root.split(0).seed()).value;
    return combine(e, s);
  }

  DensityMatrix system_state(std::span<const double> x) const {
    std::vector<int> traced(n);
    std::iota(traced.begin(), traced.end(), 0);
    return density_from_circuit_reduction(run_circuit(full, x), traced);
  }
};

}  // namespace detail

/// U_A on A, CNOT(A_i, S_i), U_S on S; params = [ancilla..., system...].
inline QubitState gibbs_circuit(const GibbsProblem& problem, std::span<const double> params) {
  const detail::GibbsEngine eng(problem);
  eng.check(params);
  return run_circuit(eng.full, params);
}

/// Exact objective E - S/beta (-S at beta = 0).
inline double free_energy_exact(const GibbsProblem& problem, std::span<const double> params) {
  return detail::GibbsEngine(problem).free_energy(params);
}

/// The objective in the problem's mode; shots mode samples with shots->seed.
inline double free_energy(const GibbsProblem& problem, std::span<const double> params) {
  const detail::GibbsEngine eng(problem);
  if (problem.statevector()) return eng.free_energy(params);
  return eng.free_energy_shots(params, *problem.shots, problem.shots->seed);
}

/// Statevector objectives carry the adjoint gradient; shot objectives draw
/// evaluation k from Rng(shots.seed).split(k).
inline Objective gibbs_objective(const GibbsProblem& problem) {
  auto eng = std::make_shared<const detail::GibbsEngine>(problem);
  Objective o;
  o.arity = problem.num_params();
  o.shift_r = eng->full.shift_constants();
  if (problem.statevector()) {
    o.evaluate = [eng](std::span<const double> x) { return eng->free_energy(x); };
    o.value_and_gradient = [eng](std::span<const double> x) { return eng->value_and_gradient(x); };
    return o;
  }
  const GibbsShots m = *problem.shots;
  auto counter = std::make_shared<std::uint64_t>(0);
  o.stochastic = true;
  o.circuits_per_evaluation = static_cast<int>(eng->groups.size()) + 1;
  o.shots_per_evaluation = m.shots * (eng->groups.size() + 1);
  o.evaluate = [eng, m, counter](std::span<const double> x) {
    const std::uint64_t k = (*counter)++;
    return eng->free_energy_shots(x, m, Rng(m.seed).split(k).seed());
  };
  return o;
}

/// Exact minimum of the objective: -ln Z / beta, or -n ln 2 at beta = 0.
inline double exact_free_energy(const PauliHamiltonian& h, double beta) {
  if (beta > 0.0) return exact_gibbs(h, beta).free_energy();
  return -h.num_qubits() * std::numbers::ln2;
}

/// Multi-start minimisation of the free energy. Diagnostics (entropy,
/// energy, fidelity) are always exact, computed from the final parameters.
inline ThermalResult run_gibbs(const GibbsProblem& problem) {
  const detail::GibbsEngine eng(problem);
  const Objective obj = gibbs_objective(problem);
  const GibbsState exact = exact_gibbs(problem.hamiltonian, problem.beta);
  MultiStartResult ms = multi_start(problem.optimizer, obj, problem.runs, problem.seed);

  ThermalResult r;
  double fsum = 0.0;
  for (const RunRecord& rec : ms.runs) {
    GibbsRun g;
    g.run = rec.run;
    g.seed = rec.seed;
    g.evaluations = rec.result.evaluations_used;
    g.free_energy = eng.free_energy(rec.result.best_params);
    g.fidelity = uhlmann_fidelity(eng.system_state(rec.result.best_params), exact.rho);
    r.best_fidelity = std::max(r.best_fidelity, g.fidelity);
    fsum += g.fidelity;
    r.runs.push_back(g);
  }
  r.mean_fidelity = fsum / static_cast<double>(r.runs.size());
  r.best_run = ms.best_run;
  r.optimization = std::move(ms.best);
  const std::vector<double>& x = r.optimization.best_params;
  r.ancilla_params.assign(x.begin(), x.begin() + eng.pa);
  r.system_params.assign(x.begin() + eng.pa, x.end());
  r.probabilities = eng.probabilities(x);
  r.entropy = shannon_entropy(r.probabilities);
  r.energy = expectation(eng.h2, run_circuit(eng.full, x));
  r.free_energy = eng.combine(r.energy, r.entropy);
  r.exact_free_energy = exact_free_energy(problem.hamiltonian, problem.beta);
  r.prepared_state = eng.system_state(x);
  r.fidelity_vs_exact = r.runs[r.best_run].fidelity;
  return r;
}

/// U_A on A, CNOTs, then U_S on both registers. Both marginals equal the
/// prepared Gibbs state.
inline QubitState build_tfd(const GibbsProblem& problem, std::span<const double> params) {
  const detail::GibbsEngine eng(problem);
  eng.check(params);
  const int n = eng.n;
  const int total = eng.pa + eng.ps;
  ParametrizedCircuit c = eng.full;
  c.append(problem.system.embedded(2 * n, 0, total, eng.pa));
  return run_circuit(c, params);
}

// ---------------------------------------------------------------------------
// Distribution fitting and the product-ansatz constraint

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in length");
  double t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) t += std::abs(p[i] - q[i]);
  return 0.5 * t;
}

struct DistributionFit {
  std::vector<double> params;
  std::vector<double> probabilities;
  double total_variation = 0.0;
  double squared_error = 0.0;
};

/// Minimises sum (p_i - t_i)^2 over the circuit's output distribution with
/// multi-start BFGS (adjoint gradients). For circuits with nonlinear angle
/// expressions, start points are redrawn until the circuit binds, and points
/// outside the domain score kInfeasibleFit so line searches back off.
inline constexpr double kInfeasibleFit = 1e3;

inline DistributionFit fit_distribution(const ParametrizedCircuit& c, const std::vector<double>& target, int runs,
                                        std::uint64_t seed) {
  if (target.size() != (std::size_t{1} << c.num_qubits())) throw std::invalid_argument("target has wrong length");
  if (runs < 1) throw std::invalid_argument("fit_distribution needs runs >= 1");
  Objective o;
  o.arity = c.num_params();
  o.evaluate = [c, target](std::span<const double> x) {
    std::vector<double> p;
    try {
      p = run_circuit(c, x).probabilities();
    } catch (const std::domain_error&) {
      return kInfeasibleFit;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - target[i]) * (p[i] - target[i]);
    return s;
  };
  o.value_and_gradient = [c, target](std::span<const double> x) {
    std::vector<double> p;
    try {
      p = run_circuit(c, x).probabilities();
    } catch (const std::domain_error&) {
      return ValueAndGradient{kInfeasibleFit, std::vector<double>(x.size(), 0.0)};
    }
    std::vector<double> w(p.size());
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      w[i] = 2.0 * (p[i] - target[i]);
      s += (p[i] - target[i]) * (p[i] - target[i]);
    }
    ValueAndGradient g = adjoint_gradient(c, x, detail::diagonal_observable(std::move(w)));
    g.value = s;
    return g;
  };
  OptimizerConfig cfg;
  cfg.quasi_newton.gradient_tolerance = 1e-12;
  OptimizationResult best;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t rs = run_seed(seed, r);
    Rng rng = Rng(rs).split(0);
    std::vector<double> x0(o.arity);
    for (int attempt = 0;; ++attempt) {
      if (attempt == 10000) throw std::runtime_error("no feasible start point found");
      for (double& v : x0) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
      if (o.evaluate(x0) < kInfeasibleFit) break;
    }
    OptimizationResult res = minimize(o, x0, run_config(cfg, rs));
    if (r == 0 || res.best_value < best.best_value) best = std::move(res);
  }
  DistributionFit f;
  f.params = best.best_params;
  f.probabilities = run_circuit(c, f.params).probabilities();
  f.total_variation = total_variation(f.probabilities, target);
  f.squared_error = best.best_value;
  return f;
}

struct ProductConstraintReport {
  int num_qubits = 0;
  double violation = 0.0;  // max |p(..0..0..) p(..1..1..) - p(..0..1..) p(..1..0..)| in basis order
  bool assignments_checked = false;
  double min_assignment_violation = 0.0;  // same, minimised over basis relabellings (n <= 3)
  bool reachable = false;                 // some checked assignment satisfies every constraint
};

namespace detail {

inline double product_violation(const std::vector<double>& p, int n) {
  double worst = 0.0;
  const std::uint64_t d = std::uint64_t{1} << n;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const std::uint64_t ma = std::uint64_t{1} << (n - 1 - a);
      const std::uint64_t mb = std::uint64_t{1} << (n - 1 - b);
      for (std::uint64_t i = 0; i < d; ++i) {
        if (i & (ma | mb)) continue;
        const double v = p[i] * p[i | ma | mb] - p[i | ma] * p[i | mb];
        worst = std::max(worst, std::abs(v));
      }
    }
  }
  return worst;
}

}  // namespace detail

/// Product (entangler-free) distributions satisfy p00 p11 = p01 p10 on every
/// qubit pair for each setting of the other qubits.
inline ProductConstraintReport product_ansatz_constraint(const std::vector<double>& p, double tol = 1e-10) {
  const std::size_t d = p.size();
  if (d < 4 || !std::has_single_bit(d)) throw std::invalid_argument("product constraint needs at least 2 qubits");
  const int n = std::countr_zero(d);
  ProductConstraintReport r;
  r.num_qubits = n;
  r.violation = detail::product_violation(p, n);
  if (n <= 3) {
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> q(d);
    double best = std::numeric_limits<double>::infinity();
    do {
      for (std::size_t i = 0; i < d; ++i) q[i] = p[perm[i]];
      best = std::min(best, detail::product_violation(q, n));
    } while (best > 0.0 && std::next_permutation(perm.begin(), perm.end()));
    r.assignments_checked = true;
    r.min_assignment_violation = best;
    r.reachable = best <= tol;
  } else {
    r.min_assignment_violation = r.violation;
    r.reachable = r.violation <= tol;
  }
  return r;
}

// ---------------------------------------------------------------------------
// XY chain spectrum from free fermions (even n, periodic)

struct XyLevel {
  double energy = 0.0;
  int parity = 1;  // eigenvalue of prod Z
};

struct XySpectrum {
  int n = 0;
  double gamma = 0.0;
  double h = 0.0;
  std::vector<double> momenta_plus;   // antiperiodic, even sector
  std::vector<double> momenta_minus;  // periodic, odd sector
  std::vector<double> eps_plus;
  std::vector<double> eps_minus;      // (h - cos k) for the unpaired 0 and pi modes
  double e0_plus = 0.0;
  double e0_minus = 0.0;
  std::vector<XyLevel> levels;  // ascending

  std::vector<double> energies() const {
    std::vector<double> e;
    for (const XyLevel& l : levels) e.push_back(l.energy);
    return e;
  }
};

inline double xy_single_particle(double k, double gamma, double h) {
  const double a = h - std::cos(k);
  const double b = gamma * std::sin(k);
  return std::sqrt(a * a + b * b);
}

namespace detail {

inline bool unpaired_mode(double k) {
  return std::abs(std::sin(k)) < 1e-12;
}

// Every excitation pattern of one sector, with mode energies e_k (2 n_k - 1)
// and the fermion-parity constraint on the total count.
inline std::vector<double> xy_sector_levels(const std::vector<double>& ks, const std::vector<double>& eps,
                                            int required_parity) {
  const std::size_t m = ks.size();
  std::vector<double> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if ((std::popcount(mask) & 1) != required_parity) continue;
    double e = 0.0;
    for (std::size_t j = 0; j < m; ++j) e += ((mask >> j) & 1) ? eps[j] : -eps[j];
    out.push_back(e);
  }
  return out;
}

}  // namespace detail

/// Sector +: k in {-(n-1)pi/n + 2 pi j/n}, all modes paired, even number of
/// quasiparticles. Sector -: k in {-pi + 2 pi (j+1)/n}; the unpaired 0 and pi
/// modes carry energy (h - cos k) and the total count must be odd.
inline XySpectrum xy_spectrum_exact(int n, double gamma, double h) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("xy_spectrum_exact needs even n >= 2");
  if (n > 20) throw std::invalid_argument("xy_spectrum_exact enumerates 2^n levels; n <= 20");
  const double pi = std::numbers::pi;
  XySpectrum s;
  s.n = n;
  s.gamma = gamma;
  s.h = h;
  for (int j = 0; j < n; ++j) {
    const double kp = -(n - 1) * pi / n + 2.0 * pi * j / n;
    const double km = -pi + 2.0 * pi * (j + 1) / n;
    s.momenta_plus.push_back(kp);
    s.momenta_minus.push_back(km);
    s.eps_plus.push_back(xy_single_particle(kp, gamma, h));
    s.eps_minus.push_back(detail::unpaired_mode(km) ? h - std::cos(km) : xy_single_particle(km, gamma, h));
  }
  const std::vector<double> plus = detail::xy_sector_levels(s.momenta_plus, s.eps_plus, 0);
  const std::vector<double> minus = detail::xy_sector_levels(s.momenta_minus, s.eps_minus, 1);
  s.e0_plus = *std::min_element(plus.begin(), plus.end());
  s.e0_minus = *std::min_element(minus.begin(), minus.end());
  for (double e : plus) s.levels.push_back({e, 1});
  for (double e : minus) s.levels.push_back({e, -1});
  std::stable_sort(s.levels.begin(), s.levels.end(),
                   [](const XyLevel& a, const XyLevel& b) { return a.energy < b.energy; });
  return s;
}

/// Number of 4^q-fold degenerate p-quasiparticle levels in the even sector,
/// for q = 0, 1, ...: C(n/2, p/2 - q) C(n/2 - (p/2 - q), 2q).
inline std::map<std::uint64_t, std::uint64_t> xy_degeneracy_formula(int n, int p) {
  if (n % 2 != 0 || p % 2 != 0 || p < 0 || p > n) throw std::invalid_argument("needs even n and even 0 <= p <= n");
  auto binom = [](int a, int b) -> std::uint64_t {
    if (b < 0 || a < 0 || b > a) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= b; ++i) r = r * static_cast<std::uint64_t>(a - b + i) / static_cast<std::uint64_t>(i);
    return r;
  };
  std::map<std::uint64_t, std::uint64_t> out;
  for (int q = 0; q <= p / 2; ++q) {
    const std::uint64_t c = binom(n / 2, p / 2 - q) * binom(n / 2 - (p / 2 - q), 2 * q);
    if (c > 0) out[std::uint64_t{1} << (2 * q)] = c;
  }
  return out;
}

/// Observed multiplicities of the p-quasiparticle even-sector levels
/// (fold -> number of distinct levels), grouping energies within tol.
inline std::map<std::uint64_t, std::uint64_t> xy_degeneracy_observed(const XySpectrum& s, int p, double tol = 1e-9) {
  std::vector<double> e;
  const std::size_t m = s.eps_plus.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if (std::popcount(mask) != p) continue;
    double v = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if ((mask >> j) & 1) v += s.eps_plus[j];
    e.push_back(v);
  }
  std::sort(e.begin(), e.end());
  std::map<std::uint64_t, std::uint64_t> out;
  for (std::size_t i = 0; i < e.size();) {
    std::size_t j = i;
    while (j < e.size() && e[j] - e[i] <= tol) ++j;
    ++out[j - i];
    i = j;
  }
  return out;
}

}  // namespace varq

#endif  // VARQ_GIBBS_HPP_
