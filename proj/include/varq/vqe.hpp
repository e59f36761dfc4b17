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

// Hubbard ground states: VQE in a fixed particle sector, persistent
// currents and warm-started flux sweeps.

#ifndef VARQ_VQE_HPP_
#define VARQ_VQE_HPP_

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "varq/ansatz.hpp"
#include "varq/exact.hpp"
#include "varq/grouping.hpp"
#include "varq/models.hpp"
#include "varq/optimize.hpp"

namespace varq {

struct ShotsMode {
  std::uint64_t shots_per_group = 1024;
  std::uint64_t seed = 0;
};

struct VqeProblem {
  HubbardSpec spec;
  int ansatz_layers = 1;
  std::optional<ShotsMode> shots;  // statevector when empty
  OptimizerConfig optimizer;
  int runs = 1;  // multi-start restarts
  std::uint64_t seed = 0;
  GroupingStrategy grouping = GroupingStrategy::kHoppingBlocks;

  bool statevector() const { return !shots.has_value(); }
};

struct VqeResult {
  OptimizationResult optimization;
  std::vector<double> params;
  QubitState state;
  double energy = 0.0;  // exact energy of the returned parameters
  int num_params = 0;
};

/// Sector ground state from exact diagonalization.
struct SectorGround {
  double energy = 0.0;
  double gap = 0.0;  // E1 - E0 inside the sector; infinity for a 1-state sector
  QubitState state;
};

inline SectorGround exact_sector_ground(const HubbardSpec& spec) {
  const PauliHamiltonian h = build_hubbard(spec);
  const EigenSolution es = exact_diagonalize_subspace(h, hubbard_sector_basis(spec), true);
  SectorGround g;
  g.energy = es.eigenvalues[0];
  g.gap = es.eigenvalues.size() > 1 ? es.eigenvalues[1] - es.eigenvalues[0] : std::numeric_limits<double>::infinity();
  g.state = es.state(0);
  return g;
}

/// I = -<dH/dphi>; the imaginary residue must stay below 1e-10.
inline double persistent_current(const QubitState& state, const HubbardSpec& spec) {
  if (state.num_qubits() != spec.num_qubits()) throw std::invalid_argument("state does not match the Hubbard register");
  const PauliHamiltonian d = build_hubbard_flux_derivative(spec);
  CVector out;
  apply_hamiltonian(d, state.amplitudes(), out);
  cplx e = d.identity_offset();
  for (std::size_t i = 0; i < out.size(); ++i) e += std::conj(state[i]) * out[i];
  if (std::abs(e.imag()) > 1e-10) throw std::logic_error("current has an imaginary residue");
  return -e.real();
}

/// Shot estimate of the current from the grouped hopping circuits.
inline ShotEstimate persistent_current_shots(const QubitState& state, const HubbardSpec& spec, std::uint64_t shots,
                                             std::uint64_t seed) {
  const PauliHamiltonian d = build_hubbard_flux_derivative(spec);
  ShotEstimate s = grouped_expectation_shots(d, group_commuting(d, GroupingStrategy::kHoppingBlocks), state, shots, seed);
  s.value = -s.value;
  return s;
}

namespace detail {

// Shot objective: evaluation k samples with stream Rng(seed).split(k).
inline Objective shots_energy_objective(const ParametrizedCircuit& c, const PauliHamiltonian& h,
                                        std::vector<MeasurementGroup> groups, ShotsMode mode) {
  Objective o;
  o.arity = c.num_params();
  o.stochastic = true;
  o.circuits_per_evaluation = static_cast<int>(groups.size());
  o.shots_per_evaluation = mode.shots_per_group * groups.size();
  o.shift_r = c.shift_constants();
  auto counter = std::make_shared<std::uint64_t>(0);
  o.evaluate = [c, h, groups = std::move(groups), mode, counter](std::span<const double> p) {
    const QubitState s = run_circuit(c, p);
    const std::uint64_t k = (*counter)++;
    return grouped_expectation_shots(h, groups, s, mode.shots_per_group, Rng(mode.seed).split(k).seed()).value;
  };
  return o;
}

inline VqeResult finish_vqe(const ParametrizedCircuit& c, const PauliHamiltonian& h, OptimizationResult opt) {
  VqeResult r;
  r.params = opt.best_params;
  r.state = run_circuit(c, r.params);
  r.energy = expectation(h, r.state);
  r.num_params = c.num_params();
  r.optimization = std::move(opt);
  return r;
}

}  // namespace detail

inline Objective vqe_objective(const VqeProblem& p, const ParametrizedCircuit& c, const PauliHamiltonian& h) {
  if (p.statevector()) return energy_objective(c, h);
  return detail::shots_energy_objective(c, h, group_commuting(h, p.grouping), *p.shots);
}

/// Minimizes <H> over the HVA parameters. With runs > 1 the restarts are
/// seeded from (seed, run); with x0 given a single run starts there.
inline VqeResult run_vqe(const VqeProblem& p, const std::vector<double>* x0 = nullptr) {
  const PauliHamiltonian h = build_hubbard(p.spec);
  const ParametrizedCircuit c = build_hva_hubbard(p.spec, p.ansatz_layers);
  if (c.num_params() == 0) {
    OptimizationResult opt;
    const QubitState s = run_circuit(c, {});
    opt.best_value = expectation(h, s);
    opt.converged = true;
    opt.reason = "no parameters";
    return detail::finish_vqe(c, h, std::move(opt));
  }
  const Objective obj = vqe_objective(p, c, h);
  if (x0) {
    if (static_cast<int>(x0->size()) != c.num_params()) throw std::invalid_argument("x0 has wrong length");
    OptimizerConfig cfg = p.optimizer;
    cfg.seed = p.seed;
    return detail::finish_vqe(c, h, minimize(obj, *x0, cfg));
  }
  return detail::finish_vqe(c, h, multi_start(p.optimizer, obj, std::max(1, p.runs), p.seed).best);
}

// ---------------------------------------------------------------------------
// Flux sweeps

struct SweepOptions {
  bool mirror = true;          // compute phi <= 1/2 and reflect, when the grid allows
  int restarts_per_point = 0;  // random restarts on top of the warm start
  bool warm_start = true;
  bool compute_exact = true;   // statevector mode only
};

struct FluxSweepResult {
  std::vector<double> phi;
  std::vector<double> energies;
  std::vector<double> currents;
  std::vector<std::vector<double>> params;
  std::vector<std::optional<QubitState>> states;  // statevector mode
  std::vector<int> source;                        // index that was optimized (differs for mirrored points)
  std::vector<std::uint64_t> evaluations;
  std::vector<double> exact_energies, exact_currents, exact_gaps, fidelities;
};

/// Default grid: n evenly spaced points over one flux quantum, ends included.
inline std::vector<double> default_phi_grid(int n = 21) {
  if (n < 1) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> g(n, 0.0);
  for (int k = 0; k < n && n > 1; ++k) g[k] = static_cast<double>(k) / (n - 1);
  return g;
}

namespace detail {

inline bool grid_is_mirror_symmetric(const std::vector<double>& g) {
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::abs(g[k] + g[g.size() - 1 - k] - 1.0) > 1e-12) return false;
  return true;
}

}  // namespace detail

inline FluxSweepResult flux_sweep(const VqeProblem& p, const std::vector<double>& grid, const SweepOptions& o = {}) {
  if (grid.empty()) throw std::invalid_argument("empty flux grid");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("flux grid must be strictly increasing");
  const std::size_t m = grid.size();
  const bool mirror = o.mirror && m > 1 && detail::grid_is_mirror_symmetric(grid);
  const std::size_t computed = mirror ? (m + 1) / 2 : m;
  FluxSweepResult r;
  r.phi = grid;
  r.energies.resize(m);
  r.currents.resize(m);
  r.params.resize(m);
  r.states.resize(m);
  r.source.resize(m);
  r.evaluations.assign(m, 0);
  std::vector<double> prev;
  for (std::size_t k = 0; k < computed; ++k) {
    VqeProblem q = p;
    q.spec.phi = grid[k];
    VqeResult best;
    bool have = false;
    std::uint64_t evals = 0;
    const Rng point_rng = Rng(p.seed).split(k);
    auto consider = [&](VqeResult v) {
      evals += v.optimization.evaluations_used;
      if (!have || v.optimization.best_value < best.optimization.best_value) {
        best = std::move(v);
        have = true;
      }
    };
    if (k == 0 || !o.warm_start) {
      q.seed = point_rng.seed();
      consider(run_vqe(q));
    } else {
      q.seed = point_rng.seed();
      consider(run_vqe(q, &prev));
    }
    for (int j = 0; j < o.restarts_per_point; ++j) {
      VqeProblem rq = q;
      rq.runs = 1;
      rq.seed = point_rng.split(j + 1).seed();
      consider(run_vqe(rq));
    }
    prev = best.params;
    r.energies[k] = best.energy;
    r.currents[k] = p.statevector() ? persistent_current(best.state, q.spec)
                                    : persistent_current_shots(best.state, q.spec, p.shots->shots_per_group,
                                                               Rng(p.shots->seed).split(1000 + k).seed())
                                          .value;
    r.params[k] = best.params;
    if (p.statevector()) r.states[k] = best.state;
    r.source[k] = static_cast<int>(k);
    r.evaluations[k] = evals;
  }
  for (std::size_t k = computed; k < m; ++k) {
    const std::size_t s = m - 1 - k;
    r.energies[k] = r.energies[s];
    r.currents[k] = -r.currents[s];
    r.params[k] = r.params[s];
    r.source[k] = static_cast<int>(s);
  }
  if (p.statevector() && o.compute_exact) {
    for (std::size_t k = 0; k < m; ++k) {
      HubbardSpec sp = p.spec;
      sp.phi = grid[k];
      const SectorGround g = exact_sector_ground(sp);
      r.exact_energies.push_back(g.energy);
      r.exact_currents.push_back(persistent_current(g.state, sp));
      r.exact_gaps.push_back(g.gap);
      // fidelity is invariant under the mirror map, so reuse the source point
      const std::size_t s = r.source[k];
      if (s == k) {
        r.fidelities.push_back(std::norm(inner_product(g.state, *r.states[k])));
      } else {
        r.fidelities.push_back(r.fidelities[s]);
      }
    }
  }
  return r;
}

/// Bipartite entropy of each stored optimum (qubits [0, cut) vs the rest).
/// Mirrored points reuse their source state; the mirror map is a complex
/// conjugation followed by single-qubit phases, which preserves entropy.
inline std::vector<double> vqe_entropy_profile(const FluxSweepResult& sweep, int cut) {
  std::vector<double> out;
  for (std::size_t k = 0; k < sweep.phi.size(); ++k) {
    const auto& s = sweep.states[sweep.source[k]];
    if (!s) throw std::invalid_argument("entropy profile needs statevector sweeps");
    out.push_back(bipartite_entropy(*s, cut));
  }
  return out;
}

/// Number of sign changes along a sequence, skipping entries with |x| <= zero_tol.
inline int count_sign_changes(const std::vector<double>& x, double zero_tol) {
  int changes = 0, last = 0;
  for (double v : x) {
    if (std::abs(v) <= zero_tol) continue;
    const int s = v > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

/// phi,energy_vqe,energy_exact,current_vqe,current_exact,fidelity,evaluations
inline void write_sweep_csv(std::ostream& os, const FluxSweepResult& r) {
  os << "phi,energy_vqe,energy_exact,current_vqe,current_exact,fidelity,evaluations\n";
  const bool ex = r.exact_energies.size() == r.phi.size();
  for (std::size_t k = 0; k < r.phi.size(); ++k) {
    os << format_double(r.phi[k]) << ',' << format_double(r.energies[k]) << ','
       << (ex ? format_double(r.exact_energies[k]) : "") << ',' << format_double(r.currents[k]) << ','
       << (ex ? format_double(r.exact_currents[k]) : "") << ',' << (ex ? format_double(r.fidelities[k]) : "") << ','
       << r.evaluations[k] << '\n';
  }
}

}  // namespace varq

#endif  // VARQ_VQE_HPP_
