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

// JSON and CSV serialization of workflow results. JSON objects use sorted
// keys; CSV files use LF endings and 17 significant digits.

#ifndef VARQ_IO_HPP_
#define VARQ_IO_HPP_

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "varq/gibbs.hpp"
#include "varq/vqe.hpp"
#include "varq/vsv.hpp"

namespace varq {

using json = nlohmann::json;

inline json trace_json(const OptimizationResult& r) {
  return {{"best_value", r.best_value},
          {"converged", r.converged},
          {"evaluations", r.evaluations_used},
          {"iterations", r.iterations},
          {"reason", r.reason}};
}

/// Gibbs result. `params` holds h and the model's anisotropy.
inline json gibbs_json(const std::string& model, double h, double anisotropy, double beta, int n,
                       const std::optional<GibbsShots>& shots, const ThermalResult& r) {
  json params = {{"h", h}};
  if (model == "xy") params["gamma"] = anisotropy;
  if (model == "xxz") params["delta"] = anisotropy;
  json runs = json::array();
  for (const GibbsRun& g : r.runs) {
    runs.push_back({{"run", g.run},
                    {"seed", g.seed},
                    {"free_energy", g.free_energy},
                    {"fidelity", g.fidelity},
                    {"evaluations", g.evaluations}});
  }
  return {{"model", model},
          {"params", params},
          {"beta", beta},
          {"n", n},
          {"mode", shots ? "shots" : "statevector"},
          {"shots", shots ? json(shots->shots) : json(nullptr)},
          {"best_fidelity", r.best_fidelity},
          {"mean_fidelity", r.mean_fidelity},
          {"fidelity", r.fidelity_vs_exact},
          {"free_energy", r.free_energy},
          {"exact_free_energy", r.exact_free_energy},
          {"energy", r.energy},
          {"entropy", r.entropy},
          {"probabilities", r.probabilities},
          {"ancilla_params", r.ancilla_params},
          {"system_params", r.system_params},
          {"best_run", r.best_run},
          {"optimization", trace_json(r.optimization)},
          {"runs", runs}};
}

struct BetaSweepRow {
  double beta = 0.0;
  ThermalResult result;
};

/// beta,fidelity_best,fidelity_mean,fidelity,free_energy,exact_free_energy,entropy,energy
inline void write_beta_sweep_csv(std::ostream& os, const std::vector<BetaSweepRow>& rows) {
  os << "beta,fidelity_best,fidelity_mean,fidelity,free_energy,exact_free_energy,entropy,energy\n";
  for (const BetaSweepRow& r : rows) {
    os << format_double(r.beta) << ',' << format_double(r.result.best_fidelity) << ','
       << format_double(r.result.mean_fidelity) << ',' << format_double(r.result.fidelity_vs_exact) << ','
       << format_double(r.result.free_energy) << ',' << format_double(r.result.exact_free_energy) << ','
       << format_double(r.result.entropy) << ',' << format_double(r.result.energy) << '\n';
  }
}

/// run,seed,free_energy,fidelity,evaluations
inline void write_gibbs_runs_csv(std::ostream& os, const ThermalResult& r) {
  os << "run,seed,free_energy,fidelity,evaluations\n";
  for (const GibbsRun& g : r.runs)
    os << g.run << ',' << g.seed << ',' << format_double(g.free_energy) << ',' << format_double(g.fidelity) << ','
       << g.evaluations << '\n';
}

inline json vsv_json(int n, const OverlapMode& mode, const VsvResult& r, std::optional<double> reference) {
  return {{"n", n},
          {"s", r.ensemble.s},
          {"mode", mode.is_exact() ? "statevector" : "shots"},
          {"shots", mode.is_exact() ? json(nullptr) : json(mode.shots)},
          {"hse", r.hse},
          {"hse_raw", r.hse_raw},
          {"hse_exact", r.hse_exact},
          {"iterations", r.optimization.iterations},
          {"evaluations", r.evaluations},
          {"circuits", r.circuits},
          {"best_run", r.best_run},
          {"run_values", r.run_values},
          {"ensemble", {{"p", r.ensemble.p}, {"theta", r.ensemble.theta}, {"phi", r.ensemble.phi}}},
          {"reference_hse", reference ? json(*reference) : json(nullptr)},
          {"optimization", trace_json(r.optimization)}};
}

inline json flux_sweep_json(const HubbardSpec& spec, int layers, const FluxSweepResult& r) {
  return {{"L", spec.L},
          {"N", spec.N},
          {"U", spec.U},
          {"V", spec.V},
          {"t", spec.t},
          {"particles", spec.Ns},
          {"layers", layers},
          {"phi", r.phi},
          {"energies", r.energies},
          {"currents", r.currents},
          {"exact_energies", r.exact_energies},
          {"exact_currents", r.exact_currents},
          {"exact_gaps", r.exact_gaps},
          {"fidelities", r.fidelities},
          {"source", r.source},
          {"evaluations", r.evaluations},
          {"params", r.params}};
}

/// Writes `text` to dir/name and returns the path.
inline std::string write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
  return p.string();
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace varq

#endif  // VARQ_IO_HPP_
