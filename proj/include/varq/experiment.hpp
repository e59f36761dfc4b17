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

// Config-driven experiment runner. Each workflow is a thin wrapper over the
// library call it names, so results match direct calls bit for bit.

#ifndef VARQ_EXPERIMENT_HPP_
#define VARQ_EXPERIMENT_HPP_

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "varq/config.hpp"
#include "varq/io.hpp"

namespace varq {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Config to problem

inline SpinChain spin_chain(const ExperimentConfig& c) {
  SpinChain s;
  s.model = parse_spin_model(c.model.kind);
  s.n = c.model.n;
  s.h = c.model.h;
  s.gamma = c.model.gamma;
  s.delta = c.model.delta;
  s.periodic = c.model.periodic;
  return s;
}

inline GibbsProblem gibbs_problem(const ExperimentConfig& c, double beta) {
  const SpinChain chain = spin_chain(c);
  GibbsProblem p = make_gibbs_problem(chain, beta, c.optimizer, c.runs, c.seed);
  if (c.ansatz.ancilla == "product_ry") {
    p.ancilla = build_product_ry(chain.n);
  } else if (c.ansatz.ancilla_layers > 0) {
    p.ancilla = build_hw_efficient_ry(chain.n, c.ansatz.ancilla_layers);
  }
  if (c.ansatz.system_layers > 0) p.system = build_parity_brickwall(chain.n, c.ansatz.system_layers);
  if (c.mode.shots) p.shots = GibbsShots{c.mode.count, c.shot_seed(), c.mode.miller_madow};
  return p;
}

inline VqeProblem vqe_problem(const ExperimentConfig& c) {
  VqeProblem p;
  p.spec = c.model.hubbard;
  p.ansatz_layers = c.ansatz.layers;
  if (c.mode.shots) p.shots = ShotsMode{c.mode.count, c.shot_seed()};
  p.optimizer = c.optimizer;
  p.runs = c.runs;
  p.seed = c.seed;
  return p;
}

inline DensityMatrix vsv_target(const ExperimentConfig& c) {
  if (c.model.kind == "ghz") return pure_density(ghz_state(c.model.n));
  return xmems_state(XMemsSpec{c.model.n, c.model.gamma});
}

inline std::optional<double> vsv_reference(const ExperimentConfig& c) {
  if (c.model.kind == "ghz") return ghz_hse_analytic(c.model.n);
  const XMemsSpec spec{c.model.n, c.model.gamma};
  if (spec.n == 2) return xmems_css_2qubit(spec.gamma).hse;
  return xmems_css_numeric(spec).hse;
}

inline VsvOptions vsv_options(const ExperimentConfig& c) {
  VsvOptions o = vsv_default_options();
  o.s = c.ansatz.components;
  o.upper = c.optimizer;
  o.mode = c.mode.shots ? OverlapMode::sampled(c.mode.count, c.shot_seed()) : OverlapMode::exact();
  o.runs = c.runs;
  o.seed = c.seed;
  o.revive = c.revive;
  return o;
}

// ---------------------------------------------------------------------------
// Running

struct RunReport {
  std::string config_hash;
  std::string config_echo;
  std::string output_dir;
  std::vector<std::string> artifacts;  // file names relative to output_dir
  double wall_seconds = 0.0;
  std::string version = kVersion;
  bool ok = false;
  std::string error;
};

/// --output-dir beats VARQ_OUTPUT_DIR beats the config.
inline std::string resolve_output_dir(const std::optional<std::string>& flag, const ExperimentConfig& c) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("VARQ_OUTPUT_DIR"); env && *env) return env;
  return c.output_dir;
}

namespace detail {

struct ArtifactWriter {
  std::filesystem::path dir;
  std::vector<std::string>& names;

  void text(const std::string& name, const std::string& content) {
    write_text(dir, name, content);
    names.push_back(name);
  }
  template <class F>
  void stream(const std::string& name, F&& f) {
    std::ostringstream os;
    f(os);
    text(name, os.str());
  }
};

inline void run_gibbs_workflow(const ExperimentConfig& c, ArtifactWriter& w) {
  const double aniso = c.model.kind == "xy" ? c.model.gamma : c.model.delta;
  const GibbsProblem p = gibbs_problem(c, c.beta);
  const ThermalResult r = run_gibbs(p);
  w.text("result.json", dump_json(gibbs_json(c.model.kind, c.model.h, aniso, c.beta, c.model.n, p.shots, r)));
  w.stream("runs.csv", [&](std::ostream& os) { write_gibbs_runs_csv(os, r); });
  w.stream("trace.csv", [&](std::ostream& os) { write_trace_csv(os, r.optimization); });
}

inline void run_beta_sweep_workflow(const ExperimentConfig& c, ArtifactWriter& w) {
  const double aniso = c.model.kind == "xy" ? c.model.gamma : c.model.delta;
  std::vector<BetaSweepRow> rows;
  json points = json::array();
  for (std::size_t k = 0; k < c.betas.size(); ++k) {
    const GibbsProblem p = gibbs_problem(c, c.betas[k]);
    BetaSweepRow row{c.betas[k], run_gibbs(p)};
    points.push_back(gibbs_json(c.model.kind, c.model.h, aniso, row.beta, c.model.n, p.shots, row.result));
    w.stream("trace_beta_" + std::to_string(k) + ".csv",
             [&](std::ostream& os) { write_trace_csv(os, row.result.optimization); });
    rows.push_back(std::move(row));
  }
  w.text("result.json", dump_json({{"experiment", "gibbs_beta_sweep"}, {"points", points}}));
  w.stream("sweep.csv", [&](std::ostream& os) { write_beta_sweep_csv(os, rows); });
}

inline void run_flux_sweep_workflow(const ExperimentConfig& c, ArtifactWriter& w) {
  const VqeProblem p = vqe_problem(c);
  const FluxSweepResult r = flux_sweep(p, c.phi_grid, c.sweep);
  w.text("result.json", dump_json(flux_sweep_json(p.spec, p.ansatz_layers, r)));
  w.stream("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, r); });
}

inline void run_vsv_workflow(const ExperimentConfig& c, ArtifactWriter& w) {
  const VsvOptions o = vsv_options(c);
  const VsvResult r = vsv_minimize(vsv_target(c), o);
  w.text("result.json", dump_json(vsv_json(c.model.n, o.mode, r, vsv_reference(c))));
  w.stream("trace.csv", [&](std::ostream& os) { write_trace_csv(os, r.optimization); });
}

}  // namespace detail

/// Runs a validated config into `output_dir`. Workflow errors are caught
/// and recorded; files written before the error are kept. report.json is
/// deterministic, wall time goes to timing.json.
inline RunReport run_experiment(const ExperimentConfig& c, const std::string& output_dir) {
  RunReport rep;
  rep.config_echo = echo_config(c);
  rep.config_hash = config_hash(c);
  rep.output_dir = output_dir;
  const auto t0 = std::chrono::steady_clock::now();
  detail::ArtifactWriter w{output_dir, rep.artifacts};
  try {
    w.text("config.echo.yaml", rep.config_echo);
    switch (c.experiment) {
      case ExperimentKind::kGibbs: detail::run_gibbs_workflow(c, w); break;
      case ExperimentKind::kGibbsBetaSweep: detail::run_beta_sweep_workflow(c, w); break;
      case ExperimentKind::kVqeFluxSweep: detail::run_flux_sweep_workflow(c, w); break;
      case ExperimentKind::kVsv: detail::run_vsv_workflow(c, w); break;
    }
    rep.ok = true;
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    const json report = {{"config_hash", rep.config_hash},
                         {"config", rep.config_echo},
                         {"artifacts", rep.artifacts},
                         {"version", rep.version},
                         {"status", rep.ok ? "ok" : "error"},
                         {"error", rep.ok ? json(nullptr) : json(rep.error)}};
    write_text(output_dir, "report.json", dump_json(report));
    write_text(output_dir, "timing.json", dump_json({{"wall_seconds", rep.wall_seconds}}));
  } catch (const std::exception& e) {
    if (rep.ok) {
      rep.ok = false;
      rep.error = e.what();
    }
  }
  return rep;
}

inline RunReport run_experiment(const ExperimentConfig& c) { return run_experiment(c, c.output_dir); }

// ---------------------------------------------------------------------------
// Reference tables

/// ghz_hse.csv, xmems_2qubit.csv and xy_spectrum_n4.csv; returns the paths.
inline std::vector<std::string> emit_reference_tables(const std::string& output_dir) {
  std::vector<std::string> paths;
  {
    std::ostringstream os;
    os << "n,hse\n";
    for (int n = 2; n <= 7; ++n) os << n << ',' << format_double(ghz_hse_analytic(n)) << '\n';
    paths.push_back(write_text(output_dir, "ghz_hse.csv", os.str()));
  }
  {
    std::ostringstream os;
    os << "abs_gamma,hse,a,b,abs_d,branch\n";
    for (int k = 0; k <= 10; ++k) {
      const double g = 0.05 * k;
      const XMemsCss r = xmems_css_2qubit(g);
      os << format_double(g) << ',' << format_double(r.hse) << ',' << format_double(r.a) << ','
         << format_double(r.b) << ',' << format_double(std::abs(r.d)) << ',' << (g > 1.0 / 3.0 ? "high" : "low")
         << '\n';
    }
    paths.push_back(write_text(output_dir, "xmems_2qubit.csv", os.str()));
  }
  {
    const XySpectrum s = xy_spectrum_exact(4, 0.5, 0.5);
    std::vector<XyLevel> levels = s.levels;
    std::stable_sort(levels.begin(), levels.end(),
                     [](const XyLevel& a, const XyLevel& b) { return a.energy < b.energy; });
    std::ostringstream os;
    os << "index,energy,parity\n";
    for (std::size_t k = 0; k < levels.size(); ++k)
      os << k << ',' << format_double(levels[k].energy) << ',' << levels[k].parity << '\n';
    paths.push_back(write_text(output_dir, "xy_spectrum_n4.csv", os.str()));
  }
  return paths;
}

}  // namespace varq

#endif  // VARQ_EXPERIMENT_HPP_
