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

// Experiment configuration files (YAML). The schema is documented in
// README.md; validation reports every violation it finds, not just the first.

#ifndef VARQ_CONFIG_HPP_
#define VARQ_CONFIG_HPP_

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "varq/gibbs.hpp"
#include "varq/models.hpp"
#include "varq/optimize.hpp"
#include "varq/vqe.hpp"
#include "varq/vsv.hpp"

namespace varq {

enum class ExperimentKind { kVqeFluxSweep, kVsv, kGibbs, kGibbsBetaSweep };

inline const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kVqeFluxSweep: return "vqe_flux_sweep";
    case ExperimentKind::kVsv: return "vsv";
    case ExperimentKind::kGibbs: return "gibbs";
    case ExperimentKind::kGibbsBetaSweep: return "gibbs_beta_sweep";
  }
  return "?";
}

inline std::optional<ExperimentKind> parse_experiment(const std::string& s) {
  for (ExperimentKind k : {ExperimentKind::kVqeFluxSweep, ExperimentKind::kVsv, ExperimentKind::kGibbs,
                           ExperimentKind::kGibbsBetaSweep})
    if (s == experiment_name(k)) return k;
  return std::nullopt;
}

struct ModelConfig {
  std::string kind;  // ising, xy, xxz | ghz, xmems | hubbard
  int n = 2;
  double h = 0.5;
  double gamma = 0.0;
  double delta = 0.0;
  bool periodic = true;
  HubbardSpec hubbard;

  bool operator==(const ModelConfig&) const = default;
};

struct AnsatzConfig {
  int layers = 5;              // HVA layers (vqe)
  std::string ancilla = "hw_efficient_ry";  // or product_ry (gibbs)
  int ancilla_layers = 0;      // 0 = model default
  int system_layers = 0;       // 0 = model default
  int components = 0;          // separable components s (vsv); 0 = 2^n

  bool operator==(const AnsatzConfig&) const = default;
};

struct ModeConfig {
  bool shots = false;
  std::uint64_t count = 1024;
  std::optional<std::uint64_t> seed;  // defaults to the experiment seed
  bool miller_madow = false;

  bool operator==(const ModeConfig&) const = default;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kGibbs;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  ModelConfig model;
  AnsatzConfig ansatz;
  OptimizerConfig optimizer;
  int runs = 1;
  ModeConfig mode;
  double beta = 1.0;           // gibbs
  std::vector<double> betas;   // gibbs_beta_sweep
  std::vector<double> phi_grid;  // vqe_flux_sweep
  SweepOptions sweep;
  bool revive = true;          // vsv

  std::uint64_t shot_seed() const { return mode.seed ? *mode.seed : seed; }
  bool operator==(const ExperimentConfig& o) const {
    return experiment == o.experiment && seed == o.seed && output_dir == o.output_dir && model == o.model &&
           ansatz == o.ansatz && optimizer == o.optimizer && runs == o.runs && mode == o.mode && beta == o.beta &&
           betas == o.betas && phi_grid == o.phi_grid && sweep.mirror == o.sweep.mirror &&
           sweep.restarts_per_point == o.sweep.restarts_per_point && sweep.warm_start == o.sweep.warm_start &&
           revive == o.revive;
  }
};

/// Thrown by validate_config; `errors` lists every violation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s;
    for (const std::string& x : e) s += (s.empty() ? "" : "\n") + x;
    return s;
  }
  std::vector<std::string> errors_;
};

namespace detail {

inline std::string at_line(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  if (m.line < 0) return "";
  return " (line " + std::to_string(m.line + 1) + ")";
}

// Field reader that records type errors instead of throwing.
class ConfigReader {
 public:
  explicit ConfigReader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& field, const std::string& msg, const YAML::Node& where = YAML::Node()) {
    errors_.push_back(field + ": " + msg + (where.IsDefined() ? at_line(where) : ""));
  }

  void allow(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> keys) {
    if (!node.IsDefined() || node.IsNull()) return;
    if (!node.IsMap()) {
      error(path, "expected a mapping", node);
      return;
    }
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : node) {
      const std::string k = kv.first.as<std::string>();
      if (!ok.count(k)) error(join(path, k), "unknown key", kv.first);
    }
  }

  template <class T>
  void read(const YAML::Node& parent, const char* key, const std::string& path, T& out) {
    if (!parent.IsDefined() || !parent.IsMap()) return;
    const YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      error(join(path, key), std::string("expected ") + type_name<T>(), n);
    }
  }

  void read_count(const YAML::Node& parent, const char* key, const std::string& path, std::uint64_t& out) {
    if (!parent.IsDefined() || !parent.IsMap()) return;
    const YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) return;
    const bool negative = n.IsScalar() && !n.Scalar().empty() && n.Scalar().front() == '-';
    std::uint64_t v = 0;
    if (negative || !YAML::convert<std::uint64_t>::decode(n, v)) {
      error(join(path, key), "must be a non-negative integer", n);
      return;
    }
    out = v;
  }

  void read_list(const YAML::Node& parent, const char* key, const std::string& path, std::vector<double>& out) {
    if (!parent.IsDefined() || !parent.IsMap()) return;
    const YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) return;
    if (n.IsScalar()) {
      double v = 0.0;
      read(parent, key, path, v);
      out = {v};
      return;
    }
    read(parent, key, path, out);
  }

  static std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

 private:
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else return "a list";
  }

  std::vector<std::string>& errors_;
};

inline OptimizerConfig default_optimizer(ExperimentKind k) {
  if (k == ExperimentKind::kVsv) return vsv_default_upper();
  return OptimizerConfig{};
}

inline int default_runs(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kGibbs:
    case ExperimentKind::kGibbsBetaSweep: return 100;
    case ExperimentKind::kVqeFluxSweep: return 20;
    case ExperimentKind::kVsv: return 1;
  }
  return 1;
}

inline void read_optimizer(ConfigReader& r, const YAML::Node& o, OptimizerConfig& cfg, int& runs) {
  const std::string p = "optimizer";
  r.allow(o, p, {"kind", "max_evaluations", "runs", "quasi_newton", "spsa", "gsa", "nft"});
  std::string kind = optimizer_name(cfg.kind);
  r.read(o, "kind", p, kind);
  try {
    cfg.kind = parse_optimizer_kind(kind);
  } catch (const std::invalid_argument&) {
    r.error("optimizer.kind", "unknown optimizer '" + kind + "' (quasi_newton, bfgs, spsa, gsa, nft)", o["kind"]);
  }
  r.read_count(o, "max_evaluations", p, cfg.max_evaluations);
  r.read(o, "runs", p, runs);

  const YAML::Node qn = o.IsMap() ? o["quasi_newton"] : YAML::Node();
  r.allow(qn, "optimizer.quasi_newton", {"gradient", "gradient_tolerance", "fd_step", "max_iterations"});
  std::string grad = cfg.quasi_newton.gradient == GradientMode::kAdjoint          ? "adjoint"
                     : cfg.quasi_newton.gradient == GradientMode::kParameterShift ? "parameter_shift"
                                                                                 : "finite_difference";
  r.read(qn, "gradient", "optimizer.quasi_newton", grad);
  try {
    cfg.quasi_newton.gradient = parse_gradient_mode(grad);
  } catch (const std::invalid_argument&) {
    r.error("optimizer.quasi_newton.gradient", "unknown gradient mode '" + grad + "'", qn["gradient"]);
  }
  r.read(qn, "gradient_tolerance", "optimizer.quasi_newton", cfg.quasi_newton.gradient_tolerance);
  r.read(qn, "fd_step", "optimizer.quasi_newton", cfg.quasi_newton.fd_step);
  r.read(qn, "max_iterations", "optimizer.quasi_newton", cfg.quasi_newton.max_iterations);

  const YAML::Node sp = o.IsMap() ? o["spsa"] : YAML::Node();
  const std::string ps = "optimizer.spsa";
  r.allow(sp, ps, {"iterations", "perturbation", "learning_rate", "alpha", "gamma", "stability", "calibration_evals",
                   "target_first_step"});
  r.read(sp, "iterations", ps, cfg.spsa.iterations);
  r.read(sp, "perturbation", ps, cfg.spsa.perturbation);
  r.read(sp, "learning_rate", ps, cfg.spsa.learning_rate);
  r.read(sp, "alpha", ps, cfg.spsa.alpha);
  r.read(sp, "gamma", ps, cfg.spsa.gamma);
  r.read(sp, "stability", ps, cfg.spsa.stability);
  r.read(sp, "calibration_evals", ps, cfg.spsa.calibration_evals);
  r.read(sp, "target_first_step", ps, cfg.spsa.target_first_step);

  const YAML::Node gs = o.IsMap() ? o["gsa"] : YAML::Node();
  const std::string pg = "optimizer.gsa";
  r.allow(gs, pg, {"qv", "qa", "initial_temperature", "max_iterations", "local_polish", "polish_evaluations",
                   "restart_temperature_ratio"});
  r.read(gs, "qv", pg, cfg.gsa.qv);
  r.read(gs, "qa", pg, cfg.gsa.qa);
  r.read(gs, "initial_temperature", pg, cfg.gsa.initial_temperature);
  r.read(gs, "max_iterations", pg, cfg.gsa.max_iterations);
  r.read(gs, "local_polish", pg, cfg.gsa.local_polish);
  r.read(gs, "polish_evaluations", pg, cfg.gsa.polish_evaluations);
  r.read(gs, "restart_temperature_ratio", pg, cfg.gsa.restart_temperature_ratio);

  const YAML::Node nf = o.IsMap() ? o["nft"] : YAML::Node();
  const std::string pn = "optimizer.nft";
  r.allow(nf, pn, {"reevaluation_interval", "max_sweeps", "tolerance", "random_order"});
  r.read(nf, "reevaluation_interval", pn, cfg.nft.reevaluation_interval);
  r.read(nf, "max_sweeps", pn, cfg.nft.max_sweeps);
  r.read(nf, "tolerance", pn, cfg.nft.tolerance);
  r.read(nf, "random_order", pn, cfg.nft.random_order);
}

inline void read_model(ConfigReader& r, const YAML::Node& m, ModelConfig& model) {
  r.allow(m, "model", {"kind", "n", "h", "gamma", "delta", "periodic", "L", "N", "t", "U", "V", "phi", "particles",
                       "boundary"});
  r.read(m, "kind", "model", model.kind);
  r.read(m, "n", "model", model.n);
  r.read(m, "h", "model", model.h);
  r.read(m, "gamma", "model", model.gamma);
  r.read(m, "delta", "model", model.delta);
  r.read(m, "periodic", "model", model.periodic);
  HubbardSpec& hs = model.hubbard;
  r.read(m, "L", "model", hs.L);
  r.read(m, "N", "model", hs.N);
  r.read_list(m, "t", "model", hs.t);
  r.read(m, "U", "model", hs.U);
  r.read_list(m, "V", "model", hs.V);
  r.read(m, "phi", "model", hs.phi);
  if (m.IsMap() && m["particles"].IsDefined()) {
    r.read(m, "particles", "model", hs.Ns);
  } else {
    hs.Ns.assign(std::max(hs.N, 0), 1);
  }
  std::string boundary = hs.parity == BoundaryParity::kFermionic ? "fermionic" : "odd_minus";
  r.read(m, "boundary", "model", boundary);
  if (boundary == "fermionic") {
    hs.parity = BoundaryParity::kFermionic;
  } else if (boundary == "odd_minus") {
    hs.parity = BoundaryParity::kOddMinus;
  } else {
    r.error("model.boundary", "expected fermionic or odd_minus", m["boundary"]);
  }
}

inline void check_semantics(ConfigReader& r, const ExperimentConfig& c) {
  const ModelConfig& m = c.model;
  const bool gibbs = c.experiment == ExperimentKind::kGibbs || c.experiment == ExperimentKind::kGibbsBetaSweep;
  if (gibbs) {
    if (m.kind != "ising" && m.kind != "xy" && m.kind != "xxz") {
      r.error("model.kind", "gibbs experiments need ising, xy or xxz");
    }
    if (m.n < 2 || 2 * m.n > kMaxExactQubits) r.error("model.n", "must lie in [2, 7]");
    if (!std::isfinite(m.h)) r.error("model.h", "must be finite");
    if (m.kind == "xy" && !(m.gamma >= 0.0 && m.gamma <= 1.0)) r.error("model.gamma", "must lie in [0, 1]");
    if (!std::isfinite(m.delta)) r.error("model.delta", "must be finite");
    if (c.experiment == ExperimentKind::kGibbs && !(c.beta >= 0.0 && std::isfinite(c.beta)))
      r.error("beta", "must be finite and >= 0");
    if (c.experiment == ExperimentKind::kGibbsBetaSweep) {
      if (c.betas.empty()) r.error("betas", "must list at least one value");
      for (double b : c.betas)
        if (!(b >= 0.0 && std::isfinite(b))) r.error("betas", "every value must be finite and >= 0");
    }
    if (c.ansatz.ancilla != "hw_efficient_ry" && c.ansatz.ancilla != "product_ry")
      r.error("ansatz.ancilla", "expected hw_efficient_ry or product_ry");
    if (c.ansatz.ancilla_layers < 0) r.error("ansatz.ancilla_layers", "must be >= 0");
    if (c.ansatz.system_layers < 0) r.error("ansatz.system_layers", "must be >= 0");
  } else if (c.experiment == ExperimentKind::kVsv) {
    if (m.kind != "ghz" && m.kind != "xmems") r.error("model.kind", "vsv needs ghz or xmems");
    if (m.n < 2 || m.n > kMaxDensityQubits) r.error("model.n", "must lie in [2, 8]");
    if (m.kind == "xmems" && !(std::abs(m.gamma) <= 0.5)) r.error("model.gamma", "X-MEMS needs |gamma| <= 1/2");
    if (c.ansatz.components < 0) r.error("ansatz.components", "must be >= 0");
  } else {
    if (m.kind != "hubbard") r.error("model.kind", "vqe_flux_sweep needs hubbard");
    try {
      m.hubbard.validate();
    } catch (const std::invalid_argument& e) {
      r.error("model", e.what());
    }
    if (c.ansatz.layers < 1) r.error("ansatz.layers", "must be >= 1");
    if (c.phi_grid.empty()) r.error("phi_grid", "must list at least one flux value");
    for (double p : c.phi_grid)
      if (!std::isfinite(p)) r.error("phi_grid", "values must be finite");
    if (c.sweep.restarts_per_point < 0) r.error("restarts_per_point", "must be >= 0");
  }
  if (c.runs < 1) r.error("optimizer.runs", "must be >= 1");
  if (c.mode.shots && c.mode.count < 1) r.error("mode.shots.count", "must be >= 1");
  try {
    c.optimizer.validate();
  } catch (const std::invalid_argument& e) {
    r.error("optimizer", e.what());
  }
  if (c.output_dir.empty()) r.error("output_dir", "must not be empty");
}

}  // namespace detail

/// Parses and validates a configuration document.
inline ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError({"parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                       std::to_string(e.mark.column + 1) + ": " + e.msg});
  }
  std::vector<std::string> errors;
  detail::ConfigReader r(errors);
  ExperimentConfig c;
  if (!root.IsMap()) throw ConfigError({"config: expected a mapping at the top level"});
  r.allow(root, "", {"experiment", "seed", "output_dir", "model", "ansatz", "optimizer", "mode", "beta", "betas",
                     "phi_grid", "phi_points", "restarts_per_point", "mirror", "warm_start", "revive"});

  std::string exp;
  bool known = false;
  if (!root["experiment"].IsDefined()) {
    r.error("experiment", "missing (vqe_flux_sweep, vsv, gibbs, gibbs_beta_sweep)");
  } else {
    r.read(root, "experiment", "", exp);
    if (auto k = parse_experiment(exp)) {
      c.experiment = *k;
      known = true;
    } else {
      r.error("experiment", "unknown experiment '" + exp + "'", root["experiment"]);
    }
  }
  if (!root["seed"].IsDefined()) {
    r.error("seed", "missing; every experiment needs an explicit seed");
  } else {
    r.read_count(root, "seed", "", c.seed);
  }
  r.read(root, "output_dir", "", c.output_dir);

  if (!root["model"].IsDefined()) {
    r.error("model", "missing model block");
  } else {
    detail::read_model(r, root["model"], c.model);
  }

  const YAML::Node a = root["ansatz"];
  r.allow(a, "ansatz", {"layers", "ancilla", "ancilla_layers", "system_layers", "components"});
  r.read(a, "layers", "ansatz", c.ansatz.layers);
  r.read(a, "ancilla", "ansatz", c.ansatz.ancilla);
  r.read(a, "ancilla_layers", "ansatz", c.ansatz.ancilla_layers);
  r.read(a, "system_layers", "ansatz", c.ansatz.system_layers);
  r.read(a, "components", "ansatz", c.ansatz.components);

  c.optimizer = detail::default_optimizer(c.experiment);
  c.runs = detail::default_runs(c.experiment);
  detail::read_optimizer(r, root["optimizer"], c.optimizer, c.runs);

  const YAML::Node mode = root["mode"];
  if (mode.IsDefined() && !mode.IsNull()) {
    r.allow(mode, "mode", {"statevector", "shots"});
    const bool sv = mode.IsMap() && mode["statevector"].IsDefined();
    const bool sh = mode.IsMap() && mode["shots"].IsDefined();
    if (sv && sh) {
      r.error("mode", "statevector and shots blocks conflict; give exactly one", mode);
    }
    if (sh) {
      c.mode.shots = true;
      const YAML::Node s = mode["shots"];
      r.allow(s, "mode.shots", {"count", "seed", "miller_madow"});
      r.read_count(s, "count", "mode.shots", c.mode.count);
      if (s.IsMap() && s["seed"].IsDefined()) {
        std::uint64_t v = 0;
        r.read_count(s, "seed", "mode.shots", v);
        c.mode.seed = v;
      }
      r.read(s, "miller_madow", "mode.shots", c.mode.miller_madow);
    }
  }

  r.read(root, "beta", "", c.beta);
  r.read_list(root, "betas", "", c.betas);
  if (root["phi_grid"].IsDefined()) {
    r.read_list(root, "phi_grid", "", c.phi_grid);
  } else {
    int points = 21;
    r.read(root, "phi_points", "", points);
    if (points < 1) {
      r.error("phi_points", "must be >= 1", root["phi_points"]);
    } else {
      c.phi_grid = default_phi_grid(points);
    }
  }
  r.read(root, "restarts_per_point", "", c.sweep.restarts_per_point);
  r.read(root, "mirror", "", c.sweep.mirror);
  r.read(root, "warm_start", "", c.sweep.warm_start);
  r.read(root, "revive", "", c.revive);

  if (known) detail::check_semantics(r, c);
  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

/// Reads and validates a config file.
inline ExperimentConfig validate_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Canonical YAML with every field spelled out; parse_config(echo) == config.
inline std::string echo_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "experiment" << YAML::Value << experiment_name(c.experiment);
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "output_dir" << YAML::Value << c.output_dir;

  e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << c.model.kind;
  if (c.experiment == ExperimentKind::kVqeFluxSweep) {
    const HubbardSpec& h = c.model.hubbard;
    e << YAML::Key << "L" << YAML::Value << h.L;
    e << YAML::Key << "N" << YAML::Value << h.N;
    e << YAML::Key << "t" << YAML::Value << YAML::Flow << h.t;
    e << YAML::Key << "U" << YAML::Value << h.U;
    e << YAML::Key << "V" << YAML::Value << YAML::Flow << h.V;
    e << YAML::Key << "phi" << YAML::Value << h.phi;
    e << YAML::Key << "particles" << YAML::Value << YAML::Flow << h.Ns;
    e << YAML::Key << "boundary" << YAML::Value << (h.parity == BoundaryParity::kFermionic ? "fermionic" : "odd_minus");
  } else {
    e << YAML::Key << "n" << YAML::Value << c.model.n;
    e << YAML::Key << "h" << YAML::Value << c.model.h;
    e << YAML::Key << "gamma" << YAML::Value << c.model.gamma;
    e << YAML::Key << "delta" << YAML::Value << c.model.delta;
    e << YAML::Key << "periodic" << YAML::Value << c.model.periodic;
  }
  e << YAML::EndMap;

  e << YAML::Key << "ansatz" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "layers" << YAML::Value << c.ansatz.layers;
  e << YAML::Key << "ancilla" << YAML::Value << c.ansatz.ancilla;
  e << YAML::Key << "ancilla_layers" << YAML::Value << c.ansatz.ancilla_layers;
  e << YAML::Key << "system_layers" << YAML::Value << c.ansatz.system_layers;
  e << YAML::Key << "components" << YAML::Value << c.ansatz.components;
  e << YAML::EndMap;

  const OptimizerConfig& o = c.optimizer;
  e << YAML::Key << "optimizer" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << optimizer_name(o.kind);
  e << YAML::Key << "max_evaluations" << YAML::Value << o.max_evaluations;
  e << YAML::Key << "runs" << YAML::Value << c.runs;
  e << YAML::Key << "quasi_newton" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "gradient" << YAML::Value
    << (o.quasi_newton.gradient == GradientMode::kAdjoint          ? "adjoint"
        : o.quasi_newton.gradient == GradientMode::kParameterShift ? "parameter_shift"
                                                                   : "finite_difference");
  e << YAML::Key << "gradient_tolerance" << YAML::Value << o.quasi_newton.gradient_tolerance;
  e << YAML::Key << "fd_step" << YAML::Value << o.quasi_newton.fd_step;
  e << YAML::Key << "max_iterations" << YAML::Value << o.quasi_newton.max_iterations;
  e << YAML::EndMap;
  e << YAML::Key << "spsa" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "iterations" << YAML::Value << o.spsa.iterations;
  e << YAML::Key << "perturbation" << YAML::Value << o.spsa.perturbation;
  e << YAML::Key << "learning_rate" << YAML::Value << o.spsa.learning_rate;
  e << YAML::Key << "alpha" << YAML::Value << o.spsa.alpha;
  e << YAML::Key << "gamma" << YAML::Value << o.spsa.gamma;
  e << YAML::Key << "stability" << YAML::Value << o.spsa.stability;
  e << YAML::Key << "calibration_evals" << YAML::Value << o.spsa.calibration_evals;
  e << YAML::Key << "target_first_step" << YAML::Value << o.spsa.target_first_step;
  e << YAML::EndMap;
  e << YAML::Key << "gsa" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "qv" << YAML::Value << o.gsa.qv;
  e << YAML::Key << "qa" << YAML::Value << o.gsa.qa;
  e << YAML::Key << "initial_temperature" << YAML::Value << o.gsa.initial_temperature;
  e << YAML::Key << "max_iterations" << YAML::Value << o.gsa.max_iterations;
  e << YAML::Key << "local_polish" << YAML::Value << o.gsa.local_polish;
  e << YAML::Key << "polish_evaluations" << YAML::Value << o.gsa.polish_evaluations;
  e << YAML::Key << "restart_temperature_ratio" << YAML::Value << o.gsa.restart_temperature_ratio;
  e << YAML::EndMap;
  e << YAML::Key << "nft" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "reevaluation_interval" << YAML::Value << o.nft.reevaluation_interval;
  e << YAML::Key << "max_sweeps" << YAML::Value << o.nft.max_sweeps;
  e << YAML::Key << "tolerance" << YAML::Value << o.nft.tolerance;
  e << YAML::Key << "random_order" << YAML::Value << o.nft.random_order;
  e << YAML::EndMap;
  e << YAML::EndMap;

  e << YAML::Key << "mode" << YAML::Value << YAML::BeginMap;
  if (c.mode.shots) {
    e << YAML::Key << "shots" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "count" << YAML::Value << c.mode.count;
    if (c.mode.seed) e << YAML::Key << "seed" << YAML::Value << *c.mode.seed;
    e << YAML::Key << "miller_madow" << YAML::Value << c.mode.miller_madow;
    e << YAML::EndMap;
  } else {
    e << YAML::Key << "statevector" << YAML::Value << YAML::BeginMap << YAML::EndMap;
  }
  e << YAML::EndMap;

  switch (c.experiment) {
    case ExperimentKind::kGibbs: e << YAML::Key << "beta" << YAML::Value << c.beta; break;
    case ExperimentKind::kGibbsBetaSweep: e << YAML::Key << "betas" << YAML::Value << YAML::Flow << c.betas; break;
    case ExperimentKind::kVqeFluxSweep:
      e << YAML::Key << "phi_grid" << YAML::Value << YAML::Flow << c.phi_grid;
      e << YAML::Key << "restarts_per_point" << YAML::Value << c.sweep.restarts_per_point;
      e << YAML::Key << "mirror" << YAML::Value << c.sweep.mirror;
      e << YAML::Key << "warm_start" << YAML::Value << c.sweep.warm_start;
      break;
    case ExperimentKind::kVsv: e << YAML::Key << "revive" << YAML::Value << c.revive; break;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

/// FNV-1a of the canonical echo.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : echo_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace varq

#endif  // VARQ_CONFIG_HPP_
