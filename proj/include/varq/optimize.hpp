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

// Classical optimizers over black-box objectives: NFT, SPSA, GSA,
// BFGS-style quasi-Newton and a seeded multi-start harness.

#ifndef VARQ_OPTIMIZE_HPP_
#define VARQ_OPTIMIZE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "varq/circuit.hpp"
#include "varq/rng.hpp"

namespace varq {

struct Objective {
  int arity = 0;
  std::function<double(std::span<const double>)> evaluate;
  // Optional exact value and gradient (adjoint method); one evaluation each.
  std::function<ValueAndGradient(std::span<const double>)> value_and_gradient;
  // Per-slot parameter-shift constant r; 0 marks a slot without a rule.
  std::vector<double> shift_r;
  bool stochastic = false;
  int circuits_per_evaluation = 1;
  std::uint64_t shots_per_evaluation = 0;

  bool has_exact_gradient() const { return static_cast<bool>(value_and_gradient); }
};

struct HistoryEntry {
  std::uint64_t evaluation = 0;  // evaluations consumed when accepted
  double value = 0.0;
  std::uint64_t params_hash = 0;
};

struct OptimizationResult {
  std::vector<double> best_params;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> final_params;
  std::vector<HistoryEntry> history;
  std::uint64_t evaluations_used = 0;
  int iterations = 0;
  bool converged = false;
  std::string reason;
};

enum class OptimizerKind { kNft, kSpsa, kGsa, kQuasiNewton };
enum class GradientMode { kAdjoint, kParameterShift, kFiniteDifference };

struct NftOptions {
  int reevaluation_interval = 0;  // coordinate updates between full evaluations; 0 = arity
  int max_sweeps = 200;
  double tolerance = 1e-12;  // stop when a sweep improves by less
  bool random_order = false;

  bool operator==(const NftOptions&) const = default;
};

struct SpsaOptions {
  int iterations = 200;
  double perturbation = 0.1;  // c in c_k = c / (k+1)^gamma
  double learning_rate = 0.0;  // a; 0 = calibrate
  double alpha = 0.602;
  double gamma = 0.101;
  double stability = 0.0;  // A; 0 = 10% of iterations
  int calibration_evals = 50;
  double target_first_step = 0.1;

  bool operator==(const SpsaOptions&) const = default;
};

struct GsaOptions {
  double qv = 2.62;
  double qa = -5.0;
  double initial_temperature = 5230.0;
  int max_iterations = 3000;
  bool local_polish = true;
  int polish_evaluations = 2000;
  double restart_temperature_ratio = 2e-5;

  bool operator==(const GsaOptions&) const = default;
};

struct QuasiNewtonOptions {
  GradientMode gradient = GradientMode::kAdjoint;
  double gradient_tolerance = 1e-5;
  double fd_step = 1e-6;
  int max_iterations = 1000;

  bool operator==(const QuasiNewtonOptions&) const = default;
};

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kQuasiNewton;
  std::uint64_t max_evaluations = 100000;
  std::uint64_t seed = 0;
  NftOptions nft;
  SpsaOptions spsa;
  GsaOptions gsa;
  QuasiNewtonOptions quasi_newton;

  void validate() const {
    if (max_evaluations < 1) throw std::invalid_argument("max_evaluations must be >= 1");
    if (kind == OptimizerKind::kGsa) {
      if (!(gsa.qv > 1.0 && gsa.qv < 3.0)) throw std::invalid_argument("GSA requires 1 < q_v < 3");
      if (!(gsa.initial_temperature > 0.0)) throw std::invalid_argument("GSA temperature must be positive");
    }
    if (kind == OptimizerKind::kSpsa) {
      if (spsa.calibration_evals < 0 || spsa.calibration_evals % 2 != 0)
        throw std::invalid_argument("SPSA calibration_evals must be even and >= 0");
      if (!(spsa.perturbation > 0.0)) throw std::invalid_argument("SPSA perturbation must be positive");
    }
  }

  bool operator==(const OptimizerConfig&) const = default;
};

inline const char* optimizer_name(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::kNft: return "nft";
    case OptimizerKind::kSpsa: return "spsa";
    case OptimizerKind::kGsa: return "gsa";
    case OptimizerKind::kQuasiNewton: return "quasi_newton";
  }
  return "?";
}

inline OptimizerKind parse_optimizer_kind(const std::string& s) {
  if (s == "nft") return OptimizerKind::kNft;
  if (s == "spsa") return OptimizerKind::kSpsa;
  if (s == "gsa") return OptimizerKind::kGsa;
  if (s == "quasi_newton" || s == "bfgs") return OptimizerKind::kQuasiNewton;
  throw std::invalid_argument("unknown optimizer '" + s + "'");
}

inline GradientMode parse_gradient_mode(const std::string& s) {
  if (s == "adjoint") return GradientMode::kAdjoint;
  if (s == "parameter_shift") return GradientMode::kParameterShift;
  if (s == "finite_difference") return GradientMode::kFiniteDifference;
  throw std::invalid_argument("unknown gradient mode '" + s + "'");
}

/// FNV-1a over the raw parameter bytes.
inline std::uint64_t hash_params(std::span<const double> p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double x : p) {
    unsigned char b[sizeof(double)];
    std::memcpy(b, &x, sizeof(double));
    for (unsigned char c : b) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace detail {

struct BudgetExhausted {};

// Counts evaluations and tracks the accepted trajectory.
class Tracker {
 public:
  Tracker(const Objective& obj, std::uint64_t budget) : obj_(obj), budget_(budget) {
    if (!obj.evaluate) throw std::invalid_argument("objective has no evaluate function");
    if (obj.arity < 0) throw std::invalid_argument("negative arity");
  }

  double eval(std::span<const double> x) {
    charge(1);
    return obj_.evaluate(x);
  }

  ValueAndGradient eval_grad(std::span<const double> x) {
    charge(1);
    return obj_.value_and_gradient(x);
  }

  bool can_afford(std::uint64_t k) const { return used_ + k <= budget_; }
  std::uint64_t used() const { return used_; }

  void accept(std::span<const double> x, double v) {
    res_.history.push_back({used_, v, hash_params(x)});
    if (v < res_.best_value) {
      res_.best_value = v;
      res_.best_params.assign(x.begin(), x.end());
    }
  }

  OptimizationResult finish(std::span<const double> final_x, bool converged, std::string reason) {
    res_.final_params.assign(final_x.begin(), final_x.end());
    if (res_.best_params.empty()) res_.best_params = res_.final_params;
    res_.evaluations_used = used_;
    res_.converged = converged;
    res_.reason = std::move(reason);
    return std::move(res_);
  }

  OptimizationResult& result() { return res_; }

 private:
  void charge(std::uint64_t k) {
    if (used_ + k > budget_) throw BudgetExhausted{};
    used_ += k;
  }

  const Objective& obj_;
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
  OptimizationResult res_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// NFT

struct SineFit {
  double a = 0.0, b = 0.0, c = 0.0;  // f(t) = a sin(t + b) + c, t offset from the centre

  double argmin() const { return -std::numbers::pi / 2 - b; }
  double min_value() const { return c - std::abs(a); }
};

/// Exact fit through f(0), f(pi/2), f(-pi/2) with a >= 0.
inline SineFit fit_sine(double f0, double fplus, double fminus) {
  const double c = 0.5 * (fplus + fminus);
  const double bs = 0.5 * (fplus - fminus);  // coefficient of sin t
  const double ac = f0 - c;                  // coefficient of cos t
  SineFit s;
  s.c = c;
  s.a = std::hypot(ac, bs);
  s.b = std::atan2(ac, bs);
  return s;
}

inline OptimizationResult nft_minimize(const Objective& obj, std::vector<double> x, const OptimizerConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(x.size()) != obj.arity) throw std::invalid_argument("x0 has wrong length");
  detail::Tracker tr(obj, cfg.max_evaluations);
  const int d = obj.arity;
  const int interval = cfg.nft.reevaluation_interval > 0 ? cfg.nft.reevaluation_interval : std::max(1, d);
  Rng rng(cfg.seed);
  std::vector<int> order(d);
  for (int j = 0; j < d; ++j) order[j] = j;
  const double half_pi = std::numbers::pi / 2;
  try {
    double f = tr.eval(x);
    tr.accept(x, f);
    if (d == 0) return tr.finish(x, true, "no parameters");
    int since = 0;
    for (int sweep = 0; sweep < cfg.nft.max_sweeps; ++sweep) {
      const double start = f;
      if (cfg.nft.random_order) std::shuffle(order.begin(), order.end(), rng.engine());
      for (int j : order) {
        if (since >= interval) {
          f = tr.eval(x);
          since = 0;
        }
        const double xj = x[j];
        x[j] = xj + half_pi;
        const double fp = tr.eval(x);
        x[j] = xj - half_pi;
        const double fm = tr.eval(x);
        const SineFit s = fit_sine(f, fp, fm);
        x[j] = std::remainder(xj + s.argmin(), 2 * std::numbers::pi);
        f = s.min_value();
        ++since;
        tr.accept(x, f);
      }
      ++tr.result().iterations;
      if (start - f < cfg.nft.tolerance) return tr.finish(x, true, "sweep improvement below tolerance");
    }
    return tr.finish(x, false, "sweep limit reached");
  } catch (const detail::BudgetExhausted&) {
    return tr.finish(x, false, "evaluation budget exhausted");
  }
}

// ---------------------------------------------------------------------------
// SPSA

inline OptimizationResult spsa_minimize(const Objective& obj, std::vector<double> x, const OptimizerConfig& cfg) {
  cfg.validate();
  if (obj.arity < 1) throw std::invalid_argument("SPSA needs arity >= 1");
  if (static_cast<int>(x.size()) != obj.arity) throw std::invalid_argument("x0 has wrong length");
  const SpsaOptions& o = cfg.spsa;
  detail::Tracker tr(obj, cfg.max_evaluations);
  Rng rng(cfg.seed);
  const int d = obj.arity;
  const double A = o.stability > 0.0 ? o.stability : 0.1 * o.iterations;
  std::vector<double> delta(d), xp(d), xm(d);
  auto draw = [&] {
    for (double& v : delta) v = rng.sign();
  };
  double a = o.learning_rate;
  try {
    if (o.calibration_evals > 0) {
      const int pairs = o.calibration_evals / 2;
      double mag = 0.0;
      for (int k = 0; k < pairs; ++k) {
        draw();
        for (int i = 0; i < d; ++i) {
          xp[i] = x[i] + o.perturbation * delta[i];
          xm[i] = x[i] - o.perturbation * delta[i];
        }
        mag += std::abs(tr.eval(xp) - tr.eval(xm)) / (2.0 * o.perturbation);
      }
      mag /= pairs;
      if (a <= 0.0) a = mag > 0.0 ? o.target_first_step * std::pow(A + 1.0, o.alpha) / mag : o.target_first_step;
    }
    if (a <= 0.0) a = o.target_first_step;
    for (int k = 0; k < o.iterations; ++k) {
      if (!tr.can_afford(2)) return tr.finish(x, false, "evaluation budget exhausted");
      const double ak = a / std::pow(k + 1.0 + A, o.alpha);
      const double ck = o.perturbation / std::pow(k + 1.0, o.gamma);
      draw();
      for (int i = 0; i < d; ++i) {
        xp[i] = x[i] + ck * delta[i];
        xm[i] = x[i] - ck * delta[i];
      }
      const double fp = tr.eval(xp), fm = tr.eval(xm);
      tr.accept(x, 0.5 * (fp + fm));
      const double g = (fp - fm) / (2.0 * ck);
      for (int i = 0; i < d; ++i) x[i] -= ak * g / delta[i];
      ++tr.result().iterations;
    }
    return tr.finish(x, true, "iteration limit reached");
  } catch (const detail::BudgetExhausted&) {
    return tr.finish(x, false, "evaluation budget exhausted");
  }
}

// ---------------------------------------------------------------------------
// Gradients

/// d_i f = r_i [f(x + pi/(4 r_i) e_i) - f(x - pi/(4 r_i) e_i)].
inline std::vector<double> parameter_shift_gradient(const Objective& obj, std::span<const double> params) {
  if (static_cast<int>(params.size()) != obj.arity) throw std::invalid_argument("parameter vector has wrong length");
  if (static_cast<int>(obj.shift_r.size()) != obj.arity) throw std::invalid_argument("objective declares no shift rules");
  std::vector<double> x(params.begin(), params.end()), g(obj.arity);
  for (int i = 0; i < obj.arity; ++i) {
    const double r = obj.shift_r[i];
    if (!(r > 0.0)) throw std::invalid_argument("slot " + std::to_string(i) + " has no parameter-shift rule");
    const double s = std::numbers::pi / (4.0 * r);
    const double xi = x[i];
    x[i] = xi + s;
    const double fp = obj.evaluate(x);
    x[i] = xi - s;
    const double fm = obj.evaluate(x);
    x[i] = xi;
    g[i] = r * (fp - fm);
  }
  return g;
}

inline std::vector<double> finite_difference_gradient(const Objective& obj, std::span<const double> params,
                                                      double step = 1e-6) {
  std::vector<double> x(params.begin(), params.end()), g(obj.arity);
  for (int i = 0; i < obj.arity; ++i) {
    const double xi = x[i];
    x[i] = xi + step;
    const double fp = obj.evaluate(x);
    x[i] = xi - step;
    const double fm = obj.evaluate(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Quasi-Newton (BFGS inverse-Hessian updates, Armijo backtracking)

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Value and gradient under the chosen mode, charged to the tracker.
inline ValueAndGradient value_grad(Tracker& tr, const Objective& obj, const std::vector<double>& x,
                                   const QuasiNewtonOptions& o, double known_value, bool have_value) {
  GradientMode mode = o.gradient;
  if (mode == GradientMode::kAdjoint && !obj.has_exact_gradient()) mode = GradientMode::kFiniteDifference;
  if (mode == GradientMode::kAdjoint) return tr.eval_grad(x);
  ValueAndGradient vg;
  vg.value = have_value ? known_value : tr.eval(x);
  std::vector<double> xx = x;
  vg.gradient.resize(obj.arity);
  for (int i = 0; i < obj.arity; ++i) {
    double s, scale;
    if (mode == GradientMode::kParameterShift) {
      const double r = obj.shift_r.size() == static_cast<std::size_t>(obj.arity) ? obj.shift_r[i] : 0.0;
      if (!(r > 0.0)) throw std::invalid_argument("slot " + std::to_string(i) + " has no parameter-shift rule");
      s = std::numbers::pi / (4.0 * r);
      scale = r;
    } else {
      s = o.fd_step;
      scale = 1.0 / (2.0 * o.fd_step);
    }
    xx[i] = x[i] + s;
    const double fp = tr.eval(xx);
    xx[i] = x[i] - s;
    const double fm = tr.eval(xx);
    xx[i] = x[i];
    vg.gradient[i] = scale * (fp - fm);
  }
  return vg;
}

}  // namespace detail

inline OptimizationResult quasi_newton_minimize(const Objective& obj, std::vector<double> x,
                                                const OptimizerConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(x.size()) != obj.arity) throw std::invalid_argument("x0 has wrong length");
  const QuasiNewtonOptions& o = cfg.quasi_newton;
  detail::Tracker tr(obj, cfg.max_evaluations);
  const int d = obj.arity;
  const bool exact_grad = o.gradient == GradientMode::kAdjoint && obj.has_exact_gradient();
  try {
    ValueAndGradient cur = detail::value_grad(tr, obj, x, o, 0.0, false);
    tr.accept(x, cur.value);
    if (d == 0) return tr.finish(x, true, "no parameters");
    std::vector<double> hinv(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) hinv[i * d + i] = 1.0;
    std::vector<double> p(d), xn(d), s(d), y(d);
    for (int it = 0; it < o.max_iterations; ++it) {
      if (detail::norm(cur.gradient) < o.gradient_tolerance) return tr.finish(x, true, "gradient norm below tolerance");
      for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc -= hinv[i * d + j] * cur.gradient[j];
        p[i] = acc;
      }
      double slope = detail::dot(p, cur.gradient);
      if (slope >= 0.0) {  // lost descent; restart from steepest descent
        std::fill(hinv.begin(), hinv.end(), 0.0);
        for (int i = 0; i < d; ++i) {
          hinv[i * d + i] = 1.0;
          p[i] = -cur.gradient[i];
        }
        slope = detail::dot(p, cur.gradient);
      }
      auto trial = [&](double step) {
        for (int i = 0; i < d; ++i) xn[i] = x[i] + step * p[i];
        ValueAndGradient t;
        if (exact_grad) {
          t = tr.eval_grad(xn);
        } else {
          t.value = tr.eval(xn);
        }
        return t;
      };
      double step = 1.0;
      ValueAndGradient next = trial(step);
      // one quadratic-interpolation refinement of the unit step
      const double curv = next.value - cur.value - slope;
      if (curv > 0.0) {
        const double s_star = -slope / (2.0 * curv);
        if (s_star > 0.0 && s_star < 1e3 && std::abs(s_star - 1.0) > 1e-3) {
          ValueAndGradient alt = trial(s_star);
          if (alt.value < next.value) {
            step = s_star;
            next = std::move(alt);
          } else {
            for (int i = 0; i < d; ++i) xn[i] = x[i] + step * p[i];
          }
        }
      }
      bool ok = next.value <= cur.value + 1e-4 * step * slope;
      for (int ls = 0; !ok && ls < 40; ++ls) {
        step *= 0.5;
        next = trial(step);
        ok = next.value <= cur.value + 1e-4 * step * slope;
      }
      if (!ok) return tr.finish(x, false, "line search failed");
      if (!exact_grad) next = detail::value_grad(tr, obj, xn, o, next.value, true);
      for (int i = 0; i < d; ++i) {
        s[i] = xn[i] - x[i];
        y[i] = next.gradient[i] - cur.gradient[i];
      }
      const double sy = detail::dot(s, y);
      if (sy > 1e-14 * detail::norm(s) * detail::norm(y)) {
        if (it == 0) {  // scale the initial inverse Hessian
          const double gamma = sy / detail::dot(y, y);
          for (int i = 0; i < d; ++i) hinv[i * d + i] = gamma;
        }
        // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
        const double rho = 1.0 / sy;
        std::vector<double> hy(d, 0.0);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) hy[i] += hinv[i * d + j] * y[j];
        const double yhy = detail::dot(y, hy);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            hinv[i * d + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
      }
      x = xn;
      cur = std::move(next);
      tr.accept(x, cur.value);
      ++tr.result().iterations;
    }
    return tr.finish(x, false, "iteration limit reached");
  } catch (const detail::BudgetExhausted&) {
    return tr.finish(x, false, "evaluation budget exhausted");
  }
}

// ---------------------------------------------------------------------------
// Generalized simulated annealing

/// T(n) = T0 (2^(qv-1) - 1) / ((2+n)^(qv-1) - 1).
inline double gsa_temperature(double t0, double qv, double n) {
  return t0 * (std::pow(2.0, qv - 1.0) - 1.0) / (std::pow(2.0 + n, qv - 1.0) - 1.0);
}

/// min{1, [1 - (1-qa) beta dE]^(1/(1-qa))}, 0 when the base is negative.
inline double gsa_acceptance(double delta_e, double beta, double qa) {
  if (delta_e <= 0.0) return 1.0;
  if (qa == 1.0) return std::exp(-beta * delta_e);
  const double base = 1.0 - (1.0 - qa) * beta * delta_e;
  if (base <= 0.0) return 0.0;
  return std::min(1.0, std::pow(base, 1.0 / (1.0 - qa)));
}

/// One-dimensional Tsallis visiting draw at temperature t.
inline double gsa_visit(double qv, double t, Rng& rng) {
  const double pi = std::numbers::pi;
  const double f1 = std::exp(std::log(t) / (qv - 1.0));
  const double f2 = std::exp((4.0 - qv) * std::log(qv - 1.0));
  const double f3 = std::exp((2.0 - qv) * std::log(2.0) / (qv - 1.0));
  const double f4 = std::sqrt(pi) * f1 * f2 / (f3 * (3.0 - qv));
  const double f5 = 1.0 / (qv - 1.0) - 0.5;
  const double d1 = 2.0 - f5;
  const double f6 = pi * (1.0 - f5) / std::sin(pi * (1.0 - f5)) / std::exp(std::lgamma(d1));
  const double sigmax = std::exp(-(qv - 1.0) * std::log(f6 / f4) / (3.0 - qv));
  const double x = sigmax * rng.normal();
  const double y = rng.normal();
  const double den = std::exp((qv - 1.0) * std::log(std::abs(y)) / (3.0 - qv));
  const double v = x / den;
  return std::isfinite(v) ? v : 0.0;
}

struct Bounds {
  std::vector<double> lower, upper;

  static Bounds uniform(int d, double lo, double hi) {
    return Bounds{std::vector<double>(d, lo), std::vector<double>(d, hi)};
  }
  void validate(int d) const {
    if (static_cast<int>(lower.size()) != d || static_cast<int>(upper.size()) != d)
      throw std::invalid_argument("bounds have wrong length");
    for (int i = 0; i < d; ++i)
      if (!(std::isfinite(lower[i]) && std::isfinite(upper[i]) && lower[i] < upper[i]))
        throw std::invalid_argument("bounds must be finite with lower < upper");
  }
  double wrap(int i, double v) const {
    const double w = upper[i] - lower[i];
    double r = std::fmod(v - lower[i], w);
    if (r < 0) r += w;
    return lower[i] + r;
  }
};

inline OptimizationResult gsa_minimize(const Objective& obj, const Bounds& bounds, const OptimizerConfig& cfg) {
  cfg.validate();
  const int d = obj.arity;
  bounds.validate(d);
  const GsaOptions& o = cfg.gsa;
  Rng rng(cfg.seed);
  std::vector<double> x(d);
  for (int i = 0; i < d; ++i) x[i] = rng.uniform(bounds.lower[i], bounds.upper[i]);
  const std::uint64_t polish = o.local_polish ? std::min<std::uint64_t>(o.polish_evaluations, cfg.max_evaluations / 2) : 0;
  detail::Tracker tr(obj, cfg.max_evaluations - polish);
  OptimizationResult res;
  try {
    double f = tr.eval(x);
    tr.accept(x, f);
    std::vector<double> y(d);
    int n = 0;
    for (int it = 0; it < o.max_iterations; ++it, ++n) {
      double t = gsa_temperature(o.initial_temperature, o.qv, n);
      if (t < o.restart_temperature_ratio * o.initial_temperature) {
        n = 0;
        t = o.initial_temperature;
        for (int i = 0; i < d; ++i) x[i] = rng.uniform(bounds.lower[i], bounds.upper[i]);
        f = tr.eval(x);
      }
      for (int i = 0; i < d; ++i) y[i] = bounds.wrap(i, x[i] + gsa_visit(o.qv, t, rng));
      const double fy = tr.eval(y);
      const double p = gsa_acceptance(fy - f, 1.0 / t, o.qa);
      if (fy <= f || rng.uniform() < p) {
        x = y;
        f = fy;
        if (f < tr.result().best_value) tr.accept(x, f);
      }
      ++tr.result().iterations;
    }
    res = tr.finish(x, true, "iteration limit reached");
  } catch (const detail::BudgetExhausted&) {
    res = tr.finish(x, false, "evaluation budget exhausted");
  }
  if (polish > 0 && d > 0) {
    OptimizerConfig qc = cfg;
    qc.kind = OptimizerKind::kQuasiNewton;
    qc.max_evaluations = polish;
    const OptimizationResult q = quasi_newton_minimize(obj, res.best_params, qc);
    res.evaluations_used += q.evaluations_used;
    if (q.best_value < res.best_value) {
      res.best_value = q.best_value;
      res.best_params = q.best_params;
      res.final_params = q.best_params;
      res.history.push_back({res.evaluations_used, q.best_value, hash_params(q.best_params)});
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Dispatch and multi-start

/// Runs the configured optimizer. GSA ignores x0 and samples inside bounds.
inline OptimizationResult minimize(const Objective& obj, std::vector<double> x0, const OptimizerConfig& cfg,
                                   const Bounds* bounds = nullptr) {
  switch (cfg.kind) {
    case OptimizerKind::kNft: return nft_minimize(obj, std::move(x0), cfg);
    case OptimizerKind::kSpsa: return spsa_minimize(obj, std::move(x0), cfg);
    case OptimizerKind::kQuasiNewton: return quasi_newton_minimize(obj, std::move(x0), cfg);
    case OptimizerKind::kGsa: {
      if (bounds) return gsa_minimize(obj, *bounds, cfg);
      return gsa_minimize(obj, Bounds::uniform(obj.arity, -std::numbers::pi, std::numbers::pi), cfg);
    }
  }
  throw std::logic_error("unhandled optimizer");
}

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  OptimizationResult result;
};

struct MultiStartResult {
  OptimizationResult best;
  int best_run = 0;
  std::vector<RunRecord> runs;
};

/// Seed of restart `run`; its initial point and optimizer stream split from it.
inline std::uint64_t run_seed(std::uint64_t seed, int run) { return Rng(seed).split(run).seed(); }

inline std::vector<double> initial_point(std::uint64_t run_seed_value, const Bounds& b) {
  Rng r = Rng(run_seed_value).split(0);
  std::vector<double> x(b.lower.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = r.uniform(b.lower[i], b.upper[i]);
  return x;
}

inline OptimizerConfig run_config(const OptimizerConfig& cfg, std::uint64_t run_seed_value) {
  OptimizerConfig c = cfg;
  c.seed = Rng(run_seed_value).split(1).seed();
  return c;
}

/// Independent restarts from uniform points in `bounds` (default [-pi, pi]).
/// Restarts run in index order; ties keep the lowest run index.
inline MultiStartResult multi_start(const OptimizerConfig& cfg, const Objective& obj, int runs, std::uint64_t seed,
                                    const Bounds* bounds = nullptr) {
  if (runs < 1) throw std::invalid_argument("multi_start needs runs >= 1");
  const Bounds b = bounds ? *bounds : Bounds::uniform(obj.arity, -std::numbers::pi, std::numbers::pi);
  b.validate(obj.arity);
  MultiStartResult out;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t s = run_seed(seed, r);
    RunRecord rec{r, s, minimize(obj, initial_point(s, b), run_config(cfg, s), &b)};
    if (r == 0 || rec.result.best_value < out.best.best_value) {
      out.best = rec.result;
      out.best_run = r;
    }
    out.runs.push_back(std::move(rec));
  }
  return out;
}

/// CSV trace: evaluation,value,params_hash.
inline void write_trace_csv(std::ostream& os, const OptimizationResult& r) {
  os << "evaluation,value,params_hash\n";
  for (const HistoryEntry& h : r.history) os << h.evaluation << ',' << format_double(h.value) << ',' << h.params_hash << '\n';
}

// ---------------------------------------------------------------------------
// Objective builders

/// <psi(p)|H|psi(p)> for a circuit on |initial> (|0..0> if null), with
/// adjoint gradients and per-slot shift constants.
inline Objective energy_objective(const ParametrizedCircuit& c, const PauliHamiltonian& h,
                                  const QubitState* initial = nullptr) {
  if (c.num_qubits() != h.num_qubits()) throw std::invalid_argument("circuit and Hamiltonian sizes differ");
  Objective o;
  o.arity = c.num_params();
  std::optional<QubitState> init;
  if (initial) init = *initial;
  o.evaluate = [c, h, init](std::span<const double> p) {
    return expectation(h, run_circuit(c, p, init ? &*init : nullptr));
  };
  o.value_and_gradient = [c, h, init](std::span<const double> p) {
    return adjoint_gradient(c, p, observable_of(h), init ? &*init : nullptr);
  };
  o.shift_r = c.shift_constants();
  o.circuits_per_evaluation = 1;
  return o;
}

}  // namespace varq

#endif  // VARQ_OPTIMIZE_HPP_
