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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--strict] [criterion ...]
//
// Without --strict the exit status is 0 whenever every selected criterion
// was evaluated; with it, any FAIL exits 1. An exception exits 2.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "varq/varq.hpp"

namespace varq {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void criterion_1(Outcome& o) {
  const double targets[] = {1.0 / 3.0, 6.0 / 13.0, 14.0 / 28.5};
  for (int n = 2; n <= 4; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    VsvOptions opt = vsv_default_options();
    opt.seed = static_cast<std::uint64_t>(n);
    const VsvResult r = vsv_minimize(pure_density(ghz_state(n)), opt);
    const double dt = seconds_since(t0);
    const double target = targets[n - 2];
    const double err = std::abs(r.hse - target);
    o.detail << " n=" << n << " s=" << r.ensemble.s << " hse=" << fmt(r.hse, 8) << " |err|=" << fmt(err, 3) << " t="
             << fmt(dt, 3) << "s;";
    o.check(std::abs(ghz_hse_analytic(n) - target) < 1e-15, "analytic formula n=" + std::to_string(n));
    o.check(err <= 1e-3, "n=" + std::to_string(n) + " HSE off by " + fmt(err, 3));
    o.check(dt < 300.0, "n=" + std::to_string(n) + " runtime");
  }
}

void criterion_2(Outcome& o) {
  double worst = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double g = 0.05 * k;
    VsvOptions opt = vsv_default_options();
    opt.runs = 2;
    opt.seed = 100 + static_cast<std::uint64_t>(k);
    const VsvResult r = vsv_minimize(xmems_state({2, g}), opt);
    worst = std::max(worst, std::abs(r.hse - xmems_css_2qubit(g).hse));
  }
  const double g = 1.0 / 3.0;
  const double jump = std::abs(xmems_css_2qubit(g, XMemsBranch::kLow).hse - xmems_css_2qubit(g, XMemsBranch::kHigh).hse);
  o.detail << " max|hse-closed form|=" << fmt(worst, 3) << " branch jump at 1/3=" << fmt(jump, 3);
  o.check(worst <= 1e-4, "curve");
  o.check(jump <= 1e-12, "branch continuity");
}

struct HubbardCase {
  double U, V;
};

const HubbardCase kHubbardCases[] = {{0.1, 0.0}, {5.0, 0.0}, {1.0, 5.0}};

HubbardSpec su3_ring(double U, double V) {
  HubbardSpec s;
  s.L = 3;
  s.N = 3;
  s.Ns = {1, 1, 1};
  s.U = U;
  s.V = {V};
  return s;
}

// Sweeps are shared by criteria 3 and 4.
const std::vector<FluxSweepResult>& hubbard_sweeps() {
  static const std::vector<FluxSweepResult> sweeps = [] {
    std::vector<FluxSweepResult> out;
    for (const HubbardCase& c : kHubbardCases) {
      VqeProblem p;
      p.spec = su3_ring(c.U, c.V);
      p.ansatz_layers = 5;
      p.runs = 20;
      p.seed = 2026;
      out.push_back(flux_sweep(p, default_phi_grid(21)));
    }
    return out;
  }();
  return sweeps;
}

void criterion_3(Outcome& o) {
  const auto& sweeps = hubbard_sweeps();
  for (std::size_t c = 0; c < sweeps.size(); ++c) {
    const FluxSweepResult& s = sweeps[c];
    double worst = 0.0;
    for (std::size_t k : {std::size_t{0}, std::size_t{5}, std::size_t{10}}) {
      const double rel = std::abs(s.energies[k] - s.exact_energies[k]) / std::abs(s.exact_energies[k]);
      worst = std::max(worst, rel);
    }
    std::vector<double> iv, ie;
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
      if (s.exact_gaps[k] < 1e-6) continue;
      iv.push_back(s.currents[k]);
      ie.push_back(s.exact_currents[k]);
    }
    const int sv = count_sign_changes(iv, 1e-3), se = count_sign_changes(ie, 1e-3);
    o.detail << " (U,V)=(" << kHubbardCases[c].U << "," << kHubbardCases[c].V << ") rel=" << fmt(worst, 3)
             << " sign changes vqe/exact=" << sv << "/" << se << ";";
    o.check(worst <= 1e-3, "energy");
    o.check(sv == se, "sign changes");
  }
}

void criterion_4(Outcome& o) {
  const auto& sweeps = hubbard_sweeps();
  const double d = 1e-4;
  double worst = 0.0;
  int points = 0;
  for (std::size_t c = 0; c < sweeps.size(); ++c) {
    const FluxSweepResult& s = sweeps[c];
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
      if (s.exact_gaps[k] < 1e-6) continue;
      HubbardSpec sp = su3_ring(kHubbardCases[c].U, kHubbardCases[c].V);
      sp.phi = s.phi[k] + d;
      const double ep = exact_sector_ground(sp).energy;
      sp.phi = s.phi[k] - d;
      const double em = exact_sector_ground(sp).energy;
      worst = std::max(worst, std::abs(s.currents[k] + (ep - em) / (2 * d)));
      ++points;
    }
  }
  o.detail << " points=" << points << " max|I+dE/dphi| (step 1e-4)=" << fmt(worst, 3);
  o.check(worst < 1e-3, "current vs derivative");
}

double gibbs_fidelity(SpinModel m, int n, double h, double aniso, double beta, int runs, std::uint64_t seed) {
  SpinChain c;
  c.model = m;
  c.n = n;
  c.h = h;
  c.gamma = aniso;
  c.delta = aniso;
  return run_gibbs(make_gibbs_problem(c, beta, {}, runs, seed)).fidelity_vs_exact;
}

void criterion_5(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_mid = 1.0, worst_edge = 1.0;
  std::uint64_t seed = 500;
  for (int n : {2, 3, 4}) {
    for (double h : {0.5, 1.0, 1.5}) {
      for (double beta : {0.0, 0.2, 1.0, 2.0, 5.0, 50.0}) {
        const double f = gibbs_fidelity(SpinModel::kIsing, n, h, 0.0, beta, 100, seed++);
        const bool edge = beta == 0.0 || beta == 50.0;
        (edge ? worst_edge : worst_mid) = std::min(edge ? worst_edge : worst_mid, f);
        if (f < (edge ? 1.0 - 1e-4 : 0.98))
          o.detail << " low: n=" << n << " h=" << h << " beta=" << beta << " F=" << fmt(f, 8) << ";";
      }
    }
  }
  const double dt = seconds_since(t0);
  o.detail << " min F (beta 0.2..5)=" << fmt(worst_mid, 8) << " min F (beta 0, 50)=" << fmt(worst_edge, 10)
           << " t=" << fmt(dt, 4) << "s";
  o.check(worst_mid >= 0.98, "fidelity >= 0.98");
  o.check(worst_edge >= 1.0 - 1e-4, "fidelity 1 at the extremes");
  o.check(dt < 1800.0, "runtime");
}

void criterion_6(Outcome& o) {
  double worst = 1.0;
  std::uint64_t seed = 600;
  for (double delta : {-0.5, 0.0, 0.5})
    for (double beta : {0.5, 2.0}) {
      const double f = gibbs_fidelity(SpinModel::kXxz, 3, 0.5, delta, beta, 100, seed++);
      worst = std::min(worst, f);
      o.detail << " (D=" << delta << ",b=" << beta << ") F=" << fmt(f, 6) << ";";
    }
  o.check(worst >= 0.98, "fidelity");
}

void criterion_7(Outcome& o) {
  double worst_ed = 0.0, worst_list = 0.0;
  for (int n : {4, 6, 8})
    for (double gamma : {0.0, 0.5, 1.0})
      for (double h : {0.5, 1.5}) {
        const XySpectrum s = xy_spectrum_exact(n, gamma, h);
        const EigenSolution es = exact_diagonalize(build_xy(n, gamma, h));
        const std::vector<double> ed(es.eigenvalues.data(), es.eigenvalues.data() + es.eigenvalues.size());
        worst_ed = std::max(worst_ed, max_spectrum_deviation(s.energies(), ed));
        if (n != 4) continue;
        // Listed n = 4 energies, at the Hamiltonian's scale (twice the list).
        const double a = std::sqrt(gamma * gamma + 2 * h * (h - std::sqrt(2.0)) + 1);
        const double b = std::sqrt(gamma * gamma + 2 * h * (h + std::sqrt(2.0)) + 1);
        const double c = std::sqrt(gamma * gamma + h * h);
        std::vector<double> listed = {(-a - b) / std::sqrt(2.0), (a - b) / std::sqrt(2.0), 0, 0, 0, 0,
                                      (-a + b) / std::sqrt(2.0), (a + b) / std::sqrt(2.0), -1 - c, 1 - c, -h, -h, h, h,
                                      -1 + c, 1 + c};
        for (double& e : listed) e *= 2.0;
        worst_list = std::max(worst_list, max_spectrum_deviation(s.energies(), listed));
      }
  o.detail << " max dev vs dense ED=" << fmt(worst_ed, 3) << " max dev vs n=4 list=" << fmt(worst_list, 3);
  o.check(worst_ed <= 1e-9, "dense ED");
  o.check(worst_list <= 1e-9, "n=4 list");
}

void criterion_8(Outcome& o) {
  Rng rng(8);
  double worst_rt = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 6;
    std::vector<double> p(std::size_t{1} << n);
    for (double& v : p) v = -std::log(1.0 - rng.uniform());
    const double z = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= z;
    const QubitState out = run_circuit(build_grover_rudolph(n), compute_gr_angles(p));
    worst_rt = std::max(worst_rt, total_variation(out.probabilities(), p));
  }
  double worst_fit = 0.0;
  for (double beta : {0.5, 1.0, 2.0}) {
    const std::vector<double> target = boltzmann(gr_xy_labelled_energies(0.5, 0.5), beta);
    const ParametrizedCircuit c = build_gr_xy_reduced(0.5, 0.5, beta);
    o.check(c.num_params() == 7, "7 free slots");
    worst_fit = std::max(worst_fit, fit_distribution(c, target, 50, 80).total_variation);
  }
  o.detail << " round-trip max TV=" << fmt(worst_rt, 3) << " reduced loader max TV=" << fmt(worst_fit, 3);
  o.check(worst_rt < 1e-12, "round trip");
  o.check(worst_fit < 1e-3, "reduced loader");
}

void criterion_9(Outcome& o) {
  const std::uint64_t m = 1024;
  const double bound = std::log(1024.0) * std::log(1024.0) / 1024.0;
  std::uint64_t seed = 9000;
  auto resample = [&](const std::vector<double>& d, std::vector<EntropyEstimate>& out) {
    const int n = std::countr_zero(d.size());
    out.clear();
    for (int r = 0; r < 100; ++r) out.push_back(entropy_ml(sample_probabilities(d, n, m, seed++)));
  };
  auto variance = [](const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / (v.size() - 1);
  };
  std::vector<EntropyEstimate> est;
  double worst_var = 0.0;
  for (double beta : {0.5, 1.0}) {
    const GibbsState g = exact_gibbs(build_ising(3, 0.5), beta);
    resample(g.probabilities, est);
    std::vector<double> s;
    for (const EntropyEstimate& e : est) s.push_back(e.entropy);
    const double bias = std::accumulate(s.begin(), s.end(), 0.0) / s.size() - g.entropy();
    worst_var = std::max(worst_var, variance(s));
    o.detail << " beta=" << beta << " bias=" << fmt(bias, 3) << ";";
    o.check(bias < 0.0, "negative bias at beta=" + fmt(beta));
  }
  const std::vector<double> uniform(16, 1.0 / 16);
  resample(uniform, est);
  std::vector<double> s;
  double raw = 0.0, mm = 0.0;
  for (const EntropyEstimate& e : est) {
    s.push_back(e.entropy);
    raw += (e.entropy - std::log(16.0)) / est.size();
    mm += (miller_madow(e.entropy, e.occupied_bins, e.shots) - std::log(16.0)) / est.size();
  }
  worst_var = std::max(worst_var, variance(s));
  o.detail << " uniform-16 |bias| ML=" << fmt(std::abs(raw), 3) << " MM=" << fmt(std::abs(mm), 3)
           << " max var=" << fmt(worst_var, 3) << " bound=" << fmt(bound, 3);
  o.check(worst_var <= bound, "variance bound");
  o.check(std::abs(mm) < std::abs(raw), "Miller-Madow");
}

void criterion_10(Outcome& o) {
  Rng rng(10);
  const std::uint64_t shots = 1000;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int n = 1 + k % 3;
    auto random_state = [&](int q) {
      CVector v(std::size_t{1} << q);
      for (cplx& a : v) a = cplx(rng.normal(), rng.normal());
      return QubitState::normalized(std::move(v));
    };
    const QubitState a = random_state(n), b = random_state(n);
    const double ov = std::norm(inner_product(a, b));
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) mean += destructive_swap_overlap(a, b, shots, seed) / 200.0;
    const double var = 1.0 - ov * ov;
    o.check(var <= 1.0, "variance <= 1");
    worst = std::max(worst, std::abs(mean - ov) / std::sqrt(var / shots));
  }
  o.detail << " max |mean-overlap|/sigma=" << fmt(worst, 3);
  o.check(worst <= 3.0, "3 sigma");
}

void criterion_11(Outcome& o) {
  int checks = 0;
  auto eq = [&](long got, long want, const std::string& what) {
    ++checks;
    o.check(got == want, what + " " + std::to_string(got) + "!=" + std::to_string(want));
  };
  for (int N = 1; N <= 3; ++N)
    for (int L = 2; L <= 4; ++L) {
      HubbardSpec q;
      q.L = L;
      q.N = N;
      q.Ns.assign(N, 1);
      const ParametrizedCircuit one = build_hva_hubbard(q, 1), two = build_hva_hubbard(q, 2);
      eq(two.num_params() - one.num_params(), 3 * N * L - N - L, "HVA params");
      eq(two.cnot_count() - one.cnot_count(), 5 * N * L - 3 * N - 2 * L, "HVA CNOTs");
      if (L >= 3) {
        q.U = 1.0;
        q.V = {0.7};
        q.phi = 0.3;
        eq(static_cast<long>(build_hubbard(q).size()), 3 * N * L * (N + 3) / 2, "Hubbard terms");
      }
    }
  {
    HubbardSpec s = su3_ring(1.0, 0.0);
    eq(build_hva_hubbard(s, 1).num_params(), 24, "HVA L=N=3 one layer");
  }
  for (int n = 1; n <= 8; ++n) eq(build_grover_rudolph(n).parametrised_gate_count(), (1L << n) - 1, "GR gates");

  SpinChain chain;
  for (int n = 3; n <= 6; ++n) {
    chain.n = n;
    for (int la = 1; la <= 3; ++la)
      for (int ls = 1; ls <= 3; ++ls) {
        GibbsProblem p = make_gibbs_problem(chain, 1.0);
        p.ancilla = build_hw_efficient_ry(n, la);
        p.system = build_parity_brickwall(n, ls);
        eq(p.num_params(), n * (la + 1) + 2 * n * ls, "Ising params");
        eq(detail::GibbsEngine(p).full.cnot_count(), (n - 1) * la + 2 * n * ls + n, "Ising CNOTs");
        p.ancilla = build_hw_efficient_ry(n, la, EntanglerTopology::kRing);
        eq(detail::GibbsEngine(p).full.cnot_count(), n * la + 2 * n * ls + n, "XXZ CNOTs");
      }
    chain.model = SpinModel::kIsing;
    const GibbsProblem is = make_gibbs_problem(chain, 1.0);
    eq(is.num_params(), 2 * n * n, "Ising default params");
    eq(detail::GibbsEngine(is).full.cnot_count(), 2 * n * n - 1, "Ising default CNOTs");
    chain.model = SpinModel::kXy;
    const GibbsProblem xy = make_gibbs_problem(chain, 1.0);
    eq(xy.num_params(), n * (3 * n - 2), "XY default params");
    eq(detail::GibbsEngine(xy).full.cnot_count(), 3 * n * n - 2 * n, "XY default CNOTs");
    chain.model = SpinModel::kIsing;
  }
  o.detail << " " << checks << " equalities";
}

void criterion_12(Outcome& o) {
  const GibbsState g = exact_gibbs(build_ising(2, 0.5), 1.0);
  const DistributionFit product = fit_distribution(build_product_ry(2), g.probabilities, 50, 12);
  const DistributionFit entangled = fit_distribution(build_hw_efficient_ry(2, 1), g.probabilities, 50, 12);
  const ProductConstraintReport rep = product_ansatz_constraint(g.probabilities);
  o.detail << " product TV=" << fmt(product.total_variation, 3) << " one-layer TV=" << fmt(entangled.total_variation, 3)
           << " product-constraint violation=" << fmt(rep.min_assignment_violation, 3)
           << " (spectrum {-a,-b,b,a}: E0+E3-E1-E2="
           << fmt(g.energies[0] + g.energies[3] - g.energies[1] - g.energies[2], 3) << ")";
  o.check(product.total_variation > 1e-3, "product ansatz bounded away from target");
  o.check(entangled.total_variation < 1e-6, "one entangling layer reaches target");
}

void criterion_13(Outcome& o) {
  const DensityMatrix rho = pure_density(ghz_state(2));
  const QgaResult r = qga_run(rho, QubitState::zero(2), 100000, 7);
  bool monotone = true;
  for (std::size_t i = 1; i < r.hsd_history.size(); ++i) monotone = monotone && r.hsd_history[i] < r.hsd_history[i - 1];
  const QgaResult again = qga_run(rho, QubitState::zero(2), 100000, 7);
  o.detail << " hsd=" << fmt(r.hsd(), 6) << " updates=" << r.hsd_history.size() - 1 << " trials=" << r.stats.trials;
  o.check(monotone, "monotone history");
  o.check(std::abs(r.hsd() - 1.0 / 3.0) <= 5e-2, "GHZ2 HSD");
  o.check(again.hsd_history == r.hsd_history, "seeded determinism");
}

}  // namespace
}  // namespace varq

int main(int argc, char** argv) {
  using namespace varq;
  const std::vector<std::function<void(Outcome&)>> criteria = {
      criterion_1, criterion_2, criterion_3,  criterion_4,  criterion_5,  criterion_6, criterion_7,
      criterion_8, criterion_9, criterion_10, criterion_11, criterion_12, criterion_13};
  bool strict = false;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--strict") {
      strict = true;
    } else {
      const int k = std::atoi(a.c_str());
      if (k < 1 || k > static_cast<int>(criteria.size())) {
        std::cerr << "unknown criterion '" << a << "'\n";
        return 2;
      }
      selected.insert(k);
    }
  }
  int failed = 0;
  bool errored = false;
  for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) {
    if (!selected.empty() && !selected.count(k)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k - 1](o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [error: " << e.what() << "]";
      errored = true;
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << " (" << fmt(seconds_since(t0), 3) << " s)"
              << o.detail.str() << std::endl;
  }
  std::cout << "summary: " << failed << " failed" << std::endl;
  if (errored) return 2;
  return strict && failed > 0 ? 1 : 0;
}
