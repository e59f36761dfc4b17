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

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "test_util.hpp"
#include "varq/exact.hpp"
#include "varq/grouping.hpp"
#include "varq/models.hpp"
#include "varq/pauli.hpp"

using namespace varq;
using varq::test::random_state;

namespace {

Eigen::MatrixXcd dense_sum(int n, const std::vector<std::pair<std::string, double>>& terms) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& [l, c] : terms) m += c * pauli_matrix(l);
  return m;
}

std::vector<double> eigenvalues_of(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Second-quantized Hubbard ring in the occupation basis. Configurations are
// per-colour site bitmasks (bit i = site i), fermion signs from the number
// of occupied sites below the acted-on site.
struct FermionOracle {
  int L, N;
  std::vector<std::vector<unsigned>> configs;  // per colour
  std::vector<std::vector<unsigned>> basis;

  explicit FermionOracle(const HubbardSpec& s) : L(s.L), N(s.N) {
    configs.resize(N);
    for (int c = 0; c < N; ++c)
      for (unsigned m = 0; m < (1u << L); ++m)
        if (std::popcount(m) == s.Ns[c]) configs[c].push_back(m);
    std::vector<unsigned> cur(N);
    build(0, cur);
  }

  void build(int c, std::vector<unsigned>& cur) {
    if (c == N) {
      basis.push_back(cur);
      return;
    }
    for (unsigned m : configs[c]) {
      cur[c] = m;
      build(c + 1, cur);
    }
  }

  Eigen::Index index_of(const std::vector<unsigned>& cfg) const {
    return std::find(basis.begin(), basis.end(), cfg) - basis.begin();
  }

  Eigen::MatrixXcd matrix(const HubbardSpec& s) const {
    const Eigen::Index d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    const double theta = 2 * std::numbers::pi * s.phi / L;
    for (Eigen::Index k = 0; k < d; ++k) {
      const auto& cfg = basis[k];
      double diag = 0;
      for (int i = 0; i < L; ++i) {
        for (int a = 0; a < N; ++a)
          for (int b = a + 1; b < N; ++b) diag += s.U * ((cfg[a] >> i) & 1) * ((cfg[b] >> i) & 1);
        for (std::size_t r = 1; r <= s.V.size(); ++r)
          for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) diag += s.V[r - 1] * ((cfg[a] >> i) & 1) * ((cfg[b] >> ((i + r) % L)) & 1);
      }
      h(k, k) += diag;
      // -t_r e^{i theta} c^dag_{i+r} c_i + h.c.
      for (int c = 0; c < N; ++c) {
        for (std::size_t r = 1; r <= s.t.size(); ++r) {
          for (int i = 0; i < L; ++i) {
            const int j = static_cast<int>((i + r) % L);
            for (int dir = 0; dir < 2; ++dir) {
              const int from = dir == 0 ? i : j, to = dir == 0 ? j : i;
              const cplx amp = -s.t[r - 1] * std::polar(1.0, dir == 0 ? theta : -theta);
              unsigned m = cfg[c];
              if (!((m >> from) & 1) || ((m >> to) & 1)) continue;
              int sign = std::popcount(m & ((1u << from) - 1)) & 1;
              m &= ~(1u << from);
              sign += std::popcount(m & ((1u << to) - 1)) & 1;
              m |= 1u << to;
              auto out = cfg;
              out[c] = m;
              h(index_of(out), k) += (sign & 1 ? -1.0 : 1.0) * amp;
            }
          }
        }
      }
    }
    return h;
  }
};

std::vector<double> qubit_sector_spectrum(const HubbardSpec& s) {
  return as_vector(exact_diagonalize_subspace(build_hubbard(s), hubbard_sector_basis(s)).eigenvalues);
}

}  // namespace

TEST(pauli, products_follow_pauli_algebra) {
  EXPECT_EQ(multiply_paulis(masks_from_labels("X"), masks_from_labels("Y")).first, cplx(0, 1));
  EXPECT_EQ(multiply_paulis(masks_from_labels("Y"), masks_from_labels("X")).first, cplx(0, -1));
  EXPECT_EQ(multiply_paulis(masks_from_labels("Z"), masks_from_labels("X")).first, cplx(0, 1));
  EXPECT_EQ(multiply_paulis(masks_from_labels("Y"), masks_from_labels("Y")).first, cplx(1, 0));
  // every two-qubit pair against the dense product
  const char* l = "IXYZ";
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      const std::string pa{l[a / 4], l[a % 4]}, pb{l[b / 4], l[b % 4]};
      const auto [ph, mc] = multiply_paulis(masks_from_labels(pa), masks_from_labels(pb));
      const Eigen::MatrixXcd want = pauli_matrix(pa) * pauli_matrix(pb);
      const Eigen::MatrixXcd got = ph * pauli_matrix(labels_from_masks(mc, 2));
      EXPECT_LT((want - got).cwiseAbs().maxCoeff(), 1e-15) << pa << "*" << pb;
      const bool commute = (want - pauli_matrix(pb) * pauli_matrix(pa)).cwiseAbs().maxCoeff() < 1e-12;
      EXPECT_EQ(paulis_commute(masks_from_labels(pa), masks_from_labels(pb)), commute);
    }
  }
}

TEST(pauli, ladder_operators) {
  PauliSum sp = PauliSum::sigma_plus(1, 0);
  PauliHamiltonian n = PauliHamiltonian::from_sum(sp.adjoint() * sp);  // |1><1|
  EXPECT_EQ(n.size(), 1u);
  EXPECT_DOUBLE_EQ(n.identity_offset(), 0.5);
  EXPECT_DOUBLE_EQ(n.terms()[0].coefficient, -0.5);
  EXPECT_THROW(PauliHamiltonian::from_sum(sp), std::invalid_argument);
}

TEST(pauli, canonical_form_merges_and_prunes) {
  PauliHamiltonian h(2, {{"ZI", 1.0}, {"XX", 0.5}, {"ZI", 1.0}, {"YY", 1e-15}, {"II", 3.0}});
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.terms()[0].labels, "XX");
  EXPECT_EQ(h.terms()[1].labels, "ZI");
  EXPECT_DOUBLE_EQ(h.terms()[1].coefficient, 2.0);
  EXPECT_DOUBLE_EQ(h.identity_offset(), 3.0);
  EXPECT_THROW(PauliHamiltonian(2, {{"X", 1.0}}), std::invalid_argument);
  EXPECT_THROW(PauliHamiltonian(2, {{"XA", 1.0}}), std::invalid_argument);
}

TEST(pauli, apply_matches_dense_matrix) {
  Rng rng(8);
  PauliHamiltonian h(3, {{"XYZ", 0.3}, {"YIY", -1.1}, {"ZZI", 0.7}, {"IXI", 0.2}}, 0.4);
  const Eigen::MatrixXcd m = dense_sum(3, {{"XYZ", 0.3}, {"YIY", -1.1}, {"ZZI", 0.7}, {"IXI", 0.2}, {"III", 0.4}});
  EXPECT_LT((to_matrix(h) - m).cwiseAbs().maxCoeff(), 1e-14);
  QubitState s = random_state(3, rng);
  const Eigen::VectorXcd v = to_eigen(s);
  EXPECT_NEAR(expectation(h, s), (v.adjoint() * m * v)(0, 0).real(), 1e-12);
}

TEST(pauli, text_round_trip) {
  PauliHamiltonian h(3, {{"XXI", 0.1}, {"ZIZ", -1.0 / 3.0}, {"IYY", 2.5}}, 0.7);
  std::stringstream ss;
  write_hamiltonian(ss, h);
  EXPECT_EQ(ss.str().substr(0, 20), "qubits=3 offset=0.7\n");
  PauliHamiltonian back = read_hamiltonian(ss);
  EXPECT_TRUE(back == h);
  std::stringstream bad("qubits=2 offset=0\n1.0 XX\n");
  EXPECT_THROW(read_hamiltonian(bad), std::invalid_argument);
}

TEST(models, ising_examples) {
  PauliHamiltonian h = build_ising(2, 0.5, true);
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h.terms()[0].labels, "IZ");
  EXPECT_DOUBLE_EQ(h.terms()[0].coefficient, -0.5);
  EXPECT_EQ(h.terms()[1].labels, "XX");
  EXPECT_DOUBLE_EQ(h.terms()[1].coefficient, -2.0);
  EXPECT_EQ(h.terms()[2].labels, "ZI");

  // n = 3 ring, h = 0: -(X0X1 + X1X2 + X2X0); dense oracle
  const double e = exact_diagonalize(build_ising(3, 0.0, true)).ground_energy();
  const double oracle = eigenvalues_of(dense_sum(3, {{"XXI", -1}, {"IXX", -1}, {"XIX", -1}}))[0];
  EXPECT_NEAR(e, oracle, 1e-12);
  EXPECT_NEAR(e, -3.0, 1e-12);

  EigenSolution big = exact_diagonalize(build_ising(2, 1e4, true), true);
  EXPECT_NEAR(std::norm(big.state(0)[0]), 1.0, 1e-6);
  EXPECT_NEAR(big.ground_energy() / 1e4, -2.0, 1e-6);
  EXPECT_THROW(build_ising(1, 0.5), std::invalid_argument);
}

TEST(models, xy_and_xxz) {
  EXPECT_TRUE(build_xy(4, 1.0, 0.7) == build_ising(4, 0.7));
  EXPECT_NEAR(exact_diagonalize(build_xy(2, 0.0, 0.0)).ground_energy(), -2.0, 1e-12);
  EXPECT_THROW(build_xy(3, 1.5, 0.0), std::invalid_argument);

  PauliHamiltonian xx = build_xxz(4, 0.0, 0.3);
  for (const PauliTerm& t : xx.terms()) EXPECT_EQ(t.labels.find('Z') != std::string::npos && std::count(t.labels.begin(), t.labels.end(), 'Z') == 2, false);

  const std::vector<std::pair<std::string, double>> two = {
      {"XX", -0.5}, {"YY", -0.5}, {"ZZ", -0.25}, {"ZI", -0.5}, {"IZ", -0.5}};
  EXPECT_LT(max_spectrum_deviation(as_vector(exact_diagonalize(build_xxz(2, 0.5, 0.5)).eigenvalues),
                                   eigenvalues_of(dense_sum(2, two))),
            1e-12);
  EXPECT_NEAR(exact_diagonalize(build_xxz(3, 1.0, 0.0)).ground_energy(), -0.75, 1e-12);
}

TEST(models, hubbard_term_count) {
  HubbardSpec s;
  s.L = 3;
  s.N = 3;
  s.t = {1.0};
  s.U = 2.0;
  s.V = {0.5};
  s.phi = 0.1;
  s.Ns = {1, 1, 1};
  EXPECT_EQ(static_cast<int>(build_hubbard(s).size()), hubbard_term_count_formula(3, 3));
  EXPECT_EQ(hubbard_term_count_formula(3, 3), 81);
  for (int N = 1; N <= 3; ++N) {
    for (int L = 3; L <= 4; ++L) {
      HubbardSpec q;
      q.L = L;
      q.N = N;
      q.U = 1.0;
      q.V = {0.7};
      q.phi = 0.3;
      q.Ns.assign(N, 1);
      EXPECT_EQ(static_cast<int>(build_hubbard(q).size()), hubbard_term_count_formula(N, L)) << N << " " << L;
    }
  }
}

TEST(models, hubbard_tight_binding_pair) {
  HubbardSpec s;
  s.L = 2;
  s.N = 1;
  s.Ns = {1};
  PauliHamiltonian h = build_hubbard(s);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.terms()[0].labels, "XX");
  EXPECT_DOUBLE_EQ(h.terms()[0].coefficient, -1.0);
  EXPECT_EQ(h.terms()[1].labels, "YY");
  EXPECT_DOUBLE_EQ(h.terms()[1].coefficient, -1.0);
}

TEST(models, hubbard_matches_fermion_oracle) {
  struct Case {
    int L, N;
    std::vector<int> Ns;
    std::vector<double> t, V;
    double U, phi;
  };
  const std::vector<Case> cases = {
      {3, 2, {1, 1}, {1.0}, {}, 5.0, 0.25},   {3, 2, {2, 1}, {1.0}, {}, 5.0, 0.25},
      {3, 2, {2, 2}, {1.0}, {0.5}, 1.0, 0.1}, {4, 1, {2}, {1.0, 0.4}, {0.3, 0.2}, 0.0, 0.3},
      {4, 1, {3}, {1.0, 0.4}, {}, 0.0, 0.17}, {4, 2, {2, 1}, {1.0, 0.6}, {0.5, 0.1}, 2.0, 0.4},
      {5, 1, {2}, {1.0, 0.5}, {}, 0.0, 0.2},  {3, 3, {1, 1, 1}, {1.0}, {5.0}, 1.0, 0.5},
  };
  for (const Case& c : cases) {
    HubbardSpec s;
    s.L = c.L;
    s.N = c.N;
    s.Ns = c.Ns;
    s.t = c.t;
    s.V = c.V;
    s.U = c.U;
    s.phi = c.phi;
    FermionOracle f(s);
    const std::vector<double> want = eigenvalues_of(f.matrix(s));
    EXPECT_LT(max_spectrum_deviation(qubit_sector_spectrum(s), want), 1e-9) << "L=" << c.L << " N=" << c.N;
  }
}

TEST(models, hubbard_literal_parity_differs_for_even_fillings) {
  HubbardSpec s;
  s.L = 4;
  s.N = 1;
  s.Ns = {2};
  s.phi = 0.1;
  const std::vector<double> want = eigenvalues_of(FermionOracle(s).matrix(s));
  s.parity = BoundaryParity::kOddMinus;
  EXPECT_GT(max_spectrum_deviation(qubit_sector_spectrum(s), want), 1e-3);
}

TEST(models, hubbard_conserves_colour_numbers) {
  HubbardSpec s;
  s.L = 3;
  s.N = 3;
  s.U = 1.0;
  s.V = {0.5};
  s.phi = 0.2;
  s.Ns = {1, 2, 1};
  const Eigen::MatrixXcd h = to_matrix(build_hubbard(s));
  for (int c = 0; c < 3; ++c) {
    const Eigen::MatrixXcd n = to_matrix(colour_number_operator(s, c));
    EXPECT_LT((h * n - n * h).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(models, hubbard_flux_periodicity_and_validation) {
  HubbardSpec s;
  s.L = 3;
  s.N = 2;
  s.U = 2.0;
  s.Ns = {1, 1};
  s.phi = 0.3;
  const std::vector<double> a = as_vector(exact_diagonalize(build_hubbard(s)).eigenvalues);
  s.phi += s.L;
  const std::vector<double> b = as_vector(exact_diagonalize(build_hubbard(s)).eigenvalues);
  EXPECT_LT(max_spectrum_deviation(a, b), 1e-9);

  HubbardSpec bad = s;
  bad.t = {1.0, 0.5};
  EXPECT_THROW(build_hubbard(bad), std::invalid_argument);
  bad = s;
  bad.Ns = {4, 0};
  EXPECT_THROW(build_hubbard(bad), std::invalid_argument);
  bad = s;
  bad.U = -1;
  EXPECT_THROW(build_hubbard(bad), std::invalid_argument);
}

TEST(models, flux_derivative_matches_finite_difference) {
  HubbardSpec s;
  s.L = 3;
  s.N = 2;
  s.U = 1.0;
  s.Ns = {1, 1};
  s.phi = 0.21;
  const double d = 1e-5;
  HubbardSpec p = s, m = s;
  p.phi += d;
  m.phi -= d;
  const Eigen::MatrixXcd fd = (to_matrix(build_hubbard(p)) - to_matrix(build_hubbard(m))) / (2 * d);
  EXPECT_LT((fd - to_matrix(build_hubbard_flux_derivative(s))).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(exact, small_spectra) {
  const double h = 0.7;
  const EigenSolution z = exact_diagonalize(PauliHamiltonian(1, {{"Z", -h}}));
  EXPECT_NEAR(z.eigenvalues[0], -h, 1e-15);
  EXPECT_NEAR(z.eigenvalues[1], h, 1e-15);
  const EigenSolution xx = exact_diagonalize(PauliHamiltonian(2, {{"XX", -2.0}}));
  const std::vector<double> want = {-2, -2, 2, 2};
  EXPECT_LT(max_spectrum_deviation(as_vector(xx.eigenvalues), want), 1e-14);
}

TEST(exact, eigenpair_residuals) {
  HubbardSpec s;
  s.L = 3;
  s.N = 2;
  s.U = 3.0;
  s.phi = 0.25;
  s.Ns = {1, 2};
  const PauliHamiltonian h = build_hubbard(s);
  const EigenSolution es = exact_diagonalize(h, true);
  const Eigen::MatrixXcd m = to_matrix(h);
  for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k)
    EXPECT_LT((m * es.eigenvectors.col(k) - es.eigenvalues[k] * es.eigenvectors.col(k)).norm(), 1e-8);
  EXPECT_TRUE(std::is_sorted(es.eigenvalues.data(), es.eigenvalues.data() + es.eigenvalues.size()));
}

TEST(exact, gibbs_limits) {
  const GibbsState g0 = exact_gibbs(build_ising(3, 0.5), 0.0);
  for (double p : g0.probabilities) EXPECT_NEAR(p, 1.0 / 8, 1e-15);
  EXPECT_LT((g0.rho.entries - Eigen::MatrixXcd::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff(), 1e-14);

  // two-level closed form against a truncated-series matrix exponential
  const double h = 0.8, beta = 1.3;
  const GibbsState g = exact_gibbs(PauliHamiltonian(1, {{"Z", -h}}), beta);
  Eigen::Matrix2cd a;
  a << beta * h, 0, 0, -beta * h;  // -beta H
  Eigen::Matrix2cd e = Eigen::Matrix2cd::Identity(), term = Eigen::Matrix2cd::Identity();
  for (int k = 1; k < 60; ++k) {
    term = term * a / static_cast<double>(k);
    e += term;
  }
  const double p0 = (e(0, 0) / e.trace()).real();
  EXPECT_NEAR(g.rho.entries(0, 0).real(), p0, 1e-12);
  EXPECT_NEAR(p0, std::exp(beta * h) / (2 * std::cosh(beta * h)), 1e-12);
  EXPECT_NEAR(g.free_energy(), -std::log(2 * std::cosh(beta * h)) / beta, 1e-12);

  // n = 2 periodic doubles the bond; h = 1 keeps the gap at 2(sqrt2 - 1)
  const PauliHamiltonian is2 = build_ising(2, 1.0);
  const GibbsState cold = exact_gibbs(is2, 50.0);
  const DensityMatrix ground = pure_density(exact_diagonalize(is2, true).state(0));
  EXPECT_GT(uhlmann_fidelity(cold.rho, ground), 1 - 1e-8);
  EXPECT_THROW(exact_gibbs(is2, -1.0), std::invalid_argument);
}

TEST(grouping, paper_group_counts) {
  EXPECT_EQ(group_commuting(build_ising(4, 0.5)).size(), 2u);
  EXPECT_EQ(group_commuting(build_xxz(4, 0.5, 0.5)).size(), 3u);
  const auto z = group_commuting(PauliHamiltonian(3, {{"ZZI", 1.0}, {"IZZ", 0.5}, {"ZII", 0.2}}));
  ASSERT_EQ(z.size(), 1u);
  EXPECT_TRUE(z[0].basis_change.empty());
}

TEST(grouping, hopping_blocks) {
  HubbardSpec s;
  s.L = 3;
  s.N = 3;
  s.U = 1.0;
  s.V = {0.5};
  s.phi = 0.3;
  s.Ns = {1, 1, 1};
  const PauliHamiltonian h = build_hubbard(s);
  const auto groups = group_commuting(h, GroupingStrategy::kHoppingBlocks);
  EXPECT_EQ(groups.size(), 4u);
  std::vector<std::size_t> all;
  for (const auto& g : groups) all.insert(all.end(), g.term_indices.begin(), g.term_indices.end());
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), h.size());
  for (std::size_t k = 0; k < all.size(); ++k) EXPECT_EQ(all[k], k);
}

TEST(grouping, grouped_expectation_is_sound) {
  Rng rng(17);
  HubbardSpec s;
  s.L = 4;
  s.N = 2;
  s.t = {1.0, 0.3};
  s.U = 1.0;
  s.V = {0.5};
  s.phi = 0.37;
  s.Ns = {2, 1};
  const std::vector<PauliHamiltonian> hs = {build_ising(4, 0.5), build_xxz(4, 0.3, 0.5), build_xy(5, 0.4, 1.1),
                                            build_hubbard(s), build_hubbard_flux_derivative(s)};
  for (const PauliHamiltonian& h : hs) {
    for (auto strat : {GroupingStrategy::kQubitwise, GroupingStrategy::kHoppingBlocks}) {
      const auto groups = group_commuting(h, strat);
      // hopping blocks only commute as whole XX+YY / XY-YX sums
      for (const auto& g : groups)
        for (std::size_t i = 0; strat == GroupingStrategy::kQubitwise && i < g.term_indices.size(); ++i)
          for (std::size_t j = 0; j < i; ++j)
            EXPECT_TRUE(paulis_commute(h.terms()[g.term_indices[i]].masks, h.terms()[g.term_indices[j]].masks));
      for (int k = 0; k < 3; ++k) {
        QubitState st = random_state(h.num_qubits(), rng);
        EXPECT_NEAR(grouped_expectation(h, groups, st), expectation(h, st), 1e-10);
      }
    }
  }
}

TEST(grouping, shot_estimate_within_four_sigma) {
  Rng rng(2);
  const PauliHamiltonian h = build_xxz(3, 0.5, 0.5);
  const auto groups = group_commuting(h);
  const QubitState st = random_state(3, rng);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ShotEstimate e = grouped_expectation_shots(h, groups, st, 4096, seed);
    EXPECT_LT(std::abs(e.value - expectation(h, st)), 4 * e.sigma_bound);
  }
}
