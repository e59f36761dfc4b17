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

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "varq/pauli.hpp"
#include "varq/statevector.hpp"

using namespace varq;
using varq::test::bell;
using varq::test::ghz;
using varq::test::random_state;

TEST(statevector, hadamard_and_x) {
  const double s = 1 / std::sqrt(2.0);
  QubitState h = apply_gate(QubitState::zero(1), gates::H(0));
  EXPECT_NEAR(std::abs(h[0] - s), 0, 1e-15);
  EXPECT_NEAR(std::abs(h[1] - s), 0, 1e-15);
  QubitState x = apply_gate(QubitState::zero(1), gates::X(0));
  EXPECT_EQ(x[0], cplx(0));
  EXPECT_EQ(x[1], cplx(1));
}

TEST(statevector, cnot_makes_bell) {
  const double s = 1 / std::sqrt(2.0);
  QubitState in = QubitState::from_amplitudes({s, 0, s, 0});
  QubitState out = apply_gate(in, gates::CNOT(0, 1));
  EXPECT_NEAR(test::max_abs_diff(out, bell()), 0, 1e-15);
}

TEST(statevector, qubit_zero_is_most_significant) {
  QubitState s = apply_gate(QubitState::zero(3), gates::X(0));
  EXPECT_EQ(s[4], cplx(1));
  EXPECT_EQ(bitstring(4, 3), "100");
}

TEST(statevector, invalid_inputs) {
  EXPECT_THROW(QubitState::from_amplitudes({1, 1}), std::invalid_argument);
  EXPECT_THROW(QubitState::from_amplitudes({1, 0, 0}), std::invalid_argument);
  EXPECT_THROW(make_gate("bad", {0}, {1, 1, 0, 1}), std::invalid_argument);
  EXPECT_THROW(make_gate("dup", {1, 1}, gates::CZ(0, 1).matrix), std::invalid_argument);
  QubitState s = QubitState::zero(2);
  EXPECT_THROW(apply_gate(s, gates::X(2)), std::out_of_range);
  EXPECT_THROW(expectation_pauli(s, "XQ"), std::invalid_argument);
  EXPECT_THROW(expectation_pauli(s, "X"), std::invalid_argument);
  EXPECT_THROW(sample_counts(s, 0, 1), std::invalid_argument);
}

TEST(statevector, kernels_match_dense_embedding) {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4;
    QubitState s = random_state(n, rng);
    const int a = static_cast<int>(rng.next() % n);
    int b = static_cast<int>(rng.next() % n);
    if (b == a) b = (a + 1) % n;
    const GateOp g = (trial % 2) ? gates::RY(a, rng.uniform(-3, 3)) : gates::CNOT(a, b);
    GateOp h = make_gate("hop", {a, b},
                         {1, 0, 0, 0, 0, 0.6, cplx(0, -0.8), 0, 0, cplx(0, -0.8), 0.6, 0, 0, 0, 0, 1});
    for (const GateOp& gate : {g, h}) {
      const Eigen::VectorXcd expect = test::embed_gate(gate, n) * to_eigen(s);
      const QubitState got = apply_gate(s, gate);
      for (std::size_t i = 0; i < s.dim(); ++i) EXPECT_NEAR(std::abs(got[i] - expect[i]), 0, 1e-12);
    }
  }
}

TEST(statevector, expectation_examples) {
  EXPECT_DOUBLE_EQ(expectation_pauli(QubitState::zero(1), "Z"), 1.0);
  EXPECT_NEAR(expectation_pauli(apply_gate(QubitState::zero(1), gates::H(0)), "X"), 1.0, 1e-15);
  const Eigen::VectorXcd g3 = to_eigen(ghz(3));
  const double oracle = (g3.adjoint() * pauli_matrix("XXX") * g3)(0, 0).real();
  EXPECT_NEAR(expectation_pauli(ghz(3), "XXX"), oracle, 1e-12);
  EXPECT_NEAR(oracle, 1.0, 1e-12);
}

TEST(statevector, expectation_matches_dense_oracle_all_strings) {
  Rng rng(5);
  for (int n = 1; n <= 4; ++n) {
    QubitState s = random_state(n, rng);
    const Eigen::VectorXcd v = to_eigen(s);
    int count = 1;
    for (int k = 0; k < n; ++k) count *= 4;
    for (int code = 0; code < count; ++code) {
      std::string l(n, 'I');
      int c = code;
      for (int q = 0; q < n; ++q, c /= 4) l[q] = "IXYZ"[c % 4];
      const double oracle = (v.adjoint() * pauli_matrix(l) * v)(0, 0).real();
      EXPECT_NEAR(expectation_pauli(s, l), oracle, 1e-10) << l;
      EXPECT_NEAR(expectation_masks(masks_from_labels(l), s.amplitudes()).real(), oracle, 1e-10) << l;
    }
  }
}

TEST(statevector, norm_preserved_by_random_circuits) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 8);
    QubitState s = QubitState::zero(n);
    for (int k = 0; k < 100; ++k) {
      const int a = static_cast<int>(rng.next() % n);
      if (n > 1 && rng.uniform() < 0.4) {
        const int b = (a + 1 + static_cast<int>(rng.next() % (n - 1))) % n;
        apply_gate_inplace(s, gates::CNOT(a, b));
      } else {
        apply_gate_inplace(s, (k % 3 == 0) ? gates::RX(a, rng.uniform(-4, 4)) : gates::RZ(a, rng.uniform(-4, 4)));
        apply_gate_inplace(s, gates::H(a));
      }
    }
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-9);
  }
}

TEST(statevector, gate_then_adjoint_is_identity) {
  Rng rng(9);
  QubitState s = random_state(4, rng);
  for (const GateOp& g : {gates::RX(1, 0.3), gates::CNOT(3, 0), gates::S(2), gates::SWAP(0, 2)}) {
    QubitState back = apply_gate(apply_gate(s, g), g.adjoint());
    EXPECT_LT(test::max_abs_diff(back, s), 1e-10);
  }
}

TEST(statevector, sampling) {
  ShotCounts z = sample_counts(QubitState::zero(1), 100, 7);
  EXPECT_EQ(z.count("0"), 100u);
  EXPECT_EQ(z.by_bitstring().size(), 1u);

  const std::uint64_t shots = 100000;
  ShotCounts b = sample_counts(bell(), shots, 123);
  const double f = static_cast<double>(b.count("00")) / shots;
  EXPECT_NEAR(f, 0.5, 3 * 0.5 / std::sqrt(static_cast<double>(shots)));
  EXPECT_EQ(b.count("01") + b.count("10"), 0u);

  ShotCounts b2 = sample_counts(bell(), shots, 123);
  EXPECT_EQ(b.counts, b2.counts);
}

TEST(statevector, sampling_frequencies_within_five_sigma) {
  Rng rng(21);
  const std::uint64_t shots = 1000000;
  for (int n = 1; n <= 4; ++n) {
    QubitState s = random_state(n, rng);
    ShotCounts c = sample_counts(s, shots, 1000 + n);
    std::uint64_t total = 0;
    for (const auto& [k, v] : c.counts) total += v;
    EXPECT_EQ(total, shots);
    for (std::size_t i = 0; i < s.dim(); ++i) {
      const double p = std::norm(s[i]);
      const auto it = c.counts.find(i);
      const double f = it == c.counts.end() ? 0.0 : static_cast<double>(it->second) / shots;
      EXPECT_LE(std::abs(f - p), 5 * std::sqrt(p * (1 - p) / shots) + 1e-12);
    }
  }
}

TEST(statevector, partial_trace_examples) {
  DensityMatrix r = density_from_circuit_reduction(bell(), {0});
  EXPECT_NEAR(std::abs(r.entries(0, 0) - 0.5), 0, 1e-15);
  EXPECT_NEAR(std::abs(r.entries(1, 1) - 0.5), 0, 1e-15);
  EXPECT_NEAR(std::abs(r.entries(0, 1)), 0, 1e-15);

  QubitState prod = apply_gate(QubitState::zero(2), gates::H(1));
  DensityMatrix plus = density_from_circuit_reduction(prod, {0});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(plus.entries(i, j) - 0.5), 0, 1e-15);

  // oracle: outer product then explicit sum over the traced indices
  const Eigen::VectorXcd g = to_eigen(ghz(4));
  const Eigen::MatrixXcd full = g * g.adjoint();
  Eigen::MatrixXcd oracle = Eigen::MatrixXcd::Zero(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int t = 0; t < 4; ++t) oracle(a, b) += full(4 * a + t, 4 * b + t);
  DensityMatrix got = density_from_circuit_reduction(ghz(4), {2, 3});
  EXPECT_LT((got.entries - oracle).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(got.entries(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(got.entries(3, 3).real(), 0.5, 1e-15);
  got.validate();

  EXPECT_THROW(density_from_circuit_reduction(bell(), {0, 1}), std::invalid_argument);
  EXPECT_THROW(pure_density(QubitState::zero(9)), std::invalid_argument);
}

TEST(statevector, fidelity_examples) {
  Rng rng(2);
  DensityMatrix rho = density_from_circuit_reduction(random_state(3, rng), {2});
  EXPECT_NEAR(uhlmann_fidelity(rho, rho), 1.0, 1e-9);
  DensityMatrix zero = pure_density(QubitState::zero(1));
  DensityMatrix one = pure_density(QubitState::basis(1, 1));
  EXPECT_NEAR(uhlmann_fidelity(zero, one), 0.0, 1e-12);
  DensityMatrix mixed{1, Eigen::MatrixXcd::Identity(2, 2) / 2.0};
  EXPECT_NEAR(uhlmann_fidelity(mixed, zero), 0.5, 1e-12);
  DensityMatrix sigma = density_from_circuit_reduction(random_state(3, rng), {0});
  EXPECT_NEAR(uhlmann_fidelity(rho, sigma), uhlmann_fidelity(sigma, rho), 1e-9);
  EXPECT_THROW(uhlmann_fidelity(pure_density(QubitState::zero(2)), zero), std::invalid_argument);
  DensityMatrix bad{1, Eigen::MatrixXcd::Zero(2, 2)};
  bad.entries(0, 0) = 1.5;
  bad.entries(1, 1) = -0.5;
  EXPECT_THROW(uhlmann_fidelity(bad, zero), std::invalid_argument);
}

TEST(statevector, bipartite_entropy_examples) {
  QubitState prod = apply_gates(QubitState::zero(3), {gates::H(0), gates::RY(2, 0.4)});
  for (int cut = 1; cut < 3; ++cut) EXPECT_NEAR(bipartite_entropy(prod, cut), 0.0, 1e-12);
  EXPECT_NEAR(bipartite_entropy(bell(), 1), std::numbers::ln2, 1e-12);
  EXPECT_NEAR(bipartite_entropy(ghz(4), 2), std::numbers::ln2, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(density_from_circuit_reduction(ghz(4), {2, 3})), std::numbers::ln2, 1e-12);
  EXPECT_THROW(bipartite_entropy(bell(), 0), std::invalid_argument);
  EXPECT_THROW(bipartite_entropy(bell(), 2), std::invalid_argument);
}

TEST(statevector, entropy_of_either_side_agrees) {
  Rng rng(4);
  for (int n = 2; n <= 6; ++n) {
    QubitState s = random_state(n, rng);
    for (int cut = 1; cut < n; ++cut) {
      std::vector<int> a, b;
      for (int q = 0; q < n; ++q) (q < cut ? a : b).push_back(q);
      const double sa = von_neumann_entropy(density_from_circuit_reduction(s, b));
      const double sb = von_neumann_entropy(density_from_circuit_reduction(s, a));
      EXPECT_NEAR(sa, sb, 1e-9);
      EXPECT_NEAR(bipartite_entropy(s, cut), sa, 1e-9);
    }
  }
}

TEST(statevector, partial_transpose_of_bell_is_not_positive) {
  DensityMatrix b = pure_density(bell());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(partial_transpose(b, 1));
  EXPECT_NEAR(es.eigenvalues()[0], -0.5, 1e-12);
}
