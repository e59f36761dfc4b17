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

// Measurement grouping. Each group carries the gates that rotate its terms
// to Z-diagonal form and the resulting diagonal observable.

#ifndef VARQ_GROUPING_HPP_
#define VARQ_GROUPING_HPP_

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "varq/pauli.hpp"
#include "varq/statevector.hpp"

namespace varq {

struct DiagonalTerm {
  double coefficient;
  std::uint64_t zmask;
};

struct MeasurementGroup {
  std::vector<std::size_t> term_indices;  // into PauliHamiltonian::terms()
  std::vector<GateOp> basis_change;
  std::vector<DiagonalTerm> diagonal;

  double weight() const {
    double w = 0.0;
    for (const DiagonalTerm& d : diagonal) w += std::abs(d.coefficient);
    return w;
  }
};

enum class GroupingStrategy {
  kQubitwise,       // qubit-wise commuting sets, single-qubit rotations
  kHoppingBlocks,   // XX+YY / XY-YX blocks rotated by a two-qubit gate
};

namespace detail {

struct QwcBucket {
  std::vector<std::size_t> terms;
  std::vector<char> basis;  // per qubit: 'I' (free), 'X', 'Y', 'Z'
};

inline void finish_qwc(const PauliHamiltonian& h, const QwcBucket& b, std::vector<MeasurementGroup>& out) {
  const int n = h.num_qubits();
  MeasurementGroup g;
  g.term_indices = b.terms;
  for (int q = 0; q < n; ++q) {
    if (b.basis[q] == 'X') {
      g.basis_change.push_back(gates::H(q));
    } else if (b.basis[q] == 'Y') {
      g.basis_change.push_back(gates::Sdg(q));
      g.basis_change.push_back(gates::H(q));
    }
  }
  for (std::size_t k : b.terms) {
    const PauliTerm& t = h.terms()[k];
    g.diagonal.push_back({t.coefficient, t.masks.x | t.masks.z});
  }
  out.push_back(std::move(g));
}

inline std::vector<MeasurementGroup> qwc_groups(const PauliHamiltonian& h, const std::vector<std::size_t>& idx) {
  const int n = h.num_qubits();
  std::vector<QwcBucket> buckets;
  for (std::size_t k : idx) {
    const std::string& l = h.terms()[k].labels;
    bool placed = false;
    for (QwcBucket& b : buckets) {
      bool ok = true;
      for (int q = 0; q < n && ok; ++q) ok = l[q] == 'I' || b.basis[q] == 'I' || b.basis[q] == l[q];
      if (!ok) continue;
      for (int q = 0; q < n; ++q)
        if (l[q] != 'I') b.basis[q] = l[q];
      b.terms.push_back(k);
      placed = true;
      break;
    }
    if (!placed) {
      QwcBucket b{{k}, std::vector<char>(l.begin(), l.end())};
      buckets.push_back(std::move(b));
    }
  }
  std::vector<MeasurementGroup> out;
  for (const QwcBucket& b : buckets) finish_qwc(h, b, out);
  return out;
}

struct HopBlock {
  int a, b;  // qubits, a < b
  std::uint64_t zstring;
  double cxx = 0, cyy = 0, cxy = 0, cyx = 0;
  std::vector<std::size_t> terms;
};

/// Maps (e^{ia/2}|01> + e^{-ia/2}|10>)/sqrt2 -> |01> and the minus
/// combination -> |10>, identity on |00>, |11>.
inline GateOp hopping_rotation(int a, int b, double alpha) {
  const double s = 1.0 / std::sqrt(2.0);
  const cplx em = std::polar(s, -alpha / 2), ep = std::polar(s, alpha / 2);
  return make_gate("hoprot", {a, b}, {1, 0, 0, 0, 0, em, ep, 0, 0, em, -ep, 0, 0, 0, 0, 1});
}

}  // namespace detail

inline std::vector<MeasurementGroup> group_commuting(const PauliHamiltonian& h,
                                                     GroupingStrategy strategy = GroupingStrategy::kQubitwise) {
  const int n = h.num_qubits();
  std::vector<std::size_t> rest;
  std::vector<MeasurementGroup> groups;
  if (strategy == GroupingStrategy::kHoppingBlocks) {
    std::map<std::tuple<int, int, std::uint64_t>, detail::HopBlock> blocks;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const PauliTerm& t = h.terms()[k];
      if (std::popcount(t.masks.x) != 2) {
        rest.push_back(k);
        continue;
      }
      const int hi = 63 - std::countl_zero(t.masks.x);
      const int lo = std::countr_zero(t.masks.x);
      const int a = n - 1 - hi, b = n - 1 - lo;  // qubit indices, a < b
      const std::uint64_t pair = t.masks.x;
      const std::uint64_t zs = t.masks.z & ~pair;
      auto key = std::make_tuple(a, b, zs);
      auto& blk = blocks[key];
      blk.a = a;
      blk.b = b;
      blk.zstring = zs;
      const char la = t.labels[a], lb = t.labels[b];
      if (la == 'X' && lb == 'X') blk.cxx += t.coefficient;
      if (la == 'Y' && lb == 'Y') blk.cyy += t.coefficient;
      if (la == 'X' && lb == 'Y') blk.cxy += t.coefficient;
      if (la == 'Y' && lb == 'X') blk.cyx += t.coefficient;
      blk.terms.push_back(k);
    }
    struct BlockGroup {
      std::uint64_t pairs = 0, zs = 0;
      MeasurementGroup g;
    };
    std::vector<BlockGroup> bgs;
    for (auto& [key, blk] : blocks) {
      const double tol = 1e-12;
      if (std::abs(blk.cxx - blk.cyy) > tol || std::abs(blk.cxy + blk.cyx) > tol) {
        rest.insert(rest.end(), blk.terms.begin(), blk.terms.end());
        continue;
      }
      const cplx w(blk.cxx + blk.cyy, blk.cxy - blk.cyx);
      const std::uint64_t pair = (std::uint64_t{1} << (n - 1 - blk.a)) | (std::uint64_t{1} << (n - 1 - blk.b));
      BlockGroup* target = nullptr;
      for (BlockGroup& bg : bgs) {
        if ((pair & (bg.pairs | bg.zs)) == 0 && (blk.zstring & bg.pairs) == 0) {
          target = &bg;
          break;
        }
      }
      if (target == nullptr) target = &bgs.emplace_back();
      target->pairs |= pair;
      target->zs |= blk.zstring;
      MeasurementGroup& g = target->g;
      g.term_indices.insert(g.term_indices.end(), blk.terms.begin(), blk.terms.end());
      g.basis_change.push_back(detail::hopping_rotation(blk.a, blk.b, std::arg(w)));
      const double m = std::abs(w) / 2.0;
      g.diagonal.push_back({m, (std::uint64_t{1} << (n - 1 - blk.a)) | blk.zstring});
      g.diagonal.push_back({-m, (std::uint64_t{1} << (n - 1 - blk.b)) | blk.zstring});
    }
    std::vector<MeasurementGroup> q = detail::qwc_groups(h, rest);
    groups.insert(groups.end(), q.begin(), q.end());
    for (BlockGroup& bg : bgs) groups.push_back(std::move(bg.g));
    return groups;
  }
  for (std::size_t k = 0; k < h.size(); ++k) rest.push_back(k);
  return detail::qwc_groups(h, rest);
}

/// Sum_k c_k <Z^{mask_k}> over a probability vector.
inline double diagonal_expectation(const std::vector<DiagonalTerm>& diag, const std::vector<double>& probs) {
  double acc = 0.0;
  for (std::size_t b = 0; b < probs.size(); ++b) {
    if (probs[b] == 0.0) continue;
    double v = 0.0;
    for (const DiagonalTerm& d : diag) v += (std::popcount(b & d.zmask) & 1) ? -d.coefficient : d.coefficient;
    acc += probs[b] * v;
  }
  return acc;
}

inline std::vector<double> rotated_probabilities(const QubitState& s, const MeasurementGroup& g) {
  return apply_gates(s, g.basis_change).probabilities();
}

/// Exact energy through the grouped measurement circuits.
inline double grouped_expectation(const PauliHamiltonian& h, const std::vector<MeasurementGroup>& groups,
                                  const QubitState& s) {
  double e = h.identity_offset();
  for (const MeasurementGroup& g : groups) e += diagonal_expectation(g.diagonal, rotated_probabilities(s, g));
  return e;
}

struct ShotEstimate {
  double value = 0.0;
  double sigma_bound = 0.0;  // sqrt(sum_groups (sum |c|)^2 / shots)
};

/// Samples every group with `shots_per_group` shots; group g uses the
/// stream Rng(seed).split(g).
inline ShotEstimate grouped_expectation_shots(const PauliHamiltonian& h, const std::vector<MeasurementGroup>& groups,
                                              const QubitState& s, std::uint64_t shots_per_group, std::uint64_t seed) {
  ShotEstimate est;
  est.value = h.identity_offset();
  double var = 0.0;
  const Rng root(seed);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const MeasurementGroup& g = groups[gi];
    const ShotCounts c = sample_probabilities(rotated_probabilities(s, g), s.num_qubits(), shots_per_group,
                                              root.split(gi).seed());
    double acc = 0.0;
    for (const auto& [b, k] : c.counts) {
      double v = 0.0;
      for (const DiagonalTerm& d : g.diagonal) v += (std::popcount(b & d.zmask) & 1) ? -d.coefficient : d.coefficient;
      acc += static_cast<double>(k) * v;
    }
    est.value += acc / static_cast<double>(shots_per_group);
    const double w = g.weight();
    var += w * w / static_cast<double>(shots_per_group);
  }
  est.sigma_bound = std::sqrt(var);
  return est;
}

}  // namespace varq

#endif  // VARQ_GROUPING_HPP_
