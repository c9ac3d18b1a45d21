// Copyright 2026 The qldp Authors
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

#include "qldp/learning.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

namespace qldp {

namespace {

// Parity-bit measurements are pure functions of (d, i) and expensive to
// build at d ~ 8; keep a small shared registry.
std::mutex g_parity_povm_mutex;
std::map<std::pair<int, int>, std::shared_ptr<const Povm>> g_parity_povm_cache;
constexpr std::size_t kParityPovmCacheMax = 48;

}  // namespace

ParityConcept::ParityConcept(int num_bits, std::uint64_t mask)
    : num_bits_(num_bits), mask_(mask) {
  if (num_bits < 1 || num_bits > 62) {
    throw ValidationError("ParityConcept: bit count out of range");
  }
  if (num_bits < 64 && (mask >> num_bits) != 0) {
    throw ValidationError("ParityConcept: mask has bits beyond the dimension");
  }
}

ParityConcept ParityConcept::from_string(std::string_view bits) {
  if (bits.empty()) {
    throw ValidationError("ParityConcept: empty bitstring");
  }
  std::uint64_t mask = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw ValidationError("ParityConcept: bitstring must be 0/1");
    }
    mask = (mask << 1) | (c == '1' ? 1u : 0u);
  }
  return ParityConcept(static_cast<int>(bits.size()), mask);
}

ParityConcept ParityConcept::random(int num_bits, RngStream& rng) {
  if (num_bits < 1 || num_bits > 62) {
    throw ValidationError("ParityConcept: bit count out of range");
  }
  const std::uint64_t mask = rng.next_u64() & ((std::uint64_t{1} << num_bits) - 1);
  return ParityConcept(num_bits, mask);
}

int ParityConcept::evaluate(std::uint64_t x) const {
  return std::popcount(mask_ & x) & 1;
}

int ParityConcept::bit(int i) const {
  if (i < 0 || i >= num_bits_) {
    throw ValidationError("ParityConcept: bit index out of range");
  }
  return static_cast<int>((mask_ >> (num_bits_ - 1 - i)) & 1);
}

std::string ParityConcept::to_string() const {
  std::string s(static_cast<std::size_t>(num_bits_), '0');
  for (int i = 0; i < num_bits_; ++i) {
    if (bit(i)) {
      s[static_cast<std::size_t>(i)] = '1';
    }
  }
  return s;
}

ExampleDistribution::ExampleDistribution(int num_bits, std::vector<double> weights)
    : num_bits_(num_bits), weights_(std::move(weights)) {
  if (num_bits < 1 || num_bits > 30) {
    throw ValidationError("ExampleDistribution: bit count out of range");
  }
  if (weights_.size() != (std::size_t{1} << num_bits)) {
    throw ValidationError("ExampleDistribution: expected 2^d weights");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("ExampleDistribution: weights must be nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kTraceTol) {
    throw ValidationError("ExampleDistribution: weights sum to " +
                          std::to_string(total) + ", expected 1");
  }
}

ExampleDistribution ExampleDistribution::uniform(int num_bits) {
  if (num_bits < 1 || num_bits > 30) {
    throw ValidationError("ExampleDistribution: bit count out of range");
  }
  const std::size_t n = std::size_t{1} << num_bits;
  return ExampleDistribution(num_bits,
                             std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ExampleDistribution ExampleDistribution::point_mass(int num_bits, std::uint64_t x) {
  if (num_bits < 1 || num_bits > 30) {
    throw ValidationError("ExampleDistribution: bit count out of range");
  }
  const std::size_t n = std::size_t{1} << num_bits;
  if (x >= n) {
    throw ValidationError("ExampleDistribution: point outside the domain");
  }
  std::vector<double> weights(n, 0.0);
  weights[x] = 1.0;
  return ExampleDistribution(num_bits, std::move(weights));
}

DensityMatrix quantum_example_state(const ParityConcept& target,
                                    const ExampleDistribution& dist,
                                    Index dim_cap) {
  if (target.num_bits() != dist.num_bits()) {
    throw ValidationError("quantum_example_state: concept/distribution mismatch");
  }
  const int d = target.num_bits();
  const Index dim = Index{1} << (d + 1);
  if (dim > dim_cap) {
    throw CapacityError("quantum_example_state: dimension " + std::to_string(dim) +
                        " exceeds cap " + std::to_string(dim_cap));
  }
  CVector amps = CVector::Zero(dim);
  const std::uint64_t points = std::uint64_t{1} << d;
  for (std::uint64_t x = 0; x < points; ++x) {
    const Index index =
        (static_cast<Index>(x) << 1) | target.evaluate(x);
    amps(index) = std::sqrt(dist.weight(x));
  }
  return pure_state_density(amps);
}

Povm parity_bit_povm(int num_bits, int bit_index, Index dim_cap) {
  if (num_bits < 1) {
    throw ValidationError("parity_bit_povm: bit count must be positive");
  }
  if (bit_index < 0 || bit_index >= num_bits) {
    throw ValidationError("parity_bit_povm: bit index out of range");
  }
  const Index dim = Index{1} << (num_bits + 1);
  if (dim > dim_cap) {
    throw CapacityError("parity_bit_povm: dimension exceeds cap");
  }

  {
    std::scoped_lock lock(g_parity_povm_mutex);
    auto it = g_parity_povm_cache.find({num_bits, bit_index});
    if (it != g_parity_povm_cache.end()) {
      return *it->second;
    }
  }

  // M = H^(x)(d+1) P H^(x)(d+1) with P the projector onto joint basis states
  // whose x-part has bit `bit_index` set and whose label qubit reads 1.
  // Conjugating a projector by a unitary keeps it a projector.
  const Operator wh = walsh_hadamard(num_bits + 1, dim_cap);
  const int int_bit = num_bits - 1 - bit_index;  // bitstring position -> integer bit

  Eigen::VectorXd selector = Eigen::VectorXd::Zero(dim);
  for (Index n = 0; n < dim; ++n) {
    const std::uint64_t x = static_cast<std::uint64_t>(n) >> 1;
    const bool label_one = (n & 1) != 0;
    if (label_one && ((x >> int_bit) & 1)) {
      selector(n) = 1.0;
    }
  }

  CMatrix weighted = wh.mat();
  for (Index c = 0; c < dim; ++c) {
    weighted.col(c) *= selector(c);
  }
  CMatrix effect = weighted * wh.mat();
  effect = (effect + effect.adjoint()) / 2.0;

  std::vector<Operator> effects;
  effects.emplace_back(CMatrix(CMatrix::Identity(dim, dim) - effect));
  effects.emplace_back(std::move(effect));
  auto povm = std::make_shared<const Povm>(
      Povm(std::move(effects), {0.0, 1.0}, Povm::Trusted{}));

  {
    std::scoped_lock lock(g_parity_povm_mutex);
    if (g_parity_povm_cache.size() >= kParityPovmCacheMax) {
      g_parity_povm_cache.clear();
    }
    g_parity_povm_cache.emplace(std::make_pair(num_bits, bit_index), povm);
  }
  return *povm;
}

ParityConcept learn_parity_qsq(QsqOracle& oracle, int num_bits, double tau) {
  if (!(tau > 0.0 && tau < 0.25)) {
    throw ValidationError("learn_parity_qsq: tau must lie in (0, 1/4)");
  }
  const Index dim = Index{1} << (num_bits + 1);
  if (oracle.state().dim() != dim) {
    throw ValidationError("learn_parity_qsq: oracle state is not on d+1 qubits");
  }

  // Nonadaptive: the query list is fixed before any answer is used.
  std::vector<Povm> queries;
  queries.reserve(static_cast<std::size_t>(num_bits));
  for (int i = 0; i < num_bits; ++i) {
    queries.push_back(parity_bit_povm(num_bits, i));
  }

  std::uint64_t mask = 0;
  for (int i = 0; i < num_bits; ++i) {
    const double answer = oracle.query(queries[static_cast<std::size_t>(i)], tau);
    // Answers are within tau of s_i/2 in {0, 1/2}; 1/4 is the midpoint.
    if (answer > 0.25) {
      mask |= std::uint64_t{1} << (num_bits - 1 - i);
    }
  }
  return ParityConcept(num_bits, mask);
}

double qldp_alpha_for_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw ValidationError("qldp_alpha_for_epsilon: epsilon must be positive");
  }
  const double e = std::exp(epsilon);
  return (e - 1.0) / (e + 2.0);
}

ParityQldpResult learn_parity_qldp(const DensityMatrix& example_state,
                                   std::int64_t num_copies, int num_bits,
                                   double epsilon, double beta, double tau,
                                   RngStream rng) {
  if (num_bits < 1) {
    throw ValidationError("learn_parity_qldp: bit count must be positive");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ValidationError("learn_parity_qldp: beta must lie in (0, 1)");
  }
  if (!(tau > 0.0 && tau < 0.25)) {
    throw ValidationError("learn_parity_qldp: tau must lie in (0, 1/4)");
  }
  const Index dim = Index{1} << (num_bits + 1);
  if (example_state.dim() != dim) {
    throw ValidationError("learn_parity_qldp: state is not on d+1 qubits");
  }

  const double alpha = qldp_alpha_for_epsilon(epsilon);
  const double charge = triviality_bound(alpha, 2);  // = epsilon up to rounding
  const std::int64_t per_bit =
      required_samples(2, tau, alpha, beta / static_cast<double>(num_bits));
  const std::int64_t needed = per_bit * num_bits;
  if (num_copies < needed) {
    throw InsufficientCopiesError(
        "learn_parity_qldp: need " + std::to_string(needed) + " copies (" +
        std::to_string(per_bit) + " per bit), got " + std::to_string(num_copies));
  }

  QldpOracle oracle(
      ProductState::copies(example_state, static_cast<std::size_t>(num_copies)),
      charge, rng);

  ParityQldpResult result;
  result.alpha = alpha;
  result.charge_per_register = charge;
  result.samples_per_bit = per_bit;
  result.copies_available = num_copies;

  std::uint64_t mask = 0;
  std::size_t offset = 0;
  for (int i = 0; i < num_bits; ++i) {
    std::vector<std::size_t> block(static_cast<std::size_t>(per_bit));
    std::iota(block.begin(), block.end(), offset);
    offset += block.size();
    const double estimate = estimate_expectation_via_qldp(
        oracle, block, parity_bit_povm(num_bits, i), alpha);
    result.bit_estimates.push_back(estimate);
    if (estimate > 0.25) {
      mask |= std::uint64_t{1} << (num_bits - 1 - i);
    }
  }

  result.hypothesis = ParityConcept(num_bits, mask);
  result.copies_used = static_cast<std::int64_t>(offset);
  result.ledger = oracle.ledger();
  result.query_counts = oracle.query_counts();
  return result;
}

double generalization_error(const ParityConcept& hypothesis,
                            const ParityConcept& target,
                            const ExampleDistribution& dist) {
  if (hypothesis.num_bits() != target.num_bits() ||
      hypothesis.num_bits() != dist.num_bits()) {
    throw ValidationError("generalization_error: dimension mismatch");
  }
  const std::uint64_t diff = hypothesis.mask() ^ target.mask();
  const std::uint64_t points = std::uint64_t{1} << hypothesis.num_bits();
  double error = 0.0;
  for (std::uint64_t x = 0; x < points; ++x) {
    if (std::popcount(diff & x) & 1) {
      error += dist.weight(x);
    }
  }
  return error;
}

}  // namespace qldp
