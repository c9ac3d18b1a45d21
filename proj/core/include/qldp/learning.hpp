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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "qldp/protocols.hpp"

namespace qldp {

/// Parity over a bit mask: c(x) = s . x mod 2. Bitstring position i (as in
/// "1011") corresponds to integer bit (d - 1 - i).
class ParityConcept {
 public:
  ParityConcept(int num_bits, std::uint64_t mask);
  static ParityConcept from_string(std::string_view bits);
  static ParityConcept random(int num_bits, RngStream& rng);

  int num_bits() const { return num_bits_; }
  std::uint64_t mask() const { return mask_; }
  int evaluate(std::uint64_t x) const;
  /// Coefficient at bitstring position i.
  int bit(int i) const;
  std::string to_string() const;

  bool operator==(const ParityConcept&) const = default;

 private:
  int num_bits_;
  std::uint64_t mask_;
};

/// Distribution over {0,1}^d as 2^d nonnegative weights summing to 1.
class ExampleDistribution {
 public:
  ExampleDistribution(int num_bits, std::vector<double> weights);
  static ExampleDistribution uniform(int num_bits);
  static ExampleDistribution point_mass(int num_bits, std::uint64_t x);

  int num_bits() const { return num_bits_; }
  double weight(std::uint64_t x) const { return weights_[x]; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  int num_bits_;
  std::vector<double> weights_;
};

/// Pure example state sum_x sqrt(X(x)) |x, c(x)> on d+1 qubits; measuring in
/// the computational basis yields the labeled example (x, c(x)) with
/// probability X(x).
DensityMatrix quantum_example_state(const ParityConcept& target,
                                    const ExampleDistribution& dist,
                                    Index dim_cap = kDefaultDimCap);

/// Binary measurement whose expectation on a uniform-distribution example
/// state equals s_i / 2: effects (I - M_i, M_i) with labels (0, 1), where
/// M_i conjugates the projector onto {bit i of x set, label qubit 1} by the
/// full Walsh-Hadamard transform.
Povm parity_bit_povm(int num_bits, int bit_index, Index dim_cap = kDefaultDimCap);

/// Recovers the parity mask with d nonadaptive expectation queries, decoding
/// bit i as 1 when the answer exceeds 1/4. Correct under any noise mode for
/// tau < 1/4, since answers are within tau of s_i / 2.
ParityConcept learn_parity_qsq(QsqOracle& oracle, int num_bits, double tau);

/// alpha solving triviality_bound(alpha, 2) = epsilon:
/// (e^epsilon - 1) / (e^epsilon + 2).
double qldp_alpha_for_epsilon(double epsilon);

struct ParityQldpResult {
  ParityConcept hypothesis{1, 0};
  std::vector<double> bit_estimates;
  double alpha = 0.0;                // randomized-response parameter
  double charge_per_register = 0.0;  // = triviality_bound(alpha, 2)
  std::int64_t samples_per_bit = 0;
  std::int64_t copies_used = 0;
  std::int64_t copies_available = 0;
  std::vector<double> ledger;
  std::vector<std::uint32_t> query_counts;
};

/// Locally private parity learner: the d-query expectation learner above run
/// through the privatize-and-debias simulation over `num_copies` fresh copies
/// of the example state. Every used copy is measured exactly once and charged
/// triviality_bound(alpha, 2) = epsilon; success probability >= 1 - beta.
ParityQldpResult learn_parity_qldp(const DensityMatrix& example_state,
                                   std::int64_t num_copies, int num_bits,
                                   double epsilon, double beta, double tau,
                                   RngStream rng);

/// Pr_{x ~ X}[h(x) != c(x)], summed exactly over all 2^d points.
double generalization_error(const ParityConcept& hypothesis,
                            const ParityConcept& target,
                            const ExampleDistribution& dist);

}  // namespace qldp
