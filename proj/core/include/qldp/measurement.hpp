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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qldp/core.hpp"

namespace qldp {

/// 128-bit content digest used to key verification caches and query logs.
using Digest = std::array<std::uint64_t, 2>;

/// POVM: Hermitian PSD effects summing to the identity, with a real outcome
/// label per effect (defaults to 1..k).
class Povm {
 public:
  /// Validating constructor: certifies every effect PSD (full Hermitian
  /// eigendecomposition), effects summing to I within 1e-9, labels matching.
  Povm(std::vector<Operator> effects, std::vector<double> labels = {});

  Index dim() const { return dim_; }
  std::size_t num_outcomes() const { return effects_.size(); }
  const Operator& effect(std::size_t i) const { return effects_[i]; }
  const std::vector<Operator>& effects() const { return effects_; }
  const std::vector<double>& labels() const { return labels_; }
  double label(std::size_t i) const { return labels_[i]; }
  double label_mean() const;
  const Digest& digest() const { return digest_; }

 private:
  struct Trusted {};
  // For constructions whose effects are PSD by algebra (privatization,
  // projector conjugation, Ginibre normalization); the completeness sum is
  // still checked.
  Povm(std::vector<Operator> effects, std::vector<double> labels, Trusted);

  void finish_construction();

  friend Povm random_povm(Index, std::size_t, RngStream&);
  friend Povm privatize_povm(const Povm&, double);
  friend Povm parity_bit_povm(int, int, Index);
  friend Povm outcome_indicator_povm(const Povm&, std::size_t);

  Index dim_ = 0;
  std::vector<Operator> effects_;
  std::vector<double> labels_;
  Digest digest_{};
};

/// Sampled measurement outcome: index into the effect list plus its label.
struct Outcome {
  std::size_t index = 0;
  double label = 0.0;
};

/// Result of a triviality computation. `alpha_star` may be +infinity. The
/// witness realizes the reported ratio: for the eigenvalue criterion it is
/// the maximizing outcome with the two extremal eigenvector states; for the
/// finite-set variant it is the maximizing outcome with state indices.
struct TrivialityCertificate {
  double alpha_star = 0.0;
  std::size_t outcome = 0;
  std::optional<DensityMatrix> maximizer;
  std::optional<DensityMatrix> minimizer;
  std::optional<std::pair<std::size_t, std::size_t>> state_pair;
};

/// p_i = Tr(E_i rho), clamped to [0, 1]; the vector is renormalized only when
/// the drift from 1 is within 1e-9.
std::vector<double> outcome_probabilities(const Povm& m, const DensityMatrix& rho);

/// Born-rule sample: index i with probability Tr(E_i rho).
Outcome sample_outcome(const Povm& m, const DensityMatrix& rho, RngStream& rng);

/// Categorical draw from an explicit probability vector.
std::size_t sample_index(std::span<const double> probabilities, RngStream& rng);

/// E[M(rho)] = sum_i label_i Tr(E_i rho).
double expectation(const Povm& m, const DensityMatrix& rho);

/// Smallest alpha such that m is alpha-trivial over all density matrices:
/// max_i ln(lambda_max(E_i) / lambda_min(E_i)). Identically-zero effects
/// contribute 0; a vanishing lambda_min with nonvanishing lambda_max gives
/// +infinity.
TrivialityCertificate minimal_triviality(const Povm& m);

/// Cached alpha-only variant used on oracle verification paths.
double minimal_triviality_alpha(const Povm& m);

/// Smallest alpha such that m is alpha-trivial on the given finite state set:
/// max over outcomes and ordered state pairs of ln(Tr(E_i rho) / Tr(E_i sigma)).
TrivialityCertificate minimal_triviality_on_set(const Povm& m,
                                                std::span<const DensityMatrix> states);

struct DpViolation {
  std::size_t state_a = 0;  // indices of the ordered neighbor pair
  std::size_t state_b = 0;
  std::size_t outcome = 0;
  double ratio = 0.0;  // Pr[M(a)=y] / Pr[M(b)=y]; may be +infinity
};

struct DpCheckResult {
  bool pass = true;
  std::optional<DpViolation> violation;
  std::size_t neighbor_pairs = 0;  // ordered pairs examined (0 => vacuous)
};

/// Differential-privacy check over an explicit set of product states:
/// for every ordered neighbor pair (states differing in exactly one register
/// beyond 1e-9 max-norm) and every outcome y,
/// Pr[M(rho)=y] <= e^alpha Pr[M(sigma)=y].
DpCheckResult check_dp(const Povm& m, std::span<const ProductState> states,
                       double alpha, Index dim_cap = kDefaultDimCap);

/// Random POVM via Ginibre effects A_i = G_i G_i^dag whitened by
/// S^{-1/2} A_i S^{-1/2} with S = sum A_i (redrawn while cond(S) > 1e12).
Povm random_povm(Index dim, std::size_t num_outcomes, RngStream& rng);

}  // namespace qldp
