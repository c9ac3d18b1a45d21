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

#include "qldp/oracles.hpp"

#include <string>
#include <utility>

namespace qldp {

std::string_view to_string(QsqNoiseMode mode) {
  switch (mode) {
    case QsqNoiseMode::kExact:
      return "exact";
    case QsqNoiseMode::kUniform:
      return "uniform";
    case QsqNoiseMode::kAdversarialExtreme:
      return "adversarial_extreme";
  }
  return "unknown";
}

QsqNoiseMode parse_qsq_noise_mode(std::string_view text) {
  if (text == "exact") {
    return QsqNoiseMode::kExact;
  }
  if (text == "uniform") {
    return QsqNoiseMode::kUniform;
  }
  if (text == "adversarial_extreme" || text == "adversarial") {
    return QsqNoiseMode::kAdversarialExtreme;
  }
  throw ValidationError("unknown noise mode: " + std::string(text));
}

QsqOracle::QsqOracle(DensityMatrix state, QsqNoiseMode mode, RngStream rng)
    : state_(std::move(state)), mode_(mode), rng_(rng) {}

double QsqOracle::query(const Povm& m, double tolerance) {
  if (tolerance < 0.0) {
    throw ValidationError("qsq query: tolerance must be nonnegative");
  }
  if (m.dim() != state_.dim()) {
    throw ValidationError("qsq query: dimension mismatch");
  }
  const double exact = expectation(m, state_);
  double answer = exact;
  switch (mode_) {
    case QsqNoiseMode::kExact:
      break;
    case QsqNoiseMode::kUniform:
      answer += rng_.next_uniform(-tolerance, tolerance);
      break;
    case QsqNoiseMode::kAdversarialExtreme:
      answer += (rng_.next_u64() & 1) ? tolerance : -tolerance;
      break;
  }
  log_.push_back({m.digest(), tolerance, answer});
  return answer;
}

std::size_t QldpOracle::ProbKeyHash::operator()(const ProbKey& k) const {
  std::uint64_t h = k.digest[0];
  h = detail::mix64(h ^ k.digest[1]);
  h = detail::mix64(h ^ reinterpret_cast<std::uintptr_t>(k.state));
  return static_cast<std::size_t>(h);
}

QldpOracle::QldpOracle(ProductState registers, double budget, RngStream rng)
    : registers_(std::move(registers)),
      budget_(budget),
      ledger_(registers_.num_registers(), 0.0),
      query_counts_(registers_.num_registers(), 0),
      rng_(rng) {
  if (budget_ < 0.0) {
    throw ValidationError("QldpOracle: budget must be nonnegative");
  }
}

const std::vector<double>& QldpOracle::cached_probabilities(
    std::size_t register_index, const Povm& m) {
  const ProbKey key{m.digest(), registers_.reg_ptr(register_index)};
  auto it = prob_cache_.find(key);
  if (it == prob_cache_.end()) {
    it = prob_cache_
             .emplace(key, outcome_probabilities(m, registers_.reg(register_index)))
             .first;
  }
  return it->second;
}

Outcome QldpOracle::query(std::size_t register_index, const Povm& m,
                          double declared_alpha) {
  if (register_index >= ledger_.size()) {
    throw ValidationError("qldp query: register index out of range");
  }
  if (declared_alpha < 0.0) {
    throw ValidationError("qldp query: declared alpha must be nonnegative");
  }
  if (m.dim() != registers_.reg(register_index).dim()) {
    throw ValidationError("qldp query: dimension mismatch");
  }

  // The oracle verifies the declaration itself; the privacy guarantee must
  // not rest on caller honesty.
  const double alpha_star = minimal_triviality_alpha(m);
  if (!(alpha_star <= declared_alpha + kTrivialityVerifySlack)) {
    throw NotTrivialEnoughError(
        "qldp query: measurement is " + std::to_string(alpha_star) +
        "-trivial, declared " + std::to_string(declared_alpha));
  }
  if (ledger_[register_index] + declared_alpha > budget_) {
    throw BudgetExceededError(
        "qldp query: charge " + std::to_string(declared_alpha) +
        " on register " + std::to_string(register_index) +
        " would exceed budget " + std::to_string(budget_));
  }

  // All checks passed; only now is sampling randomness consumed.
  const std::vector<double>& probs = cached_probabilities(register_index, m);
  const std::size_t index = sample_index(probs, rng_);
  ledger_[register_index] += declared_alpha;
  ++query_counts_[register_index];
  return {index, m.label(index)};
}

double QldpOracle::remaining_budget(std::size_t register_index) const {
  if (register_index >= ledger_.size()) {
    throw ValidationError("remaining_budget: register index out of range");
  }
  return budget_ - ledger_[register_index];
}

}  // namespace qldp
