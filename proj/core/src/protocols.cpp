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

#include "qldp/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>

namespace qldp {

Povm privatize_povm(const Povm& m, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("privatize_povm: alpha must lie in (0, 1)");
  }
  const std::size_t k = m.num_outcomes();
  const double background = (1.0 - alpha) / static_cast<double>(k);
  const CMatrix eye = CMatrix::Identity(m.dim(), m.dim());

  std::vector<Operator> effects;
  effects.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    effects.emplace_back(
        CMatrix(alpha * m.effect(i).mat() + background * eye));
  }
  // Mixture of PSD terms with positive weights; PSD by construction.
  return Povm(std::move(effects), m.labels(), Povm::Trusted{});
}

double triviality_bound(double alpha, std::size_t num_outcomes) {
  if (!(alpha > 0.0 && alpha < 1.0) || num_outcomes < 1) {
    throw ValidationError("triviality_bound: alpha in (0,1) and k >= 1 required");
  }
  const double k = static_cast<double>(num_outcomes);
  return std::log((1.0 + alpha * k) / (1.0 - alpha));
}

double debias(double x, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("debias: alpha must lie in (0, 1]");
  }
  return x / alpha + (alpha - 1.0) / alpha;
}

double debias_about(double x, double alpha, double baseline) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("debias_about: alpha must lie in (0, 1]");
  }
  return x / alpha - ((1.0 - alpha) / alpha) * baseline;
}

std::int64_t required_samples(std::size_t num_outcomes, double tau, double alpha,
                              double delta) {
  if (num_outcomes < 1 || !(tau > 0.0) || !(alpha > 0.0 && alpha < 1.0) ||
      !(delta > 0.0 && delta < 1.0)) {
    throw ValidationError("required_samples: domain violation");
  }
  const double k = static_cast<double>(num_outcomes);
  const double n = k * k * std::log(2.0 / delta) / (2.0 * tau * tau * alpha * alpha);
  return static_cast<std::int64_t>(std::ceil(n));
}

double estimate_expectation_via_qldp(QldpOracle& oracle,
                                     std::span<const std::size_t> registers,
                                     const Povm& m, double alpha) {
  if (registers.empty()) {
    throw ValidationError("estimate_expectation_via_qldp: no registers listed");
  }
  {
    std::unordered_set<std::size_t> seen(registers.begin(), registers.end());
    if (seen.size() != registers.size()) {
      throw ValidationError("estimate_expectation_via_qldp: duplicate register");
    }
  }

  const Povm privatized = privatize_povm(m, alpha);
  const double charge = triviality_bound(alpha, m.num_outcomes());
  const double baseline = m.label_mean();

  double sum = 0.0;
  for (std::size_t reg : registers) {
    const Outcome outcome = oracle.query(reg, privatized, charge);
    sum += debias_about(outcome.label, alpha, baseline);
  }
  return sum / static_cast<double>(registers.size());
}

QsqSimulationResult simulate_nonadaptive_qsq(const QsqQueryPlan& plan,
                                             const DensityMatrix& state,
                                             double alpha, double beta,
                                             RngStream rng) {
  if (!plan.nonadaptive) {
    throw ValidationError("simulate_nonadaptive_qsq: plan must be nonadaptive");
  }
  if (plan.queries.empty()) {
    throw ValidationError("simulate_nonadaptive_qsq: empty plan");
  }
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
    throw ValidationError("simulate_nonadaptive_qsq: alpha, beta must lie in (0,1)");
  }

  const std::size_t t = plan.queries.size();
  const double delta = beta / static_cast<double>(t);

  std::vector<std::int64_t> samples;
  samples.reserve(t);
  std::int64_t total = 0;
  std::size_t max_outcomes = 1;
  for (const auto& query : plan.queries) {
    if (!(query.tolerance > 0.0)) {
      throw ValidationError("simulate_nonadaptive_qsq: tolerances must be positive");
    }
    if (query.povm.dim() != state.dim()) {
      throw ValidationError("simulate_nonadaptive_qsq: query dimension mismatch");
    }
    const std::int64_t n =
        required_samples(query.povm.num_outcomes(), query.tolerance, alpha, delta);
    samples.push_back(n);
    total += n;
    max_outcomes = std::max(max_outcomes, query.povm.num_outcomes());
  }

  // One conservative per-register budget; each register is used exactly once.
  const double budget = triviality_bound(alpha, max_outcomes);
  QldpOracle oracle(ProductState::copies(state, static_cast<std::size_t>(total)),
                    budget, rng);

  QsqSimulationResult result;
  result.samples_per_query = samples;
  result.total_qldp_queries = total;
  result.budget = budget;

  std::size_t offset = 0;
  for (std::size_t j = 0; j < t; ++j) {
    std::vector<std::size_t> block(static_cast<std::size_t>(samples[j]));
    std::iota(block.begin(), block.end(), offset);
    offset += block.size();
    result.estimates.push_back(
        estimate_expectation_via_qldp(oracle, block, plan.queries[j].povm, alpha));
  }

  result.ledger = oracle.ledger();
  result.query_counts = oracle.query_counts();
  return result;
}

std::int64_t default_max_iterations(double epsilon) {
  return static_cast<std::int64_t>(std::ceil(50.0 * std::exp(epsilon)));
}

Povm outcome_indicator_povm(const Povm& m, std::size_t w) {
  if (w >= m.num_outcomes()) {
    throw ValidationError("outcome_indicator_povm: outcome out of range");
  }
  const CMatrix eye = CMatrix::Identity(m.dim(), m.dim());
  std::vector<Operator> effects;
  effects.emplace_back(CMatrix(eye - m.effect(w).mat()));
  effects.emplace_back(m.effect(w));
  // Both PSD whenever m is a valid measurement (each effect is bounded by I).
  return Povm(std::move(effects), {0.0, 1.0}, Povm::Trusted{});
}

RejectionSampleResult rejection_sample_measurement(
    QsqOracle& oracle, const Povm& m, double epsilon, double tau,
    const DensityMatrix* proposal, std::int64_t max_iterations, RngStream& rng) {
  if (epsilon < 0.0) {
    throw ValidationError("rejection sampler: epsilon must be nonnegative");
  }
  if (!(tau > 0.0) || tau > 1.0 / 3.0) {
    throw ValidationError("rejection sampler: tau must lie in (0, 1/3]");
  }
  if (m.dim() != oracle.state().dim()) {
    throw ValidationError("rejection sampler: dimension mismatch");
  }
  const double alpha_star = minimal_triviality_alpha(m);
  if (!(alpha_star <= epsilon + kTrivialityVerifySlack)) {
    throw NotTrivialEnoughError(
        "rejection sampler: measurement is " + std::to_string(alpha_star) +
        "-trivial, declared epsilon " + std::to_string(epsilon));
  }

  DensityMatrix reference =
      proposal ? *proposal : basis_state_density(m.dim(), 0);
  if (reference.dim() != m.dim()) {
    throw ValidationError("rejection sampler: proposal dimension mismatch");
  }
  const std::vector<double> q = outcome_probabilities(m, reference);

  if (max_iterations <= 0) {
    max_iterations = default_max_iterations(epsilon);
  }
  const double scale = std::exp(epsilon) * (1.0 + tau);

  // Indicator measurements are built once per distinct proposed outcome.
  std::vector<std::optional<Povm>> indicators(m.num_outcomes());

  RejectionSampleResult result;
  for (std::int64_t iteration = 1; iteration <= max_iterations; ++iteration) {
    const std::size_t w = sample_index(q, rng);
    if (!indicators[w].has_value()) {
      indicators[w] = outcome_indicator_povm(m, w);
    }
    const double p_tilde = oracle.query(*indicators[w], tau);

    double accept = p_tilde / (scale * q[w]);
    if (accept > 1.0 || accept < 0.0) {
      ++result.clamp_events;
      accept = std::clamp(accept, 0.0, 1.0);
    }
    if (rng.next_double() < accept) {
      result.outcome_index = w;
      result.label = m.label(w);
      result.iterations = iteration;
      return result;
    }
  }
  throw MaxIterationsExceededError(
      "rejection sampler: no acceptance within " +
      std::to_string(max_iterations) + " iterations");
}

QldpSimulationResult simulate_noninteractive_qldp(const QldpQueryPlan& plan,
                                                  QsqOracle& oracle, double beta,
                                                  RngStream rng) {
  if (!plan.noninteractive) {
    throw ValidationError("simulate_noninteractive_qldp: plan must be noninteractive");
  }
  if (plan.queries.empty()) {
    throw ValidationError("simulate_noninteractive_qldp: empty plan");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ValidationError("simulate_noninteractive_qldp: beta must lie in (0,1)");
  }

  const std::size_t t = plan.queries.size();
  const double tau = beta / (3.0 * static_cast<double>(t));

  QldpSimulationResult result;
  result.tau = tau;
  for (const auto& query : plan.queries) {
    const RejectionSampleResult sample = rejection_sample_measurement(
        oracle, query.povm, query.epsilon, tau, nullptr, 0, rng);
    result.outcome_indices.push_back(sample.outcome_index);
    result.outcome_labels.push_back(sample.label);
    result.iterations_per_query.push_back(sample.iterations);
    result.total_qsq_queries += sample.iterations;
    result.clamp_events += sample.clamp_events;
  }
  return result;
}

}  // namespace qldp
