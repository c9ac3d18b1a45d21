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
#include <optional>
#include <span>
#include <vector>

#include "qldp/oracles.hpp"

namespace qldp {

/// Nonadaptive batch of expectation queries (measurement, tolerance).
struct QsqQuery {
  Povm povm;
  double tolerance = 0.0;
};

struct QsqQueryPlan {
  std::vector<QsqQuery> queries;
  bool nonadaptive = true;
};

/// Noninteractive batch of per-register measurements with declared
/// triviality levels.
struct QldpQuery {
  std::size_t register_index = 0;
  Povm povm;
  double epsilon = 0.0;
};

struct QldpQueryPlan {
  std::vector<QldpQuery> queries;
  bool noninteractive = true;
};

/// Randomized-response mixture of a measurement:
/// E_i' = alpha E_i + ((1 - alpha)/k) I, labels preserved.
Povm privatize_povm(const Povm& m, double alpha);

/// Triviality level of a privatized k-outcome measurement:
/// ln((1 + alpha k) / (1 - alpha)).
double triviality_bound(double alpha, std::size_t num_outcomes);

/// x / alpha + (alpha - 1) / alpha. Inverts the randomized-response mixture
/// for measurements whose labels average to 1; the estimator below recenters
/// with the actual label mean via `debias_about`.
double debias(double x, double alpha);

/// x / alpha - ((1 - alpha) / alpha) * baseline; unbiased inverse of the
/// privatized expectation when `baseline` is the measurement's label mean.
double debias_about(double x, double alpha, double baseline);

/// Copies needed to estimate a k-outcome expectation to within tau with
/// failure probability delta through an alpha-privatized measurement:
/// ceil(k^2 ln(2/delta) / (2 tau^2 alpha^2)).
std::int64_t required_samples(std::size_t num_outcomes, double tau, double alpha,
                              double delta);

/// Measures privatize_povm(m, alpha) once on each listed register (charging
/// triviality_bound(alpha, k) apiece) and returns the debiased mean.
double estimate_expectation_via_qldp(QldpOracle& oracle,
                                     std::span<const std::size_t> registers,
                                     const Povm& m, double alpha);

struct QsqSimulationResult {
  std::vector<double> estimates;
  std::vector<std::int64_t> samples_per_query;
  std::int64_t total_qldp_queries = 0;
  double budget = 0.0;
  std::vector<double> ledger;
  std::vector<std::uint32_t> query_counts;
};

/// Simulates a nonadaptive expectation-query plan using only nearly-trivial
/// measurements on fresh copies of the state. Each query j is answered from
/// required_samples(k_j, tau_j, alpha, beta/t) dedicated copies; the oracle
/// budget is triviality_bound(alpha, max_j k_j) and every copy is measured at
/// most once. Joint success probability is at least 1 - beta.
QsqSimulationResult simulate_nonadaptive_qsq(const QsqQueryPlan& plan,
                                             const DensityMatrix& state,
                                             double alpha, double beta,
                                             RngStream rng);

/// (I - E_w, E_w) with labels (0, 1): the binary measurement whose
/// expectation is Tr(E_w rho).
Povm outcome_indicator_povm(const Povm& m, std::size_t outcome);

struct RejectionSampleResult {
  std::size_t outcome_index = 0;
  double label = 0.0;
  std::int64_t iterations = 0;
  std::int64_t clamp_events = 0;
};

/// Default iteration cap, 50x the expected-iteration bound e^epsilon.
std::int64_t default_max_iterations(double epsilon);

/// Samples one outcome of an epsilon-trivial measurement using only
/// expectation queries: propose w from the measurement on `proposal`
/// (|0...0><0...0| when null), query the binary indicator (I - E_w, E_w) with
/// tolerance tau, and accept with probability
/// p~(w) / (e^epsilon (1 + tau) q(w)), clamped to [0, 1].
/// Clamp events are counted and surfaced in the result.
RejectionSampleResult rejection_sample_measurement(
    QsqOracle& oracle, const Povm& m, double epsilon, double tau,
    const DensityMatrix* proposal, std::int64_t max_iterations, RngStream& rng);

struct QldpSimulationResult {
  std::vector<std::size_t> outcome_indices;
  std::vector<double> outcome_labels;
  std::vector<std::int64_t> iterations_per_query;
  std::int64_t total_qsq_queries = 0;
  std::int64_t clamp_events = 0;
  double tau = 0.0;
};

/// Simulates a noninteractive t-query local-privacy plan with expectation
/// queries alone: tau = beta / (3 t), one rejection-sampling loop per query;
/// the output distribution is within statistical distance beta of the plan's.
QldpSimulationResult simulate_noninteractive_qldp(const QldpQueryPlan& plan,
                                                  QsqOracle& oracle, double beta,
                                                  RngStream rng);

}  // namespace qldp
