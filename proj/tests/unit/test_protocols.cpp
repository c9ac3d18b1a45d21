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

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "test_helpers.hpp"

using namespace qldp;
using test::diag2;

TEST_CASE("privatizing a projective pair gives the tilted pair") {
  const Povm m = privatize_povm(test::projective_pair(), 0.5);
  CHECK(max_abs(m.effect(0).mat() - diag2(0.75, 0.25)) <= 1e-15);
  CHECK(max_abs(m.effect(1).mat() - diag2(0.25, 0.75)) <= 1e-15);
  CHECK(m.labels() == std::vector<double>{1.0, 2.0});

  // Its triviality sits below the analytic level ln 4 for alpha = 1/2, k = 2.
  const double alpha_star = minimal_triviality(m).alpha_star;
  CHECK(alpha_star == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(alpha_star <= triviality_bound(0.5, 2) + 1e-9);
}

TEST_CASE("privatization rejects the closed interval endpoints") {
  const Povm m = test::projective_pair();
  CHECK_THROWS_AS(privatize_povm(m, 0.0), ValidationError);
  CHECK_THROWS_AS(privatize_povm(m, 1.0), ValidationError);
  CHECK_THROWS_AS(privatize_povm(m, -0.2), ValidationError);
}

TEST_CASE("privatized measurements never exceed the triviality level") {
  RngStream rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const Index dim = 2 + static_cast<Index>(rng.next_below(7));
    const std::size_t k = 1 + rng.next_below(5);
    const Povm m = random_povm(dim, k, rng);
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double alpha_star =
          minimal_triviality_alpha(privatize_povm(m, alpha));
      CHECK(alpha_star <= triviality_bound(alpha, k) + 1e-9);
    }
  }
}

TEST_CASE("triviality bound values") {
  CHECK(triviality_bound(0.5, 2) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(triviality_bound(0.5, 4) == doctest::Approx(std::log(6.0)).epsilon(1e-15));
  CHECK(triviality_bound(1e-9, 2) < 1e-8);  // fully randomized limit
  CHECK_THROWS_AS(triviality_bound(0.0, 2), ValidationError);
  CHECK_THROWS_AS(triviality_bound(1.0, 2), ValidationError);
}

TEST_CASE("debias formula") {
  CHECK(debias(0.7, 1.0) == 0.7);   // identity at alpha = 1
  CHECK(debias(1.0, 0.3) == doctest::Approx(1.0).epsilon(1e-15));  // fixed point
  CHECK(debias(2.0, 0.5) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(debias(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(debias(1.0, 1.5), ValidationError);
  // Recentring about baseline 1 reproduces the plain formula.
  CHECK(debias_about(2.0, 0.5, 1.0) == debias(2.0, 0.5));
}

TEST_CASE("debiased mixture identity: exact unbiasedness") {
  // sum_i z(label_i) Tr(E_i' rho) == E[M(rho)], deterministically, for random
  // measurements, states and mixing levels.
  RngStream rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const Index dim = 2 + static_cast<Index>(rng.next_below(5));
    const std::size_t k = 1 + rng.next_below(5);
    const Povm m = random_povm(dim, k, rng);
    const DensityMatrix rho = random_density_matrix(dim, rng);
    const double alpha = rng.next_uniform(0.05, 0.95);

    const Povm privatized = privatize_povm(m, alpha);
    const double baseline = m.label_mean();
    double mixture = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      mixture += debias_about(m.label(i), alpha, baseline) *
                 test::born_probability(privatized.effect(i).mat(), rho.mat());
    }
    CHECK(std::abs(mixture - expectation(m, rho)) <= 1e-9);
  }
}

TEST_CASE("required samples: frozen values and scaling") {
  CHECK(required_samples(2, 0.1, 0.5, 0.05) == 2952);
  // Doubling tau divides the pre-ceiling count by 4.
  CHECK(required_samples(2, 0.2, 0.5, 0.05) == 738);
  // Degenerate single-outcome measurement still follows the formula.
  CHECK(required_samples(1, 0.1, 0.5, 0.05) == 738);
  CHECK_THROWS_AS(required_samples(2, 0.0, 0.5, 0.05), ValidationError);
  CHECK_THROWS_AS(required_samples(2, 0.1, 1.0, 0.05), ValidationError);
  CHECK_THROWS_AS(required_samples(2, 0.1, 0.5, 0.0), ValidationError);
}

TEST_CASE("estimator over the oracle") {
  SUBCASE("constant labels estimate exactly") {
    const Povm constant = test::diag_pair_povm(0.3, 0.6, {2.5, 2.5});
    QldpOracle oracle(ProductState::copies(test::maximally_mixed(2), 10), 2.0,
                      RngStream(1));
    std::vector<std::size_t> registers(10);
    std::iota(registers.begin(), registers.end(), std::size_t{0});
    CHECK(estimate_expectation_via_qldp(oracle, registers, constant, 0.5) ==
          doctest::Approx(2.5).epsilon(1e-12));
  }

  SUBCASE("no registers is invalid") {
    QldpOracle oracle(ProductState::copies(test::maximally_mixed(2), 1), 2.0,
                      RngStream(2));
    std::vector<std::size_t> none;
    CHECK_THROWS_AS(
        estimate_expectation_via_qldp(oracle, none, test::projective_pair(), 0.5),
        ValidationError);
  }

  SUBCASE("duplicate registers are invalid") {
    QldpOracle oracle(ProductState::copies(test::maximally_mixed(2), 3), 2.0,
                      RngStream(3));
    std::vector<std::size_t> dup{0, 1, 1};
    CHECK_THROWS_AS(
        estimate_expectation_via_qldp(oracle, dup, test::projective_pair(), 0.5),
        ValidationError);
  }

  SUBCASE("insufficient budget propagates") {
    QldpOracle oracle(ProductState::copies(test::maximally_mixed(2), 2), 0.5,
                      RngStream(4));
    std::vector<std::size_t> registers{0, 1};
    CHECK_THROWS_AS(
        estimate_expectation_via_qldp(oracle, registers, test::projective_pair(),
                                      0.5),
        BudgetExceededError);
  }

  SUBCASE("seeded runs at the prescribed sample count stay within tolerance") {
    // Exact expectation 1.5; tau = 0.1. The Chernoff-sized estimate misses
    // with probability far below a percent, so ten seeded runs must all land.
    const Povm m = test::projective_pair();
    const std::int64_t n = required_samples(2, 0.1, 0.5, 0.05);
    REQUIRE(n == 2952);
    std::vector<std::size_t> registers(static_cast<std::size_t>(n));
    std::iota(registers.begin(), registers.end(), std::size_t{0});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      QldpOracle oracle(
          ProductState::copies(test::maximally_mixed(2), registers.size()),
          triviality_bound(0.5, 2), RngStream(seed));
      const double estimate =
          estimate_expectation_via_qldp(oracle, registers, m, 0.5);
      CHECK(std::abs(estimate - 1.5) <= 0.1);
      // Exactly one charge per register.
      for (std::uint32_t count : oracle.query_counts()) {
        CHECK(count == 1);
      }
    }
  }
}

TEST_CASE("nonadaptive simulation dedicates fresh registers per query") {
  const DensityMatrix state = test::maximally_mixed(2);
  QsqQueryPlan plan;
  for (int j = 0; j < 3; ++j) {
    plan.queries.push_back({test::projective_pair(), 0.1});
  }

  const QsqSimulationResult result =
      simulate_nonadaptive_qsq(plan, state, 0.5, 0.05, RngStream(99));

  // Frozen sample counts: ceil(4 ln(2 t / beta) / (2 tau^2 alpha^2)) at
  // t = 3, beta = 0.05 is 3830 per query.
  CHECK(result.samples_per_query ==
        std::vector<std::int64_t>{3830, 3830, 3830});
  CHECK(result.total_qldp_queries == 11490);
  CHECK(result.budget == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  REQUIRE(result.estimates.size() == 3);
  for (double estimate : result.estimates) {
    CHECK(std::abs(estimate - 1.5) <= 0.1);
  }
  // Noninteractive discipline: every register measured at most once, and all
  // of them exactly once here.
  for (std::uint32_t count : result.query_counts) {
    CHECK(count == 1);
  }
}

TEST_CASE("single-query simulation reduces to the plain estimator") {
  const DensityMatrix state = test::maximally_mixed(2);
  QsqQueryPlan plan;
  plan.queries.push_back({test::projective_pair(), 0.1});

  const QsqSimulationResult via_plan =
      simulate_nonadaptive_qsq(plan, state, 0.5, 0.05, RngStream(7));

  const std::int64_t n = required_samples(2, 0.1, 0.5, 0.05);
  CHECK(via_plan.samples_per_query == std::vector<std::int64_t>{n});

  QldpOracle oracle(ProductState::copies(state, static_cast<std::size_t>(n)),
                    triviality_bound(0.5, 2), RngStream(7));
  std::vector<std::size_t> registers(static_cast<std::size_t>(n));
  std::iota(registers.begin(), registers.end(), std::size_t{0});
  const double direct = estimate_expectation_via_qldp(
      oracle, registers, test::projective_pair(), 0.5);

  CHECK(via_plan.estimates[0] == direct);
}

TEST_CASE("nonadaptive simulation validates the plan") {
  const DensityMatrix state = test::maximally_mixed(2);
  QsqQueryPlan plan;
  plan.queries.push_back({test::projective_pair(), 0.1});

  QsqQueryPlan adaptive = plan;
  adaptive.nonadaptive = false;
  CHECK_THROWS_AS(simulate_nonadaptive_qsq(adaptive, state, 0.5, 0.05, RngStream(1)),
                  ValidationError);

  QsqQueryPlan bad_tau = plan;
  bad_tau.queries[0].tolerance = 0.0;
  CHECK_THROWS_AS(simulate_nonadaptive_qsq(bad_tau, state, 0.5, 0.05, RngStream(1)),
                  ValidationError);

  CHECK_THROWS_AS(simulate_nonadaptive_qsq(plan, state, 1.0, 0.05, RngStream(1)),
                  ValidationError);
  CHECK_THROWS_AS(simulate_nonadaptive_qsq(QsqQueryPlan{}, state, 0.5, 0.05,
                                           RngStream(1)),
                  ValidationError);
}

TEST_CASE("outcome indicator measurement") {
  const Povm m = test::diag_pair_povm(0.75, 0.25);
  const Povm indicator = outcome_indicator_povm(m, 1);
  CHECK(indicator.labels() == std::vector<double>{0.0, 1.0});

  RngStream rng(31);
  const DensityMatrix rho = random_density_matrix(2, rng);
  CHECK(expectation(indicator, rho) ==
        doctest::Approx(test::born_probability(m.effect(1).mat(), rho.mat()))
            .epsilon(1e-12));
  CHECK_THROWS_AS(outcome_indicator_povm(m, 2), ValidationError);
}

TEST_CASE("rejection sampler on the fully randomized pair") {
  // q = p = (1/2, 1/2), eps = 0: acceptance probability is 1/(1+tau) each
  // iteration and the conditional output stays fair.
  const Povm coin = test::uninformative_pair();
  const double tau = 0.05;
  QsqOracle oracle(test::maximally_mixed(2), QsqNoiseMode::kExact, RngStream(1));
  RngStream rng(2);

  int zeros = 0;
  std::int64_t iterations = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const RejectionSampleResult result =
        rejection_sample_measurement(oracle, coin, 0.0, tau, nullptr, 0, rng);
    zeros += result.outcome_index == 0;
    iterations += result.iterations;
    CHECK(result.clamp_events == 0);
  }
  CHECK(static_cast<double>(zeros) / n == doctest::Approx(0.5).epsilon(0.06));
  CHECK(static_cast<double>(iterations) / n ==
        doctest::Approx(1.0 + tau).epsilon(0.03));
}

TEST_CASE("rejection sampler respects its preconditions") {
  QsqOracle oracle(test::maximally_mixed(2), QsqNoiseMode::kExact, RngStream(1));
  RngStream rng(2);

  // Projective measurements are infinitely revealing: no epsilon admits them.
  CHECK_THROWS_AS(rejection_sample_measurement(oracle, test::projective_pair(),
                                               1.0, 0.05, nullptr, 0, rng),
                  NotTrivialEnoughError);

  const Povm coin = test::uninformative_pair();
  CHECK_THROWS_AS(
      rejection_sample_measurement(oracle, coin, 0.0, 0.4, nullptr, 0, rng),
      ValidationError);
  CHECK_THROWS_AS(
      rejection_sample_measurement(oracle, coin, -1.0, 0.05, nullptr, 0, rng),
      ValidationError);

  // A tiny iteration cap at a large epsilon forces the failure path.
  CHECK_THROWS_AS(
      rejection_sample_measurement(oracle, coin, 5.0, 0.05, nullptr, 1, rng),
      MaxIterationsExceededError);
}

TEST_CASE("rejection sampler accepts an explicit proposal") {
  const Povm tilted = test::diag_pair_povm(0.6, 0.4);
  const double eps = minimal_triviality_alpha(tilted);
  QsqOracle oracle(test::maximally_mixed(2), QsqNoiseMode::kExact, RngStream(5));
  RngStream rng(6);
  const DensityMatrix proposal = test::maximally_mixed(2);
  const RejectionSampleResult result = rejection_sample_measurement(
      oracle, tilted, eps, 0.05, &proposal, 0, rng);
  CHECK(result.outcome_index < 2);
  CHECK(result.iterations >= 1);
}

TEST_CASE("noninteractive simulation sets tau = beta / (3t)") {
  const Povm coin = test::uninformative_pair();

  QldpQueryPlan plan;
  plan.queries.push_back({0, coin, 0.0});
  QsqOracle oracle(test::maximally_mixed(2), QsqNoiseMode::kExact, RngStream(1));
  const QldpSimulationResult single =
      simulate_noninteractive_qldp(plan, oracle, 0.3, RngStream(2));
  CHECK(single.tau == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(single.total_qsq_queries == single.iterations_per_query[0]);

  QldpQueryPlan ten;
  for (int i = 0; i < 10; ++i) {
    ten.queries.push_back({static_cast<std::size_t>(i), coin, 0.0});
  }
  QsqOracle oracle2(test::maximally_mixed(2), QsqNoiseMode::kExact, RngStream(3));
  const QldpSimulationResult result =
      simulate_noninteractive_qldp(ten, oracle2, 0.3, RngStream(4));
  CHECK(result.tau == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(result.outcome_labels.size() == 10);
  // Every accepted outcome costs at least one expectation query.
  CHECK(result.total_qsq_queries >= 10);

  QldpQueryPlan interactive = ten;
  interactive.noninteractive = false;
  CHECK_THROWS_AS(
      simulate_noninteractive_qldp(interactive, oracle2, 0.3, RngStream(5)),
      ValidationError);
}

TEST_CASE("noninteractive simulation propagates triviality violations") {
  QldpQueryPlan plan;
  plan.queries.push_back({0, test::diag_pair_povm(0.75, 0.25), 0.5});  // needs ln 3
  QsqOracle oracle(test::maximally_mixed(2), QsqNoiseMode::kExact, RngStream(1));
  CHECK_THROWS_AS(simulate_noninteractive_qldp(plan, oracle, 0.3, RngStream(2)),
                  NotTrivialEnoughError);
}
