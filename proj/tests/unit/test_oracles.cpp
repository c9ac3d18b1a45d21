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
#include <vector>

#include "test_helpers.hpp"

using namespace qldp;

namespace {
constexpr double kLn3 = 1.0986122886681098;
}

TEST_CASE("noise mode names round trip") {
  for (QsqNoiseMode mode : {QsqNoiseMode::kExact, QsqNoiseMode::kUniform,
                            QsqNoiseMode::kAdversarialExtreme}) {
    CHECK(parse_qsq_noise_mode(to_string(mode)) == mode);
  }
  CHECK_THROWS_AS(parse_qsq_noise_mode("loud"), ValidationError);
}

TEST_CASE("qsq oracle answers within tolerance in every mode") {
  const Povm m = test::projective_pair();

  SUBCASE("exact mode returns the expectation") {
    QsqOracle oracle(test::maximally_mixed(2), QsqNoiseMode::kExact, RngStream(1));
    CHECK(oracle.query(m, 0.3) == doctest::Approx(1.5).epsilon(1e-12));
  }

  SUBCASE("zero tolerance pins every mode to the expectation") {
    for (QsqNoiseMode mode : {QsqNoiseMode::kExact, QsqNoiseMode::kUniform,
                              QsqNoiseMode::kAdversarialExtreme}) {
      QsqOracle oracle(test::maximally_mixed(2), mode, RngStream(2));
      CHECK(oracle.query(m, 0.0) == doctest::Approx(1.5).epsilon(1e-12));
    }
  }

  SUBCASE("adversarial mode sits on the tolerance boundary") {
    QsqOracle oracle(test::maximally_mixed(2), QsqNoiseMode::kAdversarialExtreme,
                     RngStream(3));
    bool saw_low = false;
    bool saw_high = false;
    for (int i = 0; i < 64; ++i) {
      const double answer = oracle.query(m, 0.1);
      const bool low = answer == doctest::Approx(1.4).epsilon(1e-12);
      const bool high = answer == doctest::Approx(1.6).epsilon(1e-12);
      CHECK((low || high));
      saw_low = saw_low || low;
      saw_high = saw_high || high;
    }
    CHECK(saw_low);
    CHECK(saw_high);
  }

  SUBCASE("uniform mode stays inside the band") {
    QsqOracle oracle(test::maximally_mixed(2), QsqNoiseMode::kUniform, RngStream(4));
    for (int i = 0; i < 200; ++i) {
      CHECK(std::abs(oracle.query(m, 0.25) - 1.5) <= 0.25);
    }
  }

  SUBCASE("validation errors") {
    QsqOracle oracle(test::maximally_mixed(2), QsqNoiseMode::kExact, RngStream(5));
    CHECK_THROWS_AS(oracle.query(m, -0.1), ValidationError);
    QsqOracle big(test::maximally_mixed(4), QsqNoiseMode::kExact, RngStream(6));
    CHECK_THROWS_AS(big.query(m, 0.1), ValidationError);
  }
}

TEST_CASE("qsq log replays against the exact expectation in every mode") {
  RngStream rng(77);
  for (QsqNoiseMode mode : {QsqNoiseMode::kExact, QsqNoiseMode::kUniform,
                            QsqNoiseMode::kAdversarialExtreme}) {
    const DensityMatrix rho = random_density_matrix(3, rng);
    QsqOracle oracle(rho, mode, rng.split(17));

    std::vector<Povm> queries;
    std::vector<double> tolerances;
    for (int i = 0; i < 50; ++i) {
      queries.push_back(random_povm(3, 1 + rng.next_below(4), rng));
      tolerances.push_back(rng.next_uniform(0.0, 0.5));
      oracle.query(queries.back(), tolerances.back());
    }

    REQUIRE(oracle.log().size() == queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const QsqLogEntry& entry = oracle.log()[i];
      CHECK(entry.povm_digest == queries[i].digest());
      CHECK(entry.tolerance == tolerances[i]);
      CHECK(std::abs(entry.answer - expectation(queries[i], rho)) <=
            entry.tolerance + 1e-15);
    }
  }
}

TEST_CASE("qldp oracle enforces the per-register budget") {
  const Povm tilted = test::diag_pair_povm(0.75, 0.25);
  QldpOracle oracle(ProductState::copies(test::maximally_mixed(2), 3), 1.0,
                    RngStream(8));

  CHECK_NOTHROW(oracle.query(0, tilted, 0.6));
  CHECK(oracle.remaining_budget(0) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_THROWS_AS(oracle.query(0, tilted, 0.6), BudgetExceededError);
  // The rejected charge left the ledger untouched.
  CHECK(oracle.remaining_budget(0) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(oracle.query_counts()[0] == 1);
  // Other registers are unaffected.
  CHECK(oracle.remaining_budget(1) == 1.0);
}

TEST_CASE("qldp oracle verifies declared triviality itself") {
  QldpOracle oracle(ProductState::copies(test::maximally_mixed(2), 1), 2.0,
                    RngStream(9));

  SUBCASE("a fully randomized measurement passes at zero") {
    const Outcome outcome = oracle.query(0, test::uninformative_pair(), 0.0);
    CHECK(outcome.index < 2);
  }
  SUBCASE("underdeclaring raises NotTrivialEnough") {
    CHECK_THROWS_AS(oracle.query(0, test::diag_pair_povm(0.75, 0.25), 1.0),
                    NotTrivialEnoughError);
    // No charge was applied.
    CHECK(oracle.remaining_budget(0) == 2.0);
  }
  SUBCASE("declaring the exact level works") {
    CHECK_NOTHROW(oracle.query(0, test::diag_pair_povm(0.75, 0.25), kLn3));
  }
  SUBCASE("bad register index") {
    CHECK_THROWS_AS(oracle.query(5, test::uninformative_pair(), 0.0),
                    ValidationError);
    CHECK_THROWS_AS(oracle.remaining_budget(5), ValidationError);
  }
}

TEST_CASE("fresh-copy semantics: outcomes of one register stay distributed") {
  // 1e5 accepted queries against one register; the state is replaced by a
  // fresh copy each time, so frequencies track Tr(E_i rho).
  const Povm tilted = test::diag_pair_povm(0.75, 0.25);
  const DensityMatrix zero = computational_basis_density(1, "0");
  QldpOracle oracle(ProductState::copies(zero, 1), 2.0e5, RngStream(10));

  const int n = 100000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    zeros += oracle.query(0, tilted, kLn3).index == 0;
  }
  CHECK(static_cast<double>(zeros) / n == doctest::Approx(0.75).epsilon(0.02));
  CHECK(oracle.query_counts()[0] == n);
}

TEST_CASE("rejected queries consume no sampling randomness") {
  const Povm tilted = test::diag_pair_povm(0.75, 0.25);
  const DensityMatrix zero = computational_basis_density(1, "0");

  QldpOracle clean(ProductState::copies(zero, 4), 1.2, RngStream(12));
  QldpOracle noisy(ProductState::copies(zero, 4), 1.2, RngStream(12));

  std::vector<std::size_t> clean_outcomes;
  std::vector<std::size_t> noisy_outcomes;
  for (std::size_t j = 0; j < 4; ++j) {
    clean_outcomes.push_back(clean.query(j, tilted, kLn3).index);

    // Interleave rejected attempts: over-budget and not-trivial-enough.
    CHECK_THROWS_AS(noisy.query(j, tilted, 1.3), BudgetExceededError);
    CHECK_THROWS_AS(noisy.query(j, test::projective_pair(), kLn3),
                    NotTrivialEnoughError);
    noisy_outcomes.push_back(noisy.query(j, tilted, kLn3).index);
  }
  CHECK(clean_outcomes == noisy_outcomes);
  CHECK(clean.ledger() == noisy.ledger());
}

TEST_CASE("randomized interleavings match a reference ledger model") {
  RngStream driver(1234);
  for (int round = 0; round < 20; ++round) {
    const double budget = driver.next_uniform(0.2, 2.0);
    const std::size_t registers = 1 + driver.next_below(4);
    QldpOracle oracle(
        ProductState::copies(test::maximally_mixed(2), registers), budget,
        RngStream(driver.next_u64()));

    std::vector<double> model(registers, 0.0);
    for (int step = 0; step < 500; ++step) {
      const std::size_t j = driver.next_below(registers);
      const double mix = driver.next_uniform(0.05, 0.95);
      const Povm m = privatize_povm(test::projective_pair(), mix);
      const double declared = triviality_bound(mix, 2);

      const bool should_reject = model[j] + declared > budget;
      bool rejected = false;
      try {
        oracle.query(j, m, declared);
      } catch (const BudgetExceededError&) {
        rejected = true;
      }
      CHECK(rejected == should_reject);
      if (!rejected) {
        model[j] += declared;
      }
      CHECK(oracle.ledger()[j] == model[j]);
      CHECK(model[j] <= budget);
    }
  }
}
