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

TEST_CASE("parity concepts: strings, masks and evaluation") {
  const ParityConcept p = ParityConcept::from_string("1011");
  CHECK(p.num_bits() == 4);
  CHECK(p.to_string() == "1011");
  CHECK(p.bit(0) == 1);
  CHECK(p.bit(1) == 0);
  CHECK(p.bit(2) == 1);
  CHECK(p.bit(3) == 1);
  // s . x mod 2 with x = 0b1000 (bitstring "1000"): only s_0 contributes.
  CHECK(p.evaluate(0b1000) == 1);
  CHECK(p.evaluate(0b0100) == 0);
  CHECK(p.evaluate(0b0011) == 0);  // two set bits cancel
  CHECK_THROWS_AS(ParityConcept::from_string("10x1"), ValidationError);
  CHECK_THROWS_AS(ParityConcept(2, 0b100), ValidationError);
}

TEST_CASE("random parity concepts stay within the dimension") {
  RngStream rng(1);
  for (int i = 0; i < 50; ++i) {
    const ParityConcept p = ParityConcept::random(5, rng);
    CHECK((p.mask() >> 5) == 0);
  }
}

TEST_CASE("example distributions") {
  const ExampleDistribution uniform = ExampleDistribution::uniform(3);
  CHECK(uniform.weight(5) == doctest::Approx(0.125).epsilon(1e-15));

  const ExampleDistribution point = ExampleDistribution::point_mass(3, 6);
  CHECK(point.weight(6) == 1.0);
  CHECK(point.weight(0) == 0.0);

  CHECK_THROWS_AS(ExampleDistribution(2, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(ExampleDistribution(1, {0.4, 0.4}), ValidationError);
  CHECK_THROWS_AS(ExampleDistribution(1, {1.2, -0.2}), ValidationError);
  CHECK_THROWS_AS(ExampleDistribution::point_mass(2, 4), ValidationError);
}

TEST_CASE("quantum example state for one-bit parities") {
  SUBCASE("s = 1: (|0,0> + |1,1>)/sqrt(2)") {
    const DensityMatrix rho = quantum_example_state(
        ParityConcept::from_string("1"), ExampleDistribution::uniform(1));
    CMatrix want = CMatrix::Zero(4, 4);
    want(0, 0) = want(0, 3) = want(3, 0) = want(3, 3) = 0.5;
    CHECK(max_abs(rho.mat() - want) <= 1e-12);
  }
  SUBCASE("s = 0: (|0,0> + |1,0>)/sqrt(2)") {
    const DensityMatrix rho = quantum_example_state(
        ParityConcept::from_string("0"), ExampleDistribution::uniform(1));
    CMatrix want = CMatrix::Zero(4, 4);
    want(0, 0) = want(0, 2) = want(2, 0) = want(2, 2) = 0.5;
    CHECK(max_abs(rho.mat() - want) <= 1e-12);
  }
  SUBCASE("point mass collapses to a labeled basis state") {
    const ParityConcept s = ParityConcept::from_string("11");
    const DensityMatrix rho = quantum_example_state(
        s, ExampleDistribution::point_mass(2, 0b10));
    // x = "10", c(x) = 1: the basis state |10,1>.
    CHECK(max_abs(rho.mat() - computational_basis_density(3, "101").mat()) <=
          1e-12);
  }
  SUBCASE("example states are pure") {
    RngStream rng(3);
    const DensityMatrix rho = quantum_example_state(
        ParityConcept::random(4, rng), ExampleDistribution::uniform(4));
    CHECK(max_abs(rho.mat() * rho.mat() - rho.mat()) <= 1e-9);
  }
  SUBCASE("dimension cap") {
    CHECK_THROWS_AS(quantum_example_state(ParityConcept(12, 0),
                                          ExampleDistribution::uniform(12)),
                    CapacityError);
  }
}

TEST_CASE("measuring the example state in the computational basis recovers "
          "labeled examples") {
  RngStream rng(9);
  for (int d : {1, 2, 3}) {
    const ParityConcept s = ParityConcept::random(d, rng);
    std::vector<double> weights(std::size_t{1} << d);
    double total = 0.0;
    for (double& w : weights) {
      w = rng.next_uniform(0.0, 1.0);
      total += w;
    }
    for (double& w : weights) {
      w /= total;
    }
    const ExampleDistribution dist(d, weights);
    const DensityMatrix rho = quantum_example_state(s, dist);

    const Index dim = Index{1} << (d + 1);
    std::vector<Operator> projectors;
    for (Index n = 0; n < dim; ++n) {
      projectors.emplace_back(CMatrix(basis_state_density(dim, n).mat()));
    }
    const auto probs = outcome_probabilities(Povm(std::move(projectors)), rho);
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << d); ++x) {
      const std::size_t hit = (x << 1) | static_cast<std::uint64_t>(s.evaluate(x));
      const std::size_t miss = (x << 1) | (1u - s.evaluate(x));
      CHECK(probs[hit] == doctest::Approx(dist.weight(x)).epsilon(1e-9));
      CHECK(probs[miss] <= 1e-12);
    }
  }
}

TEST_CASE("parity-bit measurement expectations are s_i / 2") {
  SUBCASE("named example d = 2, s = 10") {
    const ParityConcept s = ParityConcept::from_string("10");
    const DensityMatrix rho =
        quantum_example_state(s, ExampleDistribution::uniform(2));
    CHECK(expectation(parity_bit_povm(2, 0), rho) ==
          doctest::Approx(0.5).epsilon(1e-9));
    CHECK(expectation(parity_bit_povm(2, 1), rho) ==
          doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("all-zero parities never trigger the label branch") {
    const DensityMatrix rho = quantum_example_state(
        ParityConcept::from_string("000"), ExampleDistribution::uniform(3));
    for (int i = 0; i < 3; ++i) {
      CHECK(expectation(parity_bit_povm(3, i), rho) ==
            doctest::Approx(0.0).epsilon(1e-9));
    }
  }
  SUBCASE("brute force over every parity up to d = 5") {
    for (int d = 1; d <= 5; ++d) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
        const ParityConcept s(d, mask);
        const DensityMatrix rho =
            quantum_example_state(s, ExampleDistribution::uniform(d));
        for (int i = 0; i < d; ++i) {
          const double want = s.bit(i) / 2.0;
          CHECK(std::abs(expectation(parity_bit_povm(d, i), rho) - want) <=
                1e-9);
        }
      }
    }
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(parity_bit_povm(3, 3), ValidationError);
    CHECK_THROWS_AS(parity_bit_povm(3, -1), ValidationError);
    CHECK_THROWS_AS(parity_bit_povm(12, 0), CapacityError);
  }
}

TEST_CASE("expectation-query parity learner") {
  SUBCASE("named example: d = 4, s = 1011, exact oracle") {
    const DensityMatrix rho = quantum_example_state(
        ParityConcept::from_string("1011"), ExampleDistribution::uniform(4));
    QsqOracle oracle(rho, QsqNoiseMode::kExact, RngStream(1));
    CHECK(learn_parity_qsq(oracle, 4, 0.2).to_string() == "1011");
    CHECK(oracle.query_count() == 4);
  }
  SUBCASE("named example: all-zeros survives adversarial noise") {
    const DensityMatrix rho = quantum_example_state(
        ParityConcept::from_string("0000"), ExampleDistribution::uniform(4));
    QsqOracle oracle(rho, QsqNoiseMode::kAdversarialExtreme, RngStream(2));
    CHECK(learn_parity_qsq(oracle, 4, 0.2).to_string() == "0000");
  }
  SUBCASE("tolerance threshold is strict") {
    const DensityMatrix rho = quantum_example_state(
        ParityConcept::from_string("1"), ExampleDistribution::uniform(1));
    QsqOracle oracle(rho, QsqNoiseMode::kExact, RngStream(3));
    CHECK_THROWS_AS(learn_parity_qsq(oracle, 1, 0.3), ValidationError);
    CHECK_THROWS_AS(learn_parity_qsq(oracle, 1, 0.25), ValidationError);
  }
  SUBCASE("exact recovery for every target and noise mode up to d = 4") {
    RngStream seeds(5);
    for (int d = 1; d <= 4; ++d) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
        const DensityMatrix rho = quantum_example_state(
            ParityConcept(d, mask), ExampleDistribution::uniform(d));
        for (QsqNoiseMode mode :
             {QsqNoiseMode::kExact, QsqNoiseMode::kUniform,
              QsqNoiseMode::kAdversarialExtreme}) {
          QsqOracle oracle(rho, mode, RngStream(seeds.next_u64()));
          CHECK(learn_parity_qsq(oracle, d, 0.2).mask() == mask);
        }
      }
    }
  }
}

TEST_CASE("epsilon to alpha inversion") {
  CHECK(qldp_alpha_for_epsilon(1.0) ==
        doctest::Approx(0.36417532714874366).epsilon(1e-14));
  RngStream rng(6);
  for (int i = 0; i < 20; ++i) {
    const double eps = rng.next_uniform(0.05, 3.0);
    CHECK(triviality_bound(qldp_alpha_for_epsilon(eps), 2) ==
          doctest::Approx(eps).epsilon(1e-12));
  }
  CHECK_THROWS_AS(qldp_alpha_for_epsilon(0.0), ValidationError);
}

TEST_CASE("locally private parity learner fixtures") {
  // d = 8, eps = 1, beta = 0.1, tau = 0.2: 1914 copies per bit.
  const double alpha = qldp_alpha_for_epsilon(1.0);
  CHECK(required_samples(2, 0.2, alpha, 0.1 / 8) == 1914);
}

TEST_CASE("locally private parity learner at small scale") {
  const int d = 3;
  const double eps = 1.0;
  const double beta = 0.1;
  const double tau = 0.2;
  const ParityConcept target = ParityConcept::from_string("101");
  const DensityMatrix state =
      quantum_example_state(target, ExampleDistribution::uniform(d));

  const double alpha = qldp_alpha_for_epsilon(eps);
  const std::int64_t per_bit = required_samples(2, tau, alpha, beta / d);
  const std::int64_t needed = per_bit * d;

  SUBCASE("too few copies is an error") {
    CHECK_THROWS_AS(
        learn_parity_qldp(state, needed - 1, d, eps, beta, tau, RngStream(1)),
        InsufficientCopiesError);
  }

  SUBCASE("recovery, budget accounting and single-use registers") {
    const ParityQldpResult result =
        learn_parity_qldp(state, needed, d, eps, beta, tau, RngStream(2));
    CHECK(result.hypothesis == target);
    CHECK(result.samples_per_bit == per_bit);
    CHECK(result.copies_used == needed);
    CHECK(result.alpha == doctest::Approx(alpha).epsilon(1e-15));
    // Every register was measured exactly once and charged exactly epsilon.
    REQUIRE(result.ledger.size() == static_cast<std::size_t>(needed));
    for (std::size_t j = 0; j < result.ledger.size(); ++j) {
      CHECK(result.query_counts[j] == 1);
      CHECK(std::abs(result.ledger[j] - eps) <= 1e-9);
    }
    CHECK(generalization_error(result.hypothesis, target,
                               ExampleDistribution::uniform(d)) == 0.0);
  }

  SUBCASE("spare copies stay untouched") {
    const ParityQldpResult result = learn_parity_qldp(state, needed + 10, d, eps,
                                                      beta, tau, RngStream(3));
    CHECK(result.copies_used == needed);
    for (std::size_t j = static_cast<std::size_t>(needed);
         j < result.ledger.size(); ++j) {
      CHECK(result.ledger[j] == 0.0);
      CHECK(result.query_counts[j] == 0);
    }
  }

  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(
        learn_parity_qldp(state, needed, d, eps, beta, 0.25, RngStream(4)),
        ValidationError);
    CHECK_THROWS_AS(
        learn_parity_qldp(state, needed, d, eps, 1.0, tau, RngStream(5)),
        ValidationError);
    CHECK_THROWS_AS(
        learn_parity_qldp(test::maximally_mixed(4), needed, d, eps, beta, tau,
                          RngStream(6)),
        ValidationError);
  }
}

TEST_CASE("generalization error") {
  const ExampleDistribution uniform = ExampleDistribution::uniform(4);
  const ParityConcept a = ParityConcept::from_string("1011");
  const ParityConcept b = ParityConcept::from_string("0011");

  CHECK(generalization_error(a, a, uniform) == 0.0);
  // Distinct parities disagree on exactly half of all inputs.
  CHECK(generalization_error(a, b, uniform) == doctest::Approx(0.5).epsilon(1e-12));

  // Brute-force cross-check with explicit evaluation.
  double disagreements = 0.0;
  for (std::uint64_t x = 0; x < 16; ++x) {
    disagreements += a.evaluate(x) != b.evaluate(x) ? uniform.weight(x) : 0.0;
  }
  CHECK(generalization_error(a, b, uniform) ==
        doctest::Approx(disagreements).epsilon(1e-15));

  // Point mass where the hypotheses agree.
  CHECK(generalization_error(a, b, ExampleDistribution::point_mass(4, 0)) == 0.0);

  CHECK_THROWS_AS(generalization_error(a, ParityConcept::from_string("101"),
                                       uniform),
                  ValidationError);
}
