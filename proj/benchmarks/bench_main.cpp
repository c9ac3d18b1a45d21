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

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "qldp/qldp.hpp"

namespace {

using namespace qldp;

void BM_Tensor(benchmark::State& state) {
  const Index dim = state.range(0);
  RngStream rng(1);
  const DensityMatrix a = random_density_matrix(dim, rng);
  const Operator op_a(CMatrix(a.mat()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tensor(op_a, op_a, 1 << 20));
  }
}
BENCHMARK(BM_Tensor)->Arg(4)->Arg(16)->Arg(64);

void BM_OutcomeProbabilities(benchmark::State& state) {
  const Index dim = state.range(0);
  RngStream rng(2);
  const Povm m = random_povm(dim, 4, rng);
  const DensityMatrix rho = random_density_matrix(dim, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(outcome_probabilities(m, rho));
  }
}
BENCHMARK(BM_OutcomeProbabilities)->Arg(8)->Arg(64)->Arg(256);

void BM_MinimalTrivialityUncached(benchmark::State& state) {
  const Index dim = state.range(0);
  RngStream rng(3);
  // A fresh measurement each round defeats the digest cache, so this times
  // the eigendecomposition path.
  std::vector<Povm> pool;
  for (int i = 0; i < 16; ++i) {
    pool.push_back(random_povm(dim, 2, rng));
  }
  std::size_t next = 0;
  for (auto _ : state) {
    state.PauseTiming();
    if (next == pool.size()) {
      state.SkipWithError("pool exhausted");
      break;
    }
    const Povm& m = pool[next++];
    state.ResumeTiming();
    benchmark::DoNotOptimize(minimal_triviality_alpha(m));
  }
}
BENCHMARK(BM_MinimalTrivialityUncached)->Arg(16)->Arg(64)->Iterations(8);

void BM_SampleOutcome(benchmark::State& state) {
  RngStream rng(4);
  const Povm m = random_povm(4, 8, rng);
  const DensityMatrix rho = random_density_matrix(4, rng);
  RngStream draw(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_outcome(m, rho, draw));
  }
}
BENCHMARK(BM_SampleOutcome);

void BM_EstimateExpectation(benchmark::State& state) {
  const std::int64_t samples = state.range(0);
  RngStream rng(6);
  const Povm m = random_povm(2, 2, rng);
  const DensityMatrix rho = random_density_matrix(2, rng);
  std::vector<std::size_t> registers(static_cast<std::size_t>(samples));
  std::iota(registers.begin(), registers.end(), std::size_t{0});
  for (auto _ : state) {
    state.PauseTiming();
    QldpOracle oracle(ProductState::copies(rho, registers.size()),
                      triviality_bound(0.5, 2), RngStream(7));
    state.ResumeTiming();
    benchmark::DoNotOptimize(
        estimate_expectation_via_qldp(oracle, registers, m, 0.5));
  }
}
BENCHMARK(BM_EstimateExpectation)->Arg(2952);

void BM_RejectionSample(benchmark::State& state) {
  RngStream rng(8);
  const Povm m = privatize_povm(random_povm(4, 4, rng), 0.4);
  const double epsilon = minimal_triviality_alpha(m);
  const DensityMatrix rho = random_density_matrix(4, rng);
  QsqOracle oracle(rho, QsqNoiseMode::kExact, RngStream(9));
  RngStream draw(10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rejection_sample_measurement(oracle, m, epsilon, 0.05, nullptr, 0, draw));
  }
}
BENCHMARK(BM_RejectionSample);

void BM_ParityLearnerQldp(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RngStream rng(11);
  const ParityConcept target = ParityConcept::random(d, rng);
  const DensityMatrix example =
      quantum_example_state(target, ExampleDistribution::uniform(d));
  const double alpha = qldp_alpha_for_epsilon(1.0);
  const std::int64_t copies =
      d * required_samples(2, 0.2, alpha, 0.1 / d);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(learn_parity_qldp(example, copies, d, 1.0, 0.1,
                                               0.2, RngStream(seed++)));
  }
}
BENCHMARK(BM_ParityLearnerQldp)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
