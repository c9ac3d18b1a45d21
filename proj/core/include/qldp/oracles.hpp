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
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qldp/measurement.hpp"

namespace qldp {

// Slack granted when comparing a computed triviality against a declared one,
// absorbing eigensolver round-off only.
inline constexpr double kTrivialityVerifySlack = 1e-9;

enum class QsqNoiseMode {
  kExact,               // answer = E[M(rho)]
  kUniform,             // + Uniform(-tau, tau)
  kAdversarialExtreme,  // +/- tau with a fair coin
};

std::string_view to_string(QsqNoiseMode mode);
QsqNoiseMode parse_qsq_noise_mode(std::string_view text);

struct QsqLogEntry {
  Digest povm_digest{};
  double tolerance = 0.0;
  double answer = 0.0;
};

/// Statistical-query oracle over a fixed state: answers expectation queries
/// up to an additive tolerance, under a configurable noise model. Every
/// answer is appended to a digest-keyed log so the tolerance contract can be
/// replayed and audited.
class QsqOracle {
 public:
  QsqOracle(DensityMatrix state, QsqNoiseMode mode, RngStream rng);

  /// Answer within `tolerance` of E[M(state)].
  double query(const Povm& m, double tolerance);

  const DensityMatrix& state() const { return state_; }
  QsqNoiseMode noise_mode() const { return mode_; }
  const std::vector<QsqLogEntry>& log() const { return log_; }
  std::size_t query_count() const { return log_.size(); }

 private:
  DensityMatrix state_;
  QsqNoiseMode mode_;
  RngStream rng_;
  std::vector<QsqLogEntry> log_;
};

/// Budget-enforcing local-privacy oracle over a product state.
///
/// A query names a register and declares a triviality level; the oracle
/// verifies the declaration itself (over all density matrices), checks the
/// per-register ledger, and only then samples. Rejected queries have no side
/// effects: no ledger charge and no sampling randomness consumed. Measured
/// registers are replaced by fresh copies, so the held state never changes.
class QldpOracle {
 public:
  QldpOracle(ProductState registers, double budget, RngStream rng);

  /// Born-rule outcome on register `register_index`; charges
  /// `declared_alpha` to that register's ledger.
  /// Throws NotTrivialEnoughError when the measurement's triviality exceeds
  /// the declaration, BudgetExceededError when the charge would cross the
  /// budget.
  Outcome query(std::size_t register_index, const Povm& m, double declared_alpha);

  double budget() const { return budget_; }
  double remaining_budget(std::size_t register_index) const;
  const std::vector<double>& ledger() const { return ledger_; }
  const std::vector<std::uint32_t>& query_counts() const { return query_counts_; }
  std::size_t num_registers() const { return registers_.num_registers(); }
  const ProductState& registers() const { return registers_; }

 private:
  struct ProbKey {
    Digest digest{};
    const DensityMatrix* state = nullptr;
    bool operator==(const ProbKey&) const = default;
  };
  struct ProbKeyHash {
    std::size_t operator()(const ProbKey& k) const;
  };

  const std::vector<double>& cached_probabilities(std::size_t register_index,
                                                  const Povm& m);

  ProductState registers_;
  double budget_;
  std::vector<double> ledger_;
  std::vector<std::uint32_t> query_counts_;
  RngStream rng_;
  // One probability vector per (measurement, backing state); registers that
  // share a state copy share the cache entry.
  std::unordered_map<ProbKey, std::vector<double>, ProbKeyHash> prob_cache_;
};

}  // namespace qldp
