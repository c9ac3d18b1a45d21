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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qldp/learning.hpp"

namespace qldp {

/// Named experiment families; each reproduces one verification claim at
/// scale with per-trial seeded streams.
enum class ExperimentKind {
  kTrivialityBound,         // privatized measurements stay under their bound
  kEstimatorConcentration,  // debiased estimator error vs tolerance
  kRejectionDistortion,     // exact conditional-output distortion analysis
  kTerminationRate,         // rejection-sampler iteration counts
  kParityE2e,               // locally private parity learning end to end
  kDpCheckSuite,            // dp checker vs set-triviality consistency
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

using ParamValue = std::variant<double, std::vector<double>>;

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kTrivialityBound;
  std::uint64_t master_seed = 0;
  std::int64_t trials = 0;  // 0 selects the kind's default
  int parallelism = 1;
  std::map<std::string, ParamValue> parameters;  // kind-specific; unknown keys rejected
};

/// Strict config parsing; CLI flags override file values at the call site.
ExperimentConfig parse_experiment_config(const std::string& text);

struct TrialRecord {
  std::int64_t index = 0;
  bool ok = true;
  std::string error;
  std::vector<std::pair<std::string, double>> values;  // stable per-kind order
};

struct ThresholdCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool less_is_pass = true;  // pass when value <= limit (else value >= limit)
  bool pass = false;
};

struct Report {
  ExperimentConfig config;
  std::string version;
  std::vector<TrialRecord> trials;
  std::vector<std::pair<std::string, double>> aggregates;
  std::vector<ThresholdCheck> thresholds;
  bool pass = false;
  double wall_seconds = 0.0;
};

/// Runs `trials` independent seeded trials (parallelism is scheduling only;
/// per-trial records depend solely on master_seed, trial index, and
/// parameters), aggregates, and evaluates the kind's pinned thresholds.
/// Trial-level errors are recorded without aborting the batch.
Report run_experiment(const ExperimentConfig& config);

/// One row per trial, stable column order documented by the header line;
/// identical configs produce byte-identical files.
void emit_csv(const Report& report, const std::filesystem::path& path);

std::string report_to_json(const Report& report);

}  // namespace qldp
