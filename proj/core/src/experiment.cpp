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

#include "qldp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qldp/io.hpp"
#include "qldp/version.hpp"

namespace qldp {

namespace {

using nlohmann::json;

// Reserved split index for streams shared by all trials of one experiment
// (e.g. a fixed random instance); trial streams use the trial index.
constexpr std::uint64_t kSetupSplit = 0xffffffffffffffffull;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ParamSpec {
  const char* name;
  ParamValue default_value;
};

struct KindSpec {
  ExperimentKind kind;
  const char* name;
  std::int64_t default_trials;
  std::vector<ParamSpec> params;
  std::vector<const char*> record_columns;
};

const std::vector<KindSpec>& kind_specs() {
  static const std::vector<KindSpec> specs = {
      {ExperimentKind::kTrivialityBound,
       "triviality-bound",
       100,
       {{"max_dim", 8.0},
        {"max_outcomes", 5.0},
        {"alphas", std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9}}},
       {"dim", "num_outcomes", "max_violation"}},
      {ExperimentKind::kEstimatorConcentration,
       "estimator-concentration",
       200,
       {{"dim", 2.0}, {"num_outcomes", 2.0}, {"tau", 0.1}, {"alpha", 0.5},
        {"delta", 0.05}},
       {"exact", "estimate", "abs_error", "fail"}},
      {ExperimentKind::kRejectionDistortion,
       "rejection-distortion",
       60,
       {{"max_dim", 4.0}, {"max_outcomes", 4.0}, {"epsilon_cap", 1.5},
        {"tau", 0.05}},
       {"dim", "num_outcomes", "alpha", "epsilon", "min_q", "distortion_dev",
        "termination_dev", "clamp_events", "cond_holds", "cond_violation"}},
      {ExperimentKind::kTerminationRate,
       "termination-rate",
       10000,
       {{"epsilon", 1.0}, {"tau", 0.05}, {"dim", 2.0}, {"num_outcomes", 2.0}},
       {"iterations", "clamp_events"}},
      {ExperimentKind::kParityE2e,
       "parity-e2e",
       50,
       {{"d", 8.0}, {"epsilon", 1.0}, {"beta", 0.1}, {"tau", 0.2}},
       {"success", "copies", "charge_dev", "reuse_violations", "bits_wrong"}},
      {ExperimentKind::kDpCheckSuite,
       "dp-check-suite",
       50,
       {{"max_dim", 3.0}, {"max_outcomes", 3.0}},
       {"dim", "num_outcomes", "alpha_set", "agree"}},
  };
  return specs;
}

const KindSpec& spec_for(ExperimentKind kind) {
  for (const auto& spec : kind_specs()) {
    if (spec.kind == kind) {
      return spec;
    }
  }
  throw ValidationError("unknown experiment kind");
}

// Parameters with defaults applied and unknown keys rejected.
struct ResolvedParams {
  std::map<std::string, ParamValue> values;

  double get(const std::string& name) const {
    const auto* v = std::get_if<double>(&values.at(name));
    if (v == nullptr) {
      throw ValidationError("parameter " + name + " must be a number");
    }
    return *v;
  }
  std::int64_t get_int(const std::string& name) const {
    const double v = get(name);
    if (v != std::floor(v)) {
      throw ValidationError("parameter " + name + " must be an integer");
    }
    return static_cast<std::int64_t>(v);
  }
  std::vector<double> get_list(const std::string& name) const {
    const auto& value = values.at(name);
    if (const auto* list = std::get_if<std::vector<double>>(&value)) {
      return *list;
    }
    return {std::get<double>(value)};
  }
};

ResolvedParams resolve_params(const KindSpec& spec,
                              const std::map<std::string, ParamValue>& given) {
  ResolvedParams resolved;
  for (const auto& param : spec.params) {
    resolved.values.emplace(param.name, param.default_value);
  }
  for (const auto& [name, value] : given) {
    auto it = resolved.values.find(name);
    if (it == resolved.values.end()) {
      throw ValidationError("unknown parameter \"" + name + "\" for kind " +
                            std::string(spec.name));
    }
    it->second = value;
  }
  return resolved;
}

void push(TrialRecord& record, const char* name, double value) {
  record.values.emplace_back(name, value);
}

Index pick_dim(RngStream& rng, std::int64_t max_dim) {
  return 2 + static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(max_dim - 1)));
}

std::size_t pick_outcomes(RngStream& rng, std::int64_t max_outcomes, std::size_t lo) {
  return lo + static_cast<std::size_t>(
                  rng.next_below(static_cast<std::uint64_t>(max_outcomes) - lo + 1));
}

// alpha with triviality_bound(alpha, k) == target
double alpha_for_bound(double target, std::size_t num_outcomes) {
  const double e = std::exp(target);
  return (e - 1.0) / (e + static_cast<double>(num_outcomes));
}

// ---------------------------------------------------------------------------
// Trial bodies. Each is a pure function of (params, trial stream).

void trial_triviality_bound(const ResolvedParams& params, RngStream rng,
                            TrialRecord& record) {
  const Index dim = pick_dim(rng, params.get_int("max_dim"));
  const std::size_t k = pick_outcomes(rng, params.get_int("max_outcomes"), 1);
  const Povm m = random_povm(dim, k, rng);

  double max_violation = -kInf;
  for (double alpha : params.get_list("alphas")) {
    const double bound = triviality_bound(alpha, k);
    const double alpha_star = minimal_triviality_alpha(privatize_povm(m, alpha));
    max_violation = std::max(max_violation, alpha_star - bound);
  }
  push(record, "dim", static_cast<double>(dim));
  push(record, "num_outcomes", static_cast<double>(k));
  push(record, "max_violation", max_violation);
}

void trial_estimator_concentration(const ResolvedParams& params, RngStream rng,
                                   TrialRecord& record) {
  const Index dim = params.get_int("dim");
  const std::size_t k = static_cast<std::size_t>(params.get_int("num_outcomes"));
  const double tau = params.get("tau");
  const double alpha = params.get("alpha");
  const double delta = params.get("delta");

  const Povm m = random_povm(dim, k, rng);
  const DensityMatrix rho = random_density_matrix(dim, rng);
  const double exact = expectation(m, rho);

  const std::int64_t n = required_samples(k, tau, alpha, delta);
  QldpOracle oracle(ProductState::copies(rho, static_cast<std::size_t>(n)),
                    triviality_bound(alpha, k), rng.split(1));
  std::vector<std::size_t> registers(static_cast<std::size_t>(n));
  std::iota(registers.begin(), registers.end(), std::size_t{0});
  const double estimate = estimate_expectation_via_qldp(oracle, registers, m, alpha);

  const double abs_error = std::abs(estimate - exact);
  push(record, "exact", exact);
  push(record, "estimate", estimate);
  push(record, "abs_error", abs_error);
  push(record, "fail", abs_error > tau ? 1.0 : 0.0);
}

void trial_rejection_distortion(const ResolvedParams& params, RngStream rng,
                                TrialRecord& record) {
  const double tau = params.get("tau");
  const double epsilon_cap = params.get("epsilon_cap");

  Index dim = pick_dim(rng, params.get_int("max_dim"));
  std::size_t k = pick_outcomes(rng, params.get_int("max_outcomes"), 2);
  double alpha;
  if (record.index % 3 == 0) {
    // Mildly randomized two-outcome instances keep the proposal mass large
    // enough for the clamp-free condition tau <= e^-eps min_q / 2.
    k = 2;
    alpha = rng.next_uniform(0.05, 0.15);
  } else {
    alpha = rng.next_uniform(0.05, alpha_for_bound(epsilon_cap, k));
  }

  const Povm m = privatize_povm(random_povm(dim, k, rng), alpha);
  const double epsilon = minimal_triviality_alpha(m);
  const DensityMatrix rho = random_density_matrix(dim, rng);
  const std::vector<double> p = outcome_probabilities(m, rho);
  const std::vector<double> q =
      outcome_probabilities(m, basis_state_density(dim, 0));
  const double min_q = *std::min_element(q.begin(), q.end());

  // Exact enumeration, no sampling: for every sign field sigma in {+-1}^k the
  // oracle answers p~(w) = (1 + sigma_w tau) p(w) (a worst-case answer within
  // the additive-tau contract, since p <= 1), and the conditional output of
  // the sampler is q(w) a(w) / sum_v q(v) a(v).
  const double scale = std::exp(epsilon) * (1.0 + tau);
  double distortion_dev = -kInf;
  double termination_dev = -kInf;
  std::int64_t clamp_events = 0;

  for (std::uint64_t signs = 0; signs < (std::uint64_t{1} << k); ++signs) {
    std::vector<double> accept(k);
    bool clamped = false;
    for (std::size_t w = 0; w < k; ++w) {
      const double sign = (signs >> w) & 1 ? 1.0 : -1.0;
      const double p_tilde = (1.0 + sign * tau) * p[w];
      double a = p_tilde / (scale * q[w]);
      if (a > 1.0 || a < 0.0) {
        ++clamp_events;
        clamped = true;
        a = std::clamp(a, 0.0, 1.0);
      }
      accept[w] = a;
    }
    if (clamped) {
      continue;  // distortion bound is asserted on clamp-free fields only
    }
    double p_terminate = 0.0;
    for (std::size_t w = 0; w < k; ++w) {
      p_terminate += q[w] * accept[w];
    }
    termination_dev =
        std::max({termination_dev,
                  p_terminate - (1.0 + tau) / scale,
                  (1.0 - tau) / scale - p_terminate});
    for (std::size_t w = 0; w < k; ++w) {
      const double out = q[w] * accept[w] / p_terminate;
      distortion_dev = std::max({distortion_dev,
                                 out - (1.0 + 3.0 * tau) * p[w],
                                 (1.0 - 3.0 * tau) * p[w] - out});
    }
  }

  const bool cond = tau <= std::exp(-epsilon) * min_q / 2.0;
  push(record, "dim", static_cast<double>(dim));
  push(record, "num_outcomes", static_cast<double>(k));
  push(record, "alpha", alpha);
  push(record, "epsilon", epsilon);
  push(record, "min_q", min_q);
  push(record, "distortion_dev", distortion_dev);
  push(record, "termination_dev", termination_dev);
  push(record, "clamp_events", static_cast<double>(clamp_events));
  push(record, "cond_holds", cond ? 1.0 : 0.0);
  push(record, "cond_violation", (cond && clamp_events > 0) ? 1.0 : 0.0);
}

struct TerminationInstance {
  Povm m;
  DensityMatrix rho;
};

TerminationInstance make_termination_instance(const ResolvedParams& params,
                                              std::uint64_t master_seed) {
  RngStream setup = RngStream(master_seed).split(kSetupSplit);
  const Index dim = params.get_int("dim");
  const std::size_t k = static_cast<std::size_t>(params.get_int("num_outcomes"));
  const double epsilon = params.get("epsilon");
  const double alpha = alpha_for_bound(epsilon, k);
  Povm m = privatize_povm(random_povm(dim, k, setup), alpha);
  DensityMatrix rho = random_density_matrix(dim, setup);
  return {std::move(m), std::move(rho)};
}

void trial_termination_rate(const ResolvedParams& params,
                            const TerminationInstance& instance, RngStream rng,
                            TrialRecord& record) {
  const double epsilon = params.get("epsilon");
  const double tau = params.get("tau");
  QsqOracle oracle(instance.rho, QsqNoiseMode::kExact, rng.split(1));
  RngStream sampler_rng = rng.split(2);
  const RejectionSampleResult result = rejection_sample_measurement(
      oracle, instance.m, epsilon, tau, nullptr, 0, sampler_rng);
  push(record, "iterations", static_cast<double>(result.iterations));
  push(record, "clamp_events", static_cast<double>(result.clamp_events));
}

void trial_parity_e2e(const ResolvedParams& params, RngStream rng,
                      TrialRecord& record) {
  const int d = static_cast<int>(params.get_int("d"));
  const double epsilon = params.get("epsilon");
  const double beta = params.get("beta");
  const double tau = params.get("tau");

  RngStream target_rng = rng.split(0);
  const ParityConcept target = ParityConcept::random(d, target_rng);
  const DensityMatrix state =
      quantum_example_state(target, ExampleDistribution::uniform(d));

  const double alpha = qldp_alpha_for_epsilon(epsilon);
  const std::int64_t needed =
      static_cast<std::int64_t>(d) *
      required_samples(2, tau, alpha, beta / static_cast<double>(d));
  const ParityQldpResult result =
      learn_parity_qldp(state, needed, d, epsilon, beta, tau, rng.split(1));

  double charge_dev = 0.0;
  std::int64_t reuse_violations = 0;
  for (std::size_t j = 0; j < result.ledger.size(); ++j) {
    if (result.query_counts[j] > 1) {
      ++reuse_violations;
    }
    if (result.query_counts[j] > 0) {
      charge_dev = std::max(charge_dev, std::abs(result.ledger[j] - epsilon));
    } else if (result.ledger[j] != 0.0) {
      ++reuse_violations;  // charge without a query
    }
  }

  int bits_wrong = 0;
  for (int i = 0; i < d; ++i) {
    bits_wrong += result.hypothesis.bit(i) != target.bit(i);
  }

  push(record, "success", result.hypothesis == target ? 1.0 : 0.0);
  push(record, "copies", static_cast<double>(result.copies_used));
  push(record, "charge_dev", charge_dev);
  push(record, "reuse_violations", static_cast<double>(reuse_violations));
  push(record, "bits_wrong", static_cast<double>(bits_wrong));
}

void trial_dp_check_suite(const ResolvedParams& params, RngStream rng,
                          TrialRecord& record) {
  const Index dim = pick_dim(rng, params.get_int("max_dim"));
  const std::size_t k = pick_outcomes(rng, params.get_int("max_outcomes"), 2);
  const double alpha = rng.next_uniform(0.15, 0.6);
  const Povm m = privatize_povm(random_povm(dim, k, rng), alpha);

  std::vector<DensityMatrix> states;
  std::vector<ProductState> products;
  for (int i = 0; i < 3; ++i) {
    DensityMatrix rho = random_density_matrix(dim, rng);
    states.push_back(rho);
    products.emplace_back(std::vector<DensityMatrix>{std::move(rho)});
  }

  // With one register every distinct pair is a neighbor, so the dp check must
  // switch from pass to fail exactly at the set triviality.
  const double alpha_set = minimal_triviality_on_set(m, states).alpha_star;
  const bool pass_at = check_dp(m, products, alpha_set).pass;
  bool fail_below = true;
  if (alpha_set > 1e-6) {
    fail_below = !check_dp(m, products, alpha_set - 1e-9).pass;
  }

  push(record, "dim", static_cast<double>(dim));
  push(record, "num_outcomes", static_cast<double>(k));
  push(record, "alpha_set", alpha_set);
  push(record, "agree", (pass_at && fail_below) ? 1.0 : 0.0);
}

// ---------------------------------------------------------------------------
// Aggregation. Thresholds are pinned here, per kind.

double record_value(const TrialRecord& record, const char* name) {
  for (const auto& [key, value] : record.values) {
    if (key == name) {
      return value;
    }
  }
  throw Error(std::string("record is missing value ") + name);
}

struct Accumulated {
  std::vector<const TrialRecord*> ok;
  std::int64_t errored = 0;
};

Accumulated split_records(const std::vector<TrialRecord>& records) {
  Accumulated acc;
  for (const auto& record : records) {
    if (record.ok) {
      acc.ok.push_back(&record);
    } else {
      ++acc.errored;
    }
  }
  return acc;
}

double max_over(const Accumulated& acc, const char* name) {
  double value = -kInf;
  for (const auto* record : acc.ok) {
    value = std::max(value, record_value(*record, name));
  }
  return value;
}

double sum_over(const Accumulated& acc, const char* name) {
  double value = 0.0;
  for (const auto* record : acc.ok) {
    value += record_value(*record, name);
  }
  return value;
}

void add_threshold(Report& report, std::string name, double value, double limit,
                   bool less_is_pass) {
  const bool pass = less_is_pass ? value <= limit : value >= limit;
  report.thresholds.push_back(
      {std::move(name), value, limit, less_is_pass, pass});
}

void aggregate_report(const KindSpec& spec, const ResolvedParams& params,
                      Report& report) {
  const Accumulated acc = split_records(report.trials);
  const double n_ok = static_cast<double>(acc.ok.size());
  report.aggregates.emplace_back("trials_ok", n_ok);
  report.aggregates.emplace_back("trials_errored",
                                 static_cast<double>(acc.errored));
  add_threshold(report, "trials_errored", static_cast<double>(acc.errored), 0.0,
                true);
  if (acc.ok.empty()) {
    report.pass = false;
    return;
  }

  switch (spec.kind) {
    case ExperimentKind::kTrivialityBound: {
      const double max_violation = max_over(acc, "max_violation");
      report.aggregates.emplace_back("max_violation", max_violation);
      add_threshold(report, "max_violation", max_violation, 1e-9, true);
      break;
    }
    case ExperimentKind::kEstimatorConcentration: {
      const double failures = sum_over(acc, "fail");
      const double fraction = failures / n_ok;
      report.aggregates.emplace_back(
          "samples_per_trial",
          static_cast<double>(required_samples(
              static_cast<std::size_t>(params.get_int("num_outcomes")),
              params.get("tau"), params.get("alpha"), params.get("delta"))));
      report.aggregates.emplace_back("failure_fraction", fraction);
      add_threshold(report, "failure_fraction", fraction, 0.10, true);
      break;
    }
    case ExperimentKind::kRejectionDistortion: {
      const double distortion = max_over(acc, "distortion_dev");
      const double termination = max_over(acc, "termination_dev");
      const double cond_violations = sum_over(acc, "cond_violation");
      const double cond_instances = sum_over(acc, "cond_holds");
      report.aggregates.emplace_back("max_distortion_dev", distortion);
      report.aggregates.emplace_back("max_termination_dev", termination);
      report.aggregates.emplace_back("cond_instances", cond_instances);
      report.aggregates.emplace_back("cond_violations", cond_violations);
      add_threshold(report, "max_distortion_dev", distortion, 1e-12, true);
      add_threshold(report, "max_termination_dev", termination, 1e-12, true);
      add_threshold(report, "cond_instances", cond_instances, 1.0, false);
      add_threshold(report, "cond_violations", cond_violations, 0.0, true);
      break;
    }
    case ExperimentKind::kTerminationRate: {
      const double epsilon = params.get("epsilon");
      const double tau = params.get("tau");
      double mean = 0.0;
      for (const auto* record : acc.ok) {
        mean += record_value(*record, "iterations");
      }
      mean /= n_ok;
      double var = 0.0;
      for (const auto* record : acc.ok) {
        const double dev = record_value(*record, "iterations") - mean;
        var += dev * dev;
      }
      var /= std::max(1.0, n_ok - 1.0);
      const double stderr_mean = std::sqrt(var / n_ok);
      const double bound = std::exp(epsilon) * (1.0 + tau) / (1.0 - tau);
      report.aggregates.emplace_back("mean_iterations", mean);
      report.aggregates.emplace_back("stderr_mean", stderr_mean);
      report.aggregates.emplace_back("iteration_bound", bound);
      add_threshold(report, "mean_iterations", mean, bound + 3.0 * stderr_mean,
                    true);
      break;
    }
    case ExperimentKind::kParityE2e: {
      const double successes = sum_over(acc, "success");
      const double rate = successes / n_ok;
      const double beta = params.get("beta");
      const double target = 1.0 - beta;
      const double se = std::sqrt(target * (1.0 - target) / n_ok);
      const double charge_dev = max_over(acc, "charge_dev");
      const double reuse = sum_over(acc, "reuse_violations");
      report.aggregates.emplace_back("success_rate", rate);
      report.aggregates.emplace_back("max_charge_dev", charge_dev);
      report.aggregates.emplace_back("reuse_violations", reuse);
      add_threshold(report, "success_rate", rate, target - 3.0 * se, false);
      add_threshold(report, "max_charge_dev", charge_dev, 1e-9, true);
      add_threshold(report, "reuse_violations", reuse, 0.0, true);
      break;
    }
    case ExperimentKind::kDpCheckSuite: {
      const double agreements = sum_over(acc, "agree");
      report.aggregates.emplace_back("agreements", agreements);
      add_threshold(report, "agreements", agreements, n_ok, false);

      // Fixed cross-check: the product of two privatized qubit measurements
      // passes at ln 3 and fails just below it.
      const Povm qubit = privatize_povm(
          Povm({Operator(CMatrix(basis_state_density(2, 0).mat())),
                Operator(CMatrix(basis_state_density(2, 1).mat()))}),
          0.5);
      std::vector<Operator> joint_effects;
      std::vector<double> joint_labels;
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          joint_effects.push_back(tensor(qubit.effect(i), qubit.effect(j)));
          joint_labels.push_back(static_cast<double>(joint_labels.size() + 1));
        }
      }
      const Povm joint(std::move(joint_effects), std::move(joint_labels));
      std::vector<ProductState> products;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          products.emplace_back(std::vector<DensityMatrix>{
              basis_state_density(2, a), basis_state_density(2, b)});
        }
      }
      const double ln3 = std::log(3.0);
      const bool tensor_pass = check_dp(joint, products, ln3).pass;
      const bool tensor_fail = !check_dp(joint, products, ln3 - 0.01).pass;
      report.aggregates.emplace_back("tensor_example_pass", tensor_pass ? 1 : 0);
      report.aggregates.emplace_back("tensor_example_fail_below",
                                     tensor_fail ? 1 : 0);
      add_threshold(report, "tensor_example_pass", tensor_pass ? 1.0 : 0.0, 1.0,
                    false);
      add_threshold(report, "tensor_example_fail_below", tensor_fail ? 1.0 : 0.0,
                    1.0, false);
      break;
    }
  }

  report.pass = std::all_of(report.thresholds.begin(), report.thresholds.end(),
                            [](const ThresholdCheck& t) { return t.pass; });
}

json param_to_json(const ParamValue& value) {
  if (const auto* list = std::get_if<std::vector<double>>(&value)) {
    return json(*list);
  }
  return json(std::get<double>(value));
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  return spec_for(kind).name;
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (const auto& spec : kind_specs()) {
    if (text == spec.name) {
      return spec.kind;
    }
  }
  throw ValidationError("unknown experiment kind: " + std::string(text));
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ValidationError("experiment config: malformed JSON object");
  }

  ExperimentConfig config;
  bool have_kind = false;
  for (const auto& [key, value] : doc.items()) {
    if (key == "kind") {
      if (!value.is_string()) {
        throw ValidationError("experiment config: kind must be a string");
      }
      config.kind = parse_experiment_kind(value.get<std::string>());
      have_kind = true;
    } else if (key == "master_seed" || key == "seed") {
      if (!value.is_number_integer()) {
        throw ValidationError("experiment config: seed must be an integer");
      }
      config.master_seed = value.get<std::uint64_t>();
    } else if (key == "trials") {
      if (!value.is_number_integer()) {
        throw ValidationError("experiment config: trials must be an integer");
      }
      config.trials = value.get<std::int64_t>();
      if (config.trials < 1) {
        throw ValidationError("experiment config: trials must be positive");
      }
    } else if (key == "parallelism") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 1) {
        throw ValidationError(
            "experiment config: parallelism must be a positive integer");
      }
      config.parallelism = value.get<int>();
    } else if (key == "parameters") {
      if (!value.is_object()) {
        throw ValidationError("experiment config: parameters must be an object");
      }
      for (const auto& [pkey, pvalue] : value.items()) {
        if (pvalue.is_number()) {
          config.parameters[pkey] = pvalue.get<double>();
        } else if (pvalue.is_array()) {
          std::vector<double> list;
          for (const auto& item : pvalue) {
            if (!item.is_number()) {
              throw ValidationError("experiment config: parameter lists are numeric");
            }
            list.push_back(item.get<double>());
          }
          config.parameters[pkey] = std::move(list);
        } else {
          throw ValidationError("experiment config: parameter " + pkey +
                                " must be a number or numeric list");
        }
      }
    } else {
      throw ValidationError("experiment config: unknown key \"" + key + "\"");
    }
  }
  if (!have_kind) {
    throw ValidationError("experiment config: missing \"kind\"");
  }
  // Validates parameter names against the kind's schema.
  resolve_params(spec_for(config.kind), config.parameters);
  return config;
}

Report run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const KindSpec& spec = spec_for(config.kind);
  const ResolvedParams params = resolve_params(spec, config.parameters);

  if (config.trials < 0) {
    throw ValidationError("run_experiment: trials must be positive");
  }
  const std::int64_t trials =
      config.trials == 0 ? spec.default_trials : config.trials;
  if (trials < 1) {
    throw ValidationError("run_experiment: trials must be positive");
  }
  if (config.parallelism < 1) {
    throw ValidationError("run_experiment: parallelism must be positive");
  }

  // Kind-wide fixtures are derived from the reserved setup stream so trial
  // records stay a pure function of (seed, trial index, parameters).
  std::optional<TerminationInstance> termination_instance;
  if (config.kind == ExperimentKind::kTerminationRate) {
    termination_instance =
        make_termination_instance(params, config.master_seed);
  }

  Report report;
  report.config = config;
  report.config.trials = trials;
  report.version = std::string(kVersion);
  report.trials.resize(static_cast<std::size_t>(trials));

  const RngStream master(config.master_seed);
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= trials) {
        return;
      }
      TrialRecord& record = report.trials[static_cast<std::size_t>(i)];
      record.index = i;
      RngStream rng = master.split(static_cast<std::uint64_t>(i));
      try {
        switch (config.kind) {
          case ExperimentKind::kTrivialityBound:
            trial_triviality_bound(params, rng, record);
            break;
          case ExperimentKind::kEstimatorConcentration:
            trial_estimator_concentration(params, rng, record);
            break;
          case ExperimentKind::kRejectionDistortion:
            trial_rejection_distortion(params, rng, record);
            break;
          case ExperimentKind::kTerminationRate:
            trial_termination_rate(params, *termination_instance, rng, record);
            break;
          case ExperimentKind::kParityE2e:
            trial_parity_e2e(params, rng, record);
            break;
          case ExperimentKind::kDpCheckSuite:
            trial_dp_check_suite(params, rng, record);
            break;
        }
        record.ok = true;
      } catch (const std::exception& e) {
        record.ok = false;
        record.error = e.what();
        record.values.clear();
      }
    }
  };

  const int extra_threads =
      static_cast<int>(std::min<std::int64_t>(config.parallelism, trials)) - 1;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(std::max(0, extra_threads)));
  for (int i = 0; i < extra_threads; ++i) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& thread : pool) {
    thread.join();
  }

  aggregate_report(spec, params, report);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

void emit_csv(const Report& report, const std::filesystem::path& path) {
  const KindSpec& spec = spec_for(report.config.kind);
  std::ostringstream out;

  out << "trial,ok,error";
  for (const char* column : spec.record_columns) {
    out << ',' << column;
  }
  out << '\n';

  for (const auto& record : report.trials) {
    out << record.index << ',' << (record.ok ? 1 : 0) << ',';
    if (!record.error.empty()) {
      std::string quoted = "\"";
      for (char c : record.error) {
        quoted += c;
        if (c == '"') {
          quoted += '"';
        }
      }
      quoted += '"';
      out << quoted;
    }
    for (const char* column : spec.record_columns) {
      out << ',';
      if (record.ok) {
        out << io::format_double(record_value(record, column));
      }
    }
    out << '\n';
  }
  io::write_file(path, out.str());
}

std::string report_to_json(const Report& report) {
  json config{{"kind", std::string(to_string(report.config.kind))},
              {"master_seed", report.config.master_seed},
              {"trials", report.config.trials},
              {"parallelism", report.config.parallelism}};
  json parameters = json::object();
  for (const auto& [name, value] : report.config.parameters) {
    parameters[name] = param_to_json(value);
  }
  config["parameters"] = std::move(parameters);

  json trials = json::array();
  for (const auto& record : report.trials) {
    json values = json::object();
    for (const auto& [name, value] : record.values) {
      values[name] = value;
    }
    json entry{{"trial", record.index}, {"ok", record.ok},
               {"values", std::move(values)}};
    if (!record.ok) {
      entry["error"] = record.error;
    }
    trials.push_back(std::move(entry));
  }

  json aggregates = json::object();
  for (const auto& [name, value] : report.aggregates) {
    aggregates[name] = value;
  }

  json thresholds = json::array();
  for (const auto& check : report.thresholds) {
    thresholds.push_back({{"name", check.name},
                          {"value", check.value},
                          {"limit", check.limit},
                          {"relation", check.less_is_pass ? "<=" : ">="},
                          {"pass", check.pass}});
  }

  json doc{{"config", std::move(config)},
           {"version", report.version},
           {"trials", std::move(trials)},
           {"aggregates", std::move(aggregates)},
           {"thresholds", std::move(thresholds)},
           {"pass", report.pass},
           {"wall_seconds", report.wall_seconds}};
  return doc.dump(2) + "\n";
}

}  // namespace qldp
