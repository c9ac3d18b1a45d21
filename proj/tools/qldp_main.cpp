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

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qldp/qldp.hpp"

namespace {

using nlohmann::json;

// CI-friendly exit codes.
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;
constexpr int kExitViolation = 4;
constexpr int kExitThreshold = 5;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QLDP_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw qldp::ValidationError("QLDP_SEED is not a valid integer");
    }
  }
  return 0;
}

json ledger_summary(const std::vector<double>& ledger) {
  double max_charge = 0.0;
  double total = 0.0;
  std::size_t charged = 0;
  for (double value : ledger) {
    if (value > 0.0) {
      ++charged;
      total += value;
      max_charge = std::max(max_charge, value);
    }
  }
  return json{{"registers", ledger.size()},
              {"charged_registers", charged},
              {"max_charge", max_charge},
              {"total_charged", total}};
}

void write_report(const std::string& path, const json& doc) {
  qldp::io::write_file(path, doc.dump(2) + "\n");
}

int run_check_trivial(const std::string& povm_path,
                      const std::vector<std::string>& state_paths) {
  const qldp::Povm m = qldp::io::load_povm(povm_path);

  qldp::TrivialityCertificate cert;
  if (state_paths.empty()) {
    cert = qldp::minimal_triviality(m);
  } else {
    std::vector<qldp::DensityMatrix> states;
    states.reserve(state_paths.size());
    for (const auto& path : state_paths) {
      states.push_back(qldp::io::load_density_matrix(path));
    }
    cert = qldp::minimal_triviality_on_set(m, states);
  }

  std::cout << "alpha_star: " << qldp::io::format_double(cert.alpha_star) << "\n";
  std::cout << "witness_outcome: " << cert.outcome << "\n";
  if (cert.state_pair.has_value()) {
    std::cout << "witness_states: " << cert.state_pair->first << " over "
              << cert.state_pair->second << "\n";
  } else if (cert.maximizer.has_value() && cert.minimizer.has_value()) {
    const double hi = qldp::trace_product_real(m.effect(cert.outcome).mat(),
                                               cert.maximizer->mat());
    const double lo = qldp::trace_product_real(m.effect(cert.outcome).mat(),
                                               cert.minimizer->mat());
    std::cout << "witness_probabilities: " << qldp::io::format_double(hi)
              << " over " << qldp::io::format_double(lo)
              << " (eigenvector states)\n";
  }
  return kExitOk;
}

int run_check_dp(const std::string& povm_path,
                 const std::vector<std::string>& state_paths, double alpha,
                 std::size_t registers) {
  const qldp::Povm m = qldp::io::load_povm(povm_path);
  std::vector<qldp::ProductState> states;
  states.reserve(state_paths.size());
  for (const auto& path : state_paths) {
    states.push_back(qldp::io::load_product_state(path));
  }
  for (const auto& state : states) {
    if (state.num_registers() != registers) {
      throw qldp::ValidationError("state has " +
                                  std::to_string(state.num_registers()) +
                                  " registers, expected " +
                                  std::to_string(registers));
    }
  }

  const qldp::DpCheckResult result = qldp::check_dp(m, states, alpha);
  if (result.pass) {
    std::cout << "pass: " << result.neighbor_pairs
              << " ordered neighbor pairs within e^alpha\n";
    return kExitOk;
  }
  const auto& v = *result.violation;
  std::cout << "violation: states (" << v.state_a << ", " << v.state_b
            << ") outcome " << v.outcome << " ratio "
            << qldp::io::format_double(v.ratio) << " > e^alpha = "
            << qldp::io::format_double(std::exp(alpha)) << "\n";
  return kExitViolation;
}

int run_simulate_qsq_via_qldp(const std::string& state_path,
                              const std::string& plan_path, double alpha,
                              double beta, std::uint64_t seed,
                              const std::string& report_path) {
  const qldp::DensityMatrix state = qldp::io::load_density_matrix(state_path);
  const qldp::QsqQueryPlan plan = qldp::io::load_qsq_plan(plan_path);

  const qldp::QsqSimulationResult result = qldp::simulate_nonadaptive_qsq(
      plan, state, alpha, beta, qldp::RngStream(seed));

  json queries = json::array();
  for (std::size_t j = 0; j < result.estimates.size(); ++j) {
    queries.push_back({{"estimate", result.estimates[j]},
                       {"samples", result.samples_per_query[j]},
                       {"tau", plan.queries[j].tolerance}});
  }
  json doc{{"command", "simulate qsq-via-qldp"},
           {"version", std::string(qldp::kVersion)},
           {"alpha", alpha},
           {"beta", beta},
           {"seed", seed},
           {"queries", std::move(queries)},
           {"qldp_queries", result.total_qldp_queries},
           {"budget_per_register", result.budget},
           {"ledger_summary", ledger_summary(result.ledger)},
           {"ledger", result.ledger}};

  if (!report_path.empty()) {
    write_report(report_path, doc);
  }
  for (std::size_t j = 0; j < result.estimates.size(); ++j) {
    std::cout << "query " << j << ": estimate "
              << qldp::io::format_double(result.estimates[j]) << " ("
              << result.samples_per_query[j] << " registers)\n";
  }
  std::cout << "qldp queries: " << result.total_qldp_queries << "\n";
  return kExitOk;
}

int run_simulate_qldp_via_qsq(const std::string& state_path,
                              const std::string& plan_path,
                              std::optional<double> epsilon, double beta,
                              std::uint64_t seed, const std::string& noise,
                              const std::string& report_path) {
  const qldp::DensityMatrix state = qldp::io::load_density_matrix(state_path);
  const qldp::QldpQueryPlan plan = qldp::io::load_qldp_plan(plan_path, epsilon);

  qldp::RngStream rng(seed);
  qldp::QsqOracle oracle(state, qldp::parse_qsq_noise_mode(noise), rng.split(0));
  const qldp::QldpSimulationResult result =
      qldp::simulate_noninteractive_qldp(plan, oracle, beta, rng.split(1));

  json queries = json::array();
  for (std::size_t j = 0; j < result.outcome_labels.size(); ++j) {
    queries.push_back({{"register", plan.queries[j].register_index},
                       {"outcome_index", result.outcome_indices[j]},
                       {"outcome_label", result.outcome_labels[j]},
                       {"iterations", result.iterations_per_query[j]}});
  }
  json doc{{"command", "simulate qldp-via-qsq"},
           {"version", std::string(qldp::kVersion)},
           {"beta", beta},
           {"tau", result.tau},
           {"seed", seed},
           {"noise", noise},
           {"queries", std::move(queries)},
           {"qsq_queries", result.total_qsq_queries},
           {"clamp_events", result.clamp_events}};

  if (!report_path.empty()) {
    write_report(report_path, doc);
  }
  for (std::size_t j = 0; j < result.outcome_labels.size(); ++j) {
    std::cout << "query " << j << ": outcome "
              << qldp::io::format_double(result.outcome_labels[j]) << " ("
              << result.iterations_per_query[j] << " iterations)\n";
  }
  std::cout << "qsq queries: " << result.total_qsq_queries
            << ", clamp events: " << result.clamp_events << "\n";
  return kExitOk;
}

int run_learn_parity(int d, const std::string& s_text, bool randomize,
                     const std::string& mode, double epsilon, double beta,
                     double tau, std::uint64_t seed, const std::string& noise,
                     std::int64_t copies, const std::string& report_path) {
  qldp::RngStream rng(seed);
  qldp::RngStream target_rng = rng.split(0);

  qldp::ParityConcept target =
      randomize ? qldp::ParityConcept::random(d, target_rng)
                : qldp::ParityConcept::from_string(s_text);
  if (target.num_bits() != d) {
    throw qldp::ValidationError("--s length disagrees with --d");
  }
  const qldp::DensityMatrix state =
      qldp::quantum_example_state(target, qldp::ExampleDistribution::uniform(d));

  json doc{{"command", "learn parity"},
           {"version", std::string(qldp::kVersion)},
           {"mode", mode},
           {"d", d},
           {"true_s", target.to_string()},
           {"tau", tau},
           {"seed", seed}};

  qldp::ParityConcept recovered(d, 0);
  if (mode == "qsq") {
    qldp::QsqOracle oracle(state, qldp::parse_qsq_noise_mode(noise), rng.split(1));
    recovered = qldp::learn_parity_qsq(oracle, d, tau);
    doc["noise"] = noise;
    doc["qsq_queries"] = oracle.query_count();
  } else if (mode == "qldp") {
    const double alpha = qldp::qldp_alpha_for_epsilon(epsilon);
    const std::int64_t needed =
        static_cast<std::int64_t>(d) *
        qldp::required_samples(2, tau, alpha, beta / static_cast<double>(d));
    const std::int64_t available = copies > 0 ? copies : needed;
    const qldp::ParityQldpResult result = qldp::learn_parity_qldp(
        state, available, d, epsilon, beta, tau, rng.split(1));
    recovered = result.hypothesis;
    doc["epsilon"] = epsilon;
    doc["beta"] = beta;
    doc["alpha"] = result.alpha;
    doc["copies_available"] = result.copies_available;
    doc["copies_used"] = result.copies_used;
    doc["samples_per_bit"] = result.samples_per_bit;
    doc["charge_per_register"] = result.charge_per_register;
    doc["ledger_summary"] = ledger_summary(result.ledger);
    doc["bit_estimates"] = result.bit_estimates;
  } else {
    throw qldp::ValidationError("--mode must be qsq or qldp");
  }

  const bool correct = recovered == target;
  doc["recovered_s"] = recovered.to_string();
  doc["correct"] = correct;
  if (!report_path.empty()) {
    write_report(report_path, doc);
  }
  std::cout << "true s:      " << target.to_string() << "\n";
  std::cout << "recovered s: " << recovered.to_string() << "\n";
  std::cout << (correct ? "recovered correctly" : "recovery FAILED") << "\n";
  return kExitOk;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_path,
                       const std::string& csv_path,
                       std::optional<std::int64_t> trials,
                       std::optional<std::uint64_t> seed,
                       std::optional<int> parallelism, bool seed_flag_given) {
  qldp::ExperimentConfig config =
      qldp::parse_experiment_config(qldp::io::read_file(config_path));

  // Flag > config file > environment > built-in zero.
  if (const char* env = std::getenv("QLDP_SEED");
      env != nullptr && !seed_flag_given && config.master_seed == 0) {
    config.master_seed = default_seed();
  }
  if (seed.has_value()) {
    config.master_seed = *seed;
  }
  if (trials.has_value()) {
    if (*trials < 1) {
      throw qldp::ValidationError("--trials must be positive");
    }
    config.trials = *trials;
  }
  if (parallelism.has_value()) {
    if (*parallelism < 1) {
      throw qldp::ValidationError("--parallelism must be positive");
    }
    config.parallelism = *parallelism;
  }

  const qldp::Report report = qldp::run_experiment(config);
  if (!out_path.empty()) {
    qldp::io::write_file(out_path, qldp::report_to_json(report));
  }
  if (!csv_path.empty()) {
    qldp::emit_csv(report, csv_path);
  }

  std::cout << "experiment " << qldp::to_string(report.config.kind) << ": "
            << report.trials.size() << " trials, "
            << (report.pass ? "PASS" : "FAIL") << " ("
            << qldp::io::format_double(report.wall_seconds) << " s)\n";
  for (const auto& check : report.thresholds) {
    std::cout << "  " << (check.pass ? "ok  " : "FAIL") << " " << check.name
              << " = " << qldp::io::format_double(check.value)
              << (check.less_is_pass ? " <= " : " >= ")
              << qldp::io::format_double(check.limit) << "\n";
  }
  return report.pass ? kExitOk : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qldp: simulation and verification toolkit for quantum local "
               "differential privacy"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qldp::kVersion));

  // check-trivial
  auto* check_trivial = app.add_subcommand(
      "check-trivial", "Certify the triviality level of a measurement");
  std::string ct_povm;
  std::vector<std::string> ct_states;
  check_trivial->add_option("--povm", ct_povm, "POVM file")->required();
  check_trivial->add_option("--states", ct_states,
                            "Density-matrix files restricting the state set");

  // check-dp
  auto* check_dp_cmd = app.add_subcommand(
      "check-dp", "Check differential privacy over a set of product states");
  std::string cd_povm;
  std::vector<std::string> cd_states;
  double cd_alpha = 0.0;
  std::size_t cd_registers = 1;
  check_dp_cmd->add_option("--povm", cd_povm, "POVM file (joint space)")
      ->required();
  check_dp_cmd->add_option("--states", cd_states, "Product-state files")
      ->required();
  check_dp_cmd->add_option("--alpha", cd_alpha, "Privacy level")->required();
  check_dp_cmd->add_option("--registers", cd_registers, "Registers per state")
      ->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Oracle-simulation protocols");
  simulate->require_subcommand(1);

  auto* sim_qsq = simulate->add_subcommand(
      "qsq-via-qldp",
      "Answer expectation queries with nearly trivial per-copy measurements");
  std::string sq_state, sq_plan, sq_report;
  double sq_alpha = 0.5, sq_beta = 0.05;
  std::uint64_t sq_seed = 0;
  bool sq_seed_given = false;
  sim_qsq->add_option("--state", sq_state, "Density-matrix file")->required();
  sim_qsq->add_option("--queries", sq_plan, "Query-plan file")->required();
  sim_qsq->add_option("--alpha", sq_alpha, "Randomized-response parameter in (0,1)")
      ->required();
  sim_qsq->add_option("--beta", sq_beta, "Joint failure probability")->required();
  sim_qsq->add_option("--seed", sq_seed, "Master seed")
      ->each([&](const std::string&) { sq_seed_given = true; });
  sim_qsq->add_option("--report", sq_report, "Report JSON output path");

  auto* sim_qldp = simulate->add_subcommand(
      "qldp-via-qsq", "Sample trivial measurements through expectation queries");
  std::string sl_state, sl_plan, sl_report, sl_noise = "uniform";
  double sl_beta = 0.05;
  std::optional<double> sl_epsilon;
  std::uint64_t sl_seed = 0;
  bool sl_seed_given = false;
  sim_qldp->add_option("--state", sl_state, "Density-matrix file")->required();
  sim_qldp->add_option("--queries", sl_plan, "Query-plan file")->required();
  sim_qldp->add_option("--epsilon", sl_epsilon,
                       "Default triviality declaration for plan entries");
  sim_qldp->add_option("--beta", sl_beta, "Output statistical distance budget")
      ->required();
  sim_qldp->add_option("--seed", sl_seed, "Master seed")
      ->each([&](const std::string&) { sl_seed_given = true; });
  sim_qldp->add_option("--noise", sl_noise,
                       "Oracle noise: exact|uniform|adversarial_extreme");
  sim_qldp->add_option("--report", sl_report, "Report JSON output path");

  // learn parity
  auto* learn = app.add_subcommand("learn", "Learning demonstrations");
  learn->require_subcommand(1);
  auto* parity = learn->add_subcommand("parity", "Learn a parity concept");
  int lp_d = 4;
  std::string lp_s, lp_mode = "qsq", lp_noise = "uniform", lp_report;
  bool lp_random = false;
  double lp_epsilon = 1.0, lp_beta = 0.1, lp_tau = 0.2;
  std::uint64_t lp_seed = 0;
  bool lp_seed_given = false;
  std::int64_t lp_copies = 0;
  parity->add_option("--d", lp_d, "Number of input bits")->required();
  auto* s_opt = parity->add_option("--s", lp_s, "Target parity bitstring");
  parity->add_flag("--random", lp_random, "Draw the target parity from the seed")
      ->excludes(s_opt);
  parity->add_option("--mode", lp_mode, "qsq|qldp")->required();
  parity->add_option("--epsilon", lp_epsilon, "Per-register privacy budget (qldp)");
  parity->add_option("--beta", lp_beta, "Failure probability (qldp)");
  parity->add_option("--tau", lp_tau, "Query tolerance in (0, 1/4)");
  parity->add_option("--seed", lp_seed, "Master seed")
      ->each([&](const std::string&) { lp_seed_given = true; });
  parity->add_option("--noise", lp_noise, "Oracle noise mode (qsq)");
  parity->add_option("--copies", lp_copies,
                     "Available example-state copies (qldp; default: exactly "
                     "the required number)");
  parity->add_option("--report", lp_report, "Report JSON output path");

  // experiment
  auto* experiment = app.add_subcommand(
      "experiment", "Run a named experiment from a config file");
  std::string ex_config, ex_out, ex_csv;
  std::optional<std::int64_t> ex_trials;
  std::optional<std::uint64_t> ex_seed;
  std::optional<int> ex_parallelism;
  bool ex_seed_given = false;
  experiment->add_option("--config", ex_config, "Experiment config JSON file")
      ->required();
  experiment->add_option("--out", ex_out, "Report JSON output path");
  experiment->add_option("--csv", ex_csv, "Per-trial CSV output path");
  experiment->add_option("--trials", ex_trials, "Override trial count");
  experiment->add_option("--seed", ex_seed, "Override master seed")
      ->each([&](const std::string&) { ex_seed_given = true; });
  experiment->add_option("--parallelism", ex_parallelism,
                         "Override worker thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check_trivial->parsed()) {
      return run_check_trivial(ct_povm, ct_states);
    }
    if (check_dp_cmd->parsed()) {
      return run_check_dp(cd_povm, cd_states, cd_alpha, cd_registers);
    }
    if (simulate->parsed() && sim_qsq->parsed()) {
      if (!sq_seed_given) {
        sq_seed = default_seed();
      }
      return run_simulate_qsq_via_qldp(sq_state, sq_plan, sq_alpha, sq_beta,
                                       sq_seed, sq_report);
    }
    if (simulate->parsed() && sim_qldp->parsed()) {
      if (!sl_seed_given) {
        sl_seed = default_seed();
      }
      return run_simulate_qldp_via_qsq(sl_state, sl_plan, sl_epsilon, sl_beta,
                                       sl_seed, sl_noise, sl_report);
    }
    if (learn->parsed() && parity->parsed()) {
      if (!lp_random && lp_s.empty()) {
        throw qldp::ValidationError("learn parity: provide --s or --random");
      }
      if (!lp_seed_given) {
        lp_seed = default_seed();
      }
      return run_learn_parity(lp_d, lp_s, lp_random, lp_mode, lp_epsilon,
                              lp_beta, lp_tau, lp_seed, lp_noise, lp_copies,
                              lp_report);
    }
    if (experiment->parsed()) {
      return run_experiment_cmd(ex_config, ex_out, ex_csv, ex_trials, ex_seed,
                                ex_parallelism, ex_seed_given);
    }
    std::cerr << "no subcommand selected\n";
    return kExitValidation;
  } catch (const qldp::BudgetExceededError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const qldp::NotTrivialEnoughError& e) {
    std::cerr << "triviality violation: " << e.what() << "\n";
    return kExitViolation;
  } catch (const qldp::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const qldp::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const qldp::InsufficientCopiesError& e) {
    std::cerr << "insufficient copies: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
