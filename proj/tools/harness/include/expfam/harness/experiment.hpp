// Copyright 2026 The expfam-online Authors
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
#include <optional>
#include <string>
#include <vector>

#include "expfam/harness/csv.hpp"
#include "expfam/harness/generators.hpp"
#include "expfam/mixture.hpp"
#include "expfam/online.hpp"

namespace expfam::harness {

enum class Task {
  /// On-line density estimation with one family.
  density,
  /// On-line linear regression with prior a I.
  regression,
  /// Forward density estimation compared with the Bayes-mixture bound.
  mixture,
  /// Both orderings of a two-example Gaussian sequence.
  order,
};

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

struct ExperimentConfig {
  Task task = Task::density;
  std::string family = "gaussian";
  int dim = 1;
  Mode mode = Mode::forward;
  /// Empty: 1/2 for Bernoulli, 0 for Gaussian, 1 for Gamma (per coordinate).
  Vector mu1;
  double eta_b_inv = 1.0;
  GeneratorSpec generator;
  RegressionGeneratorSpec regression_generator;
  std::uint64_t seed = 1;
  std::size_t trials = 20;
  /// Regression prior a in a I.
  double prior_scale = 1.0;
  PriorSpec mixture_prior = PriorSpec::beta(0.5, 0.5);
  double mixture_eta = 1.0;
  double tolerance = kIdentityTolerance;
  /// Used as the file stem and, in sweeps, as the row prefix.
  std::string name = "run";
};

/// Applies one "key = value" setting. Throws InputError for unknown keys
/// or malformed values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Reads a flat "key = value" file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Every key apply_setting understands, for help output.
const std::vector<std::string>& setting_keys();

ExpectationParam default_initial_mean(const Family& family);

struct ExperimentResult {
  std::string name;
  std::vector<ReportRow> rows;
  /// Names of applicable identity rows that failed.
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

/*
 * Runs one configuration. When out_dir is set, writes <name>_trace.csv and
 * <name>_report.csv there. Report rows always begin with trials and
 * eta_b_inv (the prior scale for regression).
 */
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<std::filesystem::path>& out_dir);

struct SweepSpec {
  std::vector<std::size_t> trials;
  std::vector<double> eta_b_inv;
  std::vector<std::uint64_t> seeds;
  /// Worker tasks; 0 picks the hardware concurrency.
  unsigned jobs = 0;
};

/*
 * Grid over trials x eta_b_inv x seeds around a base configuration. Each
 * cell runs as an independent task; results come back ordered by the
 * configuration key regardless of completion order. The merged report
 * prefixes every row with "<key>/".
 */
std::vector<ExperimentResult> run_sweep(const ExperimentConfig& base, const SweepSpec& sweep,
                                        const std::optional<std::filesystem::path>& out_dir);

std::vector<ReportRow> merge_rows(const std::vector<ExperimentResult>& results);

/// Identity sweep: families x modes x lengths 1..max_trials x seeds, density task.
std::vector<ExperimentResult> run_verification(std::size_t max_trials, std::size_t seeds_per_cell,
                                               std::uint64_t base_seed, unsigned jobs);

}  // namespace expfam::harness
