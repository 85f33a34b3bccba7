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

// expfam: run, verify, sweep and plot on-line estimation experiments.
//
// Exit codes: 0 all identity checks pass, 1 a tolerance check failed,
// 2 usage or configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expfam/errors.hpp"
#include "expfam/harness/experiment.hpp"
#include "expfam/harness/plot.hpp"

namespace fs = std::filesystem;
using namespace expfam;
using namespace expfam::harness;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitToleranceFailure = 1;
constexpr int kExitUsage = 2;

fs::path default_out_dir() {
  if (const char* env = std::getenv("EXPFAM_OUT_DIR"); env && *env) return env;
  return "expfam_out";
}

/// Config-field flags shared by run and sweep.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App& cmd) {
    cmd.add_option("-c,--config", config_file, "Flat 'key = value' config file")->check(CLI::ExistingFile);
    for (const std::string& key : setting_keys())
      options[key] = cmd.add_option("--" + key, values[key], "Config field '" + key + "'");
  }

  /// File settings first, then flags on top. Returns the out_dir override, if any.
  std::optional<std::string> build(ExperimentConfig& config) {
    std::optional<std::string> out_dir;
    if (!config_file.empty()) {
      for (const auto& [key, value] : read_config_file(config_file)) {
        if (key == "out_dir") out_dir = value;
        else apply_setting(config, key, value);
      }
    }
    for (const std::string& key : setting_keys())
      if (options.at(key)->count() > 0) apply_setting(config, key, values.at(key));
    return out_dir;
  }
};

void print_rows(const ExperimentResult& result) {
  for (const ReportRow& r : result.rows)
    std::printf("  %-40s %-24s %s\n", r.name.c_str(), format_double(r.value).c_str(),
                !r.applicable ? "n/a" : r.pass ? "ok" : "FAIL");
}

int report_status(const std::vector<ExperimentResult>& results) {
  std::size_t failed = 0;
  for (const ExperimentResult& r : results) {
    if (r.pass()) continue;
    ++failed;
    for (const std::string& name : r.failures) std::printf("FAIL %s: %s\n", r.name.c_str(), name.c_str());
  }
  std::printf("%zu configuration(s), %zu failed\n", results.size(), failed);
  return failed ? kExitToleranceFailure : kExitPass;
}

void write_merged(const fs::path& dir, const std::string& file, const std::vector<ExperimentResult>& results) {
  fs::create_directories(dir);
  std::ofstream out(dir / file);
  if (!out) throw InputError("cannot write '" + (dir / file).string() + "'");
  write_report(out, merge_rows(results));
  std::printf("wrote %s\n", (dir / file).string().c_str());
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::string s = text;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::string token;
  while (in >> token) {
    try {
      if constexpr (std::is_same_v<T, double>) out.push_back(parse_double(token));
      else {
        std::size_t used = 0;
        const auto v = std::stoull(token, &used);
        if (used != token.size() || token[0] == '-') throw std::invalid_argument(token);
        out.push_back(static_cast<T>(v));
      }
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": cannot parse '" + token + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-line density estimation and regression with exponential families"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir_flag;
  app.add_option("-o,--out", out_dir_flag, "Output directory (default: $EXPFAM_OUT_DIR or ./expfam_out)");

  // run
  CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment and write its trace and report");
  ConfigFlags run_flags;
  run_flags.attach(*run_cmd);
  bool quiet = false;
  run_cmd->add_flag("-q,--quiet", quiet, "Only print the verdict");

  // verify
  CLI::App* verify_cmd = app.add_subcommand("verify", "Sweep the exact identities over families, modes and lengths");
  std::size_t verify_trials = 40, verify_seeds = 1;
  std::uint64_t verify_seed = 1;
  unsigned verify_jobs = 0;
  verify_cmd->add_option("--max-trials", verify_trials, "Lengths 1..N")->check(CLI::Range(1, 100000));
  verify_cmd->add_option("--seeds", verify_seeds, "Random sequences per (family, mode, length)")->check(CLI::Range(1, 100000));
  verify_cmd->add_option("--seed", verify_seed, "Base seed");
  verify_cmd->add_option("-j,--jobs", verify_jobs, "Worker tasks (0 = hardware concurrency)");

  // sweep
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Grid over trials and eta_B^{-1} (prior scale for regression)");
  ConfigFlags sweep_flags;
  sweep_flags.attach(*sweep_cmd);
  std::string trials_list, eta_list, seed_list;
  unsigned sweep_jobs = 0;
  bool sweep_plot = false;
  sweep_cmd->add_option("--trials-list", trials_list, "Comma-separated trial counts");
  sweep_cmd->add_option("--eta-list", eta_list, "Comma-separated eta_B^{-1} values");
  sweep_cmd->add_option("--seed-list", seed_list, "Comma-separated seeds");
  sweep_cmd->add_option("-j,--jobs", sweep_jobs, "Worker tasks (0 = hardware concurrency)");
  sweep_cmd->add_flag("--plot", sweep_plot, "Also emit plot data from the merged report");

  // plot
  CLI::App* plot_cmd = app.add_subcommand("plot", "Series CSV and SVG figures from report CSVs");
  std::vector<std::string> report_files;
  plot_cmd->add_option("reports", report_files, "Report CSV files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    fs::path out_dir = out_dir_flag.empty() ? default_out_dir() : fs::path(out_dir_flag);

    if (*run_cmd) {
      ExperimentConfig config;
      if (auto from_file = run_flags.build(config); from_file && out_dir_flag.empty()) out_dir = *from_file;
      const ExperimentResult result = run_experiment(config, out_dir);
      std::printf("%s (%s) -> %s\n", config.name.c_str(), std::string(to_string(config.task)).c_str(),
                  out_dir.string().c_str());
      if (!quiet) print_rows(result);
      return report_status({result});
    }
    if (*verify_cmd) {
      const auto results = run_verification(verify_trials, verify_seeds, verify_seed, verify_jobs);
      std::map<std::string, std::pair<std::size_t, double>> summary;
      for (const ExperimentResult& r : results)
        for (const ReportRow& row : r.rows)
          if (row.name.rfind("identity.", 0) == 0 && row.applicable) {
            auto& [count, worst] = summary[row.name];
            ++count;
            worst = std::max(worst, row.value);
          }
      for (const auto& [name, stats] : summary)
        std::printf("  %-36s checked %6zu  max residual %s\n", name.c_str(), stats.first,
                    format_double(stats.second).c_str());
      write_merged(out_dir, "verify_report.csv", results);
      return report_status(results);
    }
    if (*sweep_cmd) {
      ExperimentConfig config;
      if (auto from_file = sweep_flags.build(config); from_file && out_dir_flag.empty()) out_dir = *from_file;
      SweepSpec spec;
      spec.trials = parse_list<std::size_t>(trials_list, "--trials-list");
      spec.eta_b_inv = parse_list<double>(eta_list, "--eta-list");
      spec.seeds = parse_list<std::uint64_t>(seed_list, "--seed-list");
      spec.jobs = sweep_jobs;
      const auto results = run_sweep(config, spec, out_dir);
      const std::string merged = config.name + "_sweep_report.csv";
      write_merged(out_dir, merged, results);
      if (sweep_plot)
        for (const auto& p : emit_plotdata({{config.name, merge_rows(results)}}, out_dir))
          std::printf("wrote %s\n", p.string().c_str());
      return report_status(results);
    }
    if (*plot_cmd) {
      std::vector<NamedReport> reports;
      for (const std::string& file : report_files) {
        std::ifstream in(file);
        if (!in) throw InputError("cannot open '" + file + "'");
        reports.emplace_back(fs::path(file).stem().string(), read_report(in, file));
      }
      for (const auto& p : emit_plotdata(reports, out_dir)) std::printf("wrote %s\n", p.string().c_str());
      return kExitPass;
    }
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "expfam: numerical failure: %s\n", e.what());
    return kExitToleranceFailure;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "expfam: %s\n", e.what());
    return kExitUsage;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "expfam: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "expfam: %s\n", e.what());
    return kExitToleranceFailure;
  }
  return kExitUsage;
}
