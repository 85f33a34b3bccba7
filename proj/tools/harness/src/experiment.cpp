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

#include "expfam/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "expfam/harness/rng.hpp"
#include "expfam/regression.hpp"

namespace expfam::harness {

namespace {

constexpr double kMixtureTolerance = 1e-7;
constexpr double kPermutationSpreadTolerance = 1e-8;
constexpr double kOrderGapThreshold = 1e-3;
constexpr double kFinalMeanTolerance = 1e-12;
constexpr double kInverseDriftTolerance = 1e-8;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double finite_number(const std::string& key, const std::string& value) {
  double v = 0.0;
  try {
    v = parse_double(trim(value));
  } catch (const InputError&) {
    throw InputError(key + ": '" + value + "' is not a number");
  }
  if (!std::isfinite(v)) throw InputError(key + ": value must be finite");
  return v;
}

std::uint64_t unsigned_number(const std::string& key, const std::string& value) {
  const std::string t = trim(value);
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (!t.empty() && t[0] != '-') v = std::stoull(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) throw InputError(key + ": '" + value + "' is not an unsigned integer");
  return v;
}

std::vector<double> number_list(const std::string& key, const std::string& value) {
  std::string s = value;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(finite_number(key, token));
  if (out.empty()) throw InputError(key + ": empty list");
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// "1,2,3" is three scalar examples; "1 2; 3 4" is two vector examples.
std::vector<Vector> example_list(const std::string& key, const std::string& value) {
  std::vector<Vector> out;
  if (value.find(';') == std::string::npos) {
    for (double v : number_list(key, value)) out.push_back(Vector::Constant(1, v));
    return out;
  }
  std::istringstream in(value);
  std::string group;
  while (std::getline(in, group, ';'))
    if (!trim(group).empty()) out.push_back(to_vector(number_list(key, group)));
  return out;
}

PriorSpec parse_prior(const std::string& value) {
  const auto colon = value.find(':');
  if (colon == std::string::npos) throw InputError("mixture_prior: expected beta:a,b or gaussian:m,v");
  const std::string kind = trim(value.substr(0, colon));
  const auto params = number_list("mixture_prior", value.substr(colon + 1));
  if (params.size() != 2) throw InputError("mixture_prior: expected two parameters");
  if (kind == "beta") return PriorSpec::beta(params[0], params[1]);
  if (kind == "gaussian") return PriorSpec::gaussian(params[0], params[1]);
  throw InputError("mixture_prior: unknown prior '" + kind + "'");
}

void collect_failures(ExperimentResult& result) {
  for (const ReportRow& r : result.rows) {
    const bool checked = r.name.rfind("identity.", 0) == 0 || r.name.rfind("witness.", 0) == 0;
    if (checked && r.applicable && !r.pass) result.failures.push_back(r.name);
  }
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / file);
  if (!out) throw InputError("cannot write '" + (dir / file).string() + "'");
  return out;
}

void prepend(std::vector<ReportRow>& rows, std::vector<ReportRow> head) {
  rows.insert(rows.begin(), head.begin(), head.end());
}

ExperimentResult run_density(const ExperimentConfig& c, const std::optional<std::filesystem::path>& out_dir) {
  const FamilyPtr fam = make_family(c.family, c.dim);
  const auto xs = generate(c.generator, *fam, c.seed, c.trials);
  const ExpectationParam mu1 = c.mu1.size() ? ExpectationParam{c.mu1} : default_initial_mean(*fam);
  const Trace trace = run(fam, mu1, c.eta_b_inv, c.mode, xs);
  ExperimentResult result{c.name, report_rows(regret_report(trace), c.tolerance), {}};
  prepend(result.rows, {{"trials", static_cast<double>(trace.size()), true, true},
                        {"eta_b_inv", c.eta_b_inv, true, true}});
  if (out_dir) {
    auto out = open_output(*out_dir, c.name + "_trace.csv");
    write_trace(out, trace);
  }
  return result;
}

ExperimentResult run_regression_task(const ExperimentConfig& c,
                                     const std::optional<std::filesystem::path>& out_dir) {
  const auto seq = generate_regression(c.regression_generator, c.dim, c.seed, c.trials);
  const Matrix prior = c.prior_scale * Matrix::Identity(c.dim, c.dim);
  const RegretReport report = regression_regret_report(seq, prior, c.mode);
  ExperimentResult result{c.name, report_rows(report, c.tolerance), {}};

  // Drift of the maintained inverse against a fresh factorization.
  RegressionState state = RegressionState::init(c.dim, prior, c.mode);
  double drift = 0.0;
  for (const LabeledExample& ex : seq) {
    state = state.predict(ex.x).state.update(ex);
    const Matrix dense = state.inv_rate().llt().solve(Matrix::Identity(c.dim, c.dim));
    drift = std::max(drift, (dense - state.rate()).cwiseAbs().maxCoeff());
  }
  result.rows.push_back({"identity.rank_one_inverse", drift, true, drift < kInverseDriftTolerance});
  prepend(result.rows, {{"trials", static_cast<double>(seq.size()), true, true},
                        {"eta_b_inv", c.prior_scale, true, true}});
  if (out_dir) {
    auto out = open_output(*out_dir, c.name + "_trace.csv");
    write_regression_trace(out, run_regression(seq, prior, c.mode));
  }
  return result;
}

ExperimentResult run_mixture_task(const ExperimentConfig& c,
                                  const std::optional<std::filesystem::path>& out_dir) {
  ExperimentResult result = run_density(c, out_dir);
  const FamilyPtr fam = make_family(c.family, c.dim);
  const auto xs = generate(c.generator, *fam, c.seed, c.trials);
  const double mix = mixture_bound(*fam, c.mixture_prior, c.mixture_eta, xs);
  double online_total = 0.0;
  for (const ReportRow& r : result.rows)
    if (r.name == "online_total") online_total = r.value;
  result.rows.push_back({"mixture_bound", mix, true, true});

  const bool jeffreys_coin = fam->name() == "bernoulli" && c.mixture_prior.kind == PriorSpec::Kind::beta &&
                             c.mixture_prior.first == 0.5 && c.mixture_prior.second == 0.5 &&
                             c.mixture_eta == 1.0 && c.mode == Mode::forward && c.eta_b_inv == 0.0 &&
                             (c.mu1.size() == 0 || (c.mu1.size() == 1 && c.mu1[0] == 0.5));
  const double gap = std::abs(mix - online_total);
  result.rows.push_back({"identity.mixture_coincidence", jeffreys_coin ? gap : 0.0, jeffreys_coin,
                         !jeffreys_coin || gap < kMixtureTolerance});
  if (xs.size() <= 8) {
    const double spread = permutation_invariance_check(*fam, c.mixture_prior, c.mixture_eta, xs);
    result.rows.push_back({"identity.mixture_permutation_spread", spread, true,
                           spread < kPermutationSpreadTolerance});
  }
  return result;
}

ExperimentResult run_order_task(const ExperimentConfig& c,
                                const std::optional<std::filesystem::path>& out_dir) {
  if (c.family != "gaussian" || c.dim != 1)
    throw InputError("order task uses the one-dimensional gaussian family");
  const FamilyPtr fam = make_family("gaussian", 1);
  const ExpectationParam mu1 = c.mu1.size() ? ExpectationParam{c.mu1} : default_initial_mean(*fam);

  auto totals = [&](const std::vector<Vector>& xs) {
    std::vector<Vector> flipped{xs[1], xs[0]};
    return std::pair{run(fam, mu1, c.eta_b_inv, c.mode, xs), run(fam, mu1, c.eta_b_inv, c.mode, flipped)};
  };

  // Search seeds for a pair whose orderings separate; an explicit base is used as given.
  std::vector<Vector> xs;
  std::pair<Trace, Trace> runs;
  if (c.generator.kind == GeneratorSpec::Kind::permutation || c.generator.kind == GeneratorSpec::Kind::explicit_file) {
    GeneratorSpec spec = c.generator;
    spec.index = 0;
    xs = generate(spec, *fam, c.seed, 0);
    if (xs.size() != 2) throw InputError("order task needs exactly two base examples");
    runs = totals(xs);
  } else {
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
      xs = generate(c.generator, *fam, c.seed + attempt, 2);
      runs = totals(xs);
      if (std::abs(runs.first.total_loss() - runs.second.total_loss()) > kOrderGapThreshold) break;
    }
  }
  const double gap = std::abs(runs.first.total_loss() - runs.second.total_loss());
  const double mean_gap =
      (runs.first.final_mean().mu - runs.second.final_mean().mu).cwiseAbs().maxCoeff();

  ExperimentResult result{c.name, {}, {}};
  result.rows = {{"trials", 2.0, true, true},
                 {"eta_b_inv", c.eta_b_inv, true, true},
                 {"example_0", xs[0][0], true, true},
                 {"example_1", xs[1][0], true, true},
                 {"order0.online_total", runs.first.total_loss(), true, true},
                 {"order1.online_total", runs.second.total_loss(), true, true},
                 {"witness.order_sensitivity", gap, true, gap > kOrderGapThreshold},
                 {"identity.final_mean_gap", mean_gap, true, mean_gap < kFinalMeanTolerance}};
  if (out_dir) {
    auto a = open_output(*out_dir, c.name + "_order0_trace.csv");
    write_trace(a, runs.first);
    auto b = open_output(*out_dir, c.name + "_order1_trace.csv");
    write_trace(b, runs.second);
  }
  return result;
}

template <typename Job>
void run_parallel(std::size_t count, unsigned jobs, Job job) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    }));
  }
  for (auto& w : workers) w.get();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::density: return "density";
    case Task::regression: return "regression";
    case Task::mixture: return "mixture";
    case Task::order: return "order";
  }
  return "density";
}

Task parse_task(std::string_view text) {
  if (text == "density") return Task::density;
  if (text == "regression") return Task::regression;
  if (text == "mixture") return Task::mixture;
  if (text == "order") return Task::order;
  throw InputError("unknown task '" + std::string(text) + "'");
}

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys{
      "task", "family", "dim", "mode", "mu1", "eta_b_inv", "generator", "theta_star", "bound",
      "base", "perm_index", "input", "seed", "trials", "prior_scale", "x_bound", "y_bound",
      "regression_generator", "mixture_prior", "mixture_eta", "tolerance", "name"};
  return keys;
}

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "task") c.task = parse_task(value);
  else if (key == "family") {
    make_family(value, 1);
    c.family = value;
  } else if (key == "dim") {
    const auto d = unsigned_number(key, value);
    if (d < 1 || d > 1024) throw InputError("dim must be between 1 and 1024");
    c.dim = static_cast<int>(d);
  } else if (key == "mode") {
    const auto m = parse_mode(value);
    if (!m) throw InputError("mode: expected forward or incremental_offline");
    c.mode = *m;
  } else if (key == "mu1") c.mu1 = to_vector(number_list(key, value));
  else if (key == "eta_b_inv") {
    c.eta_b_inv = finite_number(key, value);
    if (c.eta_b_inv < 0.0) throw InputError("eta_b_inv must be nonnegative");
  } else if (key == "generator") c.generator.kind = parse_generator_kind(value);
  else if (key == "theta_star") c.generator.theta_star = to_vector(number_list(key, value));
  else if (key == "bound") c.generator.bound = finite_number(key, value);
  else if (key == "base") c.generator.base = example_list(key, value);
  else if (key == "perm_index") c.generator.index = unsigned_number(key, value);
  else if (key == "input") {
    c.generator.path = value;
    c.regression_generator.path = value;
  } else if (key == "seed") c.seed = unsigned_number(key, value);
  else if (key == "trials") c.trials = unsigned_number(key, value);
  else if (key == "prior_scale") {
    c.prior_scale = finite_number(key, value);
    if (!(c.prior_scale > 0.0)) throw InputError("prior_scale must be positive");
  } else if (key == "x_bound") c.regression_generator.x_bound = finite_number(key, value);
  else if (key == "y_bound") c.regression_generator.y_bound = finite_number(key, value);
  else if (key == "regression_generator") {
    if (value == "uniform") c.regression_generator.kind = RegressionGeneratorSpec::Kind::uniform;
    else if (value == "explicit" || value == "file")
      c.regression_generator.kind = RegressionGeneratorSpec::Kind::explicit_file;
    else throw InputError("regression_generator: expected uniform or explicit");
  } else if (key == "mixture_prior") c.mixture_prior = parse_prior(value);
  else if (key == "mixture_eta") {
    c.mixture_eta = finite_number(key, value);
    if (!(c.mixture_eta > 0.0)) throw InputError("mixture_eta must be positive");
  } else if (key == "tolerance") {
    c.tolerance = finite_number(key, value);
    if (!(c.tolerance > 0.0)) throw InputError("tolerance must be positive");
  } else if (key == "name") {
    if (value.empty() || value.find_first_of(",/\\ \n") != std::string::npos)
      throw InputError("name must be nonempty without separators");
    c.name = value;
  } else throw InputError("unknown setting '" + key + "'");
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  std::map<std::string, std::string> settings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": expected key = value";
      throw ParseError(os.str());
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": empty key";
      throw ParseError(os.str());
    }
    settings[key] = trim(line.substr(eq + 1));
  }
  return settings;
}

ExpectationParam default_initial_mean(const Family& family) {
  const double v = family.name() == "bernoulli" ? 0.5 : family.name() == "gamma" ? 1.0 : 0.0;
  return {Vector::Constant(family.dim(), v)};
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<std::filesystem::path>& out_dir) {
  ExperimentResult result;
  switch (config.task) {
    case Task::density: result = run_density(config, out_dir); break;
    case Task::regression: result = run_regression_task(config, out_dir); break;
    case Task::mixture: result = run_mixture_task(config, out_dir); break;
    case Task::order: result = run_order_task(config, out_dir); break;
  }
  collect_failures(result);
  if (out_dir) {
    auto out = open_output(*out_dir, config.name + "_report.csv");
    write_report(out, result.rows);
  }
  return result;
}

std::vector<ExperimentResult> run_sweep(const ExperimentConfig& base, const SweepSpec& sweep,
                                        const std::optional<std::filesystem::path>& out_dir) {
  const auto trials = sweep.trials.empty() ? std::vector<std::size_t>{base.trials} : sweep.trials;
  const auto etas = sweep.eta_b_inv.empty() ? std::vector<double>{base.eta_b_inv} : sweep.eta_b_inv;
  const auto seeds = sweep.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : sweep.seeds;

  // Grid order is the configuration key order: eta, then seed, then T.
  std::vector<ExperimentConfig> cells;
  for (double eta : etas)
    for (std::uint64_t seed : seeds)
      for (std::size_t t : trials) {
        ExperimentConfig c = base;
        if (base.task == Task::regression) c.prior_scale = eta;
        else c.eta_b_inv = eta;
        c.seed = seed;
        c.trials = t;
        c.name = base.name + "-eta" + format_double(eta) + "-seed" + std::to_string(seed) + "-T" +
                 std::to_string(t);
        cells.push_back(std::move(c));
      }
  std::vector<ExperimentResult> results(cells.size());
  run_parallel(cells.size(), sweep.jobs, [&](std::size_t i) { results[i] = run_experiment(cells[i], out_dir); });
  return results;
}

std::vector<ReportRow> merge_rows(const std::vector<ExperimentResult>& results) {
  std::vector<ReportRow> merged;
  for (const ExperimentResult& r : results)
    for (ReportRow row : r.rows) {
      row.name = r.name + "/" + row.name;
      merged.push_back(std::move(row));
    }
  return merged;
}

std::vector<ExperimentResult> run_verification(std::size_t max_trials, std::size_t seeds_per_cell,
                                               std::uint64_t base_seed, unsigned jobs) {
  std::vector<ExperimentConfig> cells;
  const double etas[] = {0.5, 1.0, 2.0};
  for (const char* family : {"bernoulli", "gaussian", "gamma"})
    for (Mode mode : {Mode::incremental_offline, Mode::forward})
      for (std::size_t s = 0; s < seeds_per_cell; ++s)
        for (std::size_t t = 1; t <= max_trials; ++t) {
          ExperimentConfig c;
          c.family = family;
          c.mode = mode;
          c.trials = t;
          c.seed = base_seed + 1000003 * s + t;
          Rng rng(c.seed);
          const double theta = c.family == "gamma" ? rng.uniform(-3.0, -0.3) : rng.uniform(-2.0, 2.0);
          c.generator.theta_star = Vector::Constant(1, theta);
          c.eta_b_inv = etas[(s + t) % 3];
          c.name = std::string("verify-") + family + "-" + std::string(to_string(mode)) + "-s" +
                   std::to_string(s) + "-T" + std::to_string(t);
          cells.push_back(std::move(c));
        }
  std::vector<ExperimentResult> results(cells.size());
  run_parallel(cells.size(), jobs, [&](std::size_t i) { results[i] = run_experiment(cells[i], std::nullopt); });
  return results;
}

}  // namespace expfam::harness
