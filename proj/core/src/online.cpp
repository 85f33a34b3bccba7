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

#include "expfam/online.hpp"

#include <cmath>
#include <utility>

namespace expfam {

std::string_view to_string(Mode mode) {
  return mode == Mode::forward ? "forward" : "incremental_offline";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "forward") return Mode::forward;
  if (text == "incremental_offline" || text == "incremental") return Mode::incremental_offline;
  return std::nullopt;
}

EstimatorState::EstimatorState(FamilyPtr family, ExpectationParam mean, double inv_rate,
                               std::size_t trial, Mode mode, ExpectationParam mu1,
                               double eta_b_inv)
    : family_(std::move(family)),
      mean_(std::move(mean)),
      inv_rate_(inv_rate),
      trial_(trial),
      mode_(mode),
      mu1_(std::move(mu1)),
      eta_b_inv_(eta_b_inv) {}

EstimatorState EstimatorState::init(FamilyPtr family, ExpectationParam mu1, double eta_b_inv,
                                    Mode mode) {
  if (!family) throw InputError("estimator needs a family");
  if (!(eta_b_inv >= 0.0) || !std::isfinite(eta_b_inv))
    throw InputError("prior weight eta_B^{-1} must be finite and nonnegative");
  if (mu1.mu.size() != family->dim()) throw InputError("initial mean has the wrong dimension");
  if (!family->in_expectation_domain(mu1.mu))
    throw DomainError(std::string(family->name()) + ": initial mean outside the expectation domain");
  const double inv = initial_inv_rate(mode, eta_b_inv);
  ExpectationParam start = mu1;
  return EstimatorState(std::move(family), std::move(start), inv, 1, mode, std::move(mu1),
                        eta_b_inv);
}

EstimatorState EstimatorState::update(const Vector& x) const {
  family_->check_example(x);
  // eta_{t+1}^{-1} = eta_1^{-1} + t, never accumulated.
  const double next_inv = initial_inv_rate() + static_cast<double>(trial_);
  return EstimatorState(family_, {next_mean(UpdateForm::gradient_step, mean_.mu, inv_rate_, x)},
                        next_inv, trial_ + 1, mode_, mu1_, eta_b_inv_);
}

Vector next_mean(UpdateForm form, const Vector& mu, double inv_rate, const Vector& x) {
  const double next_inv = inv_rate + 1.0;
  switch (form) {
    case UpdateForm::implicit_gradient: {
      // eta_t is infinite when eta_t^{-1} = 0 and the step lands on x.
      if (inv_rate == 0.0) return x;
      const double eta = 1.0 / inv_rate;
      return (mu + eta * x) / (1.0 + eta);
    }
    case UpdateForm::convex_combination:
      return (inv_rate * mu + x) / next_inv;
    case UpdateForm::gradient_step:
      return mu - (mu - x) / next_inv;
  }
  return mu;
}

ExpectationParam expanded_solution(const Family& family, const ExpectationParam& mu1,
                                   double eta1_inv, std::span<const Vector> examples) {
  if (mu1.mu.size() != family.dim()) throw InputError("initial mean has the wrong dimension");
  if (examples.empty()) return mu1;
  Vector sum = eta1_inv * mu1.mu;
  for (const Vector& x : examples) {
    family.check_example(x);
    sum += x;
  }
  return {sum / (eta1_inv + static_cast<double>(examples.size()))};
}

ExpectationParam batch_solution(const Family& family, const ExpectationParam& mu1,
                                double eta_b_inv, std::span<const Vector> examples) {
  if (!(eta_b_inv >= 0.0)) throw InputError("prior weight eta_B^{-1} must be nonnegative");
  if (eta_b_inv == 0.0 && examples.empty())
    throw PreconditionError("batch solution undefined without prior weight or examples");
  return expanded_solution(family, mu1, eta_b_inv, examples);
}

double Trace::total_loss() const {
  double total = 0.0;
  for (const TrialRecord& r : records) total += r.loss;
  return total;
}

std::vector<Vector> Trace::examples() const {
  std::vector<Vector> out;
  out.reserve(records.size());
  for (const TrialRecord& r : records) out.push_back(r.example);
  return out;
}

ExpectationParam Trace::final_mean() const {
  if (records.empty()) return initial_mean;
  const TrialRecord& last = records.back();
  return {next_mean(UpdateForm::gradient_step, last.prediction, last.inv_rate, last.example)};
}

Trace run(FamilyPtr family, const ExpectationParam& mu1, double eta_b_inv, Mode mode,
          std::span<const Vector> examples) {
  EstimatorState state = EstimatorState::init(family, mu1, eta_b_inv, mode);
  Trace trace{std::move(family), mode, mu1, eta_b_inv, {}};
  trace.records.reserve(examples.size());
  for (const Vector& x : examples) {
    const ExpectationParam& prediction = state.predict();
    const double loss = state.family().loss(prediction, x);
    trace.records.push_back({state.trial(), prediction.mu, x, loss, state.inv_rate()});
    state = state.update(x);
  }
  return trace;
}

}  // namespace expfam
