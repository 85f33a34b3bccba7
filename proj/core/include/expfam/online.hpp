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

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "expfam/families.hpp"

namespace expfam {

/// Initialization of the inverse learning rate relative to the prior weight.
enum class Mode {
  /// Starts at the prior weight; plays the regularized batch solution of the
  /// examples seen so far.
  incremental_offline,
  /// Starts at the prior weight plus one, anticipating the next example.
  forward,
};

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

/*
 * Estimator for on-line density estimation. Holds the current mean mu_t and
 * the inverse learning rate eta_t^{-1} = eta_1^{-1} + t - 1.
 *
 * Only inverse rates are stored. With eta_1^{-1} = 0 the first rate is
 * infinite, and none of the update forms needs it materialized.
 *
 * Values are immutable; update() returns the successor state.
 */
class EstimatorState {
 public:
  static EstimatorState init(FamilyPtr family, ExpectationParam mu1, double eta_b_inv,
                             Mode mode);

  const ExpectationParam& predict() const { return mean_; }
  /// Consumes x_t and returns the state at trial t + 1.
  EstimatorState update(const Vector& x) const;

  const Family& family() const { return *family_; }
  const FamilyPtr& family_ptr() const { return family_; }
  const ExpectationParam& mean() const { return mean_; }
  double inv_rate() const { return inv_rate_; }
  std::size_t trial() const { return trial_; }
  Mode mode() const { return mode_; }
  const ExpectationParam& initial_mean() const { return mu1_; }
  double eta_b_inv() const { return eta_b_inv_; }
  double initial_inv_rate() const { return initial_inv_rate(mode_, eta_b_inv_); }

  static double initial_inv_rate(Mode mode, double eta_b_inv) {
    return mode == Mode::forward ? eta_b_inv + 1.0 : eta_b_inv;
  }

 private:
  EstimatorState(FamilyPtr family, ExpectationParam mean, double inv_rate, std::size_t trial,
                 Mode mode, ExpectationParam mu1, double eta_b_inv);

  FamilyPtr family_;
  ExpectationParam mean_;
  double inv_rate_;
  std::size_t trial_;
  Mode mode_;
  ExpectationParam mu1_;
  double eta_b_inv_;
};

/// Algebraically equivalent one-step recursions for mu_{t+1}.
enum class UpdateForm {
  /// mu_{t+1} = mu_t - eta_t (mu_{t+1} - x_t), solved for mu_{t+1}.
  implicit_gradient,
  /// mu_{t+1} = eta_{t+1} (eta_t^{-1} mu_t + x_t).
  convex_combination,
  /// mu_{t+1} = mu_t - eta_{t+1} (mu_t - x_t). Used by EstimatorState.
  gradient_step,
};

/// One step of the chosen recursion; inv_rate is eta_t^{-1}.
Vector next_mean(UpdateForm form, const Vector& mu, double inv_rate, const Vector& x);

/// (eta_1^{-1} + t)^{-1} (eta_1^{-1} mu_1 + sum x_q); mu_1 for no examples.
ExpectationParam expanded_solution(const Family& family, const ExpectationParam& mu1,
                                   double eta1_inv, std::span<const Vector> examples);

/// Minimizer of eta_B^{-1} D_G(theta, theta_1) + sum of losses, in
/// expectation coordinates. PreconditionError when eta_b_inv = 0 and there
/// are no examples.
ExpectationParam batch_solution(const Family& family, const ExpectationParam& mu1,
                                double eta_b_inv, std::span<const Vector> examples);

struct TrialRecord {
  std::size_t trial = 0;
  Vector prediction;
  Vector example;
  double loss = 0.0;  // +inf allowed on the Bernoulli boundary
  double inv_rate = 0.0;
};

/// Full record of one on-line run.
struct Trace {
  FamilyPtr family;
  Mode mode = Mode::forward;
  ExpectationParam initial_mean;
  double eta_b_inv = 0.0;
  std::vector<TrialRecord> records;

  std::size_t size() const { return records.size(); }
  double initial_inv_rate() const { return EstimatorState::initial_inv_rate(mode, eta_b_inv); }
  double total_loss() const;
  std::vector<Vector> examples() const;
  /// Prediction the estimator would make at trial T + 1.
  ExpectationParam final_mean() const;
  double final_inv_rate() const { return initial_inv_rate() + static_cast<double>(size()); }
};

Trace run(FamilyPtr family, const ExpectationParam& mu1, double eta_b_inv, Mode mode,
          std::span<const Vector> examples);

}  // namespace expfam
