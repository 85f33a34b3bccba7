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

#include <optional>
#include <span>
#include <vector>

#include "expfam/online.hpp"
#include "expfam/regret.hpp"

namespace expfam {

struct LabeledExample {
  Vector x;
  double y = 0.0;
};

struct RegressionOptions {
  /// Re-factor the covariance after every rank-one update and throw
  /// NumericalError if the maintained inverse drifts beyond `tolerance`.
  bool verify_inverse = false;
  double tolerance = 1e-8;
};

struct RegressionPrediction;

/*
 * On-line linear least squares with a matrix learning rate.
 *
 *   incremental_offline  ridge regression: theta_t = (P + sum_{q<t} x_q x_q')^{-1} b_{t-1}
 *   forward              the current instance enters the covariance before
 *                        predicting: theta_t = (P + sum_{q<=t} x_q x_q')^{-1} b_{t-1}
 *
 * with P the prior matrix and b_t = sum_{q<=t} x_q y_q. The inverse of the
 * covariance (the learning-rate matrix) is maintained by Sherman-Morrison
 * rank-one updates.
 *
 * predict() and update() alternate: each instance is predicted once, then its
 * label is revealed. Values are immutable.
 */
class RegressionState {
 public:
  static RegressionState init(int dim, const Matrix& prior, Mode mode,
                              RegressionOptions options = {});

  RegressionPrediction predict(const Vector& x) const;
  RegressionState update(const LabeledExample& example) const;

  int dim() const { return static_cast<int>(theta_.size()); }
  Mode mode() const { return mode_; }
  const Vector& theta() const { return theta_; }
  /// Current inverse learning rate, P + sum of included x x'.
  const Matrix& inv_rate() const { return inv_rate_; }
  /// Maintained inverse of inv_rate().
  const Matrix& rate() const { return rate_; }
  const Vector& xy_sum() const { return xy_sum_; }
  const Matrix& prior() const { return prior_; }
  std::size_t trial() const { return trial_; }

  /// theta from a fresh Cholesky solve of inv_rate() against xy_sum().
  Vector dense_theta() const;

 private:
  RegressionState() = default;
  void add_instance(const Vector& x);
  void check_dim(const Vector& x) const;

  Vector theta_;
  Matrix inv_rate_;
  Matrix rate_;
  Vector xy_sum_;
  Matrix prior_;
  Mode mode_ = Mode::incremental_offline;
  RegressionOptions options_;
  std::size_t trial_ = 1;
  /// Instance already folded into the covariance by a forward predict().
  std::optional<Vector> pending_;
};

struct RegressionPrediction {
  double yhat = 0.0;
  RegressionState state;
};

struct RegressionRecord {
  std::size_t trial = 0;
  Vector x;
  double y = 0.0;
  double yhat = 0.0;
  double loss = 0.0;
  /// x_t' R_t x_t with R_t the learning-rate matrix used at trial t.
  double rate_quad = 0.0;
  /// x_{t+1}' R_t x_{t+1}; zero at the last trial.
  double next_rate_quad = 0.0;
};

struct RegressionTrace {
  Mode mode = Mode::forward;
  Matrix prior;
  std::vector<RegressionRecord> records;

  double total_loss() const;
};

RegressionTrace run_regression(std::span<const LabeledExample> sequence, const Matrix& prior,
                               Mode mode, RegressionOptions options = {});

/// min_theta theta' P theta / 2 + sum_t (x_t . theta - y_t)^2 / 2, by direct solve.
double regression_offline_optimum(std::span<const LabeledExample> sequence, const Matrix& prior);

/*
 * Regret of the run against the regularized batch optimum with theta_1 = 0,
 * together with
 *
 *   regression_expr      sum_t y_t^2 x_t' R_t x_t / 2
 *                        - sum_{t<T} yhat_{t+1}^2 x_{t+1}' R_t x_{t+1} / 2,
 *                        exact for the forward mode ("regression_forward_exact")
 *   regression_log_bound (a Y^2 / 2) ln(1 + T X^2 / a), when P = a I
 *   regression_log_bound_dim (d Y^2 / 2) ln(1 + T X^2 / a), when P = a I
 */
RegretReport regression_regret_report(std::span<const LabeledExample> sequence,
                                      const Matrix& prior, Mode mode,
                                      RegressionOptions options = {});

}  // namespace expfam
