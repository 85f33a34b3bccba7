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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "expfam/online.hpp"

namespace expfam {

/// Relative tolerance for the exact identities.
inline constexpr double kIdentityTolerance = 1e-8;

/// Two sides of an exact identity. residual = |lhs - rhs| / max(1, |lhs|).
struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  bool applicable = true;

  bool passed(double tolerance = kIdentityTolerance) const {
    return !applicable || residual < tolerance;
  }
  static IdentityCheck make(double lhs, double rhs);
  static IdentityCheck not_applicable();
};

/// A bound value; applicable = false when its hypotheses fail.
struct BoundValue {
  double value = 0.0;
  bool applicable = true;
  /// Whether the quantity it bounds stayed below it (meaningful if applicable).
  bool holds = true;
};

struct RegretReport {
  double online_total = 0.0;     // extended real
  double offline_optimum = 0.0;  // regularized batch objective at mu_B
  double regret = 0.0;           // online_total - offline_optimum
  std::map<std::string, IdentityCheck> identities;
  std::map<std::string, BoundValue> bounds;

  bool identities_pass(double tolerance = kIdentityTolerance) const;
};

/// eta_B^{-1} D_G(theta, theta_1) + sum_t L_t(theta) evaluated at mean `at`.
/// The divergence term is skipped when eta_b_inv = 0.
double offline_objective_at(const Family& family, const ExpectationParam& mu1, double eta_b_inv,
                            std::span<const Vector> examples, const ExpectationParam& at);

/// Closed form of the regularized batch minimum,
/// eta_B^{-1} F(mu_1) - (eta_B^{-1} + T) F(mu_B) + sum of retained base losses.
double offline_objective_value(const Family& family, const ExpectationParam& mu1,
                               double eta_b_inv, std::span<const Vector> examples);

/// Closed form above against direct evaluation at mu_B.
IdentityCheck verify_offline_closed_form(const Family& family, const ExpectationParam& mu1,
                                         double eta_b_inv, std::span<const Vector> examples);

/*
 * Loss decomposition through the dual:
 *
 *     sum_t L_t(theta_t) = sum_t eta_{t+1}^{-1} D_F(mu_{t+1}, mu_t)
 *                          + eta_1^{-1} F(mu_1) - eta_{T+1}^{-1} F(mu_{T+1})
 *                          + sum of retained base losses.
 *
 * Not applicable when some mean touches the boundary.
 */
IdentityCheck verify_loss_decomposition(const Trace& trace);

/// The regret identity split into its right-hand terms.
struct RegretIdentity {
  IdentityCheck check;
  /// (eta_1^{-1} - eta_B^{-1}) D_G(theta_B, theta_1); zero for incremental.
  double initial_term = 0.0;
  /// eta_{T+1}^{-1} D_G(theta_B, theta_{T+1}); zero for incremental.
  double final_term = 0.0;
  /// sum_t eta_{t+1}^{-1} D_G(theta_t, theta_{t+1}).
  double step_sum = 0.0;
  /// |mu_{T+1} - mu_B|, max norm.
  double final_gap = 0.0;
};

/*
 * For both modes,
 *
 *     sum_t L_t(theta_t) - (L_{1..T}(theta_B) + eta_B^{-1} D_G(theta_B, theta_1))
 *       = (eta_1^{-1} - eta_B^{-1}) D_G(theta_B, theta_1)
 *         - eta_{T+1}^{-1} D_G(theta_B, theta_{T+1})
 *         + sum_t eta_{t+1}^{-1} D_G(theta_t, theta_{t+1}).
 */
RegretIdentity verify_regret_identity(const Trace& trace);

struct BernoulliClosedForm {
  double total_loss = 0.0;
  double regret = 0.0;
  /// (1/2) ln(T + 1) + 1.
  double bound = 0.0;
};

/// Gamma-function form of the total loss of the forward coin estimator with
/// eta_B^{-1} = 0 and mu_1 = 1/2. PreconditionError for any other setup.
BernoulliClosedForm bernoulli_closed_form(const Trace& trace);

struct GaussianBounds {
  /// sum_t eta_t x_t^2/2 - sum_{t<T} eta_t mu_{t+1}^2/2; infinite when eta_1 is.
  BoundValue exact_expr;
  /// (X^2/2) ln(1 + T/(eta_1^{-1} - 1)), applicable when eta_1^{-1} > 1.
  BoundValue log_bound;
};

/// Requires a Gaussian trace with mu_1 = 0.
GaussianBounds gaussian_bounds(const Trace& trace);

/// One trial of the Gamma divergence chain, r = x_t / mu_t:
///   term = eta_{t+1}^{-1} D_F(mu_{t+1}, mu_t)
///        = eta_{t+1}^{-1} ln(1 + (1-r)/(eta_t^{-1} + r)) + r - 1
///       <= (1-r)^2 / (eta_t^{-1} + r)
///       <= eta_t (1-r)^2.
struct GammaChainStep {
  std::size_t trial = 0;
  double ratio = 0.0;
  double term = 0.0;
  double log_form = 0.0;
  double relaxed = 0.0;
  double cap = 0.0;
};

struct GammaBound {
  /// (X^2 / Z^2) sum_t eta_t with X = max x_t and Z = min({x_t} u {mu_1}).
  double bound = 0.0;
  double step_sum = 0.0;
  double max_example = 0.0;
  double min_scale = 0.0;
  double rate_sum = 0.0;
  std::vector<GammaChainStep> steps;
};

/// Requires a one-dimensional Gamma trace in incremental mode with
/// eta_B^{-1} >= 1.
GammaBound gamma_bound(const Trace& trace);

struct MeanValuePoint {
  /// Weight on mu_t of the intermediate point lambda mu_t + (1-lambda) mu_{t+1}.
  double lambda = 0.5;
  double residual = 0.0;
  /// Constant curvature: every lambda works.
  bool every_lambda = false;
};

/// Finds the intermediate point at which the second-order Taylor form of
/// D_F(mu_next, mu_t) is exact. One-dimensional families only.
MeanValuePoint taylor_mean_value(const Family& family, double mu_t, double mu_next);

/// Everything that applies to the trace's family and configuration.
RegretReport regret_report(const Trace& trace);

}  // namespace expfam
