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

#include "expfam/regret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "expfam/bregman.hpp"

namespace expfam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Slack used when a bound may hold with equality.
bool at_most(double value, double bound) {
  if (std::isinf(bound) && bound > 0) return true;
  return value <= bound + 1e-9 * std::max(1.0, std::abs(bound));
}

bool offline_defined(const Trace& trace) { return trace.eta_b_inv > 0.0 || trace.size() > 0; }

// Mean used at trial t (1-based) for t = 1..T+1.
ExpectationParam mean_at(const Trace& trace, std::size_t t) {
  if (t <= trace.size()) return {trace.records[t - 1].prediction};
  return trace.final_mean();
}

bool all_means_interior(const Trace& trace) {
  const Family& fam = *trace.family;
  if (!fam.in_expectation_domain(trace.initial_mean.mu)) return false;
  for (const TrialRecord& r : trace.records)
    if (!fam.in_expectation_domain(r.prediction)) return false;
  return fam.in_expectation_domain(trace.final_mean().mu);
}

double retained_sum(const Family& family, std::span<const Vector> examples) {
  double s = 0.0;
  for (const Vector& x : examples) s += family.retained_base_loss(x);
  return s;
}

double regret_of(const Trace& trace) {
  if (!offline_defined(trace)) return 0.0;
  const auto xs = trace.examples();
  const ExpectationParam mu_b =
      batch_solution(*trace.family, trace.initial_mean, trace.eta_b_inv, xs);
  return trace.total_loss() -
         offline_objective_at(*trace.family, trace.initial_mean, trace.eta_b_inv, xs, mu_b);
}

}  // namespace

IdentityCheck IdentityCheck::make(double lhs, double rhs) {
  IdentityCheck c;
  c.lhs = lhs;
  c.rhs = rhs;
  c.residual = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
  if (std::isnan(c.residual)) c.residual = kInf;
  return c;
}

IdentityCheck IdentityCheck::not_applicable() {
  IdentityCheck c;
  c.applicable = false;
  return c;
}

bool RegretReport::identities_pass(double tolerance) const {
  return std::all_of(identities.begin(), identities.end(),
                     [&](const auto& kv) { return kv.second.passed(tolerance); });
}

double offline_objective_at(const Family& family, const ExpectationParam& mu1, double eta_b_inv,
                            std::span<const Vector> examples, const ExpectationParam& at) {
  double value = 0.0;
  if (eta_b_inv > 0.0)
    value += eta_b_inv * divergence_natural(family, family.inverse_link(at),
                                            family.inverse_link(mu1));
  for (const Vector& x : examples) value += family.loss(at, x);
  return value;
}

double offline_objective_value(const Family& family, const ExpectationParam& mu1,
                               double eta_b_inv, std::span<const Vector> examples) {
  const ExpectationParam mu_b = batch_solution(family, mu1, eta_b_inv, examples);
  const double weight = eta_b_inv + static_cast<double>(examples.size());
  double value = -weight * family.dual(mu_b) + retained_sum(family, examples);
  if (eta_b_inv > 0.0) value += eta_b_inv * family.dual(mu1);
  return value;
}

IdentityCheck verify_offline_closed_form(const Family& family, const ExpectationParam& mu1,
                                         double eta_b_inv, std::span<const Vector> examples) {
  const ExpectationParam mu_b = batch_solution(family, mu1, eta_b_inv, examples);
  const double direct = offline_objective_at(family, mu1, eta_b_inv, examples, mu_b);
  return IdentityCheck::make(direct, offline_objective_value(family, mu1, eta_b_inv, examples));
}

IdentityCheck verify_loss_decomposition(const Trace& trace) {
  if (!all_means_interior(trace)) return IdentityCheck::not_applicable();
  const Family& fam = *trace.family;
  const std::size_t n = trace.size();

  double rhs = 0.0;
  for (std::size_t t = 1; t <= n; ++t) {
    const double next_inv = trace.records[t - 1].inv_rate + 1.0;
    rhs += next_inv * divergence_expectation(fam, mean_at(trace, t + 1), mean_at(trace, t));
  }
  const double inv1 = trace.initial_inv_rate();
  if (inv1 > 0.0) rhs += inv1 * fam.dual(trace.initial_mean);
  rhs -= trace.final_inv_rate() * fam.dual(trace.final_mean());
  const auto xs = trace.examples();
  rhs += retained_sum(fam, xs);
  return IdentityCheck::make(trace.total_loss(), rhs);
}

RegretIdentity verify_regret_identity(const Trace& trace) {
  RegretIdentity out;
  if (!offline_defined(trace) || !all_means_interior(trace)) {
    out.check = IdentityCheck::not_applicable();
    return out;
  }
  const Family& fam = *trace.family;
  const auto xs = trace.examples();
  const ExpectationParam mu_b = batch_solution(fam, trace.initial_mean, trace.eta_b_inv, xs);
  if (!fam.in_expectation_domain(mu_b.mu)) {
    out.check = IdentityCheck::not_applicable();
    return out;
  }
  const NaturalParam theta_b = fam.inverse_link(mu_b);
  const NaturalParam theta_1 = fam.inverse_link(trace.initial_mean);
  const ExpectationParam mu_end = trace.final_mean();

  const double lhs = trace.total_loss() -
                     offline_objective_at(fam, trace.initial_mean, trace.eta_b_inv, xs, mu_b);

  const double weight_gap = trace.initial_inv_rate() - trace.eta_b_inv;
  out.initial_term = weight_gap == 0.0 ? 0.0 : weight_gap * divergence_natural(fam, theta_b, theta_1);
  out.final_term =
      trace.final_inv_rate() * divergence_natural(fam, theta_b, fam.inverse_link(mu_end));
  for (std::size_t t = 1; t <= trace.size(); ++t) {
    const double next_inv = trace.records[t - 1].inv_rate + 1.0;
    out.step_sum += next_inv * divergence_natural(fam, fam.inverse_link(mean_at(trace, t)),
                                                  fam.inverse_link(mean_at(trace, t + 1)));
  }
  out.final_gap = (mu_end.mu - mu_b.mu).cwiseAbs().maxCoeff();
  out.check = IdentityCheck::make(lhs, out.initial_term - out.final_term + out.step_sum);
  return out;
}

BernoulliClosedForm bernoulli_closed_form(const Trace& trace) {
  if (!trace.family || trace.family->name() != "bernoulli" || trace.family->dim() != 1)
    throw PreconditionError("closed form needs a one-dimensional Bernoulli trace");
  if (trace.mode != Mode::forward || trace.eta_b_inv != 0.0 ||
      trace.initial_mean.mu[0] != 0.5)
    throw PreconditionError("closed form needs the forward estimator with eta_B^{-1} = 0, mu_1 = 1/2");

  const double n = static_cast<double>(trace.size());
  double ones = 0.0;
  for (const TrialRecord& r : trace.records) ones += r.example[0];

  // ln T! - ln prod_{t<=k}(t - 1/2) - ln prod_{t<=T-k}(t - 1/2), using
  // prod_{t<=m}(t - 1/2) = Gamma(m + 1/2) / Gamma(1/2) and Gamma(1/2)^2 = pi.
  BernoulliClosedForm out;
  out.total_loss = std::lgamma(n + 1.0) - std::lgamma(ones + 0.5) -
                   std::lgamma(n - ones + 0.5) + std::log(std::numbers::pi);
  out.regret = out.total_loss;
  if (n > 0) out.regret += n * trace.family->dual(ExpectationParam::scalar(ones / n));
  out.bound = 0.5 * std::log(n + 1.0) + 1.0;
  return out;
}

GaussianBounds gaussian_bounds(const Trace& trace) {
  if (!trace.family || trace.family->name() != "gaussian")
    throw PreconditionError("gaussian bounds need a Gaussian trace");
  if (!trace.initial_mean.mu.isZero(0.0))
    throw PreconditionError("gaussian bounds assume mu_1 = 0");

  GaussianBounds out;
  const double regret = regret_of(trace);
  const double inv1 = trace.initial_inv_rate();
  const std::size_t n = trace.size();

  if (inv1 == 0.0 && n > 0) {
    out.exact_expr = {kInf, false, true};
  } else {
    double expr = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const TrialRecord& r = trace.records[t];
      expr += r.example.squaredNorm() / (2.0 * r.inv_rate);
      if (t + 1 < n) expr -= trace.records[t + 1].prediction.squaredNorm() / (2.0 * r.inv_rate);
    }
    out.exact_expr = {expr, true, at_most(regret, expr)};
  }

  if (inv1 > 1.0) {
    double max_sq = 0.0;
    for (const TrialRecord& r : trace.records) max_sq = std::max(max_sq, r.example.squaredNorm());
    const double value = 0.5 * max_sq * std::log1p(static_cast<double>(n) / (inv1 - 1.0));
    out.log_bound = {value, true,
                     at_most(regret, value) && at_most(out.exact_expr.value, value)};
  } else {
    out.log_bound = {kInf, false, true};
  }
  return out;
}

GammaBound gamma_bound(const Trace& trace) {
  if (!trace.family || trace.family->name() != "gamma" || trace.family->dim() != 1)
    throw PreconditionError("gamma bound needs a one-dimensional Gamma trace");
  if (trace.mode != Mode::incremental_offline || !(trace.eta_b_inv >= 1.0))
    throw PreconditionError("gamma bound needs the incremental estimator with eta_B^{-1} >= 1");

  const Family& fam = *trace.family;
  GammaBound out;
  out.min_scale = trace.initial_mean.mu[0];
  out.steps.reserve(trace.size());
  for (std::size_t t = 1; t <= trace.size(); ++t) {
    const TrialRecord& rec = trace.records[t - 1];
    const double mu = rec.prediction[0];
    const double x = rec.example[0];
    const double inv = rec.inv_rate;
    const double next_inv = inv + 1.0;

    GammaChainStep step;
    step.trial = t;
    step.ratio = x / mu;
    const double r = step.ratio;
    step.term = next_inv * divergence_expectation(fam, mean_at(trace, t + 1), mean_at(trace, t));
    step.log_form = next_inv * std::log1p((1.0 - r) / (inv + r)) + r - 1.0;
    step.relaxed = (1.0 - r) * (1.0 - r) / (inv + r);
    step.cap = (1.0 - r) * (1.0 - r) / inv;
    out.steps.push_back(step);

    out.step_sum += step.term;
    out.rate_sum += 1.0 / inv;
    out.max_example = std::max(out.max_example, x);
    out.min_scale = std::min(out.min_scale, x);
  }
  const double scale = out.max_example / out.min_scale;
  out.bound = scale * scale * out.rate_sum;
  return out;
}

MeanValuePoint taylor_mean_value(const Family& family, double mu_t, double mu_next) {
  if (family.dim() != 1) throw PreconditionError("mean-value search is one-dimensional");
  MeanValuePoint out;
  if (mu_t == mu_next) {
    out.every_lambda = true;
    return out;
  }
  const double div = divergence_expectation(family, ExpectationParam::scalar(mu_next),
                                            ExpectationParam::scalar(mu_t));
  const double half_sq = 0.5 * (mu_next - mu_t) * (mu_next - mu_t);
  auto residual = [&](double lambda) {
    const double mid = lambda * mu_t + (1.0 - lambda) * mu_next;
    return family.dual_hessian(ExpectationParam::scalar(mid))(0, 0) * half_sq - div;
  };

  // The curvature need not be monotone along the segment (the Bernoulli dual
  // is not), so bracket on a grid before bisecting.
  constexpr int kGrid = 512;
  std::vector<double> grid(kGrid + 1);
  double max_abs = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    grid[i] = residual(static_cast<double>(i) / kGrid);
    max_abs = std::max(max_abs, std::abs(grid[i]));
  }
  if (max_abs <= 1e-12 * std::max(std::abs(div), 1e-300)) {
    out.every_lambda = true;
    out.residual = max_abs;
    return out;
  }
  int bracket = -1;
  for (int i = 0; i < kGrid && bracket < 0; ++i) {
    if (grid[i] == 0.0) {
      out.lambda = static_cast<double>(i) / kGrid;
      return out;
    }
    if ((grid[i] < 0) != (grid[i + 1] < 0)) bracket = i;
  }
  if (bracket < 0) throw NumericalError("mean-value search found no sign change of the Taylor residual");
  double lo = static_cast<double>(bracket) / kGrid;
  double hi = static_cast<double>(bracket + 1) / kGrid;
  double r_lo = grid[bracket];
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r_mid = residual(mid);
    if (r_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((r_mid < 0) == (r_lo < 0)) {
      lo = mid;
      r_lo = r_mid;
    } else {
      hi = mid;
    }
  }
  out.lambda = 0.5 * (lo + hi);
  out.residual = std::abs(residual(out.lambda)) / std::max(1.0, std::abs(div));
  return out;
}

RegretReport regret_report(const Trace& trace) {
  RegretReport rep;
  const Family& fam = *trace.family;
  const auto xs = trace.examples();
  rep.online_total = trace.total_loss();
  if (offline_defined(trace)) {
    const ExpectationParam mu_b = batch_solution(fam, trace.initial_mean, trace.eta_b_inv, xs);
    rep.offline_optimum = offline_objective_at(fam, trace.initial_mean, trace.eta_b_inv, xs, mu_b);
    rep.identities["offline_closed_form"] =
        verify_offline_closed_form(fam, trace.initial_mean, trace.eta_b_inv, xs);
  }
  rep.regret = rep.online_total - rep.offline_optimum;

  rep.identities["loss_decomposition"] = verify_loss_decomposition(trace);
  const RegretIdentity ident = verify_regret_identity(trace);
  rep.identities["regret_identity"] = ident.check;
  if (trace.mode == Mode::incremental_offline && ident.check.applicable) {
    IdentityCheck c = IdentityCheck::make(0.0, ident.final_gap + std::abs(ident.initial_term));
    rep.identities["incremental_matches_batch"] = c;
  }

  if (fam.name() == "bernoulli" && fam.dim() == 1 && trace.mode == Mode::forward &&
      trace.eta_b_inv == 0.0 && trace.initial_mean.mu[0] == 0.5) {
    const BernoulliClosedForm cf = bernoulli_closed_form(trace);
    rep.identities["bernoulli_closed_form"] = IdentityCheck::make(rep.online_total, cf.total_loss);
    rep.bounds["bernoulli_log_bound"] = {cf.bound, true, at_most(rep.regret, cf.bound)};
  }
  if (fam.name() == "gaussian" && trace.initial_mean.mu.isZero(0.0)) {
    const GaussianBounds gb = gaussian_bounds(trace);
    rep.bounds["gaussian_exact_expr"] = gb.exact_expr;
    rep.bounds["gaussian_log_bound"] = gb.log_bound;
    if (trace.mode == Mode::forward && gb.exact_expr.applicable)
      rep.identities["gaussian_forward_exact"] = IdentityCheck::make(rep.regret, gb.exact_expr.value);
  }
  if (fam.name() == "gamma" && fam.dim() == 1 && trace.mode == Mode::incremental_offline &&
      trace.eta_b_inv >= 1.0) {
    const GammaBound gb = gamma_bound(trace);
    bool chain = true;
    for (const GammaChainStep& s : gb.steps) chain = chain && s.term <= s.cap + 1e-12;
    rep.bounds["gamma_bound"] = {gb.bound, true, chain && at_most(rep.regret, gb.bound)};
  }
  return rep;
}

}  // namespace expfam
