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

#include "expfam/regression.hpp"

#include <algorithm>
#include <cmath>

namespace expfam {

namespace {

bool at_most(double value, double bound) {
  return value <= bound + 1e-9 * std::max(1.0, std::abs(bound));
}

// Returns a if prior == a I, nullopt otherwise.
std::optional<double> scalar_prior(const Matrix& prior) {
  const double a = prior(0, 0);
  const Matrix expected = a * Matrix::Identity(prior.rows(), prior.cols());
  if ((prior - expected).cwiseAbs().maxCoeff() > 1e-15 * std::max(1.0, std::abs(a)))
    return std::nullopt;
  return a;
}

}  // namespace

RegressionState RegressionState::init(int dim, const Matrix& prior, Mode mode,
                                      RegressionOptions options) {
  if (dim < 1) throw InputError("regression dimension must be positive");
  if (prior.rows() != dim || prior.cols() != dim)
    throw InputError("prior matrix must be dim x dim");
  if (!prior.allFinite()) throw InputError("prior matrix must be finite");
  if ((prior - prior.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, prior.cwiseAbs().maxCoeff()))
    throw InputError("prior matrix must be symmetric");
  Eigen::LLT<Matrix> llt(prior);
  if (llt.info() != Eigen::Success) throw InputError("prior matrix must be positive definite");

  RegressionState s;
  s.theta_ = Vector::Zero(dim);
  s.inv_rate_ = prior;
  s.rate_ = llt.solve(Matrix::Identity(dim, dim));
  s.xy_sum_ = Vector::Zero(dim);
  s.prior_ = prior;
  s.mode_ = mode;
  s.options_ = options;
  return s;
}

void RegressionState::check_dim(const Vector& x) const {
  if (x.size() != dim()) throw InputError("instance has the wrong dimension");
  if (!x.allFinite()) throw InputError("instance must be finite");
}

void RegressionState::add_instance(const Vector& x) {
  inv_rate_.noalias() += x * x.transpose();
  const Vector rx = rate_ * x;
  rate_.noalias() -= (rx * rx.transpose()) / (1.0 + x.dot(rx));
  if (options_.verify_inverse) {
    Eigen::LLT<Matrix> llt(inv_rate_);
    const Matrix fresh = llt.solve(Matrix::Identity(dim(), dim()));
    const double drift = (fresh - rate_).cwiseAbs().maxCoeff();
    if (!(drift <= options_.tolerance))
      throw NumericalError("rank-one inverse drifted from the dense solve");
  }
}

RegressionPrediction RegressionState::predict(const Vector& x) const {
  check_dim(x);
  RegressionState next = *this;
  if (mode_ == Mode::forward) {
    if (pending_) throw PreconditionError("forward regression: previous instance still unlabeled");
    next.add_instance(x);
    next.theta_ = next.rate_ * next.xy_sum_;
    next.pending_ = x;
  }
  return {x.dot(next.theta_), std::move(next)};
}

RegressionState RegressionState::update(const LabeledExample& example) const {
  check_dim(example.x);
  if (!std::isfinite(example.y)) throw InputError("label must be finite");
  RegressionState next = *this;
  if (mode_ == Mode::forward) {
    if (!pending_ || *pending_ != example.x)
      throw PreconditionError("forward regression: update before predicting this instance");
    next.pending_.reset();
  } else {
    next.add_instance(example.x);
  }
  next.xy_sum_ += example.y * example.x;
  next.theta_ = next.rate_ * next.xy_sum_;
  ++next.trial_;
  return next;
}

Vector RegressionState::dense_theta() const { return inv_rate_.llt().solve(xy_sum_); }

double RegressionTrace::total_loss() const {
  double s = 0.0;
  for (const RegressionRecord& r : records) s += r.loss;
  return s;
}

RegressionTrace run_regression(std::span<const LabeledExample> sequence, const Matrix& prior,
                               Mode mode, RegressionOptions options) {
  RegressionTrace trace{mode, prior, {}};
  trace.records.reserve(sequence.size());
  RegressionState state = RegressionState::init(static_cast<int>(prior.rows()), prior, mode, options);
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    const LabeledExample& ex = sequence[t];
    RegressionPrediction p = state.predict(ex.x);
    // Learning-rate matrix in force at this trial: the forward mode has
    // already folded x_t in, the incremental one has not.
    const Matrix& rate = p.state.rate();
    RegressionRecord rec;
    rec.trial = t + 1;
    rec.x = ex.x;
    rec.y = ex.y;
    rec.yhat = p.yhat;
    rec.loss = 0.5 * (p.yhat - ex.y) * (p.yhat - ex.y);
    rec.rate_quad = ex.x.dot(rate * ex.x);
    if (t + 1 < sequence.size()) rec.next_rate_quad = sequence[t + 1].x.dot(rate * sequence[t + 1].x);
    trace.records.push_back(std::move(rec));
    state = p.state.update(ex);
  }
  return trace;
}

double regression_offline_optimum(std::span<const LabeledExample> sequence, const Matrix& prior) {
  Matrix cov = prior;
  Vector b = Vector::Zero(prior.rows());
  for (const LabeledExample& ex : sequence) {
    cov.noalias() += ex.x * ex.x.transpose();
    b += ex.y * ex.x;
  }
  const Vector theta = cov.llt().solve(b);
  double value = 0.5 * theta.dot(prior * theta);
  for (const LabeledExample& ex : sequence) {
    const double r = ex.x.dot(theta) - ex.y;
    value += 0.5 * r * r;
  }
  return value;
}

RegretReport regression_regret_report(std::span<const LabeledExample> sequence,
                                      const Matrix& prior, Mode mode, RegressionOptions options) {
  const RegressionTrace trace = run_regression(sequence, prior, mode, options);
  RegretReport rep;
  rep.online_total = trace.total_loss();
  rep.offline_optimum = regression_offline_optimum(sequence, prior);
  rep.regret = rep.online_total - rep.offline_optimum;

  const std::size_t n = trace.records.size();
  double expr = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const RegressionRecord& r = trace.records[t];
    expr += 0.5 * r.y * r.y * r.rate_quad;
    if (t + 1 < n) {
      const double next = trace.records[t + 1].yhat;
      expr -= 0.5 * next * next * r.next_rate_quad;
    }
  }
  rep.bounds["regression_expr"] = {expr, true, at_most(rep.regret, expr)};
  if (mode == Mode::forward)
    rep.identities["regression_forward_exact"] = IdentityCheck::make(rep.regret, expr);

  if (const auto a = scalar_prior(prior)) {
    double max_x = 0.0, max_y = 0.0;
    for (const LabeledExample& ex : sequence) {
      max_x = std::max(max_x, ex.x.cwiseAbs().maxCoeff());
      max_y = std::max(max_y, std::abs(ex.y));
    }
    const double log_term = std::log1p(static_cast<double>(n) * max_x * max_x / *a);
    const double bound = 0.5 * *a * max_y * max_y * log_term;
    rep.bounds["regression_log_bound"] = {bound, true, at_most(rep.regret, bound)};
    const double dim_bound = 0.5 * static_cast<double>(prior.rows()) * max_y * max_y * log_term;
    rep.bounds["regression_log_bound_dim"] = {dim_bound, true, at_most(rep.regret, dim_bound)};
  }
  return rep;
}

}  // namespace expfam
