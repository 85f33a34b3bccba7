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

#include "expfam/families.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace expfam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_finite(const Vector& v) { return v.allFinite(); }

std::string describe(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

// ln(1 + e^t) without overflow.
double softplus(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double logistic(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// x ln x with the continuous extension 0 ln 0 = 0.
double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

}  // namespace

Family::Family(int dim, double domain_margin) : dim_(dim), margin_(domain_margin) {
  if (dim < 1) throw InputError("family dimension must be positive");
  if (!(domain_margin >= 0.0)) throw InputError("domain margin must be nonnegative");
}

void Family::require_dim(const Vector& v, const char* what) const {
  if (v.size() != dim_) {
    std::ostringstream os;
    os << name() << ": " << what << " has length " << v.size() << ", expected " << dim_;
    throw InputError(os.str());
  }
}

void Family::require_natural(const Vector& theta) const {
  require_dim(theta, "natural parameter");
  if (!in_natural_domain(theta))
    throw DomainError(std::string(name()) + ": theta " + describe(theta) +
                      " outside the natural domain");
}

void Family::require_expectation(const Vector& mu) const {
  require_dim(mu, "expectation parameter");
  if (!in_expectation_domain(mu))
    throw DomainError(std::string(name()) + ": mu " + describe(mu) +
                      " outside the expectation domain");
}

void Family::require_closure(const Vector& mu) const {
  require_dim(mu, "expectation parameter");
  if (!in_expectation_closure(mu))
    throw DomainError(std::string(name()) + ": mu " + describe(mu) +
                      " outside the closure of the expectation domain");
}

void Family::check_example(const Vector& x) const {
  require_dim(x, "example");
  if (!all_finite(x)) throw InputError(std::string(name()) + ": example must be finite");
}

double Family::cumulant(const NaturalParam& theta) const {
  require_natural(theta.theta);
  return do_cumulant(theta.theta);
}

ExpectationParam Family::link(const NaturalParam& theta) const {
  require_natural(theta.theta);
  return {do_link(theta.theta)};
}

NaturalParam Family::inverse_link(const ExpectationParam& mu) const {
  require_expectation(mu.mu);
  return {do_inverse_link(mu.mu)};
}

double Family::dual(const ExpectationParam& mu) const {
  require_closure(mu.mu);
  return do_dual(mu.mu);
}

Matrix Family::cumulant_hessian(const NaturalParam& theta) const {
  require_natural(theta.theta);
  return do_cumulant_hessian(theta.theta);
}

Matrix Family::dual_hessian(const ExpectationParam& mu) const {
  require_expectation(mu.mu);
  return do_dual_hessian(mu.mu);
}

Matrix Family::variance(const ExpectationParam& mu) const {
  require_expectation(mu.mu);
  return do_cumulant_hessian(do_inverse_link(mu.mu));
}

double Family::loss(const ExpectationParam& mu, const Vector& x) const {
  check_example(x);
  require_closure(mu.mu);
  return do_loss(mu.mu, x);
}

double Family::loss(const NaturalParam& theta, const Vector& x) const {
  check_example(x);
  require_natural(theta.theta);
  return do_loss(do_link(theta.theta), x);
}

double Family::absolute_loss(const ExpectationParam& mu, const Vector& x) const {
  return loss(mu, x) + omitted_base_loss(x);
}

double Family::retained_base_loss(const Vector&) const { return 0.0; }
double Family::omitted_base_loss(const Vector&) const { return 0.0; }

double Family::do_loss(const Vector& mu, const Vector& x) const {
  const Vector theta = do_inverse_link(mu);
  return do_cumulant(theta) - theta.dot(x) + retained_base_loss(x);
}

// ---------------------------------------------------------------- Bernoulli

bool BernoulliFamily::in_natural_domain(const Vector& theta) const {
  return all_finite(theta);
}

bool BernoulliFamily::in_expectation_domain(const Vector& mu) const {
  const double m = domain_margin();
  return ((mu.array() > m) && (mu.array() < 1.0 - m)).all();
}

bool BernoulliFamily::in_expectation_closure(const Vector& mu) const {
  return ((mu.array() >= 0.0) && (mu.array() <= 1.0)).all();
}

void BernoulliFamily::check_example(const Vector& x) const {
  Family::check_example(x);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0 && x[i] != 1.0)
      throw InputError("bernoulli: example coordinates must be 0 or 1, got " + describe(x));
}

double BernoulliFamily::do_cumulant(const Vector& theta) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) s += softplus(theta[i]);
  return s;
}

Vector BernoulliFamily::do_link(const Vector& theta) const {
  return theta.unaryExpr([](double t) { return logistic(t); });
}

Vector BernoulliFamily::do_inverse_link(const Vector& mu) const {
  return mu.unaryExpr([](double m) { return std::log(m) - std::log1p(-m); });
}

double BernoulliFamily::do_dual(const Vector& mu) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) s += xlogx(mu[i]) + xlogx(1.0 - mu[i]);
  return s;
}

Matrix BernoulliFamily::do_cumulant_hessian(const Vector& theta) const {
  const Vector p = do_link(theta);
  return (p.array() * (1.0 - p.array())).matrix().asDiagonal();
}

Matrix BernoulliFamily::do_dual_hessian(const Vector& mu) const {
  return (1.0 / (mu.array() * (1.0 - mu.array()))).matrix().asDiagonal();
}

double BernoulliFamily::do_loss(const Vector& mu, const Vector& x) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    // Zero-likelihood outcomes on the boundary cost +inf; matching ones cost 0.
    const double p = x[i] == 1.0 ? mu[i] : 1.0 - mu[i];
    if (p == 0.0) return kInf;
    s -= std::log(p);
  }
  return s;
}

// ----------------------------------------------------------------- Gaussian

bool GaussianFamily::in_natural_domain(const Vector& theta) const { return all_finite(theta); }
bool GaussianFamily::in_expectation_domain(const Vector& mu) const { return all_finite(mu); }

void GaussianFamily::check_example(const Vector& x) const { Family::check_example(x); }

double GaussianFamily::retained_base_loss(const Vector& x) const { return 0.5 * x.squaredNorm(); }

double GaussianFamily::omitted_base_loss(const Vector&) const {
  return 0.5 * dim() * std::log(2.0 * std::numbers::pi);
}

double GaussianFamily::do_cumulant(const Vector& theta) const { return 0.5 * theta.squaredNorm(); }
Vector GaussianFamily::do_link(const Vector& theta) const { return theta; }
Vector GaussianFamily::do_inverse_link(const Vector& mu) const { return mu; }
double GaussianFamily::do_dual(const Vector& mu) const { return 0.5 * mu.squaredNorm(); }

Matrix GaussianFamily::do_cumulant_hessian(const Vector& theta) const {
  return Matrix::Identity(theta.size(), theta.size());
}

Matrix GaussianFamily::do_dual_hessian(const Vector& mu) const {
  return Matrix::Identity(mu.size(), mu.size());
}

double GaussianFamily::do_loss(const Vector& mu, const Vector& x) const {
  return 0.5 * (mu - x).squaredNorm();
}

// -------------------------------------------------------------------- Gamma

bool GammaFamily::in_natural_domain(const Vector& theta) const {
  return all_finite(theta) && (theta.array() < -domain_margin()).all();
}

bool GammaFamily::in_expectation_domain(const Vector& mu) const {
  return all_finite(mu) && (mu.array() > domain_margin()).all();
}

void GammaFamily::check_example(const Vector& x) const {
  Family::check_example(x);
  if (!(x.array() > 0.0).all())
    throw InputError("gamma: example coordinates must be positive, got " + describe(x));
}

double GammaFamily::do_cumulant(const Vector& theta) const {
  return -(-theta.array()).log().sum();
}

Vector GammaFamily::do_link(const Vector& theta) const { return (-1.0 / theta.array()).matrix(); }
Vector GammaFamily::do_inverse_link(const Vector& mu) const { return (-1.0 / mu.array()).matrix(); }

double GammaFamily::do_dual(const Vector& mu) const {
  return (-1.0 - mu.array().log()).sum();
}

Matrix GammaFamily::do_cumulant_hessian(const Vector& theta) const {
  return (1.0 / theta.array().square()).matrix().asDiagonal();
}

Matrix GammaFamily::do_dual_hessian(const Vector& mu) const {
  return (1.0 / mu.array().square()).matrix().asDiagonal();
}

double GammaFamily::do_loss(const Vector& mu, const Vector& x) const {
  return (mu.array().log() + x.array() / mu.array()).sum();
}

FamilyPtr make_family(std::string_view name, int dim) {
  if (name == "bernoulli") return std::make_shared<BernoulliFamily>(dim);
  if (name == "gaussian") return std::make_shared<GaussianFamily>(dim);
  if (name == "gamma") return std::make_shared<GammaFamily>(dim);
  throw InputError("unknown family '" + std::string(name) + "'");
}

}  // namespace expfam
