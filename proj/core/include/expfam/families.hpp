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

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <string_view>

#include "expfam/errors.hpp"

namespace expfam {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default strict-inequality margin used by all domain checks.
inline constexpr double kDomainMargin = 1e-12;

/// Natural (canonical) coordinate of a family member.
struct NaturalParam {
  Vector theta;

  static NaturalParam scalar(double v) { return {Vector::Constant(1, v)}; }
};

/// Expectation coordinate: the mean of the sufficient statistic.
struct ExpectationParam {
  Vector mu;

  static ExpectationParam scalar(double v) { return {Vector::Constant(1, v)}; }
};

/*
 * A regular exponential family with densities
 *
 *     P(x | theta) = exp(theta . x - G(theta)) P0(x).
 *
 * The cumulant G and its convex conjugate F (the dual) are strictly convex;
 * their gradients g = grad G and f = grad F are mutually inverse maps between
 * the natural domain and the expectation domain.
 *
 * The public methods validate their arguments against the family's domains
 * and forward to the protected do_* hooks, which subclasses implement
 * without checks. Instances are immutable and safe to share across threads.
 *
 * Losses follow the regret convention: loss(theta, x) = G(theta) - theta.x
 * plus retained_base_loss(x), the part of -ln P0(x) that the family keeps in
 * its textbook loss form (x^2/2 for the Gaussian, zero otherwise). The
 * remainder, omitted_base_loss(x), is constant across parameters and cancels
 * in every regret quantity.
 */
class Family {
 public:
  explicit Family(int dim, double domain_margin = kDomainMargin);
  virtual ~Family() = default;

  Family(const Family&) = delete;
  Family& operator=(const Family&) = delete;

  virtual std::string_view name() const = 0;
  int dim() const { return dim_; }
  double domain_margin() const { return margin_; }

  virtual bool in_natural_domain(const Vector& theta) const = 0;
  virtual bool in_expectation_domain(const Vector& mu) const = 0;
  /// Closure of the expectation domain on which dual() and loss() still
  /// return a value. Defaults to the open domain.
  virtual bool in_expectation_closure(const Vector& mu) const {
    return in_expectation_domain(mu);
  }
  /// Throws InputError if x cannot be an observation of this family.
  virtual void check_example(const Vector& x) const;

  double cumulant(const NaturalParam& theta) const;
  ExpectationParam link(const NaturalParam& theta) const;
  NaturalParam inverse_link(const ExpectationParam& mu) const;
  double dual(const ExpectationParam& mu) const;

  /// Fisher information G_ij(theta).
  Matrix cumulant_hessian(const NaturalParam& theta) const;
  /// F_ij(mu), the inverse of the Fisher information at f(mu).
  Matrix dual_hessian(const ExpectationParam& mu) const;
  /// Variance function V(mu) = G_ij(f(mu)).
  Matrix variance(const ExpectationParam& mu) const;

  /// Negative log-likelihood of x, may be +infinity on the closure.
  double loss(const ExpectationParam& mu, const Vector& x) const;
  double loss(const NaturalParam& theta, const Vector& x) const;
  /// loss() plus omitted_base_loss(): the full negative log-likelihood.
  double absolute_loss(const ExpectationParam& mu, const Vector& x) const;

  virtual double retained_base_loss(const Vector& x) const;
  virtual double omitted_base_loss(const Vector& x) const;

 protected:
  virtual double do_cumulant(const Vector& theta) const = 0;
  virtual Vector do_link(const Vector& theta) const = 0;
  virtual Vector do_inverse_link(const Vector& mu) const = 0;
  virtual double do_dual(const Vector& mu) const = 0;
  virtual Matrix do_cumulant_hessian(const Vector& theta) const = 0;
  virtual Matrix do_dual_hessian(const Vector& mu) const = 0;
  /// Loss in expectation coordinates; the default goes through f(mu).
  virtual double do_loss(const Vector& mu, const Vector& x) const;

  void require_dim(const Vector& v, const char* what) const;
  void require_natural(const Vector& theta) const;
  void require_expectation(const Vector& mu) const;
  void require_closure(const Vector& mu) const;

 private:
  int dim_;
  double margin_;
};

/// Independent coin flips per coordinate; G(theta) = ln(1 + e^theta).
class BernoulliFamily final : public Family {
 public:
  explicit BernoulliFamily(int dim = 1, double domain_margin = kDomainMargin)
      : Family(dim, domain_margin) {}

  std::string_view name() const override { return "bernoulli"; }
  bool in_natural_domain(const Vector& theta) const override;
  bool in_expectation_domain(const Vector& mu) const override;
  bool in_expectation_closure(const Vector& mu) const override;
  void check_example(const Vector& x) const override;

 protected:
  double do_cumulant(const Vector& theta) const override;
  Vector do_link(const Vector& theta) const override;
  Vector do_inverse_link(const Vector& mu) const override;
  double do_dual(const Vector& mu) const override;
  Matrix do_cumulant_hessian(const Vector& theta) const override;
  Matrix do_dual_hessian(const Vector& mu) const override;
  double do_loss(const Vector& mu, const Vector& x) const override;
};

/// Unit-covariance Gaussian in d dimensions; G(theta) = theta.theta / 2.
class GaussianFamily final : public Family {
 public:
  explicit GaussianFamily(int dim = 1, double domain_margin = kDomainMargin)
      : Family(dim, domain_margin) {}

  std::string_view name() const override { return "gaussian"; }
  bool in_natural_domain(const Vector& theta) const override;
  bool in_expectation_domain(const Vector& mu) const override;
  void check_example(const Vector& x) const override;

  double retained_base_loss(const Vector& x) const override;
  double omitted_base_loss(const Vector& x) const override;

 protected:
  double do_cumulant(const Vector& theta) const override;
  Vector do_link(const Vector& theta) const override;
  Vector do_inverse_link(const Vector& mu) const override;
  double do_dual(const Vector& mu) const override;
  Matrix do_cumulant_hessian(const Vector& theta) const override;
  Matrix do_dual_hessian(const Vector& mu) const override;
  double do_loss(const Vector& mu, const Vector& x) const override;
};

/// Gamma with unit shape, per coordinate; G(theta) = -ln(-theta), theta < 0.
class GammaFamily final : public Family {
 public:
  explicit GammaFamily(int dim = 1, double domain_margin = kDomainMargin)
      : Family(dim, domain_margin) {}

  std::string_view name() const override { return "gamma"; }
  bool in_natural_domain(const Vector& theta) const override;
  bool in_expectation_domain(const Vector& mu) const override;
  void check_example(const Vector& x) const override;

 protected:
  double do_cumulant(const Vector& theta) const override;
  Vector do_link(const Vector& theta) const override;
  Vector do_inverse_link(const Vector& mu) const override;
  double do_dual(const Vector& mu) const override;
  Matrix do_cumulant_hessian(const Vector& theta) const override;
  Matrix do_dual_hessian(const Vector& mu) const override;
  double do_loss(const Vector& mu, const Vector& x) const override;
};

using FamilyPtr = std::shared_ptr<const Family>;

/// Builds "bernoulli", "gaussian" or "gamma"; throws InputError otherwise.
FamilyPtr make_family(std::string_view name, int dim = 1);

}  // namespace expfam
