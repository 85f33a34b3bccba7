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

// Independent oracles shared by the unit and acceptance suites. Nothing here
// calls into the code paths it is used to check.

#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "expfam/expfam.hpp"

namespace expfam::testing {

/// Central finite-difference gradient of a scalar function.
inline Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                               double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector up = x, down = x;
    up[i] += h;
    down[i] -= h;
    g[i] = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

/// Golden-section minimizer of a unimodal function on [lo, hi].
inline double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                                 int iterations = 200) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Family whose cumulant is G(theta) + a.theta + b for a wrapped family G.
/// Its mean map shifts by a, so its expectation domain is the base one + a.
class AffineShiftedFamily final : public Family {
 public:
  AffineShiftedFamily(FamilyPtr base, Vector a, double b)
      : Family(base->dim()), base_(std::move(base)), a_(std::move(a)), b_(b) {}

  std::string_view name() const override { return "affine_shifted"; }
  bool in_natural_domain(const Vector& theta) const override {
    return base_->in_natural_domain(theta);
  }
  bool in_expectation_domain(const Vector& mu) const override {
    return base_->in_expectation_domain(mu - a_);
  }

 protected:
  double do_cumulant(const Vector& theta) const override {
    return base_->cumulant({theta}) + a_.dot(theta) + b_;
  }
  Vector do_link(const Vector& theta) const override { return base_->link({theta}).mu + a_; }
  Vector do_inverse_link(const Vector& mu) const override {
    return base_->inverse_link({mu - a_}).theta;
  }
  double do_dual(const Vector& mu) const override {
    const Vector theta = do_inverse_link(mu);
    return theta.dot(mu) - do_cumulant(theta);
  }
  Matrix do_cumulant_hessian(const Vector& theta) const override {
    return base_->cumulant_hessian({theta});
  }
  Matrix do_dual_hessian(const Vector& mu) const override {
    return base_->dual_hessian({mu - a_});
  }

 private:
  FamilyPtr base_;
  Vector a_;
  double b_;
};

/// Random natural parameter inside a comfortable region of the domain.
inline NaturalParam random_natural(const Family& family, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> wide(-4.0, 4.0);
  std::uniform_real_distribution<double> negative(-5.0, -0.2);
  Vector theta(family.dim());
  for (int i = 0; i < family.dim(); ++i)
    theta[i] = family.name() == "gamma" ? negative(rng) : wide(rng);
  return {theta};
}

/// Random example the family can emit.
inline Vector random_example(const Family& family, std::mt19937_64& rng) {
  Vector x(family.dim());
  for (int i = 0; i < family.dim(); ++i) {
    if (family.name() == "bernoulli") {
      x[i] = std::bernoulli_distribution(0.4)(rng) ? 1.0 : 0.0;
    } else if (family.name() == "gamma") {
      x[i] = std::uniform_real_distribution<double>(0.05, 5.0)(rng);
    } else {
      x[i] = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    }
  }
  return x;
}

inline std::vector<Vector> random_examples(const Family& family, std::size_t n,
                                           std::mt19937_64& rng) {
  std::vector<Vector> xs;
  xs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) xs.push_back(random_example(family, rng));
  return xs;
}

/// The T bits of `mask`, least significant first, as 1-d examples.
inline std::vector<Vector> bits_of(unsigned long mask, int length) {
  std::vector<Vector> xs;
  xs.reserve(length);
  for (int t = 0; t < length; ++t) xs.push_back(Vector::Constant(1, (mask >> t) & 1UL ? 1.0 : 0.0));
  return xs;
}

/// Forward coin estimator with mu_1 = 1/2 and no prior weight, computed
/// directly from the running counts: predicts (1/2 + ones) / (t + 1) - no
/// use of the library's update or loss code.
inline double coin_forward_total_loss(const std::vector<Vector>& bits) {
  double ones = 0.0, total = 0.0;
  for (std::size_t t = 0; t < bits.size(); ++t) {
    const double p = (0.5 + ones) / (static_cast<double>(t) + 1.0);
    total -= bits[t][0] == 1.0 ? std::log(p) : std::log(1.0 - p);
    ones += bits[t][0];
  }
  return total;
}

}  // namespace expfam::testing
