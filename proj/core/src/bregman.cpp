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

#include "expfam/bregman.hpp"

#include <algorithm>

namespace expfam {

double divergence_natural(const Family& family, const NaturalParam& theta_new,
                          const NaturalParam& theta_old) {
  const ExpectationParam mu_old = family.link(theta_old);
  const double g_new = family.cumulant(theta_new);
  const Vector diff = theta_new.theta - theta_old.theta;
  if (diff.norm() < kQuadraticCrossover) {
    const Matrix h = family.cumulant_hessian(theta_old);
    return 0.5 * diff.dot(h * diff);
  }
  const double value = g_new - family.cumulant(theta_old) - diff.dot(mu_old.mu);
  return std::max(0.0, value);
}

double divergence_expectation(const Family& family, const ExpectationParam& mu_a,
                              const ExpectationParam& mu_b) {
  const NaturalParam theta_b = family.inverse_link(mu_b);
  const double f_a = family.dual(mu_a);
  if (!family.in_expectation_domain(mu_a.mu))
    throw DomainError(std::string(family.name()) + ": divergence argument on the boundary");
  const Vector diff = mu_a.mu - mu_b.mu;
  if (diff.norm() < kQuadraticCrossover) {
    const Matrix h = family.dual_hessian(mu_b);
    return 0.5 * diff.dot(h * diff);
  }
  const double value = f_a - family.dual(mu_b) - diff.dot(theta_b.theta);
  return std::max(0.0, value);
}

}  // namespace expfam
