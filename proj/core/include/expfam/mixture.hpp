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

#include <span>

#include "expfam/families.hpp"

namespace expfam {

/// Prior over the (one-dimensional) mean parameter.
struct PriorSpec {
  enum class Kind { beta, gaussian };

  Kind kind = Kind::beta;
  /// beta: shape a;   gaussian: mean.
  double first = 0.5;
  /// beta: shape b;   gaussian: variance.
  double second = 0.5;

  static PriorSpec beta(double a, double b);
  static PriorSpec gaussian(double mean, double variance);
};

/*
 * Bayes-mixture bound on the total loss,
 *
 *     -(1/eta) ln \int P_1(theta) exp(-eta L_{1..T}(theta)) dtheta,
 *
 * by adaptive Gauss-Kronrod quadrature in the mean parameter. The integrand
 * is shifted by its peak log-value before exponentiation. For Beta priors on
 * the coin the substitution mu = sin^2(phi) removes the endpoint
 * singularities.
 *
 * Supported: Bernoulli with a Beta prior, Gaussian (d = 1) with a Gaussian
 * prior. Anything else is a PreconditionError; a vanishing or non-finite
 * integral is a NumericalError.
 */
double mixture_bound(const Family& family, const PriorSpec& prior, double eta,
                     std::span<const Vector> examples);

/// max - min of mixture_bound over every distinct ordering of the examples (T <= 8).
double permutation_invariance_check(const Family& family, const PriorSpec& prior, double eta,
                                    std::span<const Vector> examples);

}  // namespace expfam
