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

#include "expfam/families.hpp"

namespace expfam {

/// Below this Euclidean distance between the arguments a divergence is
/// evaluated as the quadratic form 1/2 d' H d instead of the Taylor
/// remainder, which would cancel catastrophically.
inline constexpr double kQuadraticCrossover = 1e-8;

/*
 * Bregman divergence of the cumulant,
 *
 *     D_G(theta_new, theta_old) = G(theta_new) - G(theta_old)
 *                                 - (theta_new - theta_old) . g(theta_old).
 *
 * This is the relative entropy E_old ln(P_old / P_new). Nonnegative, zero iff
 * the arguments agree; rounding residue below zero is clamped to zero.
 */
double divergence_natural(const Family& family, const NaturalParam& theta_new,
                          const NaturalParam& theta_old);

/*
 * Bregman divergence of the dual,
 *
 *     D_F(mu_a, mu_b) = F(mu_a) - F(mu_b) - (mu_a - mu_b) . f(mu_b),
 *
 * which equals divergence_natural(f(mu_b), f(mu_a)): the argument order flips
 * when moving between the two coordinate systems.
 */
double divergence_expectation(const Family& family, const ExpectationParam& mu_a,
                              const ExpectationParam& mu_b);

}  // namespace expfam
