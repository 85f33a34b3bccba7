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

#include <doctest.h>

#include <cmath>
#include <random>

#include "expfam/bregman.hpp"
#include "support/oracles.hpp"

using namespace expfam;
using expfam::testing::AffineShiftedFamily;
using expfam::testing::central_gradient;
using expfam::testing::random_natural;

TEST_CASE("natural divergence values") {
  GaussianFamily g;
  CHECK(divergence_natural(g, NaturalParam::scalar(3.0), NaturalParam::scalar(1.0)) ==
        doctest::Approx(2.0));

  BernoulliFamily coin;
  // 0.75 ln 3 - ln 2: the relative entropy between coins with biases 3/4 and 1/2.
  const double expected = 0.130812035941137;
  const double d = divergence_natural(coin, NaturalParam::scalar(0.0),
                                      NaturalParam::scalar(std::log(3.0)));
  CHECK(d == doctest::Approx(expected).epsilon(1e-14));
  const double kl = 0.75 * std::log(0.75 / 0.5) + 0.25 * std::log(0.25 / 0.5);
  CHECK(d == doctest::Approx(kl).epsilon(1e-14));

  for (const char* name : {"bernoulli", "gaussian", "gamma"}) {
    const FamilyPtr fam = make_family(name);
    const NaturalParam t = NaturalParam::scalar(fam->name() == "gamma" ? -1.3 : 0.4);
    CHECK(divergence_natural(*fam, t, t) == 0.0);
  }
}

TEST_CASE("expectation divergence values") {
  GammaFamily gamma;
  CHECK(divergence_expectation(gamma, ExpectationParam::scalar(2.0), ExpectationParam::scalar(1.0)) ==
        doctest::Approx(1.0 - std::log(2.0)));
  CHECK(divergence_expectation(BernoulliFamily(), ExpectationParam::scalar(0.3),
                               ExpectationParam::scalar(0.3)) == 0.0);
  GaussianFamily g;
  const double d =
      divergence_expectation(g, ExpectationParam::scalar(0.0), ExpectationParam::scalar(2.0));
  CHECK(d == doctest::Approx(2.0));
  CHECK(d == doctest::Approx(divergence_natural(g, NaturalParam::scalar(2.0), NaturalParam::scalar(0.0))));
}

TEST_CASE("divergences reject out-of-domain arguments") {
  CHECK_THROWS_AS(divergence_natural(GammaFamily(), NaturalParam::scalar(0.5), NaturalParam::scalar(-1.0)),
                  DomainError);
  CHECK_THROWS_AS(divergence_expectation(BernoulliFamily(), ExpectationParam::scalar(0.0),
                                         ExpectationParam::scalar(0.5)),
                  DomainError);
  CHECK_THROWS_AS(divergence_expectation(BernoulliFamily(), ExpectationParam::scalar(0.5),
                                         ExpectationParam::scalar(1.0)),
                  DomainError);
}

TEST_CASE("divergence properties on random pairs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const char* name : {"bernoulli", "gaussian", "gamma"}) {
    const FamilyPtr fam = make_family(name, 2);
    CAPTURE(name);
    bool asymmetric = false;
    double max_asym = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
      const NaturalParam a = random_natural(*fam, rng), b = random_natural(*fam, rng);
      const double dab = divergence_natural(*fam, a, b);
      const double dba = divergence_natural(*fam, b, a);
      // Nonnegativity with equality only on the diagonal.
      CHECK(dab >= 0.0);
      CHECK(dab > 0.0);
      CHECK(divergence_natural(*fam, a, a) == 0.0);
      max_asym = std::max(max_asym, std::abs(dab - dba));
      if (std::abs(dab - dba) > 1e-6) asymmetric = true;

      // Duality: D_G(a, b) = D_F(g(b), g(a)).
      const double dual = divergence_expectation(*fam, fam->link(b), fam->link(a));
      CHECK(std::abs(dab - dual) < 1e-10 * std::max(1.0, dab));

      if (rep < 200) {
        // Gradient in the first argument is g(a) - g(b).
        const Vector fd = central_gradient(
            [&](const Vector& t) { return divergence_natural(*fam, {t}, b); }, a.theta);
        const Vector expected = fam->link(a).mu - fam->link(b).mu;
        CHECK((fd - expected).cwiseAbs().maxCoeff() < 1e-6);

        // Strict convexity in the first argument along the segment to a third point.
        const NaturalParam c = random_natural(*fam, rng);
        const double lambda = unit(rng);
        const NaturalParam mid{lambda * a.theta + (1 - lambda) * c.theta};
        CHECK(divergence_natural(*fam, mid, b) <=
              lambda * dab + (1 - lambda) * divergence_natural(*fam, c, b) + 1e-12);
      }
    }
    if (fam->name() == "gaussian") {
      CHECK(max_asym < 1e-12);
    } else {
      CHECK(asymmetric);
    }
  }
}

TEST_CASE("affine terms in the cumulant leave divergences unchanged") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (const char* name : {"bernoulli", "gaussian", "gamma"}) {
    const FamilyPtr base = make_family(name, 2);
    Vector a(2);
    a << normal(rng), normal(rng);
    AffineShiftedFamily shifted(base, a, normal(rng));
    for (int rep = 0; rep < 200; ++rep) {
      const NaturalParam u = random_natural(*base, rng), v = random_natural(*base, rng);
      CHECK(std::abs(divergence_natural(shifted, u, v) - divergence_natural(*base, u, v)) <
            1e-12 * std::max(1.0, std::abs(base->cumulant(u)) + std::abs(a.dot(u.theta))));
    }
  }
}

TEST_CASE("quadratic form takes over continuously near the diagonal") {
  BernoulliFamily coin;
  const NaturalParam base = NaturalParam::scalar(0.7);
  for (double step : {0.5e-8, 0.999e-8, 1.001e-8, 2e-8, 1e-7}) {
    const NaturalParam moved = NaturalParam::scalar(0.7 + step);
    const double d = divergence_natural(coin, moved, base);
    const double quad = 0.5 * step * step * coin.cumulant_hessian(base)(0, 0);
    // Beyond the crossover the Taylor remainder carries cancellation error
    // of order eps * G; either way the two stay within 1e-10.
    CHECK(std::abs(d - quad) < 1e-10);
  }
  // Just below and above the threshold.
  const double below = divergence_natural(coin, NaturalParam::scalar(0.7 + 0.9999e-8), base);
  const double above = divergence_natural(coin, NaturalParam::scalar(0.7 + 1.0001e-8), base);
  CHECK(std::abs(below - above) < 1e-10);

  GammaFamily gamma;
  const ExpectationParam m = ExpectationParam::scalar(1.5);
  const double tiny = divergence_expectation(gamma, ExpectationParam::scalar(1.5 + 1e-9), m);
  CHECK(tiny == doctest::Approx(0.5 * 1e-18 / (1.5 * 1.5)).epsilon(1e-6));
}
