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

#include "expfam/mixture.hpp"
#include "expfam/online.hpp"
#include "support/oracles.hpp"

using namespace expfam;
using expfam::testing::bits_of;
using expfam::testing::coin_forward_total_loss;

namespace {

std::vector<Vector> scalars(std::initializer_list<double> v) {
  std::vector<Vector> out;
  for (double d : v) out.push_back(Vector::Constant(1, d));
  return out;
}

const PriorSpec kJeffreys = PriorSpec::beta(0.5, 0.5);

}  // namespace

TEST_CASE("mixture values") {
  BernoulliFamily coin;
  CHECK(mixture_bound(coin, kJeffreys, 1.0, scalars({1})) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(mixture_bound(coin, kJeffreys, 1.0, {}) == doctest::Approx(0.0).epsilon(1e-12));
  // Uniform prior: -ln of 1 / (T + 1) choose k.
  CHECK(mixture_bound(coin, PriorSpec::beta(1, 1), 1.0, scalars({1, 0, 1})) ==
        doctest::Approx(std::log(12.0)).epsilon(1e-12));

  // Gaussian prior N(0, s2) on all-zero examples: (1/2) ln(1 + T s2).
  GaussianFamily g;
  const auto zeros = scalars({0, 0, 0, 0, 0});
  for (double s2 : {1e-4, 1.0, 100.0}) {
    CHECK(mixture_bound(g, PriorSpec::gaussian(0.0, s2), 1.0, zeros) ==
          doctest::Approx(0.5 * std::log1p(5.0 * s2)).epsilon(1e-10));
  }
  CHECK(mixture_bound(g, PriorSpec::gaussian(0.0, 1e-8), 1.0, zeros) < 1e-7);
}

TEST_CASE("mixture errors") {
  CHECK_THROWS_AS(mixture_bound(GammaFamily(), kJeffreys, 1.0, scalars({1})), PreconditionError);
  CHECK_THROWS_AS(mixture_bound(GaussianFamily(), kJeffreys, 1.0, scalars({1})), PreconditionError);
  CHECK_THROWS_AS(mixture_bound(BernoulliFamily(2), kJeffreys, 1.0, {}), PreconditionError);
  CHECK_THROWS_AS(mixture_bound(BernoulliFamily(), kJeffreys, 0.0, {}), InputError);
  CHECK_THROWS_AS(PriorSpec::beta(0.0, 1.0), InputError);
  CHECK_THROWS_AS(PriorSpec::gaussian(0.0, -1.0), InputError);
  CHECK_THROWS_AS(mixture_bound(BernoulliFamily(), kJeffreys, 1.0, scalars({0.5})), InputError);
}

TEST_CASE("jeffreys mixture equals the forward coin estimator") {
  BernoulliFamily coin;
  for (int len = 1; len <= 10; ++len) {
    for (unsigned long mask = 0; mask < (1UL << len); mask += 1 + len / 4) {
      const auto xs = bits_of(mask, len);
      const double mix = mixture_bound(coin, kJeffreys, 1.0, xs);
      if (std::abs(mix - coin_forward_total_loss(xs)) >= 1e-7)
        FAIL_CHECK("length " << len << " mask " << mask << ": " << mix);
    }
  }
  // Long sequences shift the log-integrand far below zero.
  const auto long_run = bits_of(0x5a5a5a5aUL, 32);
  const Trace tr = run(make_family("bernoulli"), ExpectationParam::scalar(0.5), 0.0, Mode::forward, long_run);
  CHECK(mixture_bound(coin, kJeffreys, 1.0, long_run) == doctest::Approx(tr.total_loss()).epsilon(1e-9));
}

TEST_CASE("mixture is order independent") {
  CHECK(permutation_invariance_check(BernoulliFamily(), kJeffreys, 1.0, scalars({1, 0, 1})) < 1e-9);
  CHECK(permutation_invariance_check(BernoulliFamily(), kJeffreys, 1.0, scalars({1})) == 0.0);
  CHECK(permutation_invariance_check(GaussianFamily(), PriorSpec::gaussian(0.0, 1.0), 1.0,
                                     scalars({1, -1})) < 1e-9);
  CHECK(permutation_invariance_check(GaussianFamily(), PriorSpec::gaussian(0.3, 2.0), 0.7,
                                     scalars({1.5, -0.2, 2.2, 0.1})) < 1e-9);
  CHECK_THROWS_AS(permutation_invariance_check(BernoulliFamily(), kJeffreys, 1.0, bits_of(0, 9)),
                  PreconditionError);
}
