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
#include <limits>
#include <numbers>

#include "expfam/families.hpp"
#include "support/oracles.hpp"

using namespace expfam;
using expfam::testing::central_gradient;
using expfam::testing::random_natural;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("cumulant values") {
  CHECK(BernoulliFamily().cumulant(NaturalParam::scalar(0.0)) == doctest::Approx(std::log(2.0)));
  CHECK(GaussianFamily().cumulant(NaturalParam::scalar(3.0)) == doctest::Approx(4.5));
  CHECK(GammaFamily().cumulant(NaturalParam::scalar(-1.0)) == doctest::Approx(0.0));
  // Large natural parameters must not overflow.
  CHECK(BernoulliFamily().cumulant(NaturalParam::scalar(800.0)) == doctest::Approx(800.0));
}

TEST_CASE("cumulant rejects points outside the natural domain") {
  GammaFamily gamma;
  CHECK_THROWS_AS(gamma.cumulant(NaturalParam::scalar(0.0)), DomainError);
  CHECK_THROWS_AS(gamma.cumulant(NaturalParam::scalar(1.0)), DomainError);
  CHECK_THROWS_AS(GaussianFamily(2).cumulant(NaturalParam::scalar(1.0)), InputError);
  CHECK_THROWS_AS(BernoulliFamily().cumulant(NaturalParam::scalar(std::nan(""))), DomainError);
}

TEST_CASE("link and inverse link") {
  CHECK(BernoulliFamily().link(NaturalParam::scalar(0.0)).mu[0] == doctest::Approx(0.5));
  const Vector g = GaussianFamily(2).link({vec({1.0, -2.0})}).mu;
  CHECK(g[0] == 1.0);
  CHECK(g[1] == -2.0);
  CHECK(GammaFamily().link(NaturalParam::scalar(-2.0)).mu[0] == doctest::Approx(0.5));

  CHECK(BernoulliFamily().inverse_link(ExpectationParam::scalar(0.5)).theta[0] == doctest::Approx(0.0));
  CHECK(GammaFamily().inverse_link(ExpectationParam::scalar(0.5)).theta[0] == doctest::Approx(-2.0));
  CHECK(GaussianFamily().inverse_link(ExpectationParam::scalar(7.0)).theta[0] == 7.0);
}

TEST_CASE("inverse link is undefined on the boundary") {
  BernoulliFamily coin;
  CHECK_THROWS_AS(coin.inverse_link(ExpectationParam::scalar(0.0)), DomainError);
  CHECK_THROWS_AS(coin.inverse_link(ExpectationParam::scalar(1.0)), DomainError);
  CHECK_THROWS_AS(GammaFamily().inverse_link(ExpectationParam::scalar(0.0)), DomainError);
  CHECK_THROWS_AS(GammaFamily().inverse_link(ExpectationParam::scalar(-1.0)), DomainError);
}

TEST_CASE("dual values") {
  CHECK(BernoulliFamily().dual(ExpectationParam::scalar(0.5)) == doctest::Approx(-std::log(2.0)));
  CHECK(GammaFamily().dual(ExpectationParam::scalar(1.0)) == doctest::Approx(-1.0));
  CHECK(GaussianFamily().dual(ExpectationParam::scalar(2.0)) == doctest::Approx(2.0));

  SUBCASE("bernoulli dual extends by continuity to the boundary") {
    CHECK(BernoulliFamily().dual(ExpectationParam::scalar(0.0)) == 0.0);
    CHECK(BernoulliFamily().dual(ExpectationParam::scalar(1.0)) == 0.0);
  }
  SUBCASE("gamma dual rejects nonpositive means") {
    CHECK_THROWS_AS(GammaFamily().dual(ExpectationParam::scalar(0.0)), DomainError);
  }
}

TEST_CASE("gaussian dual matches theta.mu - G(theta) at theta = f(mu)") {
  GaussianFamily g;
  const double mu = 2.0;
  const double theta = g.inverse_link(ExpectationParam::scalar(mu)).theta[0];
  CHECK(g.dual(ExpectationParam::scalar(mu)) ==
        doctest::Approx(theta * mu - g.cumulant(NaturalParam::scalar(theta))));
}

TEST_CASE("hessians and variance") {
  const Matrix h = GaussianFamily(2).cumulant_hessian({vec({0.3, -7.0})});
  CHECK(h.isApprox(Matrix::Identity(2, 2)));
  CHECK(BernoulliFamily().cumulant_hessian(NaturalParam::scalar(0.0))(0, 0) == doctest::Approx(0.25));
  CHECK(GammaFamily().variance(ExpectationParam::scalar(0.5))(0, 0) == doctest::Approx(0.25));

  SUBCASE("against finite differences of the link") {
    for (const auto& fam : {make_family("bernoulli"), make_family("gamma")}) {
      const double theta = fam->name() == "gamma" ? -2.0 : 0.0;
      const double h = 1e-5;
      const double fd = (fam->link(NaturalParam::scalar(theta + h)).mu[0] -
                         fam->link(NaturalParam::scalar(theta - h)).mu[0]) /
                        (2 * h);
      CHECK(fam->cumulant_hessian(NaturalParam::scalar(theta))(0, 0) ==
            doctest::Approx(fd).epsilon(1e-8));
    }
  }
}

TEST_CASE("losses") {
  CHECK(BernoulliFamily().loss(ExpectationParam::scalar(0.5), vec({1.0})) ==
        doctest::Approx(std::log(2.0)));
  CHECK(GaussianFamily().loss(ExpectationParam::scalar(0.0), vec({2.0})) == doctest::Approx(2.0));
  CHECK(BernoulliFamily().loss(ExpectationParam::scalar(1.0), vec({0.0})) == kInf);
  CHECK(BernoulliFamily().loss(ExpectationParam::scalar(1.0), vec({1.0})) == 0.0);
  CHECK(BernoulliFamily().loss(ExpectationParam::scalar(0.0), vec({0.0})) == 0.0);

  SUBCASE("gamma loss equals G(theta) - theta x") {
    GammaFamily g;
    const double theta = -1.7, x = 0.9;
    CHECK(g.loss(NaturalParam::scalar(theta), vec({x})) ==
          doctest::Approx(-std::log(-theta) - theta * x));
  }
  SUBCASE("absolute loss re-adds the base measure") {
    GaussianFamily g(2);
    const Vector x = vec({1.0, -1.0});
    CHECK(g.absolute_loss({vec({0.0, 0.0})}, x) ==
          doctest::Approx(1.0 + std::log(2.0 * std::numbers::pi)));
    CHECK(BernoulliFamily().absolute_loss(ExpectationParam::scalar(0.25), vec({1.0})) ==
          doctest::Approx(std::log(4.0)));
  }
  SUBCASE("examples the family cannot emit") {
    CHECK_THROWS_AS(BernoulliFamily().loss(ExpectationParam::scalar(0.5), vec({0.5})), InputError);
    CHECK_THROWS_AS(GammaFamily().loss(ExpectationParam::scalar(0.5), vec({0.0})), InputError);
    CHECK_THROWS_AS(GaussianFamily().loss(ExpectationParam::scalar(0.5), vec({kInf})), InputError);
    CHECK_THROWS_AS(GaussianFamily().loss(ExpectationParam::scalar(0.5), vec({1.0, 2.0})), InputError);
  }
}

TEST_CASE("domain margin is configurable") {
  GammaFamily strict(1, 0.1);
  CHECK_THROWS_AS(strict.cumulant(NaturalParam::scalar(-0.05)), DomainError);
  CHECK(GammaFamily().cumulant(NaturalParam::scalar(-0.05)) == doctest::Approx(-std::log(0.05)));
  CHECK_THROWS_AS(make_family("poisson"), InputError);
}

TEST_CASE("duality properties on random points") {
  std::mt19937_64 rng(20260101);
  for (const char* name : {"bernoulli", "gaussian", "gamma"}) {
    for (int dim : {1, 3}) {
      const FamilyPtr fam = make_family(name, dim);
      CAPTURE(name);
      CAPTURE(dim);
      for (int rep = 0; rep < 200; ++rep) {
        const NaturalParam theta = random_natural(*fam, rng);
        const ExpectationParam mu = fam->link(theta);

        const Vector back = fam->inverse_link(mu).theta;
        CHECK(((back - theta.theta).cwiseAbs().array() <=
               1e-10 * theta.theta.cwiseAbs().array().max(1.0))
                  .all());

        const double legendre = fam->dual(mu) + fam->cumulant(theta) - theta.theta.dot(mu.mu);
        CHECK(std::abs(legendre) < 1e-10);

        const Vector fd_g = central_gradient(
            [&](const Vector& t) { return fam->cumulant({t}); }, theta.theta);
        CHECK((fd_g - mu.mu).cwiseAbs().maxCoeff() < 1e-6);

        const Vector fd_f =
            central_gradient([&](const Vector& m) { return fam->dual({m}); }, mu.mu);
        const double scale = std::max(1.0, theta.theta.cwiseAbs().maxCoeff());
        CHECK((fd_f - theta.theta).cwiseAbs().maxCoeff() < 1e-6 * scale);

        const Matrix prod = fam->dual_hessian(mu) * fam->cumulant_hessian(theta);
        CHECK((prod - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(fam->variance(mu).isApprox(fam->cumulant_hessian(theta), 1e-10));
      }
    }
  }
}

TEST_CASE("cumulant convexity spot check") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const char* name : {"bernoulli", "gaussian", "gamma"}) {
    const FamilyPtr fam = make_family(name, 2);
    for (int rep = 0; rep < 300; ++rep) {
      const NaturalParam a = random_natural(*fam, rng), b = random_natural(*fam, rng);
      const double lambda = unit(rng);
      const double lhs = fam->cumulant({lambda * a.theta + (1 - lambda) * b.theta});
      const double rhs = lambda * fam->cumulant(a) + (1 - lambda) * fam->cumulant(b);
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}
