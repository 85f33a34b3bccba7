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

#include "expfam/online.hpp"
#include "expfam/regression.hpp"

using namespace expfam;

namespace {

std::vector<LabeledExample> random_sequence(int dim, int length, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<LabeledExample> seq;
  for (int t = 0; t < length; ++t) {
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = unit(rng);
    seq.push_back({x, unit(rng)});
  }
  return seq;
}

Matrix scaled_identity(int dim, double a) { return a * Matrix::Identity(dim, dim); }

}  // namespace

TEST_CASE("init") {
  auto s = RegressionState::init(1, scaled_identity(1, 1.0), Mode::incremental_offline);
  CHECK(s.theta()[0] == 0.0);
  CHECK(s.inv_rate()(0, 0) == 1.0);
  auto s2 = RegressionState::init(2, scaled_identity(2, 0.5), Mode::forward);
  CHECK(s2.inv_rate().isApprox(scaled_identity(2, 0.5)));
  CHECK(s2.xy_sum().isZero());

  Matrix skew(2, 2);
  skew << 1.0, 0.2, 0.0, 1.0;
  CHECK_THROWS_AS(RegressionState::init(2, skew, Mode::forward), InputError);
  Matrix indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(RegressionState::init(2, indefinite, Mode::forward), InputError);
  CHECK_THROWS_AS(RegressionState::init(3, scaled_identity(2, 1.0), Mode::forward), InputError);
}

TEST_CASE("predict") {
  const Vector one = Vector::Constant(1, 1.0);
  auto fresh = RegressionState::init(1, scaled_identity(1, 1.0), Mode::incremental_offline);
  CHECK(fresh.predict(Vector::Constant(1, 3.0)).yhat == 0.0);

  auto fwd = RegressionState::init(1, scaled_identity(1, 1.0), Mode::forward);
  const RegressionPrediction p = fwd.predict(one);
  CHECK(p.yhat == 0.0);
  CHECK(p.state.inv_rate()(0, 0) == 2.0);
  CHECK(fwd.inv_rate()(0, 0) == 1.0);

  auto inc = fresh.update({one, 1.0});
  CHECK(inc.predict(one).yhat == doctest::Approx(0.5));
  CHECK_THROWS_AS(inc.predict(Vector::Zero(2)), InputError);
}

TEST_CASE("update") {
  const Vector one = Vector::Constant(1, 1.0);
  auto s = RegressionState::init(1, scaled_identity(1, 1.0), Mode::incremental_offline).update({one, 1.0});
  CHECK(s.theta()[0] == doctest::Approx(0.5));
  CHECK(s.update({Vector::Zero(1), 42.0}).theta()[0] == doctest::Approx(0.5));

  Vector x(2);
  x << 1.0, 0.0;
  auto s2 = RegressionState::init(2, scaled_identity(2, 1.0), Mode::incremental_offline).update({x, 2.0});
  CHECK(s2.theta()[0] == doctest::Approx(1.0));
  CHECK(s2.theta()[1] == doctest::Approx(0.0));

  auto fwd = RegressionState::init(1, scaled_identity(1, 1.0), Mode::forward);
  CHECK_THROWS_AS(fwd.update({one, 1.0}), PreconditionError);
  auto predicted = fwd.predict(one).state;
  CHECK_THROWS_AS(predicted.update({Vector::Constant(1, 2.0), 1.0}), PreconditionError);
  CHECK_THROWS_AS(predicted.predict(one), PreconditionError);
  CHECK(predicted.update({one, 1.0}).theta()[0] == doctest::Approx(0.5));
}

TEST_CASE("regret report examples") {
  const std::vector<LabeledExample> single{{Vector::Constant(1, 1.0), 1.0}};
  const RegretReport r = regression_regret_report(single, scaled_identity(1, 1.0), Mode::forward);
  CHECK(r.online_total == doctest::Approx(0.5));
  CHECK(r.offline_optimum == doctest::Approx(0.25));
  CHECK(r.regret == doctest::Approx(0.25));
  CHECK(r.bounds.at("regression_expr").value == doctest::Approx(0.25));
  CHECK(r.identities.at("regression_forward_exact").passed());

  std::mt19937_64 rng(4);
  auto zero = random_sequence(3, 20, rng);
  for (auto& ex : zero) ex.y = 0.0;
  for (Mode mode : {Mode::forward, Mode::incremental_offline}) {
    const RegretReport z = regression_regret_report(zero, scaled_identity(3, 1.0), mode);
    CHECK(z.regret == doctest::Approx(0.0));
    CHECK(z.bounds.at("regression_expr").value == doctest::Approx(0.0));
  }

  Matrix general(2, 2);
  general << 2.0, 0.5, 0.5, 1.0;
  const RegretReport g = regression_regret_report(random_sequence(2, 10, rng), general, Mode::forward);
  CHECK(g.bounds.count("regression_log_bound") == 0);
}

TEST_CASE("rank-one inverse tracks the dense solve") {
  std::mt19937_64 rng(12);
  for (int dim : {1, 3, 8}) {
    for (Mode mode : {Mode::incremental_offline, Mode::forward}) {
      const auto seq = random_sequence(dim, 200, rng);
      RegressionState s = RegressionState::init(dim, scaled_identity(dim, 0.7), mode, {true, 1e-8});
      double worst = 0.0;
      for (const auto& ex : seq) {
        s = s.predict(ex.x).state.update(ex);
        const Matrix dense = s.inv_rate().llt().solve(Matrix::Identity(dim, dim));
        worst = std::max(worst, (dense - s.rate()).cwiseAbs().maxCoeff());
        worst = std::max(worst, (s.dense_theta() - s.theta()).cwiseAbs().maxCoeff());
      }
      CHECK(worst < 1e-8);
    }
  }
}

TEST_CASE("incremental mode is ridge regression on the past") {
  std::mt19937_64 rng(21);
  const int dim = 4;
  const auto seq = random_sequence(dim, 60, rng);
  const Matrix prior = scaled_identity(dim, 1.3);
  RegressionState s = RegressionState::init(dim, prior, Mode::incremental_offline);
  Matrix cov = prior;
  Vector b = Vector::Zero(dim);
  for (const auto& ex : seq) {
    s = s.predict(ex.x).state.update(ex);
    cov += ex.x * ex.x.transpose();
    b += ex.y * ex.x;
    const Vector ridge = cov.colPivHouseholderQr().solve(b);
    CHECK((ridge - s.theta()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("forward mode regret equals the expression") {
  std::mt19937_64 rng(77);
  for (int dim = 1; dim <= 8; ++dim) {
    for (double a : {0.5, 1.0, 4.0}) {
      const auto seq = random_sequence(dim, 150, rng);
      const RegretReport r = regression_regret_report(seq, scaled_identity(dim, a), Mode::forward);
      CHECK(r.identities.at("regression_forward_exact").residual < 1e-8);
      CHECK(r.bounds.at("regression_log_bound_dim").holds);
    }
  }
}

TEST_CASE("unit instances reproduce gaussian density estimation") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.5);
  for (Mode mode : {Mode::incremental_offline, Mode::forward}) {
    for (double a : {0.5, 2.0}) {
      std::vector<LabeledExample> seq;
      std::vector<Vector> ys;
      for (int t = 0; t < 40; ++t) {
        const double y = normal(rng);
        seq.push_back({Vector::Constant(1, 1.0), y});
        ys.push_back(Vector::Constant(1, y));
      }
      const RegressionTrace rt = run_regression(seq, scaled_identity(1, a), mode);
      const Trace dt = run(make_family("gaussian"), ExpectationParam::scalar(0.0), a, mode, ys);
      for (std::size_t t = 0; t < seq.size(); ++t) {
        CHECK(std::abs(rt.records[t].yhat - dt.records[t].prediction[0]) < 1e-10);
        CHECK(std::abs(rt.records[t].loss - dt.records[t].loss) < 1e-10);
      }
      if (mode == Mode::incremental_offline) {
        // Single unit instance: the expression bounds the regret here.
        CHECK(regression_regret_report(seq, scaled_identity(1, a), mode).bounds.at("regression_expr").holds);
      }
    }
  }
}
