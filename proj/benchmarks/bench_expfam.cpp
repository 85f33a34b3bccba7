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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "expfam/mixture.hpp"
#include "expfam/online.hpp"
#include "expfam/regression.hpp"
#include "expfam/regret.hpp"

using namespace expfam;

namespace {

std::vector<Vector> gaussian_examples(int dim, std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vector> xs;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(dim);
    for (int j = 0; j < dim; ++j) x[j] = normal(rng);
    xs.push_back(x);
  }
  return xs;
}

std::vector<LabeledExample> labeled(int dim, std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(dim);
    for (int j = 0; j < dim; ++j) x[j] = unit(rng);
    out.push_back({x, unit(rng)});
  }
  return out;
}

void BM_OnlineUpdate(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const FamilyPtr fam = make_family("gaussian", dim);
  const auto xs = gaussian_examples(dim, 1000, 1);
  const ExpectationParam mu1{Vector::Zero(dim)};
  for (auto _ : state) benchmark::DoNotOptimize(run(fam, mu1, 1.0, Mode::forward, xs).total_loss());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
}
BENCHMARK(BM_OnlineUpdate)->Arg(1)->Arg(4)->Arg(16);

void BM_RankOneRegression(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto data = labeled(dim, 200, 2);
  const Matrix prior = Matrix::Identity(dim, dim);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_regression(data, prior, Mode::incremental_offline).total_loss());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(data.size()));
}
BENCHMARK(BM_RankOneRegression)->Arg(2)->Arg(8)->Arg(32);

void BM_DenseRegression(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto data = labeled(dim, 200, 2);
  for (auto _ : state) {
    Matrix cov = Matrix::Identity(dim, dim);
    Vector b = Vector::Zero(dim);
    double loss = 0.0;
    for (const LabeledExample& ex : data) {
      const Vector theta = cov.llt().solve(b);
      const double r = ex.x.dot(theta) - ex.y;
      loss += 0.5 * r * r;
      cov.noalias() += ex.x * ex.x.transpose();
      b += ex.y * ex.x;
    }
    benchmark::DoNotOptimize(loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(data.size()));
}
BENCHMARK(BM_DenseRegression)->Arg(2)->Arg(8)->Arg(32);

void BM_MixtureQuadrature(benchmark::State& state) {
  const FamilyPtr coin = make_family("bernoulli");
  std::vector<Vector> xs;
  for (long t = 0; t < state.range(0); ++t) xs.push_back(Vector::Constant(1, t % 3 == 0 ? 1.0 : 0.0));
  const PriorSpec prior = PriorSpec::beta(0.5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(mixture_bound(*coin, prior, 1.0, xs));
}
BENCHMARK(BM_MixtureQuadrature)->Arg(4)->Arg(64)->Arg(1024);

void BM_RegretReport(benchmark::State& state) {
  const FamilyPtr fam = make_family("gaussian");
  const Trace trace = run(fam, ExpectationParam::scalar(0.0), 1.0, Mode::forward,
                          gaussian_examples(1, static_cast<std::size_t>(state.range(0)), 3));
  for (auto _ : state) benchmark::DoNotOptimize(regret_report(trace).regret);
}
BENCHMARK(BM_RegretReport)->Arg(40)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
