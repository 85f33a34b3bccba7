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

#include "expfam/mixture.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace expfam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kPeakGrid = 512;
constexpr unsigned kMaxDepth = 12;
constexpr double kRelTol = 1e-12;
constexpr double kGaussianSpan = 20.0;

// L_{1..T} at a mean parameter, through the sufficient statistic:
// T G(theta) - theta . sum x + sum of retained base losses.
struct TotalLoss {
  const Family& family;
  std::span<const Vector> examples;
  double count = 0.0;
  double sum = 0.0;
  double retained = 0.0;

  TotalLoss(const Family& fam, std::span<const Vector> xs) : family(fam), examples(xs) {
    for (const Vector& x : xs) {
      sum += x[0];
      retained += fam.retained_base_loss(x);
    }
    count = static_cast<double>(xs.size());
  }

  double operator()(double mu) const {
    if (count == 0.0) return 0.0;
    const ExpectationParam at = ExpectationParam::scalar(mu);
    if (!family.in_expectation_domain(at.mu)) {
      // Boundary of the closure: sum the extended-real losses directly.
      double s = 0.0;
      for (const Vector& x : examples) s += family.loss(at, x);
      return s;
    }
    const NaturalParam theta = family.inverse_link(at);
    return count * family.cumulant(theta) - theta.theta[0] * sum + retained;
  }
};

// ln \int_lo^hi exp(log_f(u)) du, shifting by the peak found on a grid.
double log_integral(const std::function<double(double)>& log_f, double lo, double hi,
                    double eta) {
  double peak = kNegInf;
  double peak_at = 0.5 * (lo + hi);
  for (int i = 1; i < kPeakGrid; ++i) {
    const double u = lo + (hi - lo) * static_cast<double>(i) / kPeakGrid;
    const double v = log_f(u);
    if (v > peak) {
      peak = v;
      peak_at = u;
    }
  }
  if (!std::isfinite(peak)) throw NumericalError("mixture integrand vanishes on the whole grid");

  auto shifted = [&](double u) {
    const double v = log_f(u);
    return v == kNegInf ? 0.0 : std::exp(v - peak);
  };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err_lo = 0.0, err_hi = 0.0;
  const double left = Quad::integrate(shifted, lo, peak_at, kMaxDepth, kRelTol, &err_lo);
  const double right = Quad::integrate(shifted, peak_at, hi, kMaxDepth, kRelTol, &err_hi);
  const double total = left + right;
  if (!std::isfinite(total) || total <= 0.0) {
    std::ostringstream os;
    os << "mixture integral is not finite and positive (shifted value " << total
       << ", peak log-integrand " << peak << ")";
    throw NumericalError(os.str());
  }
  // Error of the bound is (1/eta) * relative error of the integral.
  if ((err_lo + err_hi) / total > 1e-9 * eta) {
    std::ostringstream os;
    os << "mixture quadrature did not converge (relative error " << (err_lo + err_hi) / total << ")";
    throw NumericalError(os.str());
  }
  return peak + std::log(total);
}

}  // namespace

PriorSpec PriorSpec::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InputError("beta prior shapes must be positive");
  return {Kind::beta, a, b};
}

PriorSpec PriorSpec::gaussian(double mean, double variance) {
  if (!std::isfinite(mean) || !(variance > 0.0) || !std::isfinite(variance))
    throw InputError("gaussian prior needs a finite mean and positive variance");
  return {Kind::gaussian, mean, variance};
}

double mixture_bound(const Family& family, const PriorSpec& prior, double eta,
                     std::span<const Vector> examples) {
  if (family.dim() != 1) throw PreconditionError("mixture bound is one-dimensional");
  if (!(eta > 0.0)) throw InputError("mixture learning rate must be positive");
  for (const Vector& x : examples) family.check_example(x);

  if (family.name() == "bernoulli" && prior.kind == PriorSpec::Kind::beta) {
    const double a = prior.first, b = prior.second;
    const double log_norm = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    // mu = sin^2 phi, dmu = 2 sin phi cos phi dphi.
    const TotalLoss total(family, examples);
    auto log_f = [&](double phi) {
      const double s = std::sin(phi), c = std::cos(phi);
      const double mu = s * s;
      const double loss = total(mu);
      if (!std::isfinite(loss)) return kNegInf;
      return std::numbers::ln2 + (2.0 * a - 1.0) * std::log(s) + (2.0 * b - 1.0) * std::log(c) -
             log_norm - eta * loss;
    };
    return -log_integral(log_f, 0.0, 0.5 * std::numbers::pi, eta) / eta;
  }

  if (family.name() == "gaussian" && prior.kind == PriorSpec::Kind::gaussian) {
    const double m = prior.first, var = prior.second;
    const double n = static_cast<double>(examples.size());
    double sum = 0.0;
    for (const Vector& x : examples) sum += x[0];
    // The log-integrand is quadratic; its curvature fixes the scale.
    const double precision = 1.0 / var + eta * n;
    const double center = (m / var + eta * sum) / precision;
    const double width = 1.0 / std::sqrt(precision);
    const TotalLoss total(family, examples);
    // Integrate in standardized units u = (mu - center) / width.
    auto log_f = [&](double u) {
      const double mu = center + width * u;
      return -0.5 * (mu - m) * (mu - m) / var - 0.5 * std::log(2.0 * std::numbers::pi * var) +
             std::log(width) - eta * total(mu);
    };
    return -log_integral(log_f, -kGaussianSpan, kGaussianSpan, eta) / eta;
  }

  throw PreconditionError("mixture bound supports bernoulli/beta and gaussian/gaussian only");
}

double permutation_invariance_check(const Family& family, const PriorSpec& prior, double eta,
                                    std::span<const Vector> examples) {
  if (examples.size() > 8) throw PreconditionError("permutation check enumerates at most 8 examples");
  // Distinct orderings only: repeated examples give repeated permutations.
  auto less = [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::vector<Vector> permuted(examples.begin(), examples.end());
  std::sort(permuted.begin(), permuted.end(), less);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  do {
    const double v = mixture_bound(family, prior, eta, permuted);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  } while (std::next_permutation(permuted.begin(), permuted.end(), less));
  return hi - lo;
}

}  // namespace expfam
