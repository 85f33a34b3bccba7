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

#include "expfam/harness/generators.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "expfam/harness/rng.hpp"

namespace expfam::harness {

namespace {

Vector default_theta(const Family& family) {
  // Fair coin, standard normal, unit-mean exponential.
  return Vector::Constant(family.dim(), family.name() == "gamma" ? -1.0 : 0.0);
}

std::vector<Vector> iid(const GeneratorSpec& spec, const Family& family, Rng& rng,
                        std::size_t trials) {
  const Vector theta = spec.theta_star.size() == 0 ? default_theta(family) : spec.theta_star;
  const Vector mean = family.link({theta}).mu;
  std::vector<Vector> xs;
  xs.reserve(trials);
  while (xs.size() < trials) {
    Vector x(family.dim());
    for (int i = 0; i < family.dim(); ++i) {
      if (family.name() == "bernoulli") x[i] = rng.bernoulli(mean[i]) ? 1.0 : 0.0;
      else if (family.name() == "gamma") x[i] = rng.exponential(mean[i]);
      else x[i] = mean[i] + rng.normal();
    }
    // An exponential draw can round to zero; redraw rather than emit it.
    if (family.name() == "gamma" && !(x.array() > 0.0).all()) continue;
    xs.push_back(std::move(x));
  }
  return xs;
}

std::vector<Vector> boundary(const GeneratorSpec& spec, const Family& family, Rng& rng,
                             std::size_t trials) {
  if (family.name() != "gaussian")
    throw InputError("adversarial_boundary generator needs the gaussian family");
  if (!(spec.bound > 0.0) || !std::isfinite(spec.bound))
    throw InputError("adversarial_boundary needs a positive finite bound");
  std::vector<Vector> xs;
  xs.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Vector x(family.dim());
    if (family.dim() == 1) {
      x[0] = rng.bernoulli(0.5) ? spec.bound : -spec.bound;
    } else {
      double norm = 0.0;
      do {
        for (int i = 0; i < family.dim(); ++i) x[i] = rng.normal();
        norm = x.norm();
      } while (norm == 0.0);
      x *= spec.bound / norm;
    }
    xs.push_back(std::move(x));
  }
  return xs;
}

std::vector<Vector> from_file(const GeneratorSpec& spec, const Family& family, std::size_t trials) {
  const auto rows = read_numeric_rows(spec.path);
  std::vector<Vector> xs;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != family.dim()) {
      std::ostringstream os;
      os << spec.path << ": row " << r + 1 << " has " << rows[r].size() << " values, expected "
         << family.dim();
      throw ParseError(os.str());
    }
    Vector x = Eigen::Map<const Vector>(rows[r].data(), family.dim());
    try {
      family.check_example(x);
    } catch (const InputError& e) {
      std::ostringstream os;
      os << spec.path << ": row " << r + 1 << ": " << e.what();
      throw ParseError(os.str());
    }
    xs.push_back(std::move(x));
  }
  if (trials > 0) {
    if (trials > xs.size()) throw InputError(spec.path + ": fewer rows than requested trials");
    xs.resize(trials);
  }
  return xs;
}

}  // namespace

std::string_view to_string(GeneratorSpec::Kind kind) {
  switch (kind) {
    case GeneratorSpec::Kind::iid: return "iid";
    case GeneratorSpec::Kind::adversarial_boundary: return "adversarial_boundary";
    case GeneratorSpec::Kind::permutation: return "permutation";
    case GeneratorSpec::Kind::explicit_file: return "explicit";
  }
  return "iid";
}

GeneratorSpec::Kind parse_generator_kind(std::string_view text) {
  if (text == "iid") return GeneratorSpec::Kind::iid;
  if (text == "adversarial_boundary" || text == "boundary")
    return GeneratorSpec::Kind::adversarial_boundary;
  if (text == "permutation") return GeneratorSpec::Kind::permutation;
  if (text == "explicit" || text == "file") return GeneratorSpec::Kind::explicit_file;
  throw InputError("unknown generator '" + std::string(text) + "'");
}

std::vector<std::size_t> nth_permutation(std::size_t n, std::uint64_t k) {
  if (n > 20) throw InputError("permutation generator supports at most 20 base examples");
  std::vector<std::uint64_t> factorial(n + 1, 1);
  for (std::size_t i = 1; i <= n; ++i) factorial[i] = factorial[i - 1] * i;
  if (k >= factorial[n]) throw InputError("permutation index out of range");
  std::vector<std::size_t> pool(n), out;
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = n; i > 0; --i) {
    const std::uint64_t f = factorial[i - 1];
    const auto pick = static_cast<std::size_t>(k / f);
    k %= f;
    out.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

std::vector<std::vector<double>> read_numeric_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t' || c == '\r') c = ' ';
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(v)) {
        std::ostringstream os;
        os << path << ":" << line_no << ": cannot parse '" << token << "' as a finite number";
        throw ParseError(os.str());
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Vector> generate(const GeneratorSpec& spec, const Family& family, std::uint64_t seed,
                             std::size_t trials) {
  Rng rng(seed);
  switch (spec.kind) {
    case GeneratorSpec::Kind::iid:
      if (spec.theta_star.size() != 0 && spec.theta_star.size() != family.dim())
        throw InputError("theta_star has the wrong dimension");
      return iid(spec, family, rng, trials);
    case GeneratorSpec::Kind::adversarial_boundary:
      return boundary(spec, family, rng, trials);
    case GeneratorSpec::Kind::permutation: {
      for (const Vector& x : spec.base) family.check_example(x);
      if (trials != 0 && trials != spec.base.size())
        throw InputError("permutation generator emits exactly the base sequence length");
      const auto order = nth_permutation(spec.base.size(), spec.index);
      std::vector<Vector> xs;
      for (std::size_t i : order) xs.push_back(spec.base[i]);
      return xs;
    }
    case GeneratorSpec::Kind::explicit_file:
      return from_file(spec, family, trials);
  }
  return {};
}

std::vector<LabeledExample> generate_regression(const RegressionGeneratorSpec& spec, int dim,
                                                std::uint64_t seed, std::size_t trials) {
  std::vector<LabeledExample> seq;
  if (spec.kind == RegressionGeneratorSpec::Kind::explicit_file) {
    const auto rows = read_numeric_rows(spec.path);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(rows[r].size()) != dim + 1) {
        std::ostringstream os;
        os << spec.path << ": row " << r + 1 << " has " << rows[r].size() << " values, expected "
           << dim + 1;
        throw ParseError(os.str());
      }
      seq.push_back({Eigen::Map<const Vector>(rows[r].data(), dim), rows[r].back()});
    }
    if (trials > 0) {
      if (trials > seq.size()) throw InputError(spec.path + ": fewer rows than requested trials");
      seq.resize(trials);
    }
    return seq;
  }
  if (!(spec.x_bound > 0.0) || !(spec.y_bound >= 0.0))
    throw InputError("regression generator needs x_bound > 0 and y_bound >= 0");
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = rng.uniform(-spec.x_bound, spec.x_bound);
    seq.push_back({x, rng.uniform(-spec.y_bound, spec.y_bound)});
  }
  return seq;
}

}  // namespace expfam::harness
