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

#include <cstdint>
#include <string>
#include <vector>

#include "expfam/errors.hpp"
#include "expfam/families.hpp"
#include "expfam/regression.hpp"

namespace expfam::harness {

/// Malformed input file; the message names the file and line.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

struct GeneratorSpec {
  enum class Kind {
    /// Independent draws from the family at natural parameter theta_star.
    iid,
    /// Examples on the sphere |x| = bound (Gaussian only; +-bound when d = 1).
    adversarial_boundary,
    /// The index-th lexicographic permutation of base (positions, 0-based).
    permutation,
    /// Rows read from a text file.
    explicit_file,
  };

  Kind kind = Kind::iid;
  Vector theta_star;  // iid; empty means the family's natural origin point
  double bound = 1.0;
  std::vector<Vector> base;
  std::uint64_t index = 0;
  std::string path;
};

std::string_view to_string(GeneratorSpec::Kind kind);
GeneratorSpec::Kind parse_generator_kind(std::string_view text);

/// Deterministic in (spec, seed, trials). trials = 0 with a file or
/// permutation spec means "all rows".
std::vector<Vector> generate(const GeneratorSpec& spec, const Family& family, std::uint64_t seed,
                             std::size_t trials);

/// k-th lexicographic permutation of 0..n-1.
std::vector<std::size_t> nth_permutation(std::size_t n, std::uint64_t k);

/// Whitespace- or comma-separated numeric rows; '#' starts a comment.
std::vector<std::vector<double>> read_numeric_rows(const std::string& path);

struct RegressionGeneratorSpec {
  /// uniform: x in [-x_bound, x_bound]^d, y in [-y_bound, y_bound].
  /// explicit_file: rows of d + 1 numbers, label last.
  enum class Kind { uniform, explicit_file };
  Kind kind = Kind::uniform;
  double x_bound = 1.0;
  double y_bound = 1.0;
  std::string path;
};

std::vector<LabeledExample> generate_regression(const RegressionGeneratorSpec& spec, int dim,
                                                std::uint64_t seed, std::size_t trials);

}  // namespace expfam::harness
