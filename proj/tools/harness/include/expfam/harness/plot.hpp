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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "expfam/harness/csv.hpp"

namespace expfam::harness {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (T, value), sorted by T
};

struct PlotFigure {
  std::string name;  // file stem
  std::string title;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// A named report; the name labels rows that carry no "<key>/" prefix.
using NamedReport = std::pair<std::string, std::vector<ReportRow>>;

/*
 * Builds the regret-vs-T and bound-vs-T figures. Rows are grouped by their
 * "<key>/" prefix; the series label is the key without its trailing "-T<n>".
 * Each group must carry a "trials" row. Throws InputError on an empty set or
 * when nothing is plottable.
 */
std::vector<PlotFigure> build_figures(const std::vector<NamedReport>& reports);

/// Writes <name>.csv (series,T,value) and <name>.svg per figure; returns the paths.
std::vector<std::filesystem::path> emit_plotdata(const std::vector<NamedReport>& reports,
                                                 const std::filesystem::path& out_dir);

std::string render_svg(const PlotFigure& figure);

}  // namespace expfam::harness
