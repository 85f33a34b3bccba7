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

#include <iosfwd>
#include <string>
#include <vector>

#include "expfam/online.hpp"
#include "expfam/regression.hpp"
#include "expfam/regret.hpp"

namespace expfam::harness {

/// Shortest round-trip form is not required; 17 significant digits always are.
std::string format_double(double value);
/// Accepts everything format_double emits, including inf, -inf and nan.
double parse_double(const std::string& text);

/*
 * Trace CSV. Metadata comes first as "# key=value" lines (family, dim, mode,
 * mu1, eta_b_inv), then the header
 *
 *     trial,prediction_0..prediction_{d-1},example_0..example_{d-1},loss,inv_rate
 *
 * and one row per trial.
 */
void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in, const std::string& source = "<trace>");

void write_regression_trace(std::ostream& out, const RegressionTrace& trace);

/// One line of a report CSV: name,value,applicable,pass.
struct ReportRow {
  std::string name;
  double value = 0.0;
  bool applicable = true;
  bool pass = true;
};

/*
 * Rows for a report: online_total, offline_optimum and regret, then
 * "identity.<name>" rows carrying the relative residual and
 * "bound.<name>" rows carrying the bound value.
 */
std::vector<ReportRow> report_rows(const RegretReport& report, double tolerance);

void write_report(std::ostream& out, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report(std::istream& in, const std::string& source = "<report>");

}  // namespace expfam::harness
