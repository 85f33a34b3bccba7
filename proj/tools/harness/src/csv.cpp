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

#include "expfam/harness/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "expfam/harness/generators.hpp"

namespace expfam::harness {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw ParseError(os.str());
}

std::string join_vector(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

void check_name(const std::string& name) {
  if (name.find_first_of(",\n\r") != std::string::npos)
    throw InputError("report row name '" + name + "' contains a separator");
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InputError("cannot parse '" + text + "' as a number");
  return v;
}

void write_trace(std::ostream& out, const Trace& trace) {
  const int d = trace.family->dim();
  out << "# family=" << trace.family->name() << "\n";
  out << "# dim=" << d << "\n";
  out << "# mode=" << to_string(trace.mode) << "\n";
  out << "# mu1=" << join_vector(trace.initial_mean.mu) << "\n";
  out << "# eta_b_inv=" << format_double(trace.eta_b_inv) << "\n";
  out << "trial";
  for (int i = 0; i < d; ++i) out << ",prediction_" << i;
  for (int i = 0; i < d; ++i) out << ",example_" << i;
  out << ",loss,inv_rate\n";
  for (const TrialRecord& r : trace.records) {
    out << r.trial;
    for (int i = 0; i < d; ++i) out << ',' << format_double(r.prediction[i]);
    for (int i = 0; i < d; ++i) out << ',' << format_double(r.example[i]);
    out << ',' << format_double(r.loss) << ',' << format_double(r.inv_rate) << '\n';
  }
}

Trace read_trace(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> meta;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  Trace trace;
  int d = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      meta[key] = line.substr(eq + 1);
      continue;
    }
    if (!header_seen) {
      for (const char* key : {"family", "dim", "mode", "mu1", "eta_b_inv"})
        if (!meta.count(key)) fail(source, line_no, std::string("missing metadata '") + key + "'");
      try {
        d = std::stoi(meta["dim"]);
        trace.family = make_family(meta["family"], d);
      } catch (const std::exception& e) {
        fail(source, line_no, e.what());
      }
      const auto mode = parse_mode(meta["mode"]);
      if (!mode) fail(source, line_no, "unknown mode '" + meta["mode"] + "'");
      trace.mode = *mode;
      std::istringstream mu(meta["mu1"]);
      std::vector<double> values;
      std::string token;
      while (mu >> token) values.push_back(parse_double(token));
      if (static_cast<int>(values.size()) != d) fail(source, line_no, "mu1 has the wrong length");
      trace.initial_mean = {Eigen::Map<const Vector>(values.data(), d)};
      trace.eta_b_inv = parse_double(meta["eta_b_inv"]);
      const auto cols = split(line, ',');
      if (cols.size() != static_cast<std::size_t>(2 * d + 3) || cols.front() != "trial" ||
          cols.back() != "inv_rate")
        fail(source, line_no, "unexpected trace header");
      header_seen = true;
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != static_cast<std::size_t>(2 * d + 3))
      fail(source, line_no, "expected " + std::to_string(2 * d + 3) + " fields");
    TrialRecord r;
    try {
      r.trial = static_cast<std::size_t>(std::stoull(cols[0]));
      r.prediction.resize(d);
      r.example.resize(d);
      for (int i = 0; i < d; ++i) {
        r.prediction[i] = parse_double(cols[1 + i]);
        r.example[i] = parse_double(cols[1 + d + i]);
      }
      r.loss = parse_double(cols[1 + 2 * d]);
      r.inv_rate = parse_double(cols[2 + 2 * d]);
    } catch (const std::exception& e) {
      fail(source, line_no, e.what());
    }
    if (r.trial != trace.records.size() + 1) fail(source, line_no, "trial numbers must count from 1");
    trace.records.push_back(std::move(r));
  }
  if (!header_seen) fail(source, line_no, "no trace header found");
  return trace;
}

void write_regression_trace(std::ostream& out, const RegressionTrace& trace) {
  const auto d = trace.prior.rows();
  out << "# task=regression\n# dim=" << d << "\n# mode=" << to_string(trace.mode) << "\n";
  out << "trial";
  for (Eigen::Index i = 0; i < d; ++i) out << ",x_" << i;
  out << ",y,yhat,loss,rate_quad,next_rate_quad\n";
  for (const RegressionRecord& r : trace.records) {
    out << r.trial;
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(r.x[i]);
    out << ',' << format_double(r.y) << ',' << format_double(r.yhat) << ','
        << format_double(r.loss) << ',' << format_double(r.rate_quad) << ','
        << format_double(r.next_rate_quad) << '\n';
  }
}

std::vector<ReportRow> report_rows(const RegretReport& report, double tolerance) {
  std::vector<ReportRow> rows;
  rows.push_back({"online_total", report.online_total, true, true});
  rows.push_back({"offline_optimum", report.offline_optimum, true, true});
  rows.push_back({"regret", report.regret, true, true});
  for (const auto& [name, check] : report.identities)
    rows.push_back({"identity." + name, check.applicable ? check.residual : 0.0, check.applicable,
                    check.passed(tolerance)});
  for (const auto& [name, bound] : report.bounds)
    rows.push_back({"bound." + name, bound.value, bound.applicable, !bound.applicable || bound.holds});
  return rows;
}

void write_report(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "name,value,applicable,pass\n";
  for (const ReportRow& r : rows) {
    check_name(r.name);
    out << r.name << ',' << format_double(r.value) << ',' << (r.applicable ? 1 : 0) << ','
        << (r.pass ? 1 : 0) << '\n';
  }
}

std::vector<ReportRow> read_report(std::istream& in, const std::string& source) {
  std::vector<ReportRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "name,value,applicable,pass") fail(source, line_no, "unexpected report header");
      header_seen = true;
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 4) fail(source, line_no, "expected 4 fields");
    ReportRow r;
    r.name = cols[0];
    try {
      r.value = parse_double(cols[1]);
    } catch (const std::exception& e) {
      fail(source, line_no, e.what());
    }
    if ((cols[2] != "0" && cols[2] != "1") || (cols[3] != "0" && cols[3] != "1"))
      fail(source, line_no, "flags must be 0 or 1");
    r.applicable = cols[2] == "1";
    r.pass = cols[3] == "1";
    rows.push_back(std::move(r));
  }
  if (!header_seen) fail(source, line_no, "no report header found");
  return rows;
}

}  // namespace expfam::harness
