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

#include "expfam/harness/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "expfam/errors.hpp"

namespace expfam::harness {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 80, kRight = 220, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string series_label(const std::string& key, const std::string& fallback) {
  if (key.empty()) return fallback;
  const auto cut = key.rfind("-T");
  if (cut != std::string::npos && cut + 2 < key.size() &&
      std::all_of(key.begin() + static_cast<std::ptrdiff_t>(cut) + 2, key.end(),
                  [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; }))
    return key.substr(0, cut);
  return key;
}

struct Group {
  std::string label;
  double trials = std::nan("");
  std::map<std::string, double> values;
};

}  // namespace

std::vector<PlotFigure> build_figures(const std::vector<NamedReport>& reports) {
  if (reports.empty()) throw InputError("plot: empty report set");

  // Ordered by first appearance so output order follows the inputs.
  std::vector<std::string> order;
  std::map<std::string, Group> groups;
  for (const auto& [report_name, rows] : reports) {
    for (const ReportRow& row : rows) {
      const auto slash = row.name.rfind('/');
      const std::string key = slash == std::string::npos ? "" : row.name.substr(0, slash);
      const std::string field = slash == std::string::npos ? row.name : row.name.substr(slash + 1);
      const std::string id = report_name + "\x1f" + key;
      auto [it, inserted] = groups.try_emplace(id);
      if (inserted) {
        order.push_back(id);
        it->second.label = series_label(key, report_name);
      }
      if (field == "trials") it->second.trials = row.value;
      else if (field == "regret") it->second.values["regret"] = row.value;
      else if (field.rfind("bound.", 0) == 0 && row.applicable)
        it->second.values[field.substr(6)] = row.value;
    }
  }

  std::map<std::string, PlotSeries> regret, bounds;
  std::vector<std::string> regret_order, bound_order;
  auto add = [](std::map<std::string, PlotSeries>& into, std::vector<std::string>& ord,
                const std::string& label, double t, double v) {
    if (!std::isfinite(v)) return;
    auto [it, inserted] = into.try_emplace(label);
    if (inserted) {
      it->second.label = label;
      ord.push_back(label);
    }
    it->second.points.emplace_back(t, v);
  };
  for (const std::string& id : order) {
    const Group& g = groups.at(id);
    if (std::isnan(g.trials)) continue;
    for (const auto& [field, v] : g.values) {
      if (field == "regret") {
        add(regret, regret_order, g.label, g.trials, v);
        add(bounds, bound_order, g.label + " regret", g.trials, v);
      } else {
        add(bounds, bound_order, g.label + " " + field, g.trials, v);
      }
    }
  }
  if (regret.empty()) throw InputError("plot: no report carries trials and regret rows");

  auto finish = [](std::map<std::string, PlotSeries>& m, const std::vector<std::string>& ord) {
    std::vector<PlotSeries> out;
    for (const auto& label : ord) {
      PlotSeries s = m.at(label);
      std::stable_sort(s.points.begin(), s.points.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      out.push_back(std::move(s));
    }
    return out;
  };
  return {{"regret_vs_T", "Regret against the number of trials", "regret",
           finish(regret, regret_order)},
          {"bound_vs_T", "Regret and bounds against the number of trials", "value",
           finish(bounds, bound_order)}};
}

std::string render_svg(const PlotFigure& figure) {
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& s : figure.series)
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  if (!(x_lo <= x_hi)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;
  y_lo = std::min(y_lo, 0.0);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << escape(figure.title) << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\""
      << kTop + ph << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 5.0, yv = y_lo + (y_hi - y_lo) * i / 5.0;
    svg << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
        << fmt(xv) << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv)
        << "</text>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << kLeft + pw << "\" y2=\""
        << fmt(py(yv)) << "\" stroke=\"#e0e0e0\"/>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">T</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" transform=\"rotate(-90 18 " << kTop + ph / 2
      << ")\" text-anchor=\"middle\">" << escape(figure.y_label) << "</text>\n";

  for (std::size_t k = 0; k < figure.series.size(); ++k) {
    const PlotSeries& s = figure.series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i)
      svg << (i ? " " : "") << fmt(px(s.points[i].first)) << ',' << fmt(py(s.points[i].second));
    svg << "\"/>\n";
    for (const auto& [x, y] : s.points)
      svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"2\" fill=\"" << colour
          << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(k);
    svg << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + pw + 34 << "\" y=\"" << ly + 4 << "\" font-size=\"10\">"
        << escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> emit_plotdata(const std::vector<NamedReport>& reports,
                                                 const std::filesystem::path& out_dir) {
  const auto figures = build_figures(reports);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const PlotFigure& fig : figures) {
    const auto csv_path = out_dir / (fig.name + ".csv");
    std::ofstream csv(csv_path);
    if (!csv) throw InputError("cannot write '" + csv_path.string() + "'");
    csv << "series,T,value\n";
    for (const PlotSeries& s : fig.series)
      for (const auto& [t, v] : s.points) csv << s.label << ',' << format_double(t) << ',' << format_double(v) << '\n';
    written.push_back(csv_path);

    const auto svg_path = out_dir / (fig.name + ".svg");
    std::ofstream svg(svg_path);
    if (!svg) throw InputError("cannot write '" + svg_path.string() + "'");
    svg << render_svg(fig);
    written.push_back(svg_path);
  }
  return written;
}

}  // namespace expfam::harness
