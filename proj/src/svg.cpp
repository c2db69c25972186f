#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "gdcsma/format.hpp"
#include "gdcsma/scenario.hpp"

namespace gdcsma {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 190.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_sweep_svg(std::ostream& out, std::span<const SweepRow> rows, const std::string& title) {
  // Series keep first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const SweepRow*>> series;
  double xmin = INFINITY;
  double xmax = -INFINITY;
  double ymax = 1.0;
  for (const SweepRow& r : rows) {
    if (!series.count(r.graph)) order.push_back(r.graph);
    series[r.graph].push_back(&r);
    xmin = std::min(xmin, r.sweep_value);
    xmax = std::max(xmax, r.sweep_value);
    for (const double y : {r.empirical.norm1, r.analytic.norm1}) {
      if (std::isfinite(y)) ymax = std::max(ymax, y);
    }
  }
  if (!(xmin < xmax)) {
    xmin = rows.empty() ? 0.0 : xmin - 0.5;
    xmax = xmin + 1.0;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - y / ymax * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << escape(title) << "</text>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(kTop + plot_h) << "\" x2=\""
      << fixed(kLeft + plot_w) << "\" y2=\"" << fixed(kTop + plot_h) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << fixed(kTop + plot_h) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymax * t / 4.0;
    out << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << fixed(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << format_double(std::round(xv * 1000) / 1000) << "</text>\n";
    out << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(py(yv) + 4)
        << "\" text-anchor=\"end\">" << format_double(std::round(yv * 100) / 100) << "</text>\n";
  }
  const std::string xlabel = rows.empty() ? "sweep" : rows.front().sweep_param;
  out << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 10)
      << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  out << "<text x=\"16\" y=\"" << fixed(kTop + plot_h / 2) << "\" transform=\"rotate(-90 16 "
      << fixed(kTop + plot_h / 2) << ")\" text-anchor=\"middle\">norm-1 of R</text>\n";
  // Dobrushin reference level.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(py(1.0)) << "\" x2=\""
      << fixed(kLeft + plot_w) << "\" y2=\"" << fixed(py(1.0))
      << "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";

  for (std::size_t s = 0; s < order.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    const auto& pts = series[order[s]];
    for (const bool analytic : {false, true}) {
      std::string path;
      for (const SweepRow* r : pts) {
        const double y = analytic ? r->analytic.norm1 : r->empirical.norm1;
        if (!std::isfinite(y)) continue;
        path += (path.empty() ? "" : " ") + fixed(px(r->sweep_value)) + "," + fixed(py(y));
      }
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
          << (analytic ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << path << "\"/>\n";
    }
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(s);
    out << "<line x1=\"" << fixed(kWidth - kRight + 12) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\""
        << fixed(kWidth - kRight + 36) << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fixed(kWidth - kRight + 42) << "\" y=\"" << fixed(ly) << "\">"
        << escape(order[s]) << "</text>\n";
  }
  const double note_y = kTop + 14.0 + 18.0 * static_cast<double>(order.size()) + 10.0;
  out << "<text x=\"" << fixed(kWidth - kRight + 12) << "\" y=\"" << fixed(note_y)
      << "\" fill=\"gray\">solid: empirical</text>\n";
  out << "<text x=\"" << fixed(kWidth - kRight + 12) << "\" y=\"" << fixed(note_y + 16)
      << "\" fill=\"gray\">dashed: analytic</text>\n";
  out << "</svg>\n";
}

}  // namespace gdcsma
