#pragma once

// Minimal SVG line and scatter plots. Output depends only on the data, so
// repeated runs write identical files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matbump/suites.hpp"

namespace matbump {

enum class PlotStyle { scatter, lines };

struct PlotSpec {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  PlotStyle style = PlotStyle::lines;
  int width = 640;
  int height = 420;
};

namespace detail {

inline std::string svg_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace detail

/// One plot with a colored series per map entry, in key order.
inline std::string svg_plot(const std::map<std::string, std::vector<SeriesPoint>>& series, const PlotSpec& spec) {
  using detail::svg_num;
  static const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& [name, pts] : series)
    for (const auto& p : pts) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  if (!std::isfinite(x0)) throw std::invalid_argument("nothing to plot");
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;

  const double left = 70, right = 20 + 190, top = 40, bottom = 50;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  const auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  const auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << svg_num(left) << "\" y=\"24\" font-size=\"14\">" << detail::svg_escape(spec.title)
     << "</text>\n";
  os << "<rect x=\"" << svg_num(left) << "\" y=\"" << svg_num(top) << "\" width=\"" << svg_num(pw) << "\" height=\""
     << svg_num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << svg_num(sx(xv)) << "\" y=\"" << svg_num(top + ph + 16)
       << "\" text-anchor=\"middle\">" << detail::tick_label(xv) << "</text>\n";
    os << "<text x=\"" << svg_num(left - 6) << "\" y=\"" << svg_num(sy(yv) + 4) << "\" text-anchor=\"end\">"
       << detail::tick_label(yv) << "</text>\n";
  }
  os << "<text x=\"" << svg_num(left + pw / 2) << "\" y=\"" << svg_num(spec.height - 10.0)
     << "\" text-anchor=\"middle\">" << detail::svg_escape(spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << svg_num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << detail::svg_escape(spec.y_label) << "</text>\n";

  std::size_t k = 0;
  for (const auto& [name, pts] : series) {
    const char* color = palette[k % std::size(palette)];
    if (spec.style == PlotStyle::lines) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (const auto& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
        os << (first ? "" : " ") << svg_num(sx(p.x)) << "," << svg_num(sy(p.y));
        first = false;
      }
      os << "\"/>\n";
    }
    for (const auto& p : pts) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      os << "<circle cx=\"" << svg_num(sx(p.x)) << "\" cy=\"" << svg_num(sy(p.y)) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    const double ly = top + 14.0 * static_cast<double>(k) + 8;
    os << "<rect x=\"" << svg_num(left + pw + 12) << "\" y=\"" << svg_num(ly - 8) << "\" width=\"10\" height=\"10\" fill=\""
       << color << "\"/>\n";
    os << "<text x=\"" << svg_num(left + pw + 26) << "\" y=\"" << svg_num(ly + 1) << "\" font-size=\"10\">"
       << detail::svg_escape(name) << "</text>\n";
    ++k;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace matbump
