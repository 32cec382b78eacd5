// Minimal static SVG line charts for the result tables. Deterministic
// output: fixed palette, fixed formatting, no timestamps.
#ifndef RESAMPHD_SVG_CHART_HPP
#define RESAMPHD_SVG_CHART_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace cli {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points; // (x, y), sorted by x
};

inline std::string svg_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string line_chart(const std::vector<Series>& series,
                              const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label) {
  const int width = 720, height = 480;
  const double left = 70, right = 40, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const auto px = [&](double x) {
    return left + (x - x_min) / (x_max - x_min) * plot_w;
  };
  const auto py = [&](double y) {
    return top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;
  };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
                                  "#bcbd22", "#e377c2"};

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + svg_num(width / 2.0) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title +
         "</text>\n";

  // axes with 5 ticks each
  out += "<g stroke=\"#333\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + svg_num(left) + "\" y1=\"" + svg_num(top) +
         "\" x2=\"" + svg_num(left) + "\" y2=\"" + svg_num(top + plot_h) +
         "\"/>\n";
  out += "<line x1=\"" + svg_num(left) + "\" y1=\"" + svg_num(top + plot_h) +
         "\" x2=\"" + svg_num(left + plot_w) + "\" y2=\"" +
         svg_num(top + plot_h) + "\"/>\n";
  out += "</g>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x_min + (x_max - x_min) * t / 4.0;
    const double fy = y_min + (y_max - y_min) * t / 4.0;
    out += "<text x=\"" + svg_num(px(fx)) + "\" y=\"" +
           svg_num(top + plot_h + 16) + "\" text-anchor=\"middle\">" +
           svg_num(fx) + "</text>\n";
    out += "<text x=\"" + svg_num(left - 6) + "\" y=\"" +
           svg_num(py(fy) + 4) + "\" text-anchor=\"end\">" + svg_num(fy) +
           "</text>\n";
    out += "<line x1=\"" + svg_num(left) + "\" y1=\"" + svg_num(py(fy)) +
           "\" x2=\"" + svg_num(left + plot_w) + "\" y2=\"" +
           svg_num(py(fy)) + "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
  }
  out += "<text x=\"" + svg_num(left + plot_w / 2) + "\" y=\"" +
         svg_num(double(height) - 10) + "\" text-anchor=\"middle\">" +
         x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + svg_num(top + plot_h / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         svg_num(top + plot_h / 2) + ")\">" + y_label + "</text>\n";

  size_t ci = 0;
  double legend_y = top + 8;
  for (const auto& s : series) {
    const char* color = palette[ci % std::size(palette)];
    std::string pts;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!pts.empty()) pts += ' ';
      pts += svg_num(px(x)) + "," + svg_num(py(y));
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.8\" points=\"" + pts + "\"/>\n";
    // legend swatch
    out += "<rect x=\"" + svg_num(left + plot_w - 150) + "\" y=\"" +
           svg_num(legend_y - 9) + "\" width=\"14\" height=\"3\" fill=\"" +
           color + "\"/>\n";
    out += "<text x=\"" + svg_num(left + plot_w - 132) + "\" y=\"" +
           svg_num(legend_y - 4) + "\">" + s.label + "</text>\n";
    legend_y += 16;
    ++ci;
  }
  out += "</svg>\n";
  return out;
}

} // namespace cli

#endif
