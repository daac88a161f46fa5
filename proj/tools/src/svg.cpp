#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mtvpar::io {

namespace {

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi == lo) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

void render_panel(std::string& out, const LineChart& chart, double left, int width,
                  int height) {
  const double margin_l = 62, margin_r = 16, margin_t = 30, margin_b = 46;
  const double plot_w = width - margin_l - margin_r;
  const double plot_h = height - margin_t - margin_b;
  const double x0 = left + margin_l;
  const double y0 = margin_t;

  auto tx = [&](double x) { return chart.log_x && x > 0 ? std::log10(x) : x; };
  Range xr, yr;
  for (const Series& s : chart.series) {
    for (double x : s.x) {
      if (!chart.log_x || x > 0) xr.add(tx(x));
    }
    for (double y : s.y) yr.add(y);
  }
  xr.settle();
  yr.settle();
  yr.lo = std::min(yr.lo, 0.0);
  auto px = [&](double x) { return x0 + (tx(x) - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return y0 + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

  out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  out += "<text x=\"" + num(x0 + plot_w / 2) + "\" y=\"18\" text-anchor=\"middle\" "
         "font-size=\"14\">" + escape(chart.title) + "</text>\n";
  out += "<text x=\"" + num(x0 + plot_w / 2) + "\" y=\"" + num(height - 8.0) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(chart.x_label) + "</text>\n";
  out += "<text transform=\"translate(" + num(left + 14) + "," + num(y0 + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" +
         escape(chart.y_label) + "</text>\n";

  for (int i = 0; i <= 4; ++i) {
    const double y = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    out += "<line x1=\"" + num(x0 - 4) + "\" x2=\"" + num(x0) + "\" y1=\"" + num(py(y)) +
           "\" y2=\"" + num(py(y)) + "\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(py(y) + 4) +
           "\" text-anchor=\"end\" font-size=\"10\">" + tick_label(y) + "</text>\n";
  }
  // x ticks at the data points of the first series
  if (!chart.series.empty()) {
    for (double x : chart.series.front().x) {
      if (chart.log_x && x <= 0) continue;
      out += "<line x1=\"" + num(px(x)) + "\" x2=\"" + num(px(x)) + "\" y1=\"" +
             num(y0 + plot_h) + "\" y2=\"" + num(y0 + plot_h + 4) + "\" stroke=\"#444\"/>\n";
      out += "<text x=\"" + num(px(x)) + "\" y=\"" + num(y0 + plot_h + 16) +
             "\" text-anchor=\"middle\" font-size=\"10\">" + tick_label(x) + "</text>\n";
    }
  }

  double legend_y = y0 + 14;
  for (const Series& s : chart.series) {
    std::string points;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.y[i]) || (chart.log_x && s.x[i] <= 0)) continue;
      points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    }
    const std::string dash = s.dashed ? " stroke-dasharray=\"6,4\"" : "";
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\"" + dash +
           " points=\"" + points + "\"/>\n";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.y[i]) || (chart.log_x && s.x[i] <= 0)) continue;
      out += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) +
             "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
    }
    out += "<line x1=\"" + num(x0 + plot_w - 120) + "\" x2=\"" + num(x0 + plot_w - 96) +
           "\" y1=\"" + num(legend_y) + "\" y2=\"" + num(legend_y) + "\" stroke=\"" +
           s.color + "\" stroke-width=\"2\"" + dash + "/>\n";
    out += "<text x=\"" + num(x0 + plot_w - 90) + "\" y=\"" + num(legend_y + 4) +
           "\" font-size=\"11\">" + escape(s.name) + "</text>\n";
    legend_y += 16;
  }
}

}  // namespace

std::string render_svg(const std::vector<LineChart>& panels, int panel_width,
                       int panel_height) {
  const int width = panel_width * static_cast<int>(std::max<std::size_t>(1, panels.size()));
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(width) + "\" height=\"" + std::to_string(panel_height) +
                    "\" viewBox=\"0 0 " + std::to_string(width) + " " +
                    std::to_string(panel_height) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    render_panel(out, panels[i], static_cast<double>(i) * panel_width, panel_width,
                 panel_height);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace mtvpar::io
