// svg.hpp
// Minimal static line charts.

#pragma once

#include <string>
#include <vector>

namespace mtvpar::io {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
};

// Panels laid out left to right in one SVG document.
std::string render_svg(const std::vector<LineChart>& panels, int panel_width = 420,
                       int panel_height = 320);

}  // namespace mtvpar::io
