#pragma once

// Minimal built-in SVG line renderer: stacked panels, axes with ticks,
// polyline series, legend. No external plotting dependency.

#include <string>
#include <vector>

namespace dissiped {

struct SvgSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct SvgPanel {
  std::string title;
  std::string y_label;
  bool log_y = false;  // plot log10(|y|) with a floor at 1e-300
  std::vector<SvgSeries> series;
};

void write_svg_plot(const std::string& path, const std::vector<SvgPanel>& panels,
                    const std::string& x_label);

}  // namespace dissiped
