#include "dissiped/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dissiped {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// round limits out to a tidy tick step
std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-12 * span; t += step) ticks.push_back(t);
  return ticks;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::vector<SvgPanel>& panels,
                    const std::string& x_label) {
  if (panels.empty()) throw std::invalid_argument("svg: no panels");
  const int width = 880;
  const int panel_h = 300;
  const int margin_l = 80, margin_r = 30, margin_t = 40, margin_b = 55;
  const int height = static_cast<int>(panels.size()) * panel_h;

  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (size_t pi = 0; pi < panels.size(); ++pi) {
    const SvgPanel& panel = panels[pi];
    const double y0 = static_cast<double>(pi) * panel_h;
    const double plot_x = margin_l, plot_y = y0 + margin_t;
    const double plot_w = width - margin_l - margin_r;
    const double plot_h = panel_h - margin_t - margin_b;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    auto transform_y = [&](double v) {
      return panel.log_y ? std::log10(std::max(std::fabs(v), 1e-300)) : v;
    };
    for (const SvgSeries& s : panel.series) {
      for (double x : s.xs) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
      }
      for (double y : s.ys) {
        const double t = transform_y(y);
        ymin = std::min(ymin, t);
        ymax = std::max(ymax, t);
      }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto X = [&](double x) { return plot_x + (x - xmin) / (xmax - xmin) * plot_w; };
    auto Y = [&](double y) {
      return plot_y + plot_h - (transform_y(y) - ymin) / (ymax - ymin) * plot_h;
    };
    auto Yraw = [&](double t) { return plot_y + plot_h - (t - ymin) / (ymax - ymin) * plot_h; };

    // frame + title
    os << "<rect x=\"" << plot_x << "\" y=\"" << plot_y << "\" width=\"" << plot_w
       << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << plot_x << "\" y=\"" << y0 + 24
       << "\" font-family=\"sans-serif\" font-size=\"15\">" << panel.title << "</text>\n";

    for (double t : nice_ticks(xmin, xmax)) {
      const double px = X(t);
      os << "<line x1=\"" << px << "\" y1=\"" << plot_y + plot_h << "\" x2=\"" << px
         << "\" y2=\"" << plot_y + plot_h + 5 << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << px << "\" y=\"" << plot_y + plot_h + 20
         << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << fmt(t)
         << "</text>\n";
    }
    for (double t : nice_ticks(ymin, ymax)) {
      const double py = Yraw(t);
      os << "<line x1=\"" << plot_x - 5 << "\" y1=\"" << py << "\" x2=\"" << plot_x
         << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << plot_x - 8 << "\" y=\"" << py + 4
         << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(t)
         << "</text>\n";
    }
    os << "<text x=\"" << plot_x + plot_w / 2 << "\" y=\"" << plot_y + plot_h + 40
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << x_label
       << "</text>\n";
    os << "<text x=\"18\" y=\"" << plot_y + plot_h / 2
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
          "transform=\"rotate(-90 18 "
       << plot_y + plot_h / 2 << ")\">"
       << (panel.log_y ? "log10 " + panel.y_label : panel.y_label) << "</text>\n";

    for (size_t si = 0; si < panel.series.size(); ++si) {
      const SvgSeries& s = panel.series[si];
      const char* color = kColors[si % (sizeof kColors / sizeof kColors[0])];
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\" points=\"";
      // decimate to at most ~2000 points per series to bound file size
      const size_t stride = std::max<size_t>(1, s.xs.size() / 2000);
      for (size_t k = 0; k < s.xs.size(); k += stride)
        os << fmt(X(s.xs[k])) << "," << fmt(Y(s.ys[k])) << " ";
      if (!s.xs.empty() && (s.xs.size() - 1) % stride != 0)
        os << fmt(X(s.xs.back())) << "," << fmt(Y(s.ys.back()));
      os << "\"/>\n";
      // legend
      const double lx = plot_x + plot_w - 160;
      const double ly = plot_y + 14 + 16.0 * static_cast<double>(si);
      os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22 << "\" y2=\""
         << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << lx + 28 << "\" y=\"" << ly
         << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace dissiped
