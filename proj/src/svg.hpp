#pragma once

// Minimal native SVG output: log-log line charts for the sweep artifacts and
// a raster for stability scans. No external plotting dependency.

#include <string>
#include <vector>

namespace mpark {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct SvgChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
  int width = 640;
  int height = 480;
};

// Renders series as polylines with markers; non-finite and (on log axes)
// non-positive points are skipped.
std::string svg_chart(const SvgChartSpec& spec, const std::vector<SvgSeries>& series);

// One rect per cell; cells indexed row-major, ny rows of nx.
std::string svg_raster(const std::string& title, const std::vector<unsigned char>& cells, int nx,
                       int ny, double re_min, double re_max, double im_min, double im_max);

}  // namespace mpark
