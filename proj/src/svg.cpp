#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mpark {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

std::string fmt_tick(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

std::string svg_chart(const SvgChartSpec& spec, const std::vector<SvgSeries>& series) {
  const double ml = 70, mr = 20, mt = 36, mb = 50;
  const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;

  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if (spec.log_x && x <= 0) return false;
    if (spec.log_y && y <= 0) return false;
    return true;
  };

  double x0 = std::numeric_limits<double>::max(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (auto [x, y] : s.points)
      if (usable(x, y)) {
        x0 = std::min(x0, tx(x));
        x1 = std::max(x1, tx(x));
        y0 = std::min(y0, ty(y));
        y1 = std::max(y1, ty(y));
      }
  if (x0 > x1) {
    x0 = y0 = 0;
    x1 = y1 = 1;
  }
  if (x1 - x0 < 1e-12) x1 = x0 + 1;
  if (y1 - y0 < 1e-12) y1 = y0 + 1;

  auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return mt + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << spec.width << "' height='"
     << spec.height << "' viewBox='0 0 " << spec.width << " " << spec.height << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << spec.width / 2 << "' y='20' text-anchor='middle' font-size='14'>"
     << spec.title << "</text>\n";
  os << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
     << "' fill='none' stroke='black'/>\n";

  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    double fx = x0 + (x1 - x0) * i / nticks;
    double fy = y0 + (y1 - y0) * i / nticks;
    double gx = ml + pw * i / nticks;
    double gy = mt + ph - ph * i / nticks;
    double vx = spec.log_x ? std::pow(10.0, fx) : fx;
    double vy = spec.log_y ? std::pow(10.0, fy) : fy;
    os << "<line x1='" << gx << "' y1='" << mt << "' x2='" << gx << "' y2='" << mt + ph
       << "' stroke='#dddddd'/>\n";
    os << "<line x1='" << ml << "' y1='" << gy << "' x2='" << ml + pw << "' y2='" << gy
       << "' stroke='#dddddd'/>\n";
    os << "<text x='" << gx << "' y='" << mt + ph + 16 << "' text-anchor='middle' font-size='11'>"
       << fmt_tick(vx) << "</text>\n";
    os << "<text x='" << ml - 6 << "' y='" << gy + 4 << "' text-anchor='end' font-size='11'>"
       << fmt_tick(vy) << "</text>\n";
  }
  os << "<text x='" << ml + pw / 2 << "' y='" << spec.height - 10
     << "' text-anchor='middle' font-size='12'>" << spec.x_label << "</text>\n";
  os << "<text x='16' y='" << mt + ph / 2 << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
     << mt + ph / 2 << ")'>" << spec.y_label << "</text>\n";

  int ci = 0;
  double ly = mt + 14;
  for (const auto& s : series) {
    const char* color = kPalette[ci % 8];
    std::ostringstream pts;
    for (auto [x, y] : s.points) {
      if (!usable(x, y)) continue;
      pts << px(x) << "," << py(y) << " ";
      os << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='2.5' fill='" << color << "'/>\n";
    }
    os << "<polyline points='" << pts.str() << "' fill='none' stroke='" << color
       << "' stroke-width='1.5'/>\n";
    os << "<rect x='" << ml + pw - 150 << "' y='" << ly - 9 << "' width='10' height='10' fill='"
       << color << "'/>\n";
    os << "<text x='" << ml + pw - 136 << "' y='" << ly << "' font-size='11'>" << s.label
       << "</text>\n";
    ly += 16;
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_raster(const std::string& title, const std::vector<unsigned char>& cells, int nx,
                       int ny, double re_min, double re_max, double im_min, double im_max) {
  const double ml = 60, mr = 20, mt = 36, mb = 46;
  const double pw = 560, ph = 480;
  const double w = pw / nx, h = ph / ny;

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << ml + pw + mr << "' height='"
     << mt + ph + mb << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << ml + pw / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
     << "</text>\n";
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!cells[static_cast<size_t>(j) * nx + i]) continue;  // unstable stays white
      double x = ml + i * w;
      double y = mt + ph - (j + 1) * h;
      os << "<rect x='" << x << "' y='" << y << "' width='" << w + 0.5 << "' height='" << h + 0.5
         << "' fill='#3465a4'/>\n";
    }
  os << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
     << "' fill='none' stroke='black'/>\n";
  os << "<text x='" << ml << "' y='" << mt + ph + 16 << "' font-size='11'>" << fmt_tick(re_min)
     << "</text>\n";
  os << "<text x='" << ml + pw << "' y='" << mt + ph + 16 << "' text-anchor='end' font-size='11'>"
     << fmt_tick(re_max) << "</text>\n";
  os << "<text x='" << ml - 6 << "' y='" << mt + ph << "' text-anchor='end' font-size='11'>"
     << fmt_tick(im_min) << "</text>\n";
  os << "<text x='" << ml - 6 << "' y='" << mt + 10 << "' text-anchor='end' font-size='11'>"
     << fmt_tick(im_max) << "</text>\n";
  os << "<text x='" << ml + pw / 2 << "' y='" << mt + ph + 32
     << "' text-anchor='middle' font-size='12'>Re(z)</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace mpark
