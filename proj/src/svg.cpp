#include "calabi/svg.hpp"

#include <algorithm>
#include <cmath>

#include "calabi/csv.hpp"

namespace calabi {

namespace {

struct Mapper {
  double x0, x1, y0, y1;
  int w, h, pad;

  double sx(double x) const { return pad + (x - x0) / (x1 - x0) * (w - 2 * pad); }
  double sy(double y) const { return h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad); }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_svg_plot(std::ostream& os, const std::vector<SvgSeries>& series, SvgOptions opts) {
  double x0 = opts.x_min, x1 = opts.x_max, y0 = opts.y_min, y1 = opts.y_max;
  if (!(x1 > x0) || !(y1 > y0)) {
    bool any = false;
    for (const auto& s : series)
      for (const auto& p : s.points) {
        if (!any) {
          x0 = x1 = p.x;
          y0 = y1 = p.y;
          any = true;
        } else {
          x0 = std::min(x0, p.x);
          x1 = std::max(x1, p.x);
          y0 = std::min(y0, p.y);
          y1 = std::max(y1, p.y);
        }
      }
    if (!any) {
      x0 = y0 = -1;
      x1 = y1 = 1;
    }
    const double mx = std::max(0.05 * (x1 - x0), 1e-6);
    const double my = std::max(0.05 * (y1 - y0), 1e-6);
    x0 -= mx;
    x1 += mx;
    y0 -= my;
    y1 += my;
  }
  const Mapper map{x0, x1, y0, y1, opts.width, opts.height, 40};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
     << opts.height << "\" viewBox=\"0 0 " << opts.width << " " << opts.height << "\">\n";
  os << "<!-- generator: calabi svg v1 -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty())
    os << "<text x=\"" << opts.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"14\">" << opts.title << "</text>\n";

  // Coordinate axes through the origin when visible, else a frame only.
  os << "<rect x=\"" << map.pad << "\" y=\"" << map.pad << "\" width=\""
     << opts.width - 2 * map.pad << "\" height=\"" << opts.height - 2 * map.pad
     << "\" fill=\"none\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  if (x0 < 0 && x1 > 0)
    os << "<line x1=\"" << fmt(map.sx(0)) << "\" y1=\"" << map.pad << "\" x2=\""
       << fmt(map.sx(0)) << "\" y2=\"" << opts.height - map.pad
       << "\" stroke=\"#ccc\" stroke-width=\"1\"/>\n";
  if (y0 < 0 && y1 > 0)
    os << "<line x1=\"" << map.pad << "\" y1=\"" << fmt(map.sy(0)) << "\" x2=\""
       << opts.width - map.pad << "\" y2=\"" << fmt(map.sy(0))
       << "\" stroke=\"#ccc\" stroke-width=\"1\"/>\n";

  // Corner labels with the data bounds.
  os << "<text x=\"" << map.pad << "\" y=\"" << opts.height - map.pad + 16
     << "\" font-family=\"sans-serif\" font-size=\"10\">" << format_double(x0) << "</text>\n";
  os << "<text x=\"" << opts.width - map.pad << "\" y=\"" << opts.height - map.pad + 16
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
     << format_double(x1) << "</text>\n";
  os << "<text x=\"" << map.pad - 4 << "\" y=\"" << opts.height - map.pad
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
     << format_double(y0) << "</text>\n";
  os << "<text x=\"" << map.pad - 4 << "\" y=\"" << map.pad + 10
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
     << format_double(y1) << "</text>\n";

  for (const auto& s : series) {
    if (s.points.empty()) continue;
    os << (s.closed ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i) os << ' ';
      os << fmt(map.sx(s.points[i].x)) << ',' << fmt(map.sy(s.points[i].y));
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace calabi
