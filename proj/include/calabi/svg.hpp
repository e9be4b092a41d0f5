#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "calabi/geometry.hpp"

namespace calabi {

struct SvgSeries {
  std::vector<PlanePoint> points;
  std::string color = "#1f77b4";
  bool closed = false;
};

struct SvgOptions {
  int width = 640;
  int height = 640;
  std::string title;
  // Data bounds; if degenerate they are grown to fit all series with a margin.
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
};

// Minimal self-contained SVG plot (axes + polylines).  Output is byte
// deterministic apart from nothing: the version comment below is fixed.
void write_svg_plot(std::ostream& os, const std::vector<SvgSeries>& series,
                    SvgOptions opts = {});

}  // namespace calabi
