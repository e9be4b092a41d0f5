#pragma once

#include <cmath>

namespace calabi {

struct PlanePoint {
  double x = 0;
  double y = 0;
};

inline double dist(PlanePoint a, PlanePoint b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Axis-aligned trace window in the momentum plane.
struct Window {
  double x_min = -1, x_max = 1;
  double y_min = -1, y_max = 1;

  bool contains(PlanePoint p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  double diagonal() const { return std::hypot(x_max - x_min, y_max - y_min); }
};

// Distance from p to the segment [a, b].
double point_segment_distance(PlanePoint p, PlanePoint a, PlanePoint b);

// Wrap an angle into (-pi, pi].
double wrap_angle(double t);

}  // namespace calabi
