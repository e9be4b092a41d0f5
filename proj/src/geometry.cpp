#include "calabi/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace calabi {

double point_segment_distance(PlanePoint p, PlanePoint a, PlanePoint b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  if (len2 == 0) return dist(p, a);
  double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, {a.x + t * vx, a.y + t * vy});
}

double wrap_angle(double t) {
  const double two_pi = 2 * std::numbers::pi;
  t = std::fmod(t, two_pi);
  if (t <= -std::numbers::pi) t += two_pi;
  if (t > std::numbers::pi) t -= two_pi;
  return t;
}

}  // namespace calabi
