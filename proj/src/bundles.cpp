#include "calabi/bundles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "calabi/errors.hpp"
#include "calabi/levelset.hpp"

namespace calabi {

namespace {

constexpr double kPi = std::numbers::pi;

double binom(int n, int k) {
  double v = 1;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

std::complex<double> rotated(const BundleParams& params, std::complex<double> w) {
  return std::polar(1.0, -params.theta_hat) * w;
}

// Level function Im e^{-i theta_hat} P(z) with its gradient.
LevelFunction level_function(const BundleParams& params, const PolyP& P) {
  LevelFunction F;
  F.f = [params, P](PlanePoint p) {
    return rotated(params, P.eval({p.x, p.y})).imag();
  };
  F.grad = [params, P](PlanePoint p) -> std::array<double, 2> {
    const std::complex<double> d = rotated(params, P.deriv({p.x, p.y}));
    return {d.imag(), d.real()};
  };
  return F;
}

void validate(const BundleParams& params) {
  if (params.m < 1 || params.r < 0)
    throw OutOfDomain("bundle needs base dimension m >= 1 and r >= 0");
  if (std::abs(params.xi) == 0.0)
    throw DegenerateBranch("zero twisting parameter collapses the boundary arms");
}

// Newton in y on Im e^{-i theta} P(b + i y) = 0.
double refine_boundary_height(const BundleParams& params, const PolyP& P, double y0) {
  double y = y0;
  const double scale = 1 + std::abs(P.eval({params.b, y0}));
  for (int it = 0; it < 60; ++it) {
    const std::complex<double> z{params.b, y};
    const double g = rotated(params, P.eval(z)).imag();
    const double gp = rotated(params, P.deriv(z)).real();
    if (std::abs(gp) < 1e-300) break;
    const double step = g / gp;
    y -= step;
    if (std::abs(step) < 1e-15 * (1 + std::abs(y))) break;
  }
  const double res = std::abs(rotated(params, P.eval({params.b, y})).imag());
  if (!(res <= 1e-9 * scale))
    throw NoRoot("boundary-height refinement did not converge");
  return y;
}

// Arm of the branch through 0 on the side sign(y) = side, traced to Re z = b.
std::vector<PlanePoint> trace_arm(const BundleParams& params, const PolyP& P, int side,
                                  double q_scale, double c2) {
  const LevelFunction F = level_function(params, P);

  // Seed on the local parabola x = c2 y^2, corrected by Newton in x.
  const double y0 = side * 0.05 * q_scale;
  double x0 = c2 * y0 * y0;
  for (int it = 0; it < 60; ++it) {
    const std::complex<double> z{x0, y0};
    const double g = rotated(params, P.eval(z)).imag();
    const double gx = rotated(params, P.deriv(z)).imag();
    if (std::abs(gx) < 1e-300) break;
    const double step = g / gx;
    x0 -= step;
    if (std::abs(step) < 1e-16 * (1 + std::abs(x0))) break;
  }
  if (std::abs(F.f({x0, y0})) > 1e-8 * (1 + std::abs(P.eval({params.b, q_scale}))))
    throw SeedOffLevelSet("could not place a seed on the branch near the origin");

  double y_half = 3 * q_scale;
  for (int attempt = 0; attempt < 5; ++attempt) {
    Window win;
    win.x_min = -10 * params.b - q_scale;
    win.x_max = params.b;
    win.y_min = -y_half;
    win.y_max = y_half;
    Branch br = trace_level(F, {x0, y0}, win);
    if (br.is_closed)
      throw BranchEscapesWindow("arm closes up without meeting the boundary");

    // Split at the point nearest the origin; keep the side whose far end has
    // the requested sign of y.
    std::size_t i0 = 0;
    double best = std::hypot(br.points[0].x, br.points[0].y);
    for (std::size_t i = 1; i < br.points.size(); ++i) {
      const double d = std::hypot(br.points[i].x, br.points[i].y);
      if (d < best) {
        best = d;
        i0 = i;
      }
    }
    std::vector<PlanePoint> arm;
    if (side * br.points.back().y > 0 && i0 + 1 < br.points.size())
      arm.assign(br.points.begin() + i0, br.points.end());
    else {
      arm.assign(br.points.begin(), br.points.begin() + i0 + 1);
      std::reverse(arm.begin(), arm.end());
    }
    if (arm.size() < 2 || side * arm.back().y <= 0)
      throw BranchEscapesWindow("branch has no arm on the requested side");

    const PlanePoint end = arm.back();
    const double reach_tol = 2 * std::max(br.step_bound, 1e-12);
    if (std::abs(end.x - params.b) <= reach_tol) return arm;
    if (y_half - std::abs(end.y) <= reach_tol) {
      y_half *= 2;  // left through a y edge: enlarge and retry
      continue;
    }
    throw BranchEscapesWindow("arm never reaches the boundary line");
  }
  throw BranchEscapesWindow("arm never reaches the boundary line");
}

}  // namespace

std::complex<double> PolyP::eval(std::complex<double> z) const {
  std::complex<double> acc = 0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
  return acc;
}

std::complex<double> PolyP::deriv(std::complex<double> z) const {
  std::complex<double> acc = 0;
  for (std::size_t k = coeffs.size(); k-- > 1;)
    acc = acc * z + coeffs[k] * static_cast<double>(k);
  return acc;
}

PolyP poly_P(std::complex<double> xi, int m, int r) {
  if (m < 0 || r < 0) throw OutOfDomain("polynomial orders must be nonnegative");
  PolyP P;
  P.coeffs.assign(static_cast<std::size_t>(m + r + 2), {0, 0});
  for (int j = 0; j <= m; ++j)
    P.coeffs[static_cast<std::size_t>(j + r + 1)] =
        binom(m, j) * std::pow(xi, m - j) / static_cast<double>(j + r + 1);
  return P;
}

std::vector<double> vertical_branch_thetas(int m, int r, double psi) {
  if (m < 1 || r < 0) throw OutOfDomain("bundle needs base dimension m >= 1 and r >= 0");
  double theta = std::fmod(m * psi + (r + 1) * kPi / 2, kPi);
  if (theta <= 0) theta += kPi;
  return {theta};
}

BoundaryIntersections boundary_intersections(const BundleParams& params,
                                             double max_denominator) {
  validate(params);
  if (!(params.b > 0)) throw BadInterval("boundary line must sit at positive momentum");
  const PolyP P = poly_P(params.xi, params.m, params.r);

  const double xi1 = params.xi.real();
  const double norm2 = std::norm(params.xi);
  const double c2 = params.m * xi1 / ((params.r + 2) * norm2);
  const double q_scale =
      c2 > 0 ? std::sqrt(params.b / c2) : std::sqrt(params.b) + 0.1 * std::abs(params.xi);

  BoundaryIntersections out;
  out.arm_plus = trace_arm(params, P, +1, q_scale, c2);
  out.arm_minus = trace_arm(params, P, -1, q_scale, c2);
  out.q = refine_boundary_height(params, P, out.arm_plus.back().y);
  out.q_prime = refine_boundary_height(params, P, out.arm_minus.back().y);
  out.arm_plus.back() = {params.b, out.q};
  out.arm_minus.back() = {params.b, out.q_prime};
  // The arms emanate from the origin itself; the trace stops at or just short
  // of it.  Snap a front point already within rounding distance, otherwise
  // prepend the exact origin.
  auto anchor_origin = [&](std::vector<PlanePoint>& arm) {
    if (std::hypot(arm.front().x, arm.front().y) <= 1e-9 * (1 + q_scale))
      arm.front() = {0, 0};
    else
      arm.insert(arm.begin(), {0, 0});
  };
  anchor_origin(out.arm_plus);
  anchor_origin(out.arm_minus);

  const long long bound = static_cast<long long>(max_denominator);
  out.q_rational = reconstruct_rational(out.q, bound);
  out.q_prime_rational = reconstruct_rational(out.q_prime, bound);
  return out;
}

double bundle_charge_arg(const BundleParams& params, double y, double base_y) {
  validate(params);
  const PolyP P = poly_P(params.xi, params.m, params.r);
  auto at = [&](double t) { return P.eval({params.b, t}); };
  std::complex<double> prev = at(base_y);
  if (std::abs(prev) == 0.0)
    throw SingularPoint("charge vanishes at the base point");
  double phase = std::arg(prev);
  int steps = 512;
  for (int attempt = 0; attempt < 8; ++attempt) {
    phase = std::arg(at(base_y));
    prev = at(base_y);
    bool ok = true;
    for (int k = 1; k <= steps; ++k) {
      const std::complex<double> cur = at(base_y + (y - base_y) * k / steps);
      if (std::abs(cur) == 0.0)
        throw SingularPoint("charge vanishes along the boundary segment");
      const double inc = std::arg(cur / prev);
      if (std::abs(inc) > 1.0) {
        ok = false;
        break;
      }
      phase += inc;
      prev = cur;
    }
    if (ok) return phase;
    steps *= 4;
  }
  throw TraceFailure("could not follow the charge argument continuously");
}

double charge_arg_xi1_derivative(const BundleParams& params, std::complex<double> z) {
  validate(params);
  const PolyP P = poly_P(params.xi, params.m, params.r);
  const PolyP Q = poly_P(params.xi, params.m - 1, params.r);
  const std::complex<double> pv = P.eval(z);
  if (std::abs(pv) < 1e-300)
    throw SingularPoint("charge vanishes where the derivative is requested");
  return params.m * (Q.eval(z) / pv).imag();
}

int arg_monotonicity(const BundleParams& params, double y, double zero_tol) {
  const double v = charge_arg_xi1_derivative(params, {params.b, y});
  if (std::abs(v) <= zero_tol) return 0;
  return v > 0 ? 1 : -1;
}

double lifted_angle_bundle(const BundleParams& params, const std::vector<PlanePoint>& arc) {
  validate(params);
  if (arc.size() < 2) throw BadInterval("lifted angle needs at least two arc points");
  auto segment_angle = [&](std::size_t i) {
    const std::complex<double> za{arc[i].x, arc[i].y};
    const std::complex<double> zb{arc[i + 1].x, arc[i + 1].y};
    const std::complex<double> mid = 0.5 * (za + zb);
    const std::complex<double> dz = zb - za;
    if (std::abs(dz) == 0.0 || std::abs(mid) == 0.0 || std::abs(params.xi + mid) == 0.0)
      throw SingularPoint("degenerate arc segment");
    return params.m * std::arg(params.xi + mid) + params.r * std::arg(mid) + std::arg(dz);
  };
  double angle = segment_angle(0);
  for (std::size_t i = 1; i + 1 < arc.size(); ++i) {
    const double raw = segment_angle(i);
    // Unwrap onto the continuous lift.
    angle += std::remainder(raw - angle, 2 * kPi);
  }
  return angle;
}

}  // namespace calabi
