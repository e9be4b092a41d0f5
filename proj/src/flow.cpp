#include "calabi/flow.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "calabi/construction.hpp"

namespace calabi {

namespace {

double u2_at(const SymplecticPotentialProfile& pot, double x) { return pot.u2(x); }

double denominator(DenominatorConvention conv, double x, double f) {
  return conv == DenominatorConvention::XSquaredPlusF2 ? x * x + f * f : x + f * f;
}

// Right side of the profile flow at interior node i, centered differences.
double profile_rhs(const std::vector<double>& x, const std::vector<double>& f, std::size_t i,
                   const SymplecticPotentialProfile& pot, int n, DenominatorConvention conv,
                   double min_den) {
  const double h = x[i + 1] - x[i];
  const double fp = (f[i + 1] - f[i - 1]) / (2 * h);
  const double fpp = (f[i + 1] - 2 * f[i] + f[i - 1]) / (h * h);
  const double den = denominator(conv, x[i], f[i]);
  if (std::abs(den) < min_den)
    throw SingularPoint("profile flow denominator vanishes (profile through the origin)");
  return u2_at(pot, x[i]) *
         (fpp / (1 + fp * fp) + (n - 1) * (x[i] * fp - f[i]) / den);
}

void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t m = diag.size();
  for (std::size_t i = 1; i < m; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[m - 1] /= diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

struct CurveDerived {
  std::vector<double> kappa, xi, speed;  // per interior node
  std::vector<PlanePoint> normal;
  double h_typical = 0;
};

CurveDerived curve_derived(const CurveState& state, const SymplecticPotentialProfile& pot,
                           int n) {
  const auto& p = state.pts;
  const std::size_t m = p.size();
  CurveDerived d;
  d.kappa.assign(m, 0);
  d.xi.assign(m, 0);
  d.speed.assign(m, 0);
  d.normal.assign(m, PlanePoint{});
  double total = 0;
  for (std::size_t i = 1; i < m; ++i) total += dist(p[i - 1], p[i]);
  d.h_typical = total / static_cast<double>(m - 1);
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double ux = p[i].x - p[i - 1].x, uy = p[i].y - p[i - 1].y;
    const double vx = p[i + 1].x - p[i].x, vy = p[i + 1].y - p[i].y;
    const double lu = std::hypot(ux, uy), lv = std::hypot(vx, vy);
    const double lw = std::hypot(ux + vx, uy + vy);
    if (lu == 0 || lv == 0 || lw == 0) throw StepUnstable("degenerate curve spacing");
    const double cross = ux * vy - uy * vx;
    d.kappa[i] = 2 * cross / (lu * lv * lw);
    const double tx = (ux + vx) / lw, ty = (uy + vy) / lw;
    const double r2 = p[i].x * p[i].x + p[i].y * p[i].y;
    if (r2 < 1e-14) throw SingularPoint("curve passes through the origin");
    d.xi[i] = (p[i].x * ty - p[i].y * tx) / r2;
    d.normal[i] = {-ty, tx};
    d.speed[i] = u2_at(pot, p[i].x) * (d.kappa[i] + (n - 1) * d.xi[i]);
  }
  return d;
}

// Arc-length resampling with Catmull-Rom interpolation; endpoints preserved.
std::vector<PlanePoint> resample_arclength(const std::vector<PlanePoint>& p, std::size_t m) {
  const std::size_t np = p.size();
  std::vector<double> s(np, 0);
  for (std::size_t i = 1; i < np; ++i) s[i] = s[i - 1] + dist(p[i - 1], p[i]);
  const double total = s.back();
  std::vector<PlanePoint> out(m);
  out.front() = p.front();
  out.back() = p.back();
  std::size_t seg = 0;
  for (std::size_t j = 1; j + 1 < m; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(m - 1);
    while (seg + 2 < np && s[seg + 1] < target) ++seg;
    const double ds = s[seg + 1] - s[seg];
    const double t = ds > 0 ? (target - s[seg]) / ds : 0.0;
    const auto& p1 = p[seg];
    const auto& p2 = p[seg + 1];
    const auto& p0 = p[seg > 0 ? seg - 1 : 0];
    const auto& p3 = p[seg + 2 < np ? seg + 2 : np - 1];
    auto cr = [t](double a0, double a1, double a2, double a3) {
      return 0.5 * (2 * a1 + (-a0 + a2) * t + (2 * a0 - 5 * a1 + 4 * a2 - a3) * t * t +
                    (-a0 + 3 * a1 - 3 * a2 + a3) * t * t * t);
    };
    out[j] = {cr(p0.x, p1.x, p2.x, p3.x), cr(p0.y, p1.y, p2.y, p3.y)};
  }
  return out;
}

bool segments_intersect(PlanePoint a, PlanePoint b, PlanePoint c, PlanePoint d) {
  auto orient = [](PlanePoint p, PlanePoint q, PlanePoint r) {
    const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

void check_self_intersection(const std::vector<PlanePoint>& p) {
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    for (std::size_t j = i + 2; j + 1 < p.size(); ++j)
      if (segments_intersect(p[i], p[i + 1], p[j], p[j + 1]))
        throw SelfIntersection("curve developed a self-intersection");
}

// March along one level-set branch by continuation in x, Newton-solving y.
MomentumProfile march_profile(const HarmonicLevelSet& s, double x_start, double y_start,
                              const std::vector<double>& xs_desc) {
  std::vector<PlanePoint> pts;
  pts.reserve(xs_desc.size() + 1);
  double x_prev = x_start, y_prev = y_start;
  pts.push_back({x_start, y_start});
  double slope = 0;
  for (const double x : xs_desc) {
    if (x >= x_prev) continue;
    const double guess = y_prev + slope * (x - x_prev);
    const double y = solve_y_on_level(s, x, guess);
    slope = (y - y_prev) / (x - x_prev);
    pts.push_back({x, y});
    x_prev = x;
    y_prev = y;
  }
  std::reverse(pts.begin(), pts.end());
  MomentumProfile prof;
  prof.samples = std::move(pts);
  prof.x_lo = prof.samples.front().x;
  prof.x_hi = prof.samples.back().x;
  return prof;
}

// x-grid on [lo, hi] quadratically clustered toward lo (steep-slope end).
std::vector<double> graded_grid_desc(double lo, double hi, int count) {
  std::vector<double> xs(count);
  for (int i = 0; i < count; ++i) {
    const double u = static_cast<double>(i + 1) / count;  // (0, 1]
    xs[i] = hi - (hi - lo) * (1 - (1 - u) * (1 - u));
  }
  xs.back() = lo;
  return xs;
}

}  // namespace

SymplecticPotentialProfile default_potential(double a, double b) {
  if (!(a > b) || !(b > 0) || !std::isfinite(a))
    throw BadInterval("potential interval requires a > b > 0");
  SymplecticPotentialProfile pot;
  pot.a = a;
  pot.b = b;
  pot.u2 = [a, b](double x) { return 2 * (x - b) * (a - x) / (a - b); };
  return pot;
}

ProfileState make_profile_state(const MomentumProfile& profile,
                                const SymplecticPotentialProfile& pot, int grid) {
  if (grid < 3) throw BadInterval("profile flow needs at least 3 grid points");
  if (!(pot.a > pot.b)) throw BadInterval("potential interval requires a > b");
  ProfileState st;
  st.x.resize(grid);
  st.f.resize(grid);
  for (int i = 0; i < grid; ++i) {
    st.x[i] = pot.b + (pot.a - pot.b) * i / (grid - 1);
    st.f[i] = profile.eval(st.x[i]);
  }
  return st;
}

void profile_flow_step(ProfileState& state, const SymplecticPotentialProfile& pot, int n,
                       const FlowConfig& cfg) {
  const std::size_t m = state.x.size();
  if (m < 3) throw BadInterval("profile flow needs at least 3 grid points");
  const double h = state.x[1] - state.x[0];
  const std::vector<double> f_old = state.f;

  if (cfg.scheme == TimeScheme::ExplicitEuler) {
    for (std::size_t i = 1; i + 1 < m; ++i)
      state.f[i] = f_old[i] + cfg.dt * profile_rhs(state.x, f_old, i, pot, n, cfg.denominator,
                                                   cfg.min_denominator);
  } else {
    // Implicit second-derivative term, explicit angular term.
    std::vector<double> lower(m, 0), diag(m, 1), upper(m, 0), rhs(m, 0);
    rhs[0] = f_old[0];
    rhs[m - 1] = f_old[m - 1];
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double fp = (f_old[i + 1] - f_old[i - 1]) / (2 * h);
      const double den = denominator(cfg.denominator, state.x[i], f_old[i]);
      if (std::abs(den) < cfg.min_denominator)
        throw SingularPoint("profile flow denominator vanishes (profile through the origin)");
      const double phi = u2_at(pot, state.x[i]);
      const double alpha = cfg.dt * phi / ((1 + fp * fp) * h * h);
      lower[i] = -alpha;
      diag[i] = 1 + 2 * alpha;
      upper[i] = -alpha;
      rhs[i] = f_old[i] + cfg.dt * phi * (n - 1) * (state.x[i] * fp - f_old[i]) / den;
    }
    thomas_solve(lower, diag, upper, rhs);
    state.f = rhs;
  }

  double max_delta = 0, max_f = 0;
  for (std::size_t i = 0; i < m; ++i) {
    max_delta = std::max(max_delta, std::abs(state.f[i] - f_old[i]));
    max_f = std::max(max_f, std::abs(state.f[i]));
  }
  if (!std::isfinite(max_delta) || max_delta > 0.5 * (1 + max_f))
    throw StepUnstable("profile step diverged; reduce dt");
  if (max_f > cfg.blowup_threshold) throw BlowUp("profile amplitude exceeded the guard");
  state.t += cfg.dt;
}

void curve_flow_step(CurveState& state, const SymplecticPotentialProfile& pot, int n,
                     const FlowConfig& cfg) {
  const std::size_t m = state.pts.size();
  if (m < 3) throw BadInterval("curve flow needs at least 3 points");
  const CurveDerived d = curve_derived(state, pot, n);
  const double kappa_guard = 1e3 / d.h_typical;
  for (std::size_t i = 1; i + 1 < m; ++i)
    if (std::abs(d.kappa[i]) > kappa_guard)
      throw BlowUp("curvature exceeded the singularity guard");

  std::vector<PlanePoint> next = state.pts;
  double max_move = 0;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double v = cfg.dt * d.speed[i];
    next[i].x += v * d.normal[i].x;
    next[i].y += v * d.normal[i].y;
    max_move = std::max(max_move, std::abs(v));
  }
  if (!std::isfinite(max_move) || max_move > 0.5 * d.h_typical)
    throw StepUnstable("curve step moved points a grid spacing; reduce dt");
  for (const auto& q : next)
    if (std::abs(q.x) > cfg.blowup_threshold || std::abs(q.y) > cfg.blowup_threshold)
      throw BlowUp("curve escaped the coordinate guard");

  state.pts = resample_arclength(next, m);
  state.t += cfg.dt;
}

std::vector<double> stationarity_residual(const ProfileState& state,
                                          const SymplecticPotentialProfile& pot, int n) {
  std::vector<double> out;
  const std::size_t m = state.x.size();
  if (m < 3) return out;
  out.reserve(m - 2);
  for (std::size_t i = 1; i + 1 < m; ++i)
    out.push_back(profile_rhs(state.x, state.f, i, pot, n,
                              DenominatorConvention::XSquaredPlusF2, 1e-14));
  return out;
}

double max_stationarity_residual(const ProfileState& state,
                                 const SymplecticPotentialProfile& pot, int n) {
  double worst = 0;
  for (const double r : stationarity_residual(state, pot, n))
    worst = std::max(worst, std::abs(r));
  return worst;
}

CriticalPointInfo critical_point_tracker(const CurveState& state,
                                         const SymplecticPotentialProfile& pot, int n) {
  const auto& p = state.pts;
  const std::size_t m = p.size();
  if (m < 3) throw BadInterval("curve too short to locate a vertical tangent");

  // Local x-minima, clustered; more than one cluster breaks the
  // single-critical-point hypothesis.
  double x_min = p[0].x, x_max = p[0].x;
  for (const auto& q : p) {
    x_min = std::min(x_min, q.x);
    x_max = std::max(x_max, q.x);
  }
  const double x_span = x_max - x_min;
  std::vector<std::size_t> minima;
  for (std::size_t i = 1; i + 1 < m; ++i)
    if (p[i].x < p[i - 1].x && p[i].x <= p[i + 1].x) minima.push_back(i);
  if (minima.empty()) {
    std::size_t best = 1;
    for (std::size_t i = 2; i + 1 < m; ++i)
      if (p[i].x < p[best].x) best = i;
    minima.push_back(best);
  }
  std::vector<std::size_t> clusters{minima.front()};
  for (std::size_t k = 1; k < minima.size(); ++k) {
    const std::size_t prev = clusters.back();
    const bool same = minima[k] - prev <= 10 ||
                      std::abs(p[minima[k]].x - p[prev].x) < 0.02 * (x_span + 1e-300);
    if (!same)
      clusters.push_back(minima[k]);
    else if (p[minima[k]].x < p[prev].x)
      clusters.back() = minima[k];
  }
  if (clusters.size() > 1)
    throw MultipleCriticalPoints("curve has several vertical-tangent points");

  std::size_t i = clusters.front();
  // Quadratic refinement of the x-minimum in the sample index.
  const double x0 = p[i - 1].x, x1 = p[i].x, x2 = p[i + 1].x;
  const double curv = x0 - 2 * x1 + x2;
  const double delta = curv > 0 ? std::clamp(0.5 * (x0 - x2) / curv, -1.0, 1.0) : 0.0;
  const double y0 = p[i - 1].y, y1 = p[i].y, y2 = p[i + 1].y;
  CriticalPointInfo info;
  info.x_c = x1 + 0.5 * delta * (x2 - x0) + 0.5 * delta * delta * curv;
  info.y_c = y1 + 0.5 * delta * (y2 - y0) + 0.5 * delta * delta * (y0 - 2 * y1 + y2);

  const CurveDerived d = curve_derived(state, pot, n);
  info.velocity_x = d.speed[i] * d.normal[i].x;
  return info;
}

BarrierClearance barrier_monitor(const CurveState& state, const MomentumProfile& upper,
                                 const MomentumProfile& lower) {
  BarrierClearance c;
  c.upper = std::numeric_limits<double>::infinity();
  c.lower = std::numeric_limits<double>::infinity();
  for (const auto& q : state.pts) {
    try {
      c.upper = std::min(c.upper, upper.eval(q.x) - q.y);
    } catch (const OutOfDomain&) {
    }
    try {
      c.lower = std::min(c.lower, q.y - lower.eval(q.x));
    } catch (const OutOfDomain&) {
    }
  }
  return c;
}

FlowReport run_profile_flow(ProfileState state, const SymplecticPotentialProfile& pot, int n,
                            const FlowConfig& cfg, double t_max, double tol, int record_every) {
  FlowReport report;
  int step = 0;
  auto record = [&](double sup_v) {
    FlowRecord rec;
    rec.t = state.t;
    rec.sup_velocity = sup_v;
    rec.max_residual = max_stationarity_residual(state, pot, n);
    report.history.push_back(rec);
  };
  record(max_stationarity_residual(state, pot, n));
  try {
    while (state.t < t_max) {
      const std::vector<double> before = state.f;
      profile_flow_step(state, pot, n, cfg);
      ++step;
      double sup_v = 0;
      for (std::size_t i = 0; i < before.size(); ++i)
        sup_v = std::max(sup_v, std::abs(state.f[i] - before[i]) / cfg.dt);
      if (step % record_every == 0) record(sup_v);
      if (sup_v < tol) {
        report.status = FlowStatus::Converged;
        record(sup_v);
        break;
      }
    }
  } catch (const BlowUp&) {
    report.status = FlowStatus::BlewUp;
  }
  report.t_final = state.t;
  report.profile = std::move(state);
  return report;
}

MomentumProfile section_profile(const ConstructionParams& params, double x_lo, double x_hi,
                                int samples) {
  if (!(x_lo < x_hi) || samples < 2) throw BadInterval("bad section-profile interval");
  if (x_hi > params.a + 1e-12) throw OutOfDomain("section profile beyond the boundary scale");
  const HarmonicLevelSet s = params.level_set();
  // Walk from the known boundary point (a, 0) down to x_hi, then sample.
  std::vector<double> xs;
  const int approach = 200;
  for (int i = 1; i <= approach; ++i) {
    const double x = params.a + (x_hi - params.a) * i / approach;
    if (x < params.a) xs.push_back(x);
  }
  for (int i = 1; i < samples; ++i)
    xs.push_back(x_hi + (x_lo - x_hi) * i / (samples - 1));
  MomentumProfile full = march_profile(s, params.a, 0.0, xs);
  // Keep the requested interval only.
  MomentumProfile out;
  for (const auto& pt : full.samples)
    if (pt.x <= x_hi + 1e-12) out.samples.push_back(pt);
  out.x_lo = out.samples.front().x;
  out.x_hi = out.samples.back().x;
  return out;
}

ExperimentReport unstable_limit_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  const ConstructionParams params = ConstructionParams::from_theta(cfg.n, cfg.theta_hat);
  const double a = params.a, q = params.q, ap = params.a * params.p;
  const double b = cfg.b;
  if (!(b > 0) || !(b < a)) throw BadInterval("Kahler parameter must sit inside (0, a)");
  rep.q = q;

  const int barrier_samples = 2400;
  if (b > 1) {
    // Stationary arcs pinched at (b, q): pick for each boundary point the
    // phase whose level set contains both it and the pinch.
    const std::complex<double> zb{b, q};
    auto barrier = [&](double y_a) {
      const std::complex<double> za{a, y_a};
      std::complex<double> pb{1, 0}, pa{1, 0};
      for (int i = 0; i < cfg.n; ++i) {
        pb *= zb;
        pa *= za;
      }
      double th = std::arg(pb - pa);
      if (th <= 0) th += std::numbers::pi;
      const double level = (std::polar(1.0, -th) * pb).imag();
      const HarmonicLevelSet s{cfg.n, th, level};
      return march_profile(s, a, y_a, graded_grid_desc(b, a, barrier_samples));
    };
    rep.barrier_lower = barrier(ap);
    rep.barrier_upper = barrier(0.0);
  } else {
    // Relaxing regime: the arcs are the graphical halves of the stationary
    // multi-section itself, split at the vertical tangent over x = 1.  Stop
    // the march a hair short of the tangent, where the graph ends.
    const HarmonicLevelSet s = params.level_set();
    const double x_stop = 1.0 + 1e-7 * (a - 1.0);
    rep.barrier_upper = march_profile(s, a, 0.0, graded_grid_desc(x_stop, a, barrier_samples));
    rep.barrier_lower = march_profile(s, a, ap, graded_grid_desc(x_stop, a, barrier_samples));
  }

  // Initial curve: lower arm along the lower arc, a rounded cap, an upper arm
  // back to (a, 0).  In the destabilized regime the arms hug the arcs just
  // inside; relaxing runs start on the multi-section with a mild bump.
  const double x_pinch = b > 1 ? b : 1.0;
  const double x_j = x_pinch + 0.1 * (a - x_pinch);
  std::vector<PlanePoint> init;
  const int arm_n = 400;
  auto gap_at = [&](double x) { return rep.barrier_upper.eval(x) - rep.barrier_lower.eval(x); };
  auto blend = [&](double x) {
    const double w = std::clamp((a - x) / (a - x_j), 0.0, 1.0);
    return 0.02 * gap_at(x) * w;
  };
  for (int i = 0; i <= arm_n; ++i) {  // lower arm, x descending a -> x_j
    const double x = a + (x_j - a) * i / arm_n;
    init.push_back({x, rep.barrier_lower.eval(x) + blend(x)});
  }
  const double y1 = init.back().y;
  const double y2 = rep.barrier_upper.eval(x_j) - blend(x_j);
  const double y_mid = 0.5 * (y1 + y2);
  const double b_e = 0.5 * (y2 - y1);
  // Cap width limited three ways: stay right of the pinch, keep the vertex
  // curvature below the rotational term (so the cap starts moving left), and
  // keep the cap clear of the arcs sloping toward it.
  const double xi_mid = (cfg.n - 1) * x_j / (x_j * x_j + y_mid * y_mid);
  const double s_max = std::max({1.0, std::abs(rep.barrier_lower.slope(x_j)),
                                 std::abs(rep.barrier_upper.slope(x_j))});
  double a_e = std::min({0.5 * (x_j - x_pinch), 0.4 * b_e * b_e * xi_mid,
                         std::sqrt(blend(x_j) * b_e) / s_max});
  a_e = std::max(a_e, 1e-3 * (x_j - x_pinch));
  const int cap_n = 200;
  for (int i = 1; i < cap_n; ++i) {  // rounded cap through the vertex
    const double phi = std::numbers::pi * i / cap_n;
    init.push_back({x_j - a_e * std::sin(phi), y_mid - b_e * std::cos(phi)});
  }
  for (int i = 0; i <= arm_n; ++i) {  // upper arm, x ascending x_j -> a
    const double x = x_j + (a - x_j) * i / arm_n;
    init.push_back({x, rep.barrier_upper.eval(x) - blend(x)});
  }

  CurveState state;
  state.pts = resample_arclength(init, static_cast<std::size_t>(cfg.curve_points));
  const PlanePoint end_lo = state.pts.front(), end_hi = state.pts.back();

  FlowConfig fc = cfg.flow;
  double arclen = 0;
  for (std::size_t i = 1; i < state.pts.size(); ++i)
    arclen += dist(state.pts[i - 1], state.pts[i]);
  const double h = arclen / (cfg.curve_points - 1);
  const SymplecticPotentialProfile pot = default_potential(a, b);
  double max_phi = 0;
  for (int i = 0; i <= 100; ++i)
    max_phi = std::max(max_phi, pot.u2(b + (a - b) * i / 100.0));
  if (fc.dt <= 0) fc.dt = 0.2 * h * h / max_phi;

  rep.barrier_tol = 10 * h * h;
  rep.vertex_moved_left = true;
  rep.barriers_respected = true;

  FlowReport& flow = rep.flow;
  double prev_xc = std::numeric_limits<double>::infinity();
  auto record = [&](double sup_v) {
    FlowRecord rec;
    rec.t = state.t;
    rec.sup_velocity = sup_v;
    try {
      const CriticalPointInfo cp = critical_point_tracker(state, pot, cfg.n);
      rec.x_c = cp.x_c;
      rec.y_c = cp.y_c;
      rec.velocity_x = cp.velocity_x;
    } catch (const MultipleCriticalPoints&) {
      // Transient tracker ambiguity: carry the last resolved vertex forward.
      if (!flow.history.empty()) {
        rec.x_c = flow.history.back().x_c;
        rec.y_c = flow.history.back().y_c;
        rec.velocity_x = flow.history.back().velocity_x;
      }
    }
    const BarrierClearance bc = barrier_monitor(state, rep.barrier_upper, rep.barrier_lower);
    rec.barrier_upper = bc.upper;
    rec.barrier_lower = bc.lower;
    rec.max_residual = rec.sup_velocity;
    if (rec.x_c > prev_xc + rep.barrier_tol) rep.vertex_moved_left = false;
    prev_xc = std::min(prev_xc, rec.x_c);
    if (bc.upper < -rep.barrier_tol || bc.lower < -rep.barrier_tol)
      rep.barriers_respected = false;
    flow.history.push_back(rec);
    if (cfg.on_record) cfg.on_record(state);
  };

  flow.status = FlowStatus::TMaxReached;
  int step = 0;
  double sup_v_seed = 0;
  {
    const CurveDerived d0 = curve_derived(state, pot, cfg.n);
    for (const double v : d0.speed) sup_v_seed = std::max(sup_v_seed, std::abs(v));
  }
  record(sup_v_seed);
  try {
    while (state.t < cfg.t_max) {
      const std::vector<PlanePoint> before = state.pts;
      curve_flow_step(state, pot, cfg.n, fc);
      ++step;
      if (fc.self_intersection_every > 0 && step % fc.self_intersection_every == 0)
        check_self_intersection(state.pts);
      double sup_v = 0;
      for (std::size_t i = 0; i < before.size(); ++i)
        sup_v = std::max(sup_v, dist(before[i], state.pts[i]) / fc.dt);
      if (step % cfg.record_every == 0) record(sup_v);
      if (sup_v < cfg.speed_tol) {
        flow.status = FlowStatus::Converged;
        record(sup_v);
        break;
      }
    }
  } catch (const BlowUp&) {
    flow.status = FlowStatus::BlewUp;
  }
  flow.t_final = state.t;

  // Endpoints are pinned by construction; re-assert exactly.
  state.pts.front() = end_lo;
  state.pts.back() = end_hi;

  // Final diagnostics: vertex location and arm distances to the arcs.
  std::size_t split = 1;
  for (std::size_t i = 1; i + 1 < state.pts.size(); ++i)
    if (state.pts[i].x < state.pts[split].x) split = i;
  try {
    const CriticalPointInfo cp = critical_point_tracker(state, pot, cfg.n);
    rep.x_inf = cp.x_c;
    rep.y_inf = cp.y_c;
  } catch (const MultipleCriticalPoints&) {
    rep.x_inf = state.pts[split].x;
    rep.y_inf = state.pts[split].y;
  }
  if (!flow.history.empty() && !(rep.x_inf < flow.history.front().x_c))
    rep.vertex_moved_left = false;
  const double x_skip = rep.x_inf + 0.02 * (a - x_pinch);
  auto arm_dist = [&](std::size_t i0, std::size_t i1, const MomentumProfile& prof) {
    double worst = 0;
    for (std::size_t i = i0; i < i1; ++i) {
      const auto& pt = state.pts[i];
      if (pt.x < x_skip) continue;
      try {
        worst = std::max(worst, std::abs(pt.y - prof.eval(pt.x)));
      } catch (const OutOfDomain&) {
      }
    }
    return worst;
  };
  rep.final_dist_lower = arm_dist(0, split, rep.barrier_lower);
  rep.final_dist_upper = arm_dist(split + 1, state.pts.size(), rep.barrier_upper);

  flow.curve = std::move(state);
  return rep;
}

}  // namespace calabi
