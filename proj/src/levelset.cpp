#include "calabi/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

namespace calabi {

namespace {

std::complex<double> ipow(std::complex<double> z, int k) {
  std::complex<double> r{1, 0};
  while (k > 0) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

struct Dir {
  double x = 0, y = 0;
};

// Newton projection onto {f = 0} along the gradient direction.
bool newton_correct(const LevelFunction& F, PlanePoint& p, const TraceOptions& opts,
                    double max_jump) {
  for (int it = 0; it < opts.max_newton_iters; ++it) {
    const double v = F.f(p);
    if (!std::isfinite(v)) return false;
    if (std::abs(v) <= opts.corrector_tol) return true;
    const auto g = F.grad(p);
    const double g2 = g[0] * g[0] + g[1] * g[1];
    if (g2 == 0 || !std::isfinite(g2)) return false;
    double sx = v * g[0] / g2, sy = v * g[1] / g2;
    const double sn = std::hypot(sx, sy);
    if (sn > max_jump) {
      sx *= max_jump / sn;
      sy *= max_jump / sn;
    }
    p.x -= sx;
    p.y -= sy;
  }
  return std::abs(F.f(p)) <= opts.corrector_tol;
}

enum class EndStatus { WindowExit, Singular, Closed, Budget };

struct DirTrace {
  std::vector<PlanePoint> pts;
  EndStatus status = EndStatus::WindowExit;
};

DirTrace trace_one_direction(const LevelFunction& F, const Window& window,
                             const TraceOptions& opts, PlanePoint start, Dir T0,
                             PlanePoint close_target, bool allow_close, std::size_t budget_used) {
  DirTrace out;
  PlanePoint cur = start;
  Dir T = T0;
  double h = opts.initial_step;
  const double max_jump = window.diagonal() / 10;
  double traveled = 0;
  const auto g_start = F.grad(start);
  double max_grad = std::hypot(g_start[0], g_start[1]);
  double gn_cur = max_grad;
  // Orientation parity: whether the raw gradient-perp field (g_y, -g_x)
  // opposes the march direction.  Constant along a regular branch; it toggles
  // exactly when the gradient reverses across a zero of odd order.
  bool prev_flipped = g_start[1] * T.x - g_start[0] * T.y < 0;

  auto norm_between = [&F](PlanePoint u, PlanePoint v, double t) {
    const auto g = F.grad({u.x + t * (v.x - u.x), u.y + t * (v.y - u.y)});
    return std::hypot(g[0], g[1]);
  };

  while (out.pts.size() + budget_used < static_cast<std::size_t>(opts.max_points)) {
    PlanePoint accepted{};
    Dir T_new{};
    double gn_acc = 0;
    bool ok = false, singular_hit = false, grad_flipped = false;
    while (h >= opts.min_step) {
      PlanePoint corr{cur.x + h * T.x, cur.y + h * T.y};
      if (!newton_correct(F, corr, opts, max_jump)) {
        h *= 0.5;
        continue;
      }
      const auto g = F.grad(corr);
      const double gn = std::hypot(g[0], g[1]);
      if (gn < opts.singular_grad_tol * std::max(1.0, max_grad)) {
        accepted = corr;
        gn_acc = gn;
        singular_hit = true;
        ok = true;
        break;
      }
      max_grad = std::max(max_grad, gn);
      Dir cand{g[1] / gn, -g[0] / gn};
      bool flipped = false;
      if (cand.x * T.x + cand.y * T.y < 0) {
        cand.x = -cand.x;
        cand.y = -cand.y;
        flipped = true;
      }
      const double cosang = std::clamp(cand.x * T.x + cand.y * T.y, -1.0, 1.0);
      const double d = dist(corr, cur);
      if (d < 0.25 * h || d > 4.0 * h) {
        if (h > 2 * opts.min_step) {
          h *= 0.5;
          continue;
        }
        break;  // no usable step even at the smallest size
      }
      if (std::acos(cosang) > opts.turn_limit && h > 2 * opts.min_step) {
        h *= 0.5;
        continue;
      }
      accepted = corr;
      T_new = cand;
      gn_acc = gn;
      grad_flipped = flipped;
      ok = true;
      break;
    }
    if (!ok) {
      const auto g = F.grad(cur);
      if (std::hypot(g[0], g[1]) < 1e-6 * max_grad) {
        out.status = EndStatus::Singular;
        return out;
      }
      throw TraceFailure("level-set continuation: step size underflow");
    }
    if (!window.contains(accepted)) {
      PlanePoint inside = cur, outside = accepted;
      for (int it = 0; it < 60 && dist(inside, outside) > opts.min_step; ++it) {
        PlanePoint mid{0.5 * (inside.x + outside.x), 0.5 * (inside.y + outside.y)};
        if (!newton_correct(F, mid, opts, max_jump)) break;
        (window.contains(mid) ? inside : outside) = mid;
      }
      if (dist(inside, cur) > opts.min_step) out.pts.push_back(inside);
      out.status = EndStatus::WindowExit;
      return out;
    }
    // A zero of the gradient inside the step segment means the branch crosses
    // the critical locus; stop there and flag instead of silently running
    // onto another branch.  Three symptoms feed the line search: a toggle of
    // the orientation parity (gradient reversal across an odd-order zero --
    // robust even when the zero sits near a segment end), a gradient-norm dip
    // at the segment midpoint, and plain proximity to a low-gradient region
    // (covers even-order zeros, where the gradient dips without reversing).
    const bool parity_toggled = !singular_hit && grad_flipped != prev_flipped;
    if (!singular_hit) prev_flipped = grad_flipped;
    if (!singular_hit &&
        (parity_toggled || std::min(gn_cur, gn_acc) < 0.05 * max_grad ||
         norm_between(cur, accepted, 0.5) < 0.5 * std::min(gn_cur, gn_acc))) {
      double lo = 0, hi = 1;
      double m1 = lo + 0.381966011 * (hi - lo), m2 = hi - 0.381966011 * (hi - lo);
      double f1 = norm_between(cur, accepted, m1), f2 = norm_between(cur, accepted, m2);
      for (int it = 0; it < 80; ++it) {
        if (f1 <= f2) {
          hi = m2;
          m2 = m1;
          f2 = f1;
          m1 = lo + 0.381966011 * (hi - lo);
          f1 = norm_between(cur, accepted, m1);
        } else {
          lo = m1;
          m1 = m2;
          f1 = f2;
          m2 = hi - 0.381966011 * (hi - lo);
          f2 = norm_between(cur, accepted, m2);
        }
      }
      if (std::min(f1, f2) < opts.singular_grad_tol * std::max(1.0, max_grad)) {
        const double t = 0.5 * (lo + hi);
        PlanePoint sp{cur.x + t * (accepted.x - cur.x), cur.y + t * (accepted.y - cur.y)};
        PlanePoint sc = sp;
        if (newton_correct(F, sc, opts, dist(cur, accepted))) sp = sc;
        out.pts.push_back(sp);
        out.status = EndStatus::Singular;
        return out;
      }
    }
    const double d = dist(accepted, cur);
    out.pts.push_back(accepted);
    traveled += d;
    cur = accepted;
    gn_cur = gn_acc;
    if (singular_hit) {
      out.status = EndStatus::Singular;
      return out;
    }
    T = T_new;
    if (allow_close && traveled > 5 * h && dist(cur, close_target) < h) {
      out.status = EndStatus::Closed;
      return out;
    }
    h = std::min(h * 1.3, opts.max_step);
  }
  out.status = EndStatus::Budget;
  return out;
}

// Solve F(x, y) = 0 for x at fixed y (valid near a vertical tangent, where the
// x-partial dominates).
std::optional<PlanePoint> solve_x_at_y(const LevelFunction& F, const TraceOptions& opts, double y,
                                       double x_guess) {
  PlanePoint q{x_guess, y};
  for (int it = 0; it < opts.max_newton_iters; ++it) {
    const double v = F.f(q);
    if (std::abs(v) <= opts.corrector_tol) return q;
    const auto g = F.grad(q);
    if (g[0] == 0 || !std::isfinite(g[0])) return std::nullopt;
    q.x -= v / g[0];
    if (!std::isfinite(q.x)) return std::nullopt;
  }
  if (std::abs(F.f(q)) <= opts.corrector_tol) return q;
  return std::nullopt;
}

// Bisection along the branch (parametrized by y) for the point where the
// y-partial of F vanishes, bracketed by the two given branch points.
std::optional<PlanePoint> refine_vertical(const LevelFunction& F, const TraceOptions& opts,
                                          PlanePoint lo, PlanePoint hi) {
  double glo = F.grad(lo)[1];
  const double ghi = F.grad(hi)[1];
  if (glo == 0) return lo;
  if (ghi == 0) return hi;
  if ((glo > 0) == (ghi > 0)) return std::nullopt;
  PlanePoint a = lo, b = hi;
  for (int it = 0;
       it < 80 && std::abs(b.y - a.y) > opts.tangent_param_tol * (1 + std::abs(a.y)); ++it) {
    const auto q = solve_x_at_y(F, opts, 0.5 * (a.y + b.y), 0.5 * (a.x + b.x));
    if (!q) return std::nullopt;
    const double gm = F.grad(*q)[1];
    if (gm == 0) return *q;
    if ((gm > 0) == (glo > 0))
      a = *q;
    else
      b = *q;
  }
  return solve_x_at_y(F, opts, 0.5 * (a.y + b.y), 0.5 * (a.x + b.x));
}

void detect_vertical_tangents(const LevelFunction& F, const TraceOptions& opts, Branch& br) {
  auto& pts = br.points;
  const std::size_t n = pts.size();
  br.vertical_tangent_points.clear();
  if (n < 3) return;
  std::size_t i = 1;
  while (i + 1 < pts.size()) {
    const double s1 = pts[i].x - pts[i - 1].x;
    const double s2 = pts[i + 1].x - pts[i].x;
    if (s1 * s2 < 0) {
      const auto t = refine_vertical(F, opts, pts[i - 1], pts[i + 1]);
      if (t) {
        if (dist(*t, pts[i]) < 1e-10 * (1 + std::abs(t->x))) {
          pts[i] = *t;
          br.vertical_tangent_points.push_back(i);
        } else {
          const bool before = (t->y - pts[i - 1].y) * (pts[i].y - t->y) >= 0;
          const std::size_t at = before ? i : i + 1;
          pts.insert(pts.begin() + static_cast<std::ptrdiff_t>(at), *t);
          br.vertical_tangent_points.push_back(at);
          ++i;  // skip over the inserted point
        }
      } else {
        br.vertical_tangent_points.push_back(i);
      }
    }
    ++i;
  }
}

void orient_branch(Branch& br) {
  auto reverse_all = [&br] {
    std::reverse(br.points.begin(), br.points.end());
    const std::size_t n = br.points.size();
    for (auto& idx : br.vertical_tangent_points) idx = n - 1 - idx;
    std::reverse(br.vertical_tangent_points.begin(), br.vertical_tangent_points.end());
    std::swap(br.singular_at_front, br.singular_at_back);
  };

  if (br.is_closed) {
    double area2 = 0;
    const std::size_t n = br.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = br.points[i];
      const auto& q = br.points[(i + 1) % n];
      area2 += p.x * q.y - q.x * p.y;
    }
    if (area2 < 0) reverse_all();
    return;
  }
  if (!br.vertical_tangent_points.empty()) {
    const std::size_t i = br.vertical_tangent_points.front();
    const std::size_t before = i > 0 ? i - 1 : i;
    const std::size_t after = i + 1 < br.points.size() ? i + 1 : i;
    if (br.points[after].y < br.points[before].y) reverse_all();
    return;
  }
  const auto& f = br.points.front();
  const auto& b = br.points.back();
  if (b.x < f.x || (b.x == f.x && b.y < f.y)) reverse_all();
}

}  // namespace

double HarmonicLevelSet::eval(PlanePoint p) const {
  const std::complex<double> z(p.x, p.y);
  return (std::polar(1.0, -theta_hat) * ipow(z, n)).imag() - c;
}

std::array<double, 2> HarmonicLevelSet::gradient(PlanePoint p) const {
  const std::complex<double> z(p.x, p.y);
  const std::complex<double> w =
      std::polar(1.0, -theta_hat) * (static_cast<double>(n) * ipow(z, n - 1));
  return {w.imag(), w.real()};
}

double eval_F(const HarmonicLevelSet& s, PlanePoint p) { return s.eval(p); }

Branch trace_level(const LevelFunction& F, PlanePoint seed, const Window& window,
                   const TraceOptions& opts_in) {
  TraceOptions opts = opts_in;
  const double diag = window.diagonal();
  if (!(diag > 0) || !std::isfinite(diag)) throw OutOfDomain("trace window is empty");
  if (opts.initial_step <= 0) opts.initial_step = diag / 1000;
  if (opts.max_step <= 0) opts.max_step = diag / 300;
  opts.initial_step = std::min(opts.initial_step, opts.max_step);

  PlanePoint p0 = seed;
  if (!newton_correct(F, p0, opts, diag / 10))
    throw SeedOffLevelSet("corrector failed to converge at the seed");
  if (!window.contains(p0)) throw SeedOffLevelSet("corrected seed escapes the trace window");

  Branch br;
  const auto g0 = F.grad(p0);
  const double gn0 = std::hypot(g0[0], g0[1]);
  if (gn0 < opts.singular_grad_tol) {
    br.points = {p0};
    br.singular_at_front = br.singular_at_back = true;
    return br;
  }
  const Dir T0{g0[1] / gn0, -g0[0] / gn0};

  const DirTrace fwd = trace_one_direction(F, window, opts, p0, T0, p0, true, 1);
  if (fwd.status == EndStatus::Budget)
    throw TraceFailure("level-set continuation: point budget exceeded");
  DirTrace bwd;
  if (fwd.status == EndStatus::Closed) {
    br.is_closed = true;
  } else {
    bwd = trace_one_direction(F, window, opts, p0, Dir{-T0.x, -T0.y}, p0, false,
                              1 + fwd.pts.size());
    if (bwd.status == EndStatus::Budget)
      throw TraceFailure("level-set continuation: point budget exceeded");
  }

  br.points.reserve(bwd.pts.size() + 1 + fwd.pts.size());
  br.points.insert(br.points.end(), bwd.pts.rbegin(), bwd.pts.rend());
  br.points.push_back(p0);
  br.points.insert(br.points.end(), fwd.pts.begin(), fwd.pts.end());
  br.singular_at_front = (bwd.status == EndStatus::Singular);
  br.singular_at_back = (fwd.status == EndStatus::Singular);

  detect_vertical_tangents(F, opts, br);
  orient_branch(br);

  br.step_bound = 0;
  for (std::size_t i = 1; i < br.points.size(); ++i)
    br.step_bound = std::max(br.step_bound, dist(br.points[i - 1], br.points[i]));
  if (br.is_closed && br.points.size() > 1)
    br.step_bound = std::max(br.step_bound, dist(br.points.back(), br.points.front()));
  return br;
}

Branch trace_component(const HarmonicLevelSet& s, PlanePoint seed, const Window& window,
                       const TraceOptions& opts) {
  if (s.n < 2) throw OutOfDomain("harmonic level set requires n >= 2");
  LevelFunction F{[s](PlanePoint p) { return s.eval(p); },
                  [s](PlanePoint p) { return s.gradient(p); }};
  return trace_level(F, seed, window, opts);
}

std::vector<Branch> collect_components(const HarmonicLevelSet& s, const Window& window,
                                       int seed_grid) {
  if (s.n < 2) throw OutOfDomain("harmonic level set requires n >= 2");
  if (seed_grid < 2) throw OutOfDomain("seed grid needs at least 2 points per side");
  const TraceOptions opts;
  const double diag = window.diagonal();
  if (!(diag > 0) || !std::isfinite(diag)) throw OutOfDomain("trace window is empty");
  const double max_step = diag / 300;
  const double tol_on = max_step / 16;
  LevelFunction F{[s](PlanePoint p) { return s.eval(p); },
                  [s](PlanePoint p) { return s.gradient(p); }};

  std::vector<Branch> comps;
  auto on_existing = [&](PlanePoint p) {
    for (const Branch& br : comps) {
      const auto& pts = br.points;
      if (pts.size() == 1) {
        if (dist(p, pts[0]) < tol_on) return true;
        continue;
      }
      for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        if (point_segment_distance(p, pts[k], pts[k + 1]) < tol_on) return true;
      if (br.is_closed && point_segment_distance(p, pts.back(), pts.front()) < tol_on)
        return true;
    }
    return false;
  };

  for (int i = 0; i < seed_grid; ++i) {
    for (int j = 0; j < seed_grid; ++j) {
      PlanePoint p{window.x_min + (window.x_max - window.x_min) * (i + 0.5) / seed_grid,
                   window.y_min + (window.y_max - window.y_min) * (j + 0.5) / seed_grid};
      TraceOptions pull = opts;
      pull.max_newton_iters = 60;
      if (!newton_correct(F, p, pull, diag)) continue;
      if (!window.contains(p)) continue;
      if (on_existing(p)) continue;
      try {
        comps.push_back(trace_component(s, p, window, opts));
      } catch (const Error&) {
        // Pathological seed (e.g. exactly on a cone point); neighbors cover it.
      }
    }
  }
  return comps;
}

double MomentumProfile::eval(double x) const {
  if (samples.empty()) throw OutOfDomain("empty momentum profile");
  const double slack = 1e-9 * (1 + x_hi - x_lo);
  if (x < x_lo - slack || x > x_hi + slack) throw OutOfDomain("profile evaluated outside range");
  x = std::clamp(x, samples.front().x, samples.back().x);
  auto it = std::lower_bound(samples.begin(), samples.end(), x,
                             [](const PlanePoint& p, double v) { return p.x < v; });
  if (it == samples.begin()) return it->y;
  if (it == samples.end()) return samples.back().y;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double t = (x - a.x) / (b.x - a.x);
  return a.y + t * (b.y - a.y);
}

double MomentumProfile::slope(double x) const {
  if (samples.size() < 2) throw OutOfDomain("profile has no segment to take a slope from");
  const double slack = 1e-9 * (1 + x_hi - x_lo);
  if (x < x_lo - slack || x > x_hi + slack) throw OutOfDomain("profile evaluated outside range");
  x = std::clamp(x, samples.front().x, samples.back().x);
  auto it = std::lower_bound(samples.begin(), samples.end(), x,
                             [](const PlanePoint& p, double v) { return p.x < v; });
  if (it == samples.begin()) ++it;
  if (it == samples.end()) --it;
  const auto& b = *it;
  const auto& a = *(it - 1);
  return (b.y - a.y) / (b.x - a.x);
}

SplitResult split_graphical(const Branch& branch) {
  if (branch.points.empty()) throw DegenerateBranch("empty branch");
  std::vector<PlanePoint> pts = branch.points;
  std::vector<std::size_t> cuts(branch.vertical_tangent_points.begin(),
                                branch.vertical_tangent_points.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  if (branch.is_closed && !cuts.empty()) {
    // Start the chain at the first tangent point; the wrapped run then ends
    // exactly at a cut.
    const std::size_t k = cuts.front();
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(k), pts.end());
    for (auto& c : cuts) c = (c + pts.size() - k) % pts.size();
    std::sort(cuts.begin(), cuts.end());
    // The rotation start (old cut) is index 0; it closes the final wrapped
    // piece, so drop it from the interior cut list and append the chain end.
    cuts.erase(cuts.begin());
    pts.push_back(pts.front());
    pts.erase(pts.begin());
    for (auto& c : cuts) --c;
  }

  // Assemble index ranges [begin, end] with each cut index closing its piece.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t begin = 0;
  for (const std::size_t c : cuts) {
    if (c + 1 >= pts.size()) break;
    ranges.emplace_back(begin, c);
    begin = c + 1;
  }
  ranges.emplace_back(begin, pts.size() - 1);

  SplitResult out;
  for (const std::size_t c : cuts)
    if (c < pts.size()) out.critical_x.push_back(pts[c].x);

  bool any_extent = false;
  for (const auto& [lo, hi] : ranges) {
    // Defensive sub-split at any residual x-reversal inside the range.
    std::size_t piece_start = lo;
    auto flush = [&](std::size_t a, std::size_t b) {
      std::vector<PlanePoint> sm(pts.begin() + static_cast<std::ptrdiff_t>(a),
                                 pts.begin() + static_cast<std::ptrdiff_t>(b) + 1);
      if (sm.size() > 1 && sm.back().x < sm.front().x) std::reverse(sm.begin(), sm.end());
      MomentumProfile prof;
      prof.samples = std::move(sm);
      prof.x_lo = prof.samples.front().x;
      prof.x_hi = prof.samples.back().x;
      if (prof.x_hi > prof.x_lo) any_extent = true;
      out.profiles.push_back(std::move(prof));
    };
    double sign_prev = 0;
    for (std::size_t i = lo + 1; i <= hi; ++i) {
      const double d = pts[i].x - pts[i - 1].x;
      const double s = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
      if (s != 0 && sign_prev != 0 && s != sign_prev) {
        // The reversal sample closes the finished piece; restart after it.
        flush(piece_start, i - 1);
        out.critical_x.push_back(pts[i - 1].x);
        piece_start = i;
        sign_prev = s;
        continue;
      }
      if (s != 0) sign_prev = s;
    }
    flush(piece_start, hi);
  }
  if (!any_extent) throw DegenerateBranch("branch has no graphical piece of positive extent");
  return out;
}

double lifted_angle(const MomentumProfile& profile, int n, double x) {
  const double f = profile.eval(x);
  const double fp = profile.slope(x);
  return (n - 1) * std::atan2(f, x) + std::atan(fp);
}

double solve_y_on_level(const HarmonicLevelSet& s, double x, double y_guess) {
  double y = y_guess;
  double fy = s.eval({x, y});
  // Iterated to the numerical floor: downstream finite differencing divides
  // by h^2 and needs every digit.
  for (int it = 0; it < 100 && fy != 0; ++it) {
    const double gy = s.gradient({x, y})[1];
    if (gy == 0 || !std::isfinite(gy)) break;
    double step = fy / gy;
    double y_new = y - step;
    double f_new = s.eval({x, y_new});
    int backtrack = 0;
    while (std::abs(f_new) > std::abs(fy) && backtrack < 40) {
      step *= 0.5;
      y_new = y - step;
      f_new = s.eval({x, y_new});
      ++backtrack;
    }
    if (std::abs(f_new) >= std::abs(fy)) break;
    y = y_new;
    fy = f_new;
    if (std::abs(step) < 1e-16 * (1 + std::abs(y))) break;
  }
  if (std::abs(fy) <= 1e-9 * (1 + std::abs(s.c))) return y;
  throw NoRoot("no level-set point found at the requested x");
}

std::vector<double> ray_angles(const HarmonicLevelSet& s) {
  std::vector<double> out;
  out.reserve(2 * s.n);
  for (int k = 0; k < 2 * s.n; ++k)
    out.push_back(wrap_angle((s.theta_hat + k * std::numbers::pi) / s.n));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace calabi
