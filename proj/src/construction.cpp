#include "calabi/construction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>

namespace calabi {

namespace {

constexpr double kPi = std::numbers::pi;

std::complex<double> ipow(std::complex<double> z, int k) {
  std::complex<double> r{1, 0};
  while (k > 0) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

void check_branch_index(int n, int m) {
  if (n < 2) throw OutOfDomain("construction requires n >= 2");
  if (m < 1 - n || m > n - 2) throw OutOfDomain("branch index outside [1-n, n-2]");
}

void check_theta(double theta_hat) {
  if (!(theta_hat > 0) || !(theta_hat < kPi))
    throw OutOfDomain("phase angle must lie in (0, pi)");
  if (std::abs(theta_hat - kPi / 2) < 1e-12)
    throw DegenerateAngle("phase angle pi/2 is excluded");
}

double p_domain_bound(int n) { return std::tan(kPi / n); }

}  // namespace

CriticalData solve_critical_data(int n, double theta_hat, int m) {
  check_branch_index(n, m);
  const double psi = (theta_hat - kPi / 2 + m * kPi) / (n - 1);
  const double cp = std::cos(psi);
  if (std::abs(cp) < 1e-12) throw DegenerateAngle("critical level blows up at this branch");
  const double mag = std::pow(std::abs(cp), 1.0 - n);
  const double sign_pow = (cp < 0 && (n - 1) % 2 == 1) ? -1.0 : 1.0;
  const double sign_m = ((m + 1) % 2 == 0) ? 1.0 : -1.0;
  return {sign_m * sign_pow * mag, std::tan(psi)};
}

double solve_kahler_param(int n, double theta_hat, int m) {
  const CriticalData cd = solve_critical_data(n, theta_hat, m);
  const double s = std::sin(theta_hat);
  if (s == 0) throw NonRealRoot("sin of the phase vanishes");
  const double radicand = -cd.c / s;
  if (radicand <= 0) throw NonRealRoot("no real boundary scale for this branch");
  const double a = std::pow(radicand, 1.0 / n);
  if (a <= 1) throw NotKahler("boundary scale does not exceed the exceptional size");
  return a;
}

double theta_from_p(int n, double p) {
  if (n < 2) throw OutOfDomain("construction requires n >= 2");
  if (p == 0) throw DegenerateP("boundary slope datum must be nonzero");
  if (n > 2 && std::abs(p) >= p_domain_bound(n))
    throw OutOfDomain("boundary slope outside (-tan(pi/n), tan(pi/n))");
  const std::complex<double> w = 1.0 - ipow({1.0, p}, n);
  double th = std::arg(w);
  if (th <= 0) th += kPi;
  return th;
}

double p_from_theta(int n, double theta_hat) {
  check_theta(theta_hat);
  const bool negative_side = theta_hat < kPi / 2;
  // theta is continuous in p on each side of 0 and spans (0, pi/2) for p < 0,
  // (pi/2, pi) for p > 0; bracket a sign change of theta - theta_hat.
  double lo, hi;  // p-interval with g(lo), g(hi) of opposite signs
  auto g = [&](double p) { return theta_from_p(n, p) - theta_hat; };
  if (negative_side) {
    hi = -1e-13;
    if (n == 2) {
      lo = -1;
      int guard = 0;
      while (g(lo) > 0 && guard++ < 70) lo *= 2;
      if (g(lo) > 0) throw NoRoot("phase not achieved by any boundary slope");
    } else {
      lo = -p_domain_bound(n) * (1 - 1e-13);
      if (g(lo) > 0) throw NoRoot("phase not achieved by any boundary slope");
    }
  } else {
    lo = 1e-13;
    if (n == 2) {
      hi = 1;
      int guard = 0;
      while (g(hi) < 0 && guard++ < 70) hi *= 2;
      if (g(hi) < 0) throw NoRoot("phase not achieved by any boundary slope");
    } else {
      hi = p_domain_bound(n) * (1 - 1e-13);
      if (g(hi) < 0) throw NoRoot("phase not achieved by any boundary slope");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1 + std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

int default_branch(int n, double theta_hat) {
  if (n < 2) throw OutOfDomain("construction requires n >= 2");
  check_theta(theta_hat);
  std::vector<int> order{0};
  for (int k = 1; k <= n - 1; ++k) {
    if (-k >= 1 - n) order.push_back(-k);
    if (k <= n - 2) order.push_back(k);
  }
  for (const int m : order) {
    try {
      (void)solve_kahler_param(n, theta_hat, m);
      return m;
    } catch (const Error&) {
    }
  }
  throw NotKahler("no branch of the construction yields a boundary scale above 1");
}

ConstructionParams ConstructionParams::from_theta(int n, double theta_hat, int m) {
  check_theta(theta_hat);
  ConstructionParams out;
  out.n = n;
  out.m_branch = m;
  out.theta_hat = theta_hat;
  const CriticalData cd = solve_critical_data(n, theta_hat, m);
  out.c = cd.c;
  out.q = cd.q;
  out.a = solve_kahler_param(n, theta_hat, m);
  out.p = p_from_theta(n, theta_hat);
  return out;
}

ConstructionParams ConstructionParams::from_theta(int n, double theta_hat) {
  return from_theta(n, theta_hat, default_branch(n, theta_hat));
}

ConstructionParams ConstructionParams::from_p(int n, double p) {
  ConstructionParams out = from_theta(n, theta_from_p(n, p));
  out.p = p;
  return out;
}

bool verify_same_component(const ConstructionParams& params, double tol) {
  const HarmonicLevelSet s = params.level_set();
  const double a = params.a, ap = params.a * params.p;
  Window window;
  window.x_min = 0.25;
  window.x_max = a + 1;
  window.y_min = std::min({0.0, ap, params.q}) - 1;
  window.y_max = std::max({0.0, ap, params.q}) + 1;
  const Branch br = trace_component(s, {a, 0}, window);
  const double match_tol = std::max(tol, 1e-9 * (1 + std::abs(ap)));
  for (std::size_t i = 1; i < br.points.size(); ++i) {
    const auto& u = br.points[i - 1];
    const auto& v = br.points[i];
    if ((u.x - a) * (v.x - a) > 0) continue;
    if (u.x == v.x && u.x != a) continue;
    double y_star = (u.x == v.x) ? 0.5 * (u.y + v.y)
                                 : u.y + (a - u.x) / (v.x - u.x) * (v.y - u.y);
    try {
      y_star = solve_y_on_level(s, a, y_star);
    } catch (const NoRoot&) {
    }
    if (std::abs(y_star - ap) <= match_tol) return true;
  }
  return false;
}

std::optional<AdmissibleScaling> admissible_scaling(double a, double p, double q,
                                                    long long max_denominator) {
  if (q == 0 || !std::isfinite(a * p / q)) return std::nullopt;
  const double ratio = a * p / q;
  const auto frac = reconstruct_rational(ratio, max_denominator);
  if (!frac) return std::nullopt;
  const double sgn_q = q > 0 ? 1.0 : -1.0;
  AdmissibleScaling out;
  out.k = static_cast<double>(frac->den) / std::abs(q);
  out.kq = static_cast<long long>(sgn_q) * frac->den;
  out.kap = static_cast<long long>(sgn_q) * frac->num;
  out.denominator_bound = max_denominator;
  if (std::abs(out.k * q - static_cast<double>(out.kq)) > 1e-7) return std::nullopt;
  if (std::abs(out.k * a * p - static_cast<double>(out.kap)) > 1e-7) return std::nullopt;
  return out;
}

std::optional<AdmissibleScaling> find_admissible_k(const ConstructionParams& params,
                                                   long long max_denominator) {
  return admissible_scaling(params.a, params.p, params.q, max_denominator);
}

RationalityReport rationality_scan(int n, std::span<const double> p_grid,
                                   long long max_denominator) {
  RationalityReport report;
  std::vector<double> grid(p_grid.begin(), p_grid.end());
  std::sort(grid.begin(), grid.end());
  for (const double p : grid) {
    RationalityRow row;
    try {
      const ConstructionParams params = ConstructionParams::from_p(n, p);
      row.p = p;
      row.theta = params.theta_hat;
      row.a = params.a;
      row.q = params.q;
      row.ratio = params.a * params.p / params.q;
      const Fraction best = best_rational(row.ratio, max_denominator);
      row.rational_num = best.num;
      row.rational_den = best.den;
      const auto adm = find_admissible_k(params, max_denominator);
      row.admissible_k = adm ? adm->k : std::numeric_limits<double>::quiet_NaN();
    } catch (const Error&) {
      continue;
    }
    report.rows.push_back(row);
  }
  const std::size_t nrows = report.rows.size();
  if (nrows >= 4) {
    report.edge_divergence_left = report.rows[0].ratio > report.rows[1].ratio &&
                                  report.rows[1].ratio > report.rows[2].ratio;
    report.edge_divergence_right = report.rows[nrows - 1].ratio > report.rows[nrows - 2].ratio &&
                                   report.rows[nrows - 2].ratio > report.rows[nrows - 3].ratio;
  }
  if (nrows > 0) {
    const auto nearest =
        std::min_element(report.rows.begin(), report.rows.end(),
                         [](const RationalityRow& r1, const RationalityRow& r2) {
                           return std::abs(r1.p) < std::abs(r2.p);
                         });
    report.small_p_ratio = nearest->ratio;
  }
  return report;
}

std::vector<ConstructionParams> admissible_params_scan(int n, long long max_denominator,
                                                       int max_count) {
  std::vector<ConstructionParams> out;
  if (max_count <= 0) return out;

  // Sample the ratio map over theta in (0, pi/2); each rational value in the
  // sampled range is pulled back through a bracketed bisection.
  const int grid_n = 600;
  const double th_lo = 0.02, th_hi = kPi / 2 - 1e-3;
  std::vector<double> thetas(grid_n), ratios(grid_n);
  auto ratio_at = [n](double th) {
    const ConstructionParams prm = ConstructionParams::from_theta(n, th, 0);
    return prm.a * prm.p / prm.q;
  };
  for (int i = 0; i < grid_n; ++i) {
    thetas[i] = th_lo + (th_hi - th_lo) * i / (grid_n - 1);
    ratios[i] = ratio_at(thetas[i]);
  }
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = std::min(*std::max_element(ratios.begin(), ratios.end()), lo + 50);

  for (long long s = 1; s <= max_denominator && static_cast<int>(out.size()) < max_count; ++s) {
    const long long r_lo = static_cast<long long>(std::ceil(lo * static_cast<double>(s)));
    const long long r_hi = static_cast<long long>(std::floor(hi * static_cast<double>(s)));
    for (long long r = r_lo; r <= r_hi && static_cast<int>(out.size()) < max_count; ++r) {
      if (std::gcd(r, s) != 1) continue;
      const double target = static_cast<double>(r) / static_cast<double>(s);
      for (int i = 1; i < grid_n; ++i) {
        if ((ratios[i - 1] - target) * (ratios[i] - target) > 0) continue;
        double ta = thetas[i - 1], tb = thetas[i];
        double fa = ratios[i - 1] - target;
        for (int it = 0; it < 80 && tb - ta > 1e-14; ++it) {
          const double tm = 0.5 * (ta + tb);
          const double fm = ratio_at(tm) - target;
          if ((fm > 0) == (fa > 0)) {
            ta = tm;
            fa = fm;
          } else {
            tb = tm;
          }
        }
        ConstructionParams prm = ConstructionParams::from_theta(n, 0.5 * (ta + tb), 0);
        if (find_admissible_k(prm, max_denominator)) {
          out.push_back(prm);
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace calabi
