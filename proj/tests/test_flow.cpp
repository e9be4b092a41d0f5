#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "calabi/construction.hpp"
#include "calabi/errors.hpp"
#include "calabi/flow.hpp"
#include "calabi/levelset.hpp"
#include "doctest.h"

using namespace calabi;

namespace {

constexpr double pi = std::numbers::pi;

// Closed-form boundary section for n = 2, theta_hat = pi/6 (a = 2, c = -2):
// the branch of  2xy cos(th) - (x^2 - y^2) sin(th) = c  through (2, 0) is
// y(x) = -sqrt(3) x + 2 sqrt(x^2 - 1)  for x in (1, 2].
double section_exact(double x) { return -std::sqrt(3.0) * x + 2 * std::sqrt(x * x - 1); }

ProfileState exact_section_state(double lo, double hi, int grid) {
  const ConstructionParams params = ConstructionParams::from_theta(2, pi / 6);
  const HarmonicLevelSet s = params.level_set();
  ProfileState st;
  st.x.resize(grid);
  st.f.resize(grid);
  for (int i = 0; i < grid; ++i) {
    st.x[i] = lo + (hi - lo) * i / (grid - 1);
    st.f[i] = solve_y_on_level(s, st.x[i], section_exact(st.x[i]));
  }
  return st;
}

}  // namespace

TEST_CASE("quadratic potential: zeros, positivity, endpoint slopes") {
  const SymplecticPotentialProfile pot = default_potential(2.0, 1.0);
  CHECK(pot.b == doctest::Approx(1.0));
  CHECK(pot.a == doctest::Approx(2.0));
  CHECK(pot.u2(1.0) == doctest::Approx(0.0));
  CHECK(pot.u2(2.0) == doctest::Approx(0.0));
  for (int i = 1; i < 20; ++i) CHECK(pot.u2(1.0 + i / 20.0) > 0);
  CHECK(pot.u2(1.5) == doctest::Approx(0.5));

  const double h = 1e-7;
  CHECK((pot.u2(1.0 + h) - pot.u2(1.0)) / h == doctest::Approx(2.0).epsilon(1e-5));
  CHECK((pot.u2(2.0) - pot.u2(2.0 - h)) / h == doctest::Approx(-2.0).epsilon(1e-5));

  CHECK_THROWS_AS((void)default_potential(1.0, 1.0), BadInterval);
  CHECK_THROWS_AS((void)default_potential(1.0, 2.0), BadInterval);
  CHECK_THROWS_AS((void)default_potential(2.0, -1.0), BadInterval);
}

TEST_CASE("boundary section matches its closed form") {
  const ProfileState st = exact_section_state(1.3, 2.0, 200);
  for (std::size_t i = 0; i < st.x.size(); ++i)
    CHECK(st.f[i] == doctest::Approx(section_exact(st.x[i])).epsilon(1e-10));

  const ConstructionParams params = ConstructionParams::from_theta(2, pi / 6);
  const MomentumProfile prof = section_profile(params, 1.3, 2.0, 400);
  CHECK(prof.x_lo == doctest::Approx(1.3).epsilon(1e-9));
  CHECK(prof.x_hi == doctest::Approx(2.0).epsilon(1e-9));
  for (double x : {1.32, 1.5, 1.65, 1.9, 1.99})
    CHECK(prof.eval(x) == doctest::Approx(section_exact(x)).epsilon(1e-4));
}

TEST_CASE("stationary section: residual scales as h^2") {
  const SymplecticPotentialProfile pot = default_potential(2.0, 1.0);
  double res[3];
  int grid = 250;
  for (int k = 0; k < 3; ++k, grid *= 2) {
    const ProfileState st = exact_section_state(1.3, 2.0, grid + 1);
    res[k] = max_stationarity_residual(st, pot, 2);
  }
  CHECK(res[2] < 1e-5);
  CHECK(res[0] / res[1] == doctest::Approx(4.0).epsilon(0.4));
  CHECK(res[1] / res[2] == doctest::Approx(4.0).epsilon(0.4));
}

TEST_CASE("flat profile is stationary; endpoints stay frozen") {
  const SymplecticPotentialProfile pot = default_potential(2.0, 1.0);
  ProfileState st;
  const int grid = 101;
  for (int i = 0; i < grid; ++i) {
    st.x.push_back(1.0 + i / double(grid - 1));
    st.f.push_back(0.0);
  }
  CHECK(max_stationarity_residual(st, pot, 2) == doctest::Approx(0.0));
  FlowConfig cfg;
  cfg.dt = 1e-4;
  profile_flow_step(st, pot, 2, cfg);
  for (double v : st.f) CHECK(v == doctest::Approx(0.0));

  // A constant nonzero profile is not stationary, but its pinned endpoints
  // never move under either scheme.
  for (auto scheme : {TimeScheme::SemiImplicit, TimeScheme::ExplicitEuler}) {
    ProfileState c = st;
    for (double& v : c.f) v = 0.3;
    FlowConfig cc;
    cc.dt = 1e-4;
    cc.scheme = scheme;
    double moved = 0;
    for (int s = 0; s < 50; ++s) profile_flow_step(c, pot, 2, cc);
    CHECK(c.f.front() == 0.3);
    CHECK(c.f.back() == 0.3);
    for (std::size_t i = 1; i + 1 < c.f.size(); ++i)
      moved = std::max(moved, std::abs(c.f[i] - 0.3));
    CHECK(moved > 1e-6);
  }
}

TEST_CASE("denominator convention changes the stationary set") {
  const SymplecticPotentialProfile pot = default_potential(2.0, 1.0);
  const ProfileState st0 = exact_section_state(1.3, 2.0, 400);

  auto sup_move = [&](DenominatorConvention conv) {
    ProfileState st = st0;
    FlowConfig cfg;
    cfg.dt = 1e-4;
    cfg.denominator = conv;
    profile_flow_step(st, pot, 2, cfg);
    double worst = 0;
    for (std::size_t i = 0; i < st.f.size(); ++i)
      worst = std::max(worst, std::abs(st.f[i] - st0.f[i]));
    return worst;
  };
  const double move_default = sup_move(DenominatorConvention::XSquaredPlusF2);
  const double move_alt = sup_move(DenominatorConvention::XPlusF2);
  CHECK(move_default < 1e-7);
  CHECK(move_alt > 1e-6);
  CHECK(move_alt > 100 * move_default);
}

TEST_CASE("curve flow with n = 1 and unit potential is curve shortening") {
  // A circular arc of radius 1 about (5, 0) shrinks as r(t) = sqrt(1 - 2t).
  SymplecticPotentialProfile pot;
  pot.b = 0;
  pot.a = 10;
  pot.u2 = [](double) { return 1.0; };

  CurveState st;
  const int m = 400;
  for (int i = 0; i < m; ++i) {
    const double phi = -0.85 * pi + 1.7 * pi * i / (m - 1);
    st.pts.push_back({5 + std::cos(phi), std::sin(phi)});
  }
  const PlanePoint lo = st.pts.front(), hi = st.pts.back();

  FlowConfig cfg;
  cfg.dt = 5e-5;
  const int steps = 400;  // t = 0.02
  for (int s = 0; s < steps; ++s) curve_flow_step(st, pot, 1, cfg);

  CHECK(st.t == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(st.pts.front().x == doctest::Approx(lo.x).epsilon(1e-14));
  CHECK(st.pts.front().y == doctest::Approx(lo.y).epsilon(1e-14));
  CHECK(st.pts.back().x == doctest::Approx(hi.x).epsilon(1e-14));
  CHECK(st.pts.back().y == doctest::Approx(hi.y).epsilon(1e-14));

  // Radius at the point furthest from the pinned ends.
  const auto& mid = *std::max_element(st.pts.begin(), st.pts.end(),
                                      [](PlanePoint u, PlanePoint v) { return u.x < v.x; });
  const double r = std::hypot(mid.x - 5, mid.y);
  CHECK(r == doctest::Approx(std::sqrt(1 - 2 * 0.02)).epsilon(0.01));
}

TEST_CASE("perturbed section relaxes back to the stationary profile") {
  const SymplecticPotentialProfile pot = default_potential(2.0, 1.0);
  const ProfileState star = exact_section_state(1.3, 2.0, 200);
  ProfileState st = star;
  const double eps = 0.02;
  for (std::size_t i = 0; i < st.x.size(); ++i)
    st.f[i] += eps * std::sin(pi * (st.x[i] - 1.3) / 0.7);

  FlowConfig cfg;
  cfg.dt = 2e-4;
  const FlowReport rep = run_profile_flow(st, pot, 2, cfg, 0.4, 0.0, 100);
  CHECK(rep.status == FlowStatus::TMaxReached);
  REQUIRE(rep.history.size() > 2);
  CHECK(rep.history.back().max_residual < 0.5 * rep.history.front().max_residual);
  double dev = 0;
  for (std::size_t i = 0; i < star.f.size(); ++i)
    dev = std::max(dev, std::abs(rep.profile.f[i] - star.f[i]));
  CHECK(dev < eps / 3);
}

TEST_CASE("vertex tracker locates a parabola tip") {
  const SymplecticPotentialProfile pot = default_potential(3.0, 0.5);
  CurveState st;
  const int m = 201;
  for (int i = 0; i < m; ++i) {
    const double y = -0.8 + i / double(m - 1);
    st.pts.push_back({1.2 + 2 * (y + 0.3) * (y + 0.3), y});
  }
  const CriticalPointInfo info = critical_point_tracker(st, pot, 2);
  CHECK(info.x_c == doctest::Approx(1.2).epsilon(1e-7));
  CHECK(info.y_c == doctest::Approx(-0.3).epsilon(1e-7));
  // speed = u''(x)(kappa + xi) with kappa = -4 (opening right, y ascending),
  // xi = x/(x^2+y^2); the normal at the tip is (-1, 0).
  const double xi = 1.2 / (1.2 * 1.2 + 0.3 * 0.3);
  const double expected = pot.u2(1.2) * (4.0 - xi);
  CHECK(info.velocity_x == doctest::Approx(expected).epsilon(0.02));

  CurveState two;
  for (int i = 0; i < 200; ++i) {
    const double y = i / 199.0;
    two.pts.push_back({0.5 + 0.3 * std::cos(4 * pi * y) + 0.2 * y, y});
  }
  CHECK_THROWS_AS((void)critical_point_tracker(two, pot, 2), MultipleCriticalPoints);
}

TEST_CASE("barrier clearances carry signs") {
  auto line = [](double y) {
    MomentumProfile p;
    p.x_lo = 0;
    p.x_hi = 2;
    p.samples = {{0, y}, {2, y}};
    return p;
  };
  const MomentumProfile upper = line(1.0), lower = line(-1.0);

  CurveState inside;
  for (int i = 0; i <= 50; ++i) inside.pts.push_back({0.2 + 1.6 * i / 50.0, 0.0});
  const BarrierClearance c_in = barrier_monitor(inside, upper, lower);
  CHECK(c_in.upper == doctest::Approx(1.0));
  CHECK(c_in.lower == doctest::Approx(1.0));

  CurveState above;
  for (int i = 0; i <= 50; ++i) above.pts.push_back({0.2 + 1.6 * i / 50.0, 1.5});
  const BarrierClearance c_up = barrier_monitor(above, upper, lower);
  CHECK(c_up.upper == doctest::Approx(-0.5));
  CHECK(c_up.lower == doctest::Approx(2.5));
}

TEST_CASE("destabilized experiment: short smoke run") {
  ExperimentConfig cfg;
  cfg.n = 2;
  cfg.theta_hat = pi / 6;
  cfg.b = 1.05;
  cfg.flow.dt = 0;  // parabolic-safe automatic step
  cfg.t_max = 0.05;
  cfg.record_every = 10;
  cfg.curve_points = 150;
  const ExperimentReport rep = unstable_limit_experiment(cfg);

  CHECK(rep.q == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-9));
  CHECK(rep.flow.status != FlowStatus::BlewUp);
  REQUIRE(!rep.flow.history.empty());
  CHECK(rep.barriers_respected);
  CHECK(rep.vertex_moved_left);
  CHECK(rep.x_inf <= rep.flow.history.front().x_c + rep.barrier_tol);
  // Barrier arcs run from the boundary ring x = a to the moved boundary
  // x = b.  Each arc's level also passes through (b, q), so at x = b the arc
  // sits at the second root of the quadratic: y = -2b/tan(theta) - q.  The
  // two arcs bracket q without touching it -- the broken-section picture.
  const double a = 2.0, b = 1.05, q = rep.q, ap = -4 * std::sqrt(3.0);
  auto second_root = [&](double y_a) {
    const std::complex<double> zb{b, q}, za{a, y_a};
    const double th = std::arg(zb * zb - za * za);
    return -2.0 * b / std::tan(th) - q;
  };
  CHECK(rep.barrier_upper.x_lo == doctest::Approx(1.05).epsilon(1e-6));
  CHECK(rep.barrier_upper.x_hi == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rep.barrier_upper.eval(b) == doctest::Approx(second_root(0.0)).epsilon(1e-6));
  CHECK(rep.barrier_lower.eval(b) == doctest::Approx(second_root(ap)).epsilon(1e-6));
  CHECK(rep.barrier_lower.eval(b) < q);
  CHECK(q < rep.barrier_upper.eval(b));
  CHECK(rep.barrier_upper.eval(2.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rep.barrier_lower.eval(2.0) == doctest::Approx(ap).epsilon(1e-9));
}

TEST_CASE("experiment with t_max = 0 reports only the initial state") {
  int records = 0;
  ExperimentConfig cfg;
  cfg.n = 2;
  cfg.theta_hat = pi / 6;
  cfg.b = 1.05;
  cfg.flow.dt = 0;
  cfg.t_max = 0.0;
  cfg.curve_points = 120;
  cfg.on_record = [&](const CurveState&) { ++records; };
  const ExperimentReport rep = unstable_limit_experiment(cfg);
  CHECK(records == 1);
  CHECK(rep.flow.history.size() == 1);
  CHECK(rep.flow.t_final == doctest::Approx(0.0));
  REQUIRE(rep.flow.curve.has_value());
  CHECK(rep.flow.curve->pts.size() == 120);
}

TEST_CASE("relaxing experiment: residual decreases") {
  ExperimentConfig cfg;
  cfg.n = 2;
  cfg.theta_hat = pi / 6;
  cfg.b = 0.95;
  cfg.flow.dt = 0;
  cfg.t_max = 0.05;
  cfg.record_every = 10;
  cfg.curve_points = 150;
  const ExperimentReport rep = unstable_limit_experiment(cfg);
  CHECK(rep.flow.status != FlowStatus::BlewUp);
  REQUIRE(rep.flow.history.size() >= 2);
  CHECK(rep.flow.history.back().max_residual < rep.flow.history.front().max_residual);
}
