#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "calabi/errors.hpp"
#include "calabi/geometry.hpp"

namespace calabi {

// Level-set data of the harmonic polynomial Im(e^{-i theta_hat} z^n) on the
// momentum plane z = x + iy.  Connected components of {eval_F = 0} are the
// momentum images of the special Lagrangian (multi-)sections.
struct HarmonicLevelSet {
  int n = 2;            // >= 2
  double theta_hat = 0; // phase angle, radians
  double c = 0;         // level

  double eval(PlanePoint p) const;                  // Im(e^{-i th} z^n) - c
  std::array<double, 2> gradient(PlanePoint p) const;
};

double eval_F(const HarmonicLevelSet& s, PlanePoint p);

struct TraceOptions {
  double initial_step = 0;        // 0 -> window diagonal / 1000
  double max_step = 0;            // 0 -> window diagonal / 300
  double min_step = 1e-12;
  double corrector_tol = 1e-10;   // |F| bound kept along the branch
  double singular_grad_tol = 1e-8;// |grad F| threshold, relative to gradient scale
  double turn_limit = 0.25;       // max tangent turn per accepted step, radians
  int max_newton_iters = 30;
  int max_points = 200000;
  double tangent_param_tol = 1e-10; // bisection tolerance for vertical tangents
};

// Ordered polyline approximation of one connected component clipped to the
// trace window.  Orientation: y increasing through the first vertical tangent
// when one exists, otherwise endpoints in lexicographic order (closed branches
// are oriented counterclockwise).
struct Branch {
  std::vector<PlanePoint> points;
  bool is_closed = false;
  // Indices into points where |dF/dy| vanishes (vertical tangent), refined by
  // bisection along the level set.
  std::vector<std::size_t> vertical_tangent_points;
  // The trace stops and flags (rather than silently skipping) when the
  // gradient norm falls below tolerance; callers reseed on the far side.
  bool singular_at_front = false;
  bool singular_at_back = false;
  double step_bound = 0;  // max sample spacing used
};

/// Generic level-curve tracer: F together with its gradient.  Used for the
// harmonic polynomials here and for the bundle potentials.
struct LevelFunction {
  std::function<double(PlanePoint)> f;
  std::function<std::array<double, 2>(PlanePoint)> grad;
};

Branch trace_level(const LevelFunction& F, PlanePoint seed, const Window& window,
                   const TraceOptions& opts = {});

Branch trace_component(const HarmonicLevelSet& s, PlanePoint seed,
                       const Window& window, const TraceOptions& opts = {});

// Every component of the level set meeting the window, found by pulling a
// seed grid onto the set and tracing.  A corrected seed within polyline
// distance of an already-traced component is recognized as belonging to it
// (safe while distinct components stay further apart than max_step / 16, as
// the traced sag stays below max_step / 32).
std::vector<Branch> collect_components(const HarmonicLevelSet& s, const Window& window,
                                       int seed_grid = 24);

// Graph piece f(x) of a branch over an x-interval; samples have strictly
// increasing x.
struct MomentumProfile {
  double x_lo = 0;
  double x_hi = 0;
  std::vector<PlanePoint> samples;

  double eval(double x) const;   // linear interpolation; OutOfDomain outside
  double slope(double x) const;  // secant slope of the bracketing segment
};

// Split a branch at its vertical tangents into maximal graphical pieces.
// Pieces are reported left-to-right in x within the traversal order; every
// input point lands in exactly one piece.  critical_x lists the split
// abscissae.  DegenerateBranch if no piece has positive x-extent.
struct SplitResult {
  std::vector<MomentumProfile> profiles;
  std::vector<double> critical_x;
};
SplitResult split_graphical(const Branch& branch);

// Lifted phase angle (n-1) arctan(f/x) + arctan(f'), constant along special
// Lagrangian profiles.  At a vertical-tangent endpoint the arctan(f') term
// tends to +-pi/2; the one-sided limit is returned there.
double lifted_angle(const MomentumProfile& profile, int n, double x);

// Solve F(x, y) = 0 for y near y_guess by 1-d Newton (helper for dense
// profile sampling; NoRoot on failure).
double solve_y_on_level(const HarmonicLevelSet& s, double x, double y_guess);

// Asymptotic ray directions (theta_hat + k pi) / n, k = 0..2n-1, in (-pi, pi].
std::vector<double> ray_angles(const HarmonicLevelSet& s);

}  // namespace calabi
