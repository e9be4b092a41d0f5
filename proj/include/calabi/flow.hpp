#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "calabi/construction.hpp"
#include "calabi/geometry.hpp"
#include "calabi/levelset.hpp"

namespace calabi {

// Restriction of the symplectic potential to a profile interval [b, a]:
// only u'' enters the flow.
struct SymplecticPotentialProfile {
  double b = 0;
  double a = 0;
  std::function<double(double)> u2;  // u''(x)

  double operator()(double x) const { return u2(x); }
};

// u''(x) = 2 (x - b)(a - x)/(a - b): vanishes linearly at both ends,
// positive inside.
SymplecticPotentialProfile default_potential(double a, double b);

enum class DenominatorConvention { XSquaredPlusF2, XPlusF2 };
enum class TimeScheme { SemiImplicit, ExplicitEuler };

struct FlowConfig {
  double dt = 1e-4;
  int grid = 400;
  DenominatorConvention denominator = DenominatorConvention::XSquaredPlusF2;
  TimeScheme scheme = TimeScheme::SemiImplicit;
  double blowup_threshold = 1e8;   // sup |f| or curve coordinate bound
  double min_denominator = 1e-14;  // SingularPoint guard for x^2 + f^2
  int self_intersection_every = 25;
};

// Graph flow  f_t = u''(x) [ f'' / (1 + f'^2) + (n-1)(x f' - f)/(x^2 + f^2) ].
// One step on a fixed uniform grid over [pot.b, pot.a]; endpoint values are
// frozen (u'' = 0 there).  Semi-implicit treats the f'' term implicitly via a
// tridiagonal solve; coefficients use the current profile.
struct ProfileState {
  std::vector<double> x;
  std::vector<double> f;
  double t = 0;
};

ProfileState make_profile_state(const MomentumProfile& profile,
                                const SymplecticPotentialProfile& pot, int grid);
void profile_flow_step(ProfileState& state, const SymplecticPotentialProfile& pot, int n,
                       const FlowConfig& cfg);

// Parametric curve flow  gamma_t = u''(x) (kappa + (n-1) xi) N with
// N = (-T_y, T_x), kappa the signed curvature and
// xi = (x y' - y x')/((x^2 + y^2) |gamma'|).
struct CurveState {
  std::vector<PlanePoint> pts;  // open chain, endpoints pinned
  double t = 0;
};

void curve_flow_step(CurveState& state, const SymplecticPotentialProfile& pot, int n,
                     const FlowConfig& cfg);

// Pointwise residual  u''(x) [ f''/(1+f'^2) + (n-1)(x f' - f)/(x^2+f^2) ]
// evaluated by centered differences on the state grid (interior nodes).
std::vector<double> stationarity_residual(const ProfileState& state,
                                          const SymplecticPotentialProfile& pot, int n);
double max_stationarity_residual(const ProfileState& state,
                                 const SymplecticPotentialProfile& pot, int n);

// Leftmost-vertex tracking for a curve evolving with a vertical tangent.
struct CriticalPointInfo {
  double x_c = 0;
  double y_c = 0;
  double velocity_x = 0;  // normal velocity resolved onto the x axis
};
CriticalPointInfo critical_point_tracker(const CurveState& state,
                                         const SymplecticPotentialProfile& pot, int n);

// Signed clearances from a curve to an upper and a lower barrier graph;
// negative means crossed.
struct BarrierClearance {
  double upper = 0;
  double lower = 0;
};
BarrierClearance barrier_monitor(const CurveState& state, const MomentumProfile& upper,
                                 const MomentumProfile& lower);

enum class FlowStatus { Converged, TMaxReached, BlewUp };

struct FlowRecord {
  double t = 0;
  double sup_velocity = 0;
  double max_residual = 0;
  double x_c = 0;          // leftmost vertex (curve runs only)
  double y_c = 0;
  double velocity_x = 0;   // its horizontal velocity
  double barrier_upper = 0;
  double barrier_lower = 0;
};

struct FlowReport {
  FlowStatus status = FlowStatus::TMaxReached;
  double t_final = 0;
  std::vector<FlowRecord> history;
  ProfileState profile;           // final profile (graph runs)
  std::optional<CurveState> curve;  // final curve (multisection runs)
};

// Graph-flow driver: steps until sup |velocity| < tol or t_max, recording
// every record_every steps.  BlowUp when sup |f| exceeds the threshold.
FlowReport run_profile_flow(ProfileState state, const SymplecticPotentialProfile& pot, int n,
                            const FlowConfig& cfg, double t_max, double tol,
                            int record_every = 10);

// Destabilized multisection experiment: start from a two-armed curve pinched
// between the barrier level sets through (b, q) and evolve by the curve flow,
// tracking the leftmost vertex and barrier clearances.
struct ExperimentConfig {
  int n = 2;
  double theta_hat = 0;
  double b = 1.05;  // Kahler parameter; > 1 destabilizes, < 1 relaxes back
  FlowConfig flow;  // dt <= 0 selects the parabolic-safe step automatically
  double t_max = 2.0;
  double speed_tol = 1e-6;
  int record_every = 10;
  int curve_points = 400;
  // Invoked at every log record with the current curve (snapshot hook).
  std::function<void(const CurveState&)> on_record;
};

// In the destabilized regime the two profiles are the stationary arcs pinched
// at (b, q); in the relaxing regime they are the graphical pieces of the
// multi-section itself.
struct ExperimentReport {
  FlowReport flow;
  MomentumProfile barrier_upper;  // arc through (a, 0)
  MomentumProfile barrier_lower;  // arc through (a, a p)
  double q = 0;                   // pinch height shared by the two arcs
  bool vertex_moved_left = false;
  bool barriers_respected = false;
  double barrier_tol = 0;         // clearance tolerance used (O(h^2))
  double final_dist_upper = 0;    // sup distance of the final arms to the arcs
  double final_dist_lower = 0;
  double x_inf = 0, y_inf = 0;    // final vertex location
};

ExperimentReport unstable_limit_experiment(const ExperimentConfig& cfg);

// Stationary section profile over [x_lo, x_hi] sampled from the construction
// level set (the branch through (a, 0) for the default branch).
MomentumProfile section_profile(const ConstructionParams& params, double x_lo, double x_hi,
                                int samples);

}  // namespace calabi
