#pragma once

#include <optional>
#include <span>
#include <vector>

#include "calabi/levelset.hpp"
#include "calabi/rational.hpp"

namespace calabi {

// Critical-point data of the level set with a vertical tangent over x = 1:
// psi_m = (theta_hat - pi/2 + m pi) / (n - 1),
// c_m   = (-1)^{m+1} (cos psi_m)^{1-n},
// q_m   = tan psi_m.
struct CriticalData {
  double c = 0;
  double q = 0;
};

CriticalData solve_critical_data(int n, double theta_hat, int m);

// Boundary scale a_m = (-c_m / sin theta_hat)^{1/n}; NonRealRoot when the
// radicand is non-positive, NotKahler when a <= 1.
double solve_kahler_param(int n, double theta_hat, int m);

// Phase angle of the boundary class: theta_hat = arg(1 - (1+ip)^n) taken mod
// pi into (0, pi).  Requires p in (-tan(pi/n), tan(pi/n)) \ {0}.
double theta_from_p(int n, double p);

// Inverse of theta_from_p on (0, pi) \ {pi/2} by bracketing + bisection.
double p_from_theta(int n, double theta_hat);

// Smallest branch index m in [1-n, n-2] whose boundary scale satisfies
// a_m > 1, preferring m = 0 (which works for every theta_hat in the domain).
int default_branch(int n, double theta_hat);

// Complete closed-form construction data for one multi-section.
struct ConstructionParams {
  int n = 2;
  int m_branch = 0;
  double theta_hat = 0;  // (0, pi) \ {pi/2}
  double c = 0;
  double q = 0;
  double a = 0;          // > 1
  double p = 0;          // boundary slope datum, sign opposite to cos(theta_hat)

  HarmonicLevelSet level_set() const { return {n, theta_hat, c}; }

  static ConstructionParams from_theta(int n, double theta_hat, int m);
  static ConstructionParams from_theta(int n, double theta_hat);
  static ConstructionParams from_p(int n, double p);
};

// Trace the component through (a, 0) and check that (a, a p) lies on it.
bool verify_same_component(const ConstructionParams& params,
                           double tol = 1e-6);

// Scaling k with k q and k a p integral; exists iff a p / q is rational.
struct AdmissibleScaling {
  double k = 0;
  long long kq = 0;
  long long kap = 0;
  long long denominator_bound = 0;
};

std::optional<AdmissibleScaling> admissible_scaling(double a, double p, double q,
                                                    long long max_denominator);
std::optional<AdmissibleScaling> find_admissible_k(const ConstructionParams& params,
                                                   long long max_denominator = 1000000);

struct RationalityRow {
  double p = 0, theta = 0, a = 0, q = 0, ratio = 0;
  long long rational_num = 0, rational_den = 1;  // nearest within bound
  double admissible_k = 0;                       // NaN when none
};

struct RationalityReport {
  std::vector<RationalityRow> rows;            // ordered by p
  bool edge_divergence_left = false;           // ratio increasing toward p -> -tan(pi/n)
  bool edge_divergence_right = false;          // ratio increasing toward p -> +tan(pi/n)
  double small_p_ratio = 0;                    // ratio at the grid point nearest 0
};

RationalityReport rationality_scan(int n, std::span<const double> p_grid,
                                   long long max_denominator = 1000000);

// Construct admissible parameter sets by inverting the ratio map: enumerate
// rationals r/s (s <= max_denominator) in the achievable range of a p / q and
// solve for theta_hat in (0, pi/2).  Returns up to max_count sets.
std::vector<ConstructionParams> admissible_params_scan(int n, long long max_denominator,
                                                       int max_count);

}  // namespace calabi
