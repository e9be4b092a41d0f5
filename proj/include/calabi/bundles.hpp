#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "calabi/geometry.hpp"
#include "calabi/rational.hpp"

namespace calabi {

// Split bundle O(-1)^{r+1} (+) O over P^m.
struct BundleParams {
  int r = 0;           // r + 1 copies of O(-1)
  int m = 1;           // base dimension
  std::complex<double> xi;  // twisting parameter, xi != 0 unless stated
  double b = 0;        // momentum boundary: the vertical line Re z = b
  double theta_hat = 0;
};

// P_xi(z) = sum_j C(m, j) xi^{m-j} z^{j+r+1} / (j + r + 1).
struct PolyP {
  std::vector<std::complex<double>> coeffs;  // coeffs[k] multiplies z^k

  std::complex<double> eval(std::complex<double> z) const;
  std::complex<double> deriv(std::complex<double> z) const;
};

PolyP poly_P(std::complex<double> xi, int m, int r);

// Phases theta_hat for which the level set through 0 has a vertical tangent
// there: theta_hat = m psi + (r + 1) pi/2 mod pi, psi = arg xi.
std::vector<double> vertical_branch_thetas(int m, int r, double psi);

// Intersections of the zero-capacity level set Im e^{-i theta_hat} P(z) = 0
// through z = 0 with the boundary line Re z = b: the branch tangent to the
// imaginary axis opens along x ~ c2 y^2 and meets the boundary at heights
// near q ~ +sqrt(b/c2) and q' ~ -sqrt(b/c2) (refined by Newton in y).
struct BoundaryIntersections {
  double q = 0;
  double q_prime = 0;
  std::optional<Fraction> q_rational;
  std::optional<Fraction> q_prime_rational;
  std::vector<PlanePoint> arm_plus;   // traced arc 0 -> (b, q)
  std::vector<PlanePoint> arm_minus;  // traced arc 0 -> (b, q')
};

BoundaryIntersections boundary_intersections(const BundleParams& params,
                                             double max_denominator = 1e6);

// arg P_xi(b + i y) as a continuous function of the boundary height y
// (branch fixed by continuity from the given base height).
double bundle_charge_arg(const BundleParams& params, double y, double base_y);

// d/d xi_1 of arg P_xi(z) = m Im[ Q(z) / P(z) ] with
// Q(z) = Integral_0^z (xi + s)^{m-1} s^r ds.
double charge_arg_xi1_derivative(const BundleParams& params, std::complex<double> z);

// Sign of the xi_1-derivative of arg P at the boundary point b + i y:
// +1 / -1 / 0 (|value| <= zero_tol).
int arg_monotonicity(const BundleParams& params, double y, double zero_tol = 1e-12);

// Lifted angle at the end of a traced arc:
//   m arg(xi + z) + r arg(z) + arg(dz),
// accumulated continuously along the arc; constant mod pi on a level set of
// Im e^{-i theta_hat} P.
double lifted_angle_bundle(const BundleParams& params, const std::vector<PlanePoint>& arc);

}  // namespace calabi
