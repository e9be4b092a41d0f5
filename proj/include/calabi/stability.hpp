#pragma once

#include <complex>
#include <span>
#include <utility>

#include "calabi/construction.hpp"

namespace calabi {

// Real divisor class h H + e E on the blow-up of P^n at a point.
struct DivisorClass {
  double h = 0;
  double e = 0;
};

// Kahler class a H - b E; requires a > b > 0.
struct KahlerClassBlowup {
  double a = 0;
  double b = 0;
};

using CentralCharge = std::complex<double>;

// n-fold intersection product: H^n = 1, E^n = (-1)^{n-1}, mixed terms vanish.
// ArityMismatch unless exactly n classes are given.
double intersection_product(int n, std::span<const DivisorClass> classes);

// Z(L) = (a + i h)^n - (b - i e)^n for L = h H + e E and omega = a H - b E.
CentralCharge central_charge(int n, const KahlerClassBlowup& omega, const DivisorClass& L);

// Slope Im Z / Re Z; WallDivision when |Re Z| < tol.
double z_slope(CentralCharge Z, double tol = 1e-12);

// The section classes L_1 = -a p H + q E and L_2 = q E.
std::pair<DivisorClass, DivisorClass> section_classes(const ConstructionParams& params);

// d/db of the slopes lambda(L_1), lambda(L_2) at the wall b = 1, in closed
// form via dZ/db|_{b=1} = -n (-1)^{n-1} (-1 + i q)^{n-1}.
std::pair<double, double> slope_derivative_at_wall(const ConstructionParams& params);

enum class Locus { Stable, Unstable, Wall };

// Slope comparison of the two sections near the wall.  For p < 0 stability is
// lambda(L_1) < lambda(L_2); for p > 0 the roles swap.  OutOfRegime when
// |b - 1| >= eps.
Locus classify_locus(const ConstructionParams& params, double b, double eps = 0.05,
                     double wall_tol = 1e-10);

// -e^{i(n-2)pi/2} n! Integral(e^{-i omega} ch(L)) computed through the
// Chern-character expansion; equals central_charge identically (the n!
// normalizes ch's 1/n! against the polynomial charge).  Its argument is the
// large-scaling surrogate for the special Lagrangian phase.
CentralCharge surrogate_charge(int n, const KahlerClassBlowup& omega, const DivisorClass& L);

// Degrees L_i . omega_{a,b} on the surface (n = 2) and the induced heart
// assignment: non-positive degree enters shifted by [1].
struct HeartMembership {
  double deg1 = 0;
  double deg2 = 0;
  bool l1_shifted = false;
  bool l2_shifted = false;
};
HeartMembership heart_membership_n2(const ConstructionParams& params, double b);

// Charge correction data for the threefold: Gamma = (H^2 + E^2)/6 + C0 omega^2
// with omega = a H - E.
struct BridgelandData3 {
  double C0 = 0;
  double gamma_dot_H = 0;  // 1/6 + C0 a^2
  double gamma_dot_E = 0;  // 1/6 + C0

  static BridgelandData3 for_kahler(double a);
};

// Z^Gamma(L) = central_charge(3, {a, 1}, L) + Gamma . ch1(L), with
// Gamma . ch1(L) = (h + e)/6 + C0 (a^2 h + e).
CentralCharge bridgeland_charge_n3(const ConstructionParams& params, const DivisorClass& L,
                                   const BridgelandData3& data);

// dim H^0(P^n, O(d)) = C(n + d, n) for d >= 0, else 0; nontrivial = (d > 0).
struct HomSpace {
  long long dim = 0;
  bool nontrivial = false;
};
HomSpace hom_dimension(int n, long long d);

}  // namespace calabi
