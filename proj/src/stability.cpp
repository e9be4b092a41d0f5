#include "calabi/stability.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "calabi/errors.hpp"

namespace calabi {

namespace {

std::complex<double> cpow_int(std::complex<double> z, int k) {
  std::complex<double> r{1, 0};
  while (k > 0) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

}  // namespace

double intersection_product(int n, std::span<const DivisorClass> classes) {
  if (static_cast<int>(classes.size()) != n)
    throw ArityMismatch("intersection product needs exactly n divisor classes");
  double h_prod = 1, e_prod = 1;
  for (const auto& cl : classes) {
    h_prod *= cl.h;
    e_prod *= cl.e;
  }
  const double e_sign = (n - 1) % 2 == 0 ? 1.0 : -1.0;
  return h_prod + e_sign * e_prod;
}

CentralCharge central_charge(int n, const KahlerClassBlowup& omega, const DivisorClass& L) {
  return cpow_int({omega.a, L.h}, n) - cpow_int({omega.b, -L.e}, n);
}

double z_slope(CentralCharge Z, double tol) {
  if (std::abs(Z.real()) < tol) throw WallDivision("vertical central charge has no slope");
  return Z.imag() / Z.real();
}

std::pair<DivisorClass, DivisorClass> section_classes(const ConstructionParams& params) {
  return {DivisorClass{-params.a * params.p, params.q}, DivisorClass{0, params.q}};
}

std::pair<double, double> slope_derivative_at_wall(const ConstructionParams& params) {
  const int n = params.n;
  const auto [L1, L2] = section_classes(params);
  const KahlerClassBlowup wall{params.a, 1};
  const CentralCharge Z1 = central_charge(n, wall, L1);
  const CentralCharge Z2 = central_charge(n, wall, L2);
  // dZ/db at b = 1 is the same for both bundles: they share the E-coefficient.
  const CentralCharge dZ =
      -static_cast<double>(n) * cpow_int({1.0, -params.q}, n - 1);
  auto slope_dot = [&](CentralCharge Z) {
    const double re = Z.real();
    if (re == 0) throw WallDivision("vertical central charge at the wall");
    return (dZ.imag() * re - Z.imag() * dZ.real()) / (re * re);
  };
  return {slope_dot(Z1), slope_dot(Z2)};
}

Locus classify_locus(const ConstructionParams& params, double b, double eps, double wall_tol) {
  if (std::abs(b - 1) >= eps)
    throw OutOfRegime("Kahler parameter outside the wall neighborhood");
  const auto [L1, L2] = section_classes(params);
  const KahlerClassBlowup omega{params.a, b};
  const double l1 = z_slope(central_charge(params.n, omega, L1));
  const double l2 = z_slope(central_charge(params.n, omega, L2));
  if (std::abs(l1 - l2) <= wall_tol) return Locus::Wall;
  const bool first_smaller = l1 < l2;
  const bool stable = params.p < 0 ? first_smaller : !first_smaller;
  return stable ? Locus::Stable : Locus::Unstable;
}

CentralCharge surrogate_charge(int n, const KahlerClassBlowup& omega, const DivisorClass& L) {
  // Term-by-term integral of e^{-i omega} ch(L) over the intersection ring,
  // truncated at total degree n, then rotated by -e^{i(n-2)pi/2} and scaled
  // by n! (the polynomial charge absorbs the 1/n! of the top Chern term).
  const DivisorClass om{omega.a, -omega.b};
  std::complex<double> total{0, 0};
  double factorial_n = 1;
  for (int i = 2; i <= n; ++i) factorial_n *= i;
  for (int k = 0; k <= n; ++k) {
    std::vector<DivisorClass> factors;
    factors.reserve(n);
    for (int i = 0; i < k; ++i) factors.push_back(om);
    for (int i = 0; i < n - k; ++i) factors.push_back(L);
    const double inter = intersection_product(n, factors);
    double fact_k = 1, fact_nk = 1;
    for (int i = 2; i <= k; ++i) fact_k *= i;
    for (int i = 2; i <= n - k; ++i) fact_nk *= i;
    total += cpow_int({0, -1}, k) / (fact_k * fact_nk) * inter;
  }
  const std::complex<double> rotation = -std::polar(1.0, (n - 2) * std::numbers::pi / 2);
  return rotation * factorial_n * total;
}

HeartMembership heart_membership_n2(const ConstructionParams& params, double b) {
  const auto [L1, L2] = section_classes(params);
  const DivisorClass om{params.a, -b};
  const std::vector<DivisorClass> f1{L1, om}, f2{L2, om};
  HeartMembership out;
  out.deg1 = intersection_product(2, f1);
  out.deg2 = intersection_product(2, f2);
  out.l1_shifted = out.deg1 <= 0;
  out.l2_shifted = out.deg2 <= 0;
  return out;
}

BridgelandData3 BridgelandData3::for_kahler(double a) {
  BridgelandData3 out;
  out.C0 = 10 * std::sqrt(30.0) / 1323 - 3.0 / 98;
  out.gamma_dot_H = 1.0 / 6 + out.C0 * a * a;
  out.gamma_dot_E = 1.0 / 6 + out.C0;
  return out;
}

CentralCharge bridgeland_charge_n3(const ConstructionParams& params, const DivisorClass& L,
                                   const BridgelandData3& data) {
  if (params.n != 3) throw OutOfDomain("charge correction is a threefold computation");
  const CentralCharge Z = central_charge(3, {params.a, 1}, L);
  return Z + CentralCharge{data.gamma_dot_H * L.h + data.gamma_dot_E * L.e, 0};
}

HomSpace hom_dimension(int n, long long d) {
  if (n < 1) throw OutOfDomain("hom dimension requires n >= 1");
  if (d < 0) return {0, false};
  unsigned __int128 acc = 1;
  constexpr unsigned __int128 limit = static_cast<unsigned __int128>(
      std::numeric_limits<long long>::max());
  for (long long i = 1; i <= n; ++i) {
    acc = acc * static_cast<unsigned __int128>(d + i);
    acc /= static_cast<unsigned __int128>(i);
    if (acc > limit) throw OutOfDomain("hom dimension exceeds 64-bit range");
  }
  return {static_cast<long long>(acc), d > 0};
}

}  // namespace calabi
