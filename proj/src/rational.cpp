#include "calabi/rational.hpp"

#include <cmath>
#include <limits>

namespace calabi {

namespace {

// Walk the continued-fraction expansion of x, yielding convergents p/q.
// Returns the last convergent with q <= max_den; sets *terminated when the
// expansion's fractional part dropped below term_eps (x is rational to
// working precision).
Fraction convergent_walk(double x, long long max_den, double term_eps, bool* terminated) {
  long long p_prev = 1, q_prev = 0;  // h_{-1}/k_{-1}
  long long p_cur = 0, q_cur = 1;    // h_{-2}/k_{-2} seeds the recurrence
  double rem = x;
  if (terminated) *terminated = false;
  for (int iter = 0; iter < 64; ++iter) {
    const double fl = std::floor(rem);
    if (std::abs(fl) > 9e17) break;
    const long long a = static_cast<long long>(fl);
    // Overflow / bound guard on the recurrence.
    const double next_q = static_cast<double>(a) * static_cast<double>(q_prev) + q_cur;
    const double next_p = static_cast<double>(a) * static_cast<double>(p_prev) + p_cur;
    if (std::abs(next_p) > 9e17 || next_q > 9e17) break;
    const long long p_new = a * p_prev + p_cur;
    const long long q_new = a * q_prev + q_cur;
    if (q_new > max_den) break;
    p_cur = p_prev;
    q_cur = q_prev;
    p_prev = p_new;
    q_prev = q_new;
    const double frac = rem - fl;
    if (frac < term_eps) {
      if (terminated) *terminated = true;
      break;
    }
    rem = 1.0 / frac;
  }
  if (q_prev == 0) return {0, 1};
  return {p_prev, q_prev};
}

}  // namespace

Fraction best_rational(double x, long long max_denominator) {
  return convergent_walk(x, max_denominator, 0.0, nullptr);
}

std::optional<Fraction> reconstruct_rational(double x, long long max_denominator,
                                             double accept_tol, double term_eps) {
  if (!std::isfinite(x)) return std::nullopt;
  bool terminated = false;
  const Fraction f = convergent_walk(x, max_denominator, term_eps, &terminated);
  if (!terminated) return std::nullopt;
  if (std::abs(x - f.value()) > accept_tol) return std::nullopt;
  return f;
}

}  // namespace calabi
