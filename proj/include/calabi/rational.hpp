#pragma once

#include <cstdint>
#include <optional>

namespace calabi {

struct Fraction {
  long long num = 0;
  long long den = 1;  // always > 0

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Best rational approximation to x among continued-fraction convergents with
// denominator <= max_denominator.
Fraction best_rational(double x, long long max_denominator);

// Rational reconstruction: returns r/s with s <= max_denominator when the
// continued-fraction expansion of x terminates (fractional part < term_eps at
// some step) and |x - r/s| <= accept_tol.  Returns nullopt otherwise, in
// particular for irrationals whose convergents never stabilize before the
// denominator bound.
std::optional<Fraction> reconstruct_rational(double x, long long max_denominator,
                                             double accept_tol = 1e-9,
                                             double term_eps = 1e-9);

}  // namespace calabi
