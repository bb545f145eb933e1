#pragma once

#include <gmpxx.h>

#include <string>

namespace rvb {

using Rational = mpq_class;

/// Fixed-point decimal rendering of an exact rational, rounded half away
/// from zero at `digits` places after the point.
std::string to_decimal(const Rational& q, int digits);

/// "num/den" in lowest terms; integers print as "n/1".
std::string to_fraction_string(const Rational& q);

/// Parses "num/den" or "n".
Rational parse_fraction(const std::string& text);

Rational pow2(int exponent);

/// num/den in lowest terms. mpq_class(num, den) does not reduce, and GMP
/// arithmetic assumes canonical operands.
inline Rational fraction(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace rvb
