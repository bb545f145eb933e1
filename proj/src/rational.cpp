#include "rvb/rational.hpp"

#include "rvb/errors.hpp"

#include <string>

namespace rvb {

std::string to_decimal(const Rational& q, int digits) {
  if (digits < 0) throw ValidationError("to_decimal: negative digit count");
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));

  const bool negative = sgn(q) < 0;
  mpz_class num = abs(q.get_num()) * scale;
  const mpz_class& den = q.get_den();
  mpz_class scaled = (2 * num + den) / (2 * den);  // half away from zero

  std::string body = scaled.get_str();
  if (digits > 0) {
    if (static_cast<int>(body.size()) <= digits) body.insert(0, digits + 1 - body.size(), '0');
    body.insert(body.size() - digits, ".");
  }
  if (negative && scaled != 0) body.insert(0, "-");
  return body;
}

std::string to_fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_fraction(const std::string& text) {
  Rational q;
  if (text.empty() || q.set_str(text, 10) != 0) throw ValidationError("not a rational number: '" + text + "'");
  if (q.get_den() == 0) throw ValidationError("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

Rational pow2(int exponent) {
  mpz_class one = 1;
  Rational r;
  if (exponent >= 0) {
    mpz_mul_2exp(r.get_num_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
    r.get_den() = 1;
  } else {
    r.get_num() = 1;
    mpz_mul_2exp(r.get_den_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(-exponent));
  }
  return r;
}

}  // namespace rvb
