#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "tamebc/errors.hpp"
#include "tamebc/localfield.hpp"

namespace tamebc {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Always "num/den", denominator positive.
inline std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

/// p^k as an exact rational (k may be negative).
inline Rational rational_pow(i64 p, int k) {
  BigInt b = boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(k < 0 ? -k : k));
  return k >= 0 ? Rational(b) : Rational(1) / Rational(b);
}

/// |x|_F for x in F^x, i.e. p^{-v_F(x)}.
inline Rational abs_F(const PadicElem& x) {
  if (x.is_exact_zero()) return Rational(0);
  const int v = x.valuation();
  if (x.is_zero()) throw PrecisionExhausted("absolute value of an element zero at precision");
  const int e = x.tower().e;
  if (v % e != 0) throw NotInDomain("abs_F of an element outside F");
  return rational_pow(x.tower().p, -(v / e));
}

/// |GL_n(F_q)|
inline BigInt gl_order(i64 q, int n) {
  BigInt qn = boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(n));
  BigInt r = 1;
  BigInt qi = 1;
  for (int i = 0; i < n; ++i) {
    r *= (qn - qi);
    qi *= q;
  }
  return r;
}

/// |GL_n(O / varpi^k)| = |GL_n(F_q)| q^{n^2 (k-1)}, and 1 for k = 0.
inline BigInt gl_order_mod(i64 q, int n, int k) {
  if (k <= 0) return 1;
  return gl_order(q, n) * boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(n * n * (k - 1)));
}

}  // namespace tamebc
