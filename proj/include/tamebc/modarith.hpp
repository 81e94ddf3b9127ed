#pragma once

// Small helpers for arithmetic in Z/p^k and in F_p[x].

#include <cstdint>
#include <vector>

namespace tamebc::modarith {

using i64 = std::int64_t;
using i128 = __int128;

inline i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 mulmod(i64 a, i64 b, i64 m) {
  i128 r = static_cast<i128>(a) * static_cast<i128>(b) % m;
  if (r < 0) r += m;
  return static_cast<i64>(r);
}

inline i64 powmod(i64 base, std::uint64_t ex, i64 m) {
  i64 r = 1 % m;
  base = mod(base, m);
  while (ex != 0) {
    if (ex & 1U) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    ex >>= 1U;
  }
  return r;
}

/// p-adic valuation of a nonzero integer; returns `cap` for zero.
inline int vp(i64 a, i64 p, int cap) {
  if (a == 0) return cap;
  int v = 0;
  while (a % p == 0 && v < cap) {
    a /= p;
    ++v;
  }
  return v;
}

inline i64 ipow(i64 p, int k) {
  i64 r = 1;
  for (int i = 0; i < k; ++i) r *= p;
  return r;
}

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

inline i64 gcd(i64 a, i64 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Multiplicative order of a modulo prime p (a not divisible by p).
inline i64 order_mod(i64 a, i64 p) {
  i64 x = mod(a, p);
  i64 k = 1;
  while (x != 1) {
    x = mulmod(x, a, p);
    ++k;
  }
  return k;
}

inline i64 inv_mod_prime(i64 a, i64 p) { return powmod(a, static_cast<std::uint64_t>(p - 2), p); }

// Polynomials over F_p, coefficient vectors with index = degree, trimmed.
using Poly = std::vector<i64>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mul(const Poly& a, const Poly& b, i64 p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  trim(r);
  return r;
}

inline Poly poly_sub(Poly a, const Poly& b, i64 p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = mod(a[i] - b[i], p);
  trim(a);
  return a;
}

inline Poly poly_rem(Poly a, const Poly& b, i64 p) {
  trim(a);
  const i64 lead_inv = inv_mod_prime(b.back(), p);
  while (a.size() >= b.size()) {
    const i64 c = mulmod(a.back(), lead_inv, p);
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = mod(a[shift + i] - c * b[i], p);
    trim(a);
  }
  return a;
}

inline Poly poly_gcd(Poly a, Poly b, i64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

inline Poly poly_powmod(Poly base, i64 ex, const Poly& m, i64 p) {
  Poly r{1};
  base = poly_rem(base, m, p);
  while (ex > 0) {
    if (ex & 1) r = poly_rem(poly_mul(r, base, p), m, p);
    base = poly_rem(poly_mul(base, base, p), m, p);
    ex >>= 1;
  }
  return r;
}

/// Irreducibility of a monic polynomial over F_p (Ben-Or test).
inline bool is_irreducible(const Poly& h, i64 p) {
  const int deg = static_cast<int>(h.size()) - 1;
  if (deg <= 0) return false;
  if (deg == 1) return true;
  Poly xp{0, 1};
  for (int i = 1; i <= deg / 2; ++i) {
    xp = poly_powmod(xp, p, h, p);
    Poly g = poly_gcd(h, poly_sub(xp, Poly{0, 1}, p), p);
    if (g.size() > 1) return false;
  }
  return true;
}

/// The least monic irreducible polynomial of degree f over F_p, where
/// candidates x^f + c_{f-1}x^{f-1} + ... + c_0 are ordered by the integer
/// c_0 + c_1 p + ... + c_{f-1} p^{f-1}.
inline Poly least_irreducible(i64 p, int f) {
  const i64 count = ipow(p, f);
  for (i64 code = 0; code < count; ++code) {
    Poly h(static_cast<std::size_t>(f) + 1, 0);
    i64 c = code;
    for (int i = 0; i < f; ++i) {
      h[static_cast<std::size_t>(i)] = c % p;
      c /= p;
    }
    h[static_cast<std::size_t>(f)] = 1;
    if (is_irreducible(h, p)) return h;
  }
  return {};
}

}  // namespace tamebc::modarith
