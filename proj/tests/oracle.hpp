// Brute-force orbital integrals for 2x2 rational gamma over Q_p.
//
// Works in exact rationals and does not touch the p-adic library, so it can
// serve as an independent check.  Lattice classes within distance R of Z^2 are
// listed in Hermite normal form, the admissible ones are kept, and each is
// weighted by 1 / |(orbit of a lattice generator of T / T_0) ∩ ball|.  The sum
// is the number of T/T_0-orbits that meet the ball, which equals the orbital
// integral once R is large enough.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracle {

using Q = boost::multiprecision::cpp_rational;
using Z = boost::multiprecision::cpp_int;
using M2 = std::array<std::array<Q, 2>, 2>;

inline int vp(Z x, long long p) {
  int v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

inline int vp(const Q& x, long long p) {
  if (x == 0) throw std::invalid_argument("valuation of zero");
  return vp(boost::multiprecision::numerator(x), p) - vp(boost::multiprecision::denominator(x), p);
}

inline Q ppow(long long p, int k) {
  Q r = 1;
  for (int i = 0; i < (k < 0 ? -k : k); ++i) r *= p;
  return k < 0 ? Q(1) / r : r;
}

inline Z inverse_mod(Z a, const Z& m) {
  Z r0 = m, r1 = ((a % m) + m) % m, s0 = 0, s1 = 1;
  while (r1 != 0) {
    const Z q = r0 / r1;
    Z t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  if (r0 != 1) throw std::invalid_argument("not invertible");
  return ((s0 % m) + m) % m;
}

// Representative of c modulo p^b Z_p of the form p^v * r, 0 <= r < p^{b-v}.
inline Q reduce_mod(const Q& c, long long p, int b) {
  if (c == 0) return 0;
  const int v = vp(c, p);
  if (v >= b) return 0;
  const Q w = c / ppow(p, v);
  const Z modulus = boost::multiprecision::numerator(ppow(p, b - v));
  const Z num = boost::multiprecision::numerator(w);
  const Z den = boost::multiprecision::denominator(w);
  Z r = (num % modulus) * inverse_mod(den, modulus) % modulus;
  if (r < 0) r += modulus;
  return Q(r) * ppow(p, v);
}

// Class of the lattice spanned by the columns (p^a, c) and (0, p^b), scaled so
// that it lies in Z^2 but not in pZ^2.
struct Key {
  int a = 0;
  int b = 0;
  Q c = 0;
  bool operator<(const Key& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    return c < o.c;
  }
};

inline Key canonical(std::array<Q, 2> v1, std::array<Q, 2> v2, long long p) {
  if (v1[0] == 0 || (v2[0] != 0 && vp(v2[0], p) < vp(v1[0], p))) std::swap(v1, v2);
  if (v1[0] == 0) throw std::invalid_argument("degenerate lattice");
  const Q r = v2[0] / v1[0];
  const Q y = v2[1] - r * v1[1];
  if (y == 0) throw std::invalid_argument("degenerate lattice");
  Key k;
  k.a = vp(v1[0], p);
  k.b = vp(y, p);
  k.c = reduce_mod(v1[1] * ppow(p, k.a) / v1[0], p, k.b);
  int s = std::min(k.a, k.b);
  if (k.c != 0) s = std::min(s, vp(k.c, p));
  k.a -= s;
  k.b -= s;
  k.c *= ppow(p, -s);
  return k;
}

inline M2 basis(const Key& k, long long p) { return {{{ppow(p, k.a), Q(0)}, {k.c, ppow(p, k.b)}}}; }

inline M2 mul(const M2& A, const M2& B) {
  M2 C{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) C[i][j] = A[i][0] * B[0][j] + A[i][1] * B[1][j];
  return C;
}

inline M2 inverse(const M2& A) {
  const Q det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  if (det == 0) throw std::invalid_argument("singular");
  return {{{A[1][1] / det, -A[0][1] / det}, {-A[1][0] / det, A[0][0] / det}}};
}

inline Key act(const M2& g, const Key& k, long long p) {
  const M2 B = mul(g, basis(k, p));
  return canonical({B[0][0], B[1][0]}, {B[0][1], B[1][1]}, p);
}

inline std::vector<Key> ball(long long p, int R) {
  std::vector<Key> out;
  for (int a = 0; a <= R; ++a)
    for (int b = 0; a + b <= R; ++b) {
      long long pb = 1;
      for (int i = 0; i < b; ++i) pb *= p;
      for (long long c = 0; c < pb; ++c) {
        if (a > 0 && b > 0 && c % p == 0) continue;
        out.push_back(canonical({ppow(p, a), Q(c)}, {Q(0), ppow(p, b)}, p));
      }
    }
  return out;
}

inline Z gl2_order_mod(long long p, int k) {
  Z q = p;
  Z g = (q * q - 1) * (q * q - q);
  for (int i = 1; i < k; ++i) g *= q * q * q * q;
  return g;
}

struct Result {
  Q value = 0;
  long long admissible = 0;
};

// Orbital integral of vol(K(k))^{-1} 1_{K(k)} at gamma for the level-k
// principal congruence subgroup K(k) of GL_2(Z_p), k >= 1.  `gen` generates
// T / T_0 modulo scalars (diag(p, 1) in an eigenbasis for split tori, a
// uniformizer of F[gamma] for ramified ones, nothing for unramified ones);
// `span` bounds the powers of gen that are tried.
inline Result orbital(const M2& gamma, long long p, int k, int R, const std::optional<M2>& gen, int span) {
  M2 Y = gamma;
  Y[0][0] -= 1;
  Y[1][1] -= 1;
  for (auto& row : Y)
    for (auto& x : row) x /= ppow(p, k);
  std::map<Key, bool> adm;
  for (const Key& key : ball(p, R)) {
    const M2 B = basis(key, p);
    const M2 C = mul(mul(inverse(B), Y), B);
    bool ok = true;
    for (const auto& row : C)
      for (const auto& x : row)
        if (x != 0 && vp(x, p) < 0) ok = false;
    if (ok) adm[key] = true;
  }
  std::vector<M2> powers;
  if (gen) {
    M2 g = *gen;
    M2 gi = inverse(*gen);
    M2 cur = g;
    M2 curi = gi;
    for (int j = 1; j <= span; ++j) {
      powers.push_back(cur);
      powers.push_back(curi);
      cur = mul(cur, g);
      curi = mul(curi, gi);
    }
  }
  Result res;
  for (const auto& [key, _] : adm) {
    std::map<Key, bool> orbit{{key, true}};
    for (const M2& h : powers) {
      const Key img = act(h, key, p);
      if (adm.count(img)) orbit[img] = true;
    }
    res.value += Q(1) / Q(static_cast<long long>(orbit.size()));
    ++res.admissible;
  }
  res.value *= Q(gl2_order_mod(p, k));
  return res;
}

// Generator of T / T_0 for gamma with distinct eigenvalues r1, r2 in Q:
// p on the r1-eigenline and 1 on the r2-eigenline.
inline M2 split_generator(const M2& gamma, const Q& r1, const Q& r2, long long p) {
  M2 E1 = gamma;
  E1[0][0] -= r2;
  E1[1][1] -= r2;
  for (auto& row : E1)
    for (auto& x : row) x /= (r1 - r2);
  M2 g = E1;
  for (auto& row : g)
    for (auto& x : row) x *= (p - 1);
  g[0][0] += 1;
  g[1][1] += 1;
  return g;
}

// gamma - tr(gamma)/2: squares to a scalar, and is a uniformizer times a unit
// of F[gamma] when that field is ramified.
inline M2 traceless_part(const M2& gamma) {
  const Q h = (gamma[0][0] + gamma[1][1]) / 2;
  M2 g = gamma;
  g[0][0] -= h;
  g[1][1] -= h;
  return g;
}

}  // namespace oracle
