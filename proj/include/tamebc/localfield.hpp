#pragma once

// Finite-precision arithmetic in tame cyclic towers E/Q_p.
//
// E = Q_p(x, pi) where x is a root of the lifted unramified polynomial h of
// degree f and pi^e = p.  Integral elements are stored on the Z_p-basis
// x^i pi^j (0 <= i < f, 0 <= j < e) with index k = i + f*j, coefficients
// reduced modulo p^M, M = ceil(N/e).  A nonzero element is pi^v * u with u a
// unit known modulo pi^(prec - v).
//
// The generator theta acts as the Frobenius lift on x and as pi -> zeta_e*pi.

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tamebc/errors.hpp"
#include "tamebc/modarith.hpp"

namespace tamebc {

using i64 = std::int64_t;

inline constexpr int kMaxDegree = 16;
inline constexpr int kInfVal = std::numeric_limits<int>::max();

using Digits = std::array<i64, kMaxDegree>;

struct TowerSpec {
  i64 p = 0;
  int e = 1;
  int f = 1;
  int d = 1;
  int precision = 1;  // absolute precision N in pi-units
  int digits = 1;     // M = ceil(N/e)
  i64 modulus = 1;    // p^M
  std::vector<i64> unram_poly;  // monic, degree f, residues in [0, p)
  i64 zeta_e = 1;               // root of unity of order e, mod p^M
  i64 zeta_residue = 1;
  std::vector<i64> theta_matrix;  // d*d, column c = coordinates of theta(basis c)

  i64 residue_size() const { return modarith::ipow(p, f); }
  int index(int i, int j) const { return i + f * j; }
};

using Tower = std::shared_ptr<const TowerSpec>;

namespace detail {

inline int ceil_div(int a, int b) {
  // b > 0
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

/// Modulus p^ceil((R - j)/e) carried by the pi^j coefficients modulo pi^R.
inline i64 coefficient_modulus(const TowerSpec& t, int R, int j) {
  const int k = ceil_div(R - j, t.e);
  if (k <= 0) return 1;
  return modarith::ipow(t.p, std::min(k, t.digits));
}

inline Digits truncate(const TowerSpec& t, const Digits& c, int R) {
  Digits r{};
  for (int j = 0; j < t.e; ++j) {
    const i64 m = coefficient_modulus(t, R, j);
    for (int i = 0; i < t.f; ++i) {
      const int k = t.index(i, j);
      r[k] = modarith::mod(c[k], m);
    }
  }
  return r;
}

/// Valuation of the integral element c, known modulo pi^R; returns R when it
/// vanishes at that precision.
inline int valuation(const TowerSpec& t, const Digits& c, int R) {
  int best = R;
  for (int j = 0; j < t.e && j < best; ++j) {
    int vj = t.digits + 1;
    for (int i = 0; i < t.f; ++i) vj = std::min(vj, modarith::vp(c[t.index(i, j)], t.p, t.digits + 1));
    if (vj > t.digits) continue;
    best = std::min(best, t.e * vj + j);
  }
  return best;
}

inline Digits add(const TowerSpec& t, const Digits& a, const Digits& b) {
  Digits r{};
  for (int k = 0; k < t.d; ++k) r[k] = modarith::mod(a[k] + b[k], t.modulus);
  return r;
}

inline Digits sub(const TowerSpec& t, const Digits& a, const Digits& b) {
  Digits r{};
  for (int k = 0; k < t.d; ++k) r[k] = modarith::mod(a[k] - b[k], t.modulus);
  return r;
}

inline Digits scale(const TowerSpec& t, const Digits& a, i64 s) {
  Digits r{};
  for (int k = 0; k < t.d; ++k) r[k] = modarith::mulmod(a[k], modarith::mod(s, t.modulus), t.modulus);
  return r;
}

inline Digits mul(const TowerSpec& t, const Digits& a, const Digits& b) {
  const int F = t.f;
  const int E = t.e;
  const i64 m = t.modulus;
  // tmp[ix][jx], ix < 2f-1, jx < 2e-1
  std::array<i64, (2 * kMaxDegree) * (2 * kMaxDegree)> tmp{};
  const int W = 2 * E - 1;
  for (int j1 = 0; j1 < E; ++j1)
    for (int i1 = 0; i1 < F; ++i1) {
      const i64 av = a[t.index(i1, j1)];
      if (av == 0) continue;
      for (int j2 = 0; j2 < E; ++j2)
        for (int i2 = 0; i2 < F; ++i2) {
          const i64 bv = b[t.index(i2, j2)];
          if (bv == 0) continue;
          i64& slot = tmp[(i1 + i2) * W + (j1 + j2)];
          slot = modarith::mod(slot + modarith::mulmod(av, bv, m), m);
        }
    }
  // x^f = -(h_0 + ... + h_{f-1} x^{f-1})
  for (int deg = 2 * F - 2; deg >= F; --deg)
    for (int j = 0; j < W; ++j) {
      const i64 c = tmp[deg * W + j];
      if (c == 0) continue;
      tmp[deg * W + j] = 0;
      for (int k = 0; k < F; ++k) {
        i64& slot = tmp[(deg - F + k) * W + j];
        slot = modarith::mod(slot - modarith::mulmod(c, t.unram_poly[static_cast<std::size_t>(k)], m), m);
      }
    }
  // pi^e = p
  for (int j = W - 1; j >= E; --j)
    for (int i = 0; i < F; ++i) {
      const i64 c = tmp[i * W + j];
      if (c == 0) continue;
      tmp[i * W + j] = 0;
      i64& slot = tmp[i * W + (j - E)];
      slot = modarith::mod(slot + modarith::mulmod(c, t.p, m), m);
    }
  Digits r{};
  for (int j = 0; j < E; ++j)
    for (int i = 0; i < F; ++i) r[t.index(i, j)] = tmp[i * W + j];
  return r;
}

inline Digits mul_pi(const TowerSpec& t, const Digits& a, int k) {
  Digits r = a;
  if (k <= 0) return r;
  const int q = k / t.e;
  const int s = k % t.e;
  if (q > 0) r = scale(t, r, modarith::ipow(t.p, std::min(q, t.digits + 1)) % t.modulus);
  for (int step = 0; step < s; ++step) {
    Digits n{};
    for (int i = 0; i < t.f; ++i) {
      n[t.index(i, 0)] = modarith::mulmod(r[t.index(i, t.e - 1)], t.p, t.modulus);
      for (int j = 1; j < t.e; ++j) n[t.index(i, j)] = r[t.index(i, j - 1)];
    }
    r = n;
  }
  return r;
}

/// Divides by pi^k, assuming exact divisibility of the represented value.
inline Digits div_pi(const TowerSpec& t, const Digits& a, int k) {
  Digits r = a;
  if (k <= 0) return r;
  const int q = k / t.e;
  const int s = k % t.e;
  if (q > 0) {
    const i64 pq = modarith::ipow(t.p, q);
    for (int idx = 0; idx < t.d; ++idx) r[idx] /= pq;
  }
  for (int step = 0; step < s; ++step) {
    Digits n{};
    for (int i = 0; i < t.f; ++i) {
      for (int j = 0; j + 1 < t.e; ++j) n[t.index(i, j)] = r[t.index(i, j + 1)];
      n[t.index(i, t.e - 1)] = r[t.index(i, 0)] / t.p;
    }
    r = n;
  }
  return r;
}

inline Digits one(const TowerSpec& t) {
  Digits r{};
  r[0] = 1 % t.modulus;
  return r;
}

inline Digits pow(const TowerSpec& t, Digits base, std::uint64_t ex) {
  Digits r = one(t);
  while (ex != 0) {
    if (ex & 1U) r = mul(t, r, base);
    base = mul(t, base, base);
    ex >>= 1U;
  }
  return r;
}

// Residue field F_q = F_p[x]/(h mod p) helpers; elements are degree < f polys.
inline modarith::Poly residue_poly(const TowerSpec& t, const Digits& a) {
  modarith::Poly r(static_cast<std::size_t>(t.f), 0);
  for (int i = 0; i < t.f; ++i) r[static_cast<std::size_t>(i)] = modarith::mod(a[t.index(i, 0)], t.p);
  modarith::trim(r);
  return r;
}

inline modarith::Poly residue_modulus(const TowerSpec& t) {
  modarith::Poly h(t.unram_poly.begin(), t.unram_poly.end());
  for (auto& c : h) c = modarith::mod(c, t.p);
  return h;
}

/// Inverse of a unit modulo p^M (Newton iteration from the residue inverse).
inline Digits unit_inverse(const TowerSpec& t, const Digits& a) {
  const modarith::Poly h = residue_modulus(t);
  const modarith::Poly r = residue_poly(t, a);
  const modarith::Poly rinv = modarith::poly_powmod(r, t.residue_size() - 2, h, t.p);
  Digits y{};
  for (std::size_t i = 0; i < rinv.size(); ++i) y[t.index(static_cast<int>(i), 0)] = rinv[i];
  int known = 1;
  const int target = t.digits * t.e + t.e;
  while (known < target) {
    Digits ay = mul(t, a, y);
    Digits two_minus{};
    for (int k = 0; k < t.d; ++k) two_minus[k] = modarith::mod(-ay[k], t.modulus);
    two_minus[0] = modarith::mod(two_minus[0] + 2, t.modulus);
    y = mul(t, y, two_minus);
    known *= 2;
  }
  return y;
}

inline Digits apply_theta_digits(const TowerSpec& t, const Digits& a) {
  Digits r{};
  for (int col = 0; col < t.d; ++col) {
    const i64 c = a[col];
    if (c == 0) continue;
    for (int row = 0; row < t.d; ++row) {
      const i64 m = t.theta_matrix[static_cast<std::size_t>(col * t.d + row)];
      if (m == 0) continue;
      r[row] = modarith::mod(r[row] + modarith::mulmod(c, m, t.modulus), t.modulus);
    }
  }
  return r;
}

}  // namespace detail

/// An element of E at finite precision.
///
/// Exact zero has valuation and precision kInfVal.  Otherwise the value is
/// pi^val * unit + O(pi^prec); when val == prec the element is zero at its
/// precision and carries no digits.
class PadicElem {
 public:
  PadicElem() = default;

  static PadicElem zero(const TowerSpec& t) {
    PadicElem r;
    r.t_ = &t;
    r.val_ = kInfVal;
    r.prec_ = kInfVal;
    return r;
  }

  /// Zero known only modulo pi^prec.
  static PadicElem zero_at(const TowerSpec& t, int prec) {
    PadicElem r;
    r.t_ = &t;
    r.prec_ = std::min(prec, t.precision);
    r.val_ = r.prec_;
    return r;
  }

  /// pi^v0 * c + O(pi^prec), c integral.
  static PadicElem from_integral(const TowerSpec& t, int v0, const Digits& c, int prec) {
    prec = std::min(prec, t.precision);
    const int R = prec - v0;
    if (R <= 0) return zero_at(t, prec);
    const Digits ct = detail::truncate(t, c, R);
    const int w = detail::valuation(t, ct, R);
    if (w >= R) return zero_at(t, prec);
    PadicElem r;
    r.t_ = &t;
    r.val_ = v0 + w;
    r.prec_ = std::min(prec, r.val_ + t.precision);
    r.u_ = detail::truncate(t, detail::div_pi(t, ct, w), r.prec_ - r.val_);
    return r;
  }

  static PadicElem from_int(const TowerSpec& t, i64 a) {
    if (a == 0) return zero(t);
    const int v = modarith::vp(a, t.p, 64);
    const i64 unit = a / modarith::ipow(t.p, v);
    Digits c{};
    c[0] = modarith::mod(unit, t.modulus);
    return from_integral(t, v * t.e, c, t.precision);
  }

  static PadicElem from_rational(const TowerSpec& t, i64 num, i64 den) {
    return from_int(t, num) * from_int(t, den).inverse();
  }

  static PadicElem one(const TowerSpec& t) { return from_int(t, 1); }

  static PadicElem pi_power(const TowerSpec& t, int k) {
    return from_integral(t, k, detail::one(t), t.precision);
  }

  /// The unramified generator x (a root of the lifted residue polynomial).
  static PadicElem generator(const TowerSpec& t) {
    Digits c{};
    if (t.f == 1) {
      c[0] = modarith::mod(-t.unram_poly[0], t.modulus);
    } else {
      c[t.index(1, 0)] = 1;
    }
    return from_integral(t, 0, c, t.precision);
  }

  /// Lift of a residue-field element given as coefficients of 1, x, ..., x^{f-1}.
  static PadicElem residue_lift(const TowerSpec& t, const std::vector<i64>& res) {
    Digits c{};
    for (std::size_t i = 0; i < res.size() && static_cast<int>(i) < t.f; ++i)
      c[t.index(static_cast<int>(i), 0)] = modarith::mod(res[i], t.p);
    return from_integral(t, 0, c, t.precision);
  }

  const TowerSpec& tower() const { return *t_; }
  const TowerSpec* tower_ptr() const { return t_; }
  bool valid() const { return t_ != nullptr; }
  int valuation() const { return val_; }
  int precision() const { return prec_; }
  int relative_precision() const { return is_exact_zero() ? kInfVal : prec_ - val_; }
  bool is_exact_zero() const { return val_ == kInfVal; }
  /// True when the value is indistinguishable from zero at its precision.
  bool is_zero() const { return is_exact_zero() || val_ >= prec_; }
  const Digits& unit() const { return u_; }

  /// Coefficients of the integral element pi^val * unit modulo pi^prec
  /// (requires val >= 0).
  Digits integral_digits() const {
    if (is_zero()) return Digits{};
    return detail::truncate(*t_, detail::mul_pi(*t_, u_, val_), prec_);
  }

  PadicElem with_precision(int prec) const {
    if (is_exact_zero()) return *this;
    if (prec >= prec_) return *this;
    if (is_zero()) return zero_at(*t_, prec);
    return from_integral(*t_, val_, u_, prec);
  }

  /// The same value placed in another tower with identical (p, e, f).
  PadicElem rehome(const TowerSpec& other) const {
    if (is_exact_zero()) return zero(other);
    if (is_zero()) return zero_at(other, prec_);
    return from_integral(other, val_, u_, prec_);
  }

  PadicElem operator-() const {
    if (is_zero()) return *this;
    PadicElem r = *this;
    for (int k = 0; k < t_->d; ++k) r.u_[k] = modarith::mod(-r.u_[k], t_->modulus);
    r.u_ = detail::truncate(*t_, r.u_, prec_ - val_);
    return r;
  }

  friend PadicElem operator+(const PadicElem& a, const PadicElem& b) {
    if (a.is_exact_zero()) return b;
    if (b.is_exact_zero()) return a;
    const TowerSpec& t = *a.t_;
    const int prec = std::min(a.prec_, b.prec_);
    const int v = std::min(a.val_, b.val_);
    if (v >= prec) return zero_at(t, prec);
    Digits s{};
    if (!a.is_zero()) s = detail::mul_pi(t, a.u_, a.val_ - v);
    if (!b.is_zero()) s = detail::add(t, s, detail::mul_pi(t, b.u_, b.val_ - v));
    return from_integral(t, v, s, prec);
  }

  friend PadicElem operator-(const PadicElem& a, const PadicElem& b) { return a + (-b); }

  friend PadicElem operator*(const PadicElem& a, const PadicElem& b) {
    if (a.is_exact_zero()) return a;
    if (b.is_exact_zero()) return b;
    const TowerSpec& t = *a.t_;
    const long long lp = std::min(static_cast<long long>(a.val_) + b.prec_,
                                  static_cast<long long>(b.val_) + a.prec_);
    const int prec = static_cast<int>(std::min<long long>(lp, t.precision));
    if (a.is_zero() || b.is_zero()) return zero_at(t, prec);
    return from_integral(t, a.val_ + b.val_, detail::mul(t, a.u_, b.u_), prec);
  }

  PadicElem inverse() const {
    if (is_zero()) throw PrecisionExhausted("inverse of an element that is zero at precision");
    const TowerSpec& t = *t_;
    const int rel = prec_ - val_;
    return from_integral(t, -val_, detail::unit_inverse(t, u_), -val_ + rel);
  }

  friend PadicElem operator/(const PadicElem& a, const PadicElem& b) { return a * b.inverse(); }

  PadicElem pow(i64 ex) const {
    if (ex < 0) return inverse().pow(-ex);
    PadicElem r = one(*t_);
    PadicElem base = *this;
    while (ex != 0) {
      if (ex & 1) r = r * base;
      base = base * base;
      ex >>= 1;
    }
    return r;
  }

  PadicElem theta() const {
    if (is_zero()) return *this;
    const TowerSpec& t = *t_;
    Digits u = detail::apply_theta_digits(t, u_);
    const int vm = ((val_ % t.e) + t.e) % t.e;
    if (vm != 0) u = detail::scale(t, u, modarith::powmod(t.zeta_e, static_cast<std::uint64_t>(vm), t.modulus));
    PadicElem r = *this;
    r.u_ = detail::truncate(t, u, prec_ - val_);
    return r;
  }

  PadicElem theta_pow(int k) const {
    const int d = t_->d;
    k = ((k % d) + d) % d;
    PadicElem r = *this;
    for (int i = 0; i < k; ++i) r = r.theta();
    return r;
  }

  /// Bit-identical representation (valuation, precision, digits).
  friend bool operator==(const PadicElem& a, const PadicElem& b) {
    if (a.val_ != b.val_ || a.prec_ != b.prec_) return false;
    if (a.is_zero()) return true;
    for (int k = 0; k < a.t_->d; ++k)
      if (a.u_[k] != b.u_[k]) return false;
    return true;
  }

  bool equals_at_precision(const PadicElem& b) const { return (*this - b).is_zero(); }

  /// "pi^v * (c + c*x + c*pi + ...) + O(pi^prec)" with every basis coefficient.
  std::string to_string() const {
    if (is_exact_zero()) return "0";
    std::ostringstream os;
    if (is_zero()) {
      os << "O(pi^" << prec_ << ")";
      return os.str();
    }
    const TowerSpec& t = *t_;
    os << "pi^" << val_ << " * (";
    for (int j = 0; j < t.e; ++j)
      for (int i = 0; i < t.f; ++i) {
        const int k = t.index(i, j);
        if (k > 0) os << " + ";
        os << u_[k];
        if (i == 1) os << "*x";
        if (i > 1) os << "*x^" << i;
        if (j == 1) os << "*pi";
        if (j > 1) os << "*pi^" << j;
      }
    os << ") + O(pi^" << prec_ << ")";
    return os.str();
  }

  static PadicElem parse(const TowerSpec& t, std::string_view s) {
    auto fail = [&]() -> PadicElem { throw ParseError("cannot parse p-adic element: " + std::string(s)); };
    auto strip = [](std::string_view v) {
      while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
      while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
      return v;
    };
    s = strip(s);
    if (s == "0") return zero(t);
    auto parse_int = [&](std::string_view v) -> i64 {
      v = strip(v);
      if (v.empty()) fail();
      std::size_t pos = 0;
      bool neg = false;
      if (v[0] == '-') {
        neg = true;
        pos = 1;
      }
      if (pos >= v.size()) fail();
      i64 r = 0;
      for (; pos < v.size(); ++pos) {
        if (v[pos] < '0' || v[pos] > '9') fail();
        r = r * 10 + (v[pos] - '0');
      }
      return neg ? -r : r;
    };
    auto parse_big_o = [&](std::string_view v) -> int {
      v = strip(v);
      if (v.substr(0, 5) != "O(pi^" || v.back() != ')') fail();
      return static_cast<int>(parse_int(v.substr(5, v.size() - 6)));
    };
    if (s.substr(0, 2) == "O(") return zero_at(t, parse_big_o(s));
    if (s.substr(0, 3) != "pi^") fail();
    const auto star = s.find(" * (");
    const auto close = s.rfind(") + ");
    if (star == std::string_view::npos || close == std::string_view::npos || close < star) fail();
    const int v = static_cast<int>(parse_int(s.substr(3, star - 3)));
    const int prec = parse_big_o(s.substr(close + 4));
    std::string_view body = s.substr(star + 4, close - star - 4);
    Digits c{};
    std::size_t start = 0;
    while (start <= body.size()) {
      std::size_t plus = body.find(" + ", start);
      std::string_view term = body.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start);
      term = strip(term);
      int xi = 0;
      int pj = 0;
      std::size_t cut = term.find('*');
      const i64 coef = parse_int(term.substr(0, cut));
      while (cut != std::string_view::npos) {
        std::size_t next = term.find('*', cut + 1);
        std::string_view factor = term.substr(cut + 1, next == std::string_view::npos ? std::string_view::npos : next - cut - 1);
        if (factor == "x") {
          xi = 1;
        } else if (factor.substr(0, 2) == "x^") {
          xi = static_cast<int>(parse_int(factor.substr(2)));
        } else if (factor == "pi") {
          pj = 1;
        } else if (factor.substr(0, 3) == "pi^") {
          pj = static_cast<int>(parse_int(factor.substr(3)));
        } else {
          fail();
        }
        cut = next;
      }
      if (xi >= t.f || pj >= t.e) fail();
      c[t.index(xi, pj)] = modarith::mod(coef, t.modulus);
      if (plus == std::string_view::npos) break;
      start = plus + 3;
    }
    return from_integral(t, v, c, prec);
  }

 private:
  const TowerSpec* t_ = nullptr;
  int val_ = kInfVal;
  int prec_ = kInfVal;
  Digits u_{};
};

inline std::ostream& operator<<(std::ostream& os, const PadicElem& a) { return os << a.to_string(); }

namespace detail {

/// Frobenius lift of x: the root of h congruent to x^p, by Newton iteration.
inline Digits frobenius_of_x(const TowerSpec& t) {
  Digits xg{};
  if (t.f == 1) {
    xg[0] = modarith::mod(-t.unram_poly[0], t.modulus);
    return xg;
  }
  xg[t.index(1, 0)] = 1;
  Digits y = pow(t, xg, static_cast<std::uint64_t>(t.p));
  for (int iter = 0; iter < 2 * t.digits + 4; ++iter) {
    // h(y) and h'(y)
    Digits hy{};
    Digits dhy{};
    Digits ypow = one(t);
    for (int k = 0; k <= t.f; ++k) {
      hy = add(t, hy, scale(t, ypow, t.unram_poly[static_cast<std::size_t>(k)]));
      if (k + 1 <= t.f) dhy = add(t, dhy, scale(t, ypow, (k + 1) * t.unram_poly[static_cast<std::size_t>(k + 1)]));
      ypow = mul(t, ypow, y);
    }
    y = sub(t, y, mul(t, hy, unit_inverse(t, dhy)));
  }
  return y;
}

inline i64 teichmuller_int(i64 a, i64 p, int digits) {
  const i64 m = modarith::ipow(p, digits);
  i64 x = modarith::mod(a, m);
  for (int i = 0; i < digits + 1; ++i) x = modarith::powmod(x, static_cast<std::uint64_t>(p), m);
  return x;
}

inline void fill_theta_matrix(TowerSpec& t) {
  const Digits phi = frobenius_of_x(t);
  t.theta_matrix.assign(static_cast<std::size_t>(t.d * t.d), 0);
  Digits phi_pow = one(t);
  for (int i = 0; i < t.f; ++i) {
    for (int j = 0; j < t.e; ++j) {
      // theta(x^i pi^j) = phi(x)^i * zeta^j * pi^j
      Digits img = mul_pi(t, scale(t, phi_pow, modarith::powmod(t.zeta_e, static_cast<std::uint64_t>(j), t.modulus)), j);
      const int col = t.index(i, j);
      for (int row = 0; row < t.d; ++row) t.theta_matrix[static_cast<std::size_t>(col * t.d + row)] = img[row];
    }
    phi_pow = mul(t, phi_pow, phi);
  }
}

inline Tower build_tower(i64 p, int e, int f, int precision, std::optional<i64> zeta_override) {
  TowerSpec t;
  t.p = p;
  t.e = e;
  t.f = f;
  t.d = e * f;
  t.precision = precision;
  t.digits = ceil_div(precision, e) + 1;
  {
    long double bound = 1;
    for (int i = 0; i < t.digits + 1; ++i) bound *= static_cast<long double>(p);
    if (bound > static_cast<long double>(std::numeric_limits<i64>::max() / 4))
      throw UnsupportedExtension("precision too large for 64-bit residues");
  }
  t.modulus = modarith::ipow(p, t.digits);
  t.unram_poly = modarith::least_irreducible(p, f);
  i64 z = 1;
  for (i64 a = 1; a < p; ++a)
    if (modarith::order_mod(a, p) == e) {
      z = a;
      break;
    }
  t.zeta_residue = z;
  t.zeta_e = zeta_override ? modarith::mod(*zeta_override, t.modulus) : teichmuller_int(z, p, t.digits);
  fill_theta_matrix(t);
  return std::make_shared<const TowerSpec>(std::move(t));
}

}  // namespace detail

/// Builds the tower Q_p(x, pi), h(x) = 0, pi^e = p.
///
/// Throws UnsupportedExtension unless p is an odd prime with p not dividing
/// e*f, e | p-1 and gcd(e, f) = 1.
inline Tower make_tower(i64 p, int e, int f, int precision) {
  if (!modarith::is_prime(p) || p < 3) throw UnsupportedExtension("p must be an odd prime");
  if (e < 1 || f < 1 || precision < 1) throw UnsupportedExtension("e, f, precision must be positive");
  if (e * f > kMaxDegree) throw UnsupportedExtension("degree e*f exceeds kMaxDegree");
  if ((static_cast<i64>(e) * f) % p == 0) throw UnsupportedExtension("p divides d = e*f");
  if ((p - 1) % e != 0) throw UnsupportedExtension("e must divide p-1");
  if (modarith::gcd(e, f) != 1) throw UnsupportedExtension("gcd(e, f) must be 1 for a cyclic group");
  return detail::build_tower(p, e, f, precision, std::nullopt);
}

namespace testing {
/// Fault-injection hook: a tower whose zeta_e is replaced by an arbitrary
/// integer, so that theta no longer has order d.
inline Tower tower_with_corrupted_zeta(const TowerSpec& t, i64 zeta) {
  return detail::build_tower(t.p, t.e, t.f, t.precision, zeta);
}
}  // namespace testing

/// Teichmuller representative of a nonzero residue (coefficients of 1, x, ...).
inline PadicElem teichmuller(const TowerSpec& t, const std::vector<i64>& residue) {
  Digits c{};
  bool nonzero = false;
  for (std::size_t i = 0; i < residue.size() && static_cast<int>(i) < t.f; ++i) {
    c[t.index(static_cast<int>(i), 0)] = modarith::mod(residue[i], t.p);
    nonzero = nonzero || c[t.index(static_cast<int>(i), 0)] != 0;
  }
  if (!nonzero) throw ZeroResidue("Teichmuller lift of zero residue");
  const auto q = static_cast<std::uint64_t>(t.residue_size());
  for (int iter = 0; iter < t.digits + 1; ++iter) c = detail::pow(t, c, q);
  return PadicElem::from_integral(t, 0, c, t.precision);
}

inline PadicElem teichmuller(const TowerSpec& t, i64 residue) { return teichmuller(t, std::vector<i64>{residue}); }

inline PadicElem apply_theta(const PadicElem& x) { return x.theta(); }

struct NormTrace {
  PadicElem norm;
  PadicElem trace;
};

/// (N_{E/F}(x), Tr_{E/F}(x)) as the product and sum over the Galois orbit.
inline NormTrace norm_trace(const PadicElem& x) {
  const TowerSpec& t = x.tower();
  PadicElem n = PadicElem::one(t);
  PadicElem s = PadicElem::zero(t);
  PadicElem y = x;
  for (int i = 0; i < t.d; ++i) {
    n = n * y;
    s = s + y;
    y = y.theta();
  }
  return {n, s};
}

struct ValuationInverse {
  int valuation;
  PadicElem inverse;
};

inline ValuationInverse valuation_invert(const PadicElem& x) {
  if (x.is_zero()) throw PrecisionExhausted("element is zero at working precision");
  return {x.valuation(), x.inverse()};
}

/// The F-valuation of an element of F (E-valuation divided by e).
inline int valuation_F(const PadicElem& x) {
  if (x.is_zero()) throw PrecisionExhausted("F-valuation of an element that is zero at precision");
  const int e = x.tower().e;
  const int v = x.valuation();
  return v >= 0 ? v / e : -((-v + e - 1) / e);
}

/// True when theta(x) agrees with x at precision.
inline bool is_theta_fixed(const PadicElem& x) { return x.theta().equals_at_precision(x); }

/// Coordinates of x on the Q_p-basis x^i pi^j, each as an element of Q_p
/// embedded in E.
inline std::vector<PadicElem> f_coordinates(const PadicElem& x) {
  const TowerSpec& t = x.tower();
  std::vector<PadicElem> out(static_cast<std::size_t>(t.d));
  if (x.is_exact_zero()) {
    for (auto& c : out) c = PadicElem::zero(t);
    return out;
  }
  // x = p^a * (pi^r * u), 0 <= r < e
  const int v = x.is_zero() ? x.precision() : x.valuation();
  const int a = v >= 0 ? v / t.e : -((-v + t.e - 1) / t.e);
  const int r = v - a * t.e;
  const int rel_abs = x.precision() - a * t.e;  // absolute precision of pi^r*u
  Digits c = x.is_zero() ? Digits{} : detail::mul_pi(t, x.unit(), r);
  c = detail::truncate(t, c, rel_abs);
  for (int j = 0; j < t.e; ++j) {
    const int cp = detail::ceil_div(rel_abs - j, t.e);  // Q_p digits known
    for (int i = 0; i < t.f; ++i) {
      Digits one{};
      one[0] = c[t.index(i, j)];
      out[static_cast<std::size_t>(t.index(i, j))] =
          PadicElem::from_integral(t, a * t.e, one, (a + cp) * t.e);
    }
  }
  return out;
}

/// Basis element x^i pi^j of E over Q_p.
inline PadicElem basis_element(const TowerSpec& t, int i, int j) {
  Digits c{};
  c[t.index(i, j)] = 1;
  return PadicElem::from_integral(t, 0, c, t.precision);
}

}  // namespace tamebc
