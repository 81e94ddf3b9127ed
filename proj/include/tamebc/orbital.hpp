#pragma once

// Orbital integrals of congruence-subgroup indicators on H = GL_n(F) and on
// the twisted space GL_n(E) ⋊ theta, normalizing factors, and the matching
// check.  Orbital integrals are implemented for n <= 2.
//
// Both integrals reduce to counting lattices.  On H the integrand at h only
// depends on the lattice L = h O_F^n: it is 1 iff (gamma - 1) L ⊆ p^k L.
// Each admissible lattice contributes |GL_n(O_F / p^k)|, and summing over a
// fundamental set for the free part of the centralizer torus (see torus.hpp)
// gives the integral.  On the twisted side Phi = delta ∘ theta acts
// semilinearly on E^n; for an O_E-lattice L the fibre contribution is the
// number of bases of L / pi^m L made of Phi-fixed vectors.

#include <chrono>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tamebc/errors.hpp"
#include "tamebc/lattice.hpp"
#include "tamebc/localfield.hpp"
#include "tamebc/matgrp.hpp"
#include "tamebc/matrix.hpp"
#include "tamebc/rational.hpp"
#include "tamebc/torus.hpp"

namespace tamebc {

/// vol(GL_n(O)) = 1 on G and H, vol(maximal compact of the centralizer) = 1.
struct HaarNormalization {
  static constexpr const char* kConvention = "vol(GL_n(O))=1; vol(T_0)=1";
};

inline Rational volume(const CongruenceLevel& level, const HaarNormalization& /*norm*/, int n, const TowerSpec& t) {
  if (level.m == 0) return Rational(1);
  const i64 q = level.side == Side::F ? t.p : t.residue_size();
  return Rational(1) / Rational(gl_order_mod(q, n, level.m));
}

/// |disc(charpoly gamma)|_F * |det gamma|_F^{-(n-1)}; 0 if the discriminant vanishes at precision.
inline Rational normalizing_factor_H(const Matrix& gamma) {
  const Polynomial cp = charpoly(gamma);
  const PadicElem disc = discriminant(cp);
  if (disc.is_zero()) return Rational(0);
  const PadicElem det = determinant(gamma);
  if (det.is_zero()) throw PrecisionExhausted("determinant vanishes at precision");
  Rational r = abs_F(disc);
  const Rational ad = abs_F(det);
  for (int i = 0; i + 1 < gamma.rows(); ++i) r /= ad;
  return r;
}

/// F-linear matrix of X -> delta theta(X) delta^{-1} - X on M_n(E) = F^{d n^2}.
inline Matrix twisted_adjoint_minus_one(const TwistedElem& delta) {
  const Matrix& D = delta.g;
  const TowerSpec& t = D.tower();
  const int n = D.rows();
  const int N = t.d * n * n;
  const Matrix Dinv = D.inverse();
  Matrix out(t, N, N);
  auto idx = [&](int a, int b, int k) { return (a * n + b) * t.d + k; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int j = 0; j < t.e; ++j)
        for (int i = 0; i < t.f; ++i) {
          const int k = t.index(i, j);
          Matrix X(t, n, n);
          X(a, b) = basis_element(t, i, j);
          const Matrix img = D * X.theta() * Dinv - X;
          for (int a2 = 0; a2 < n; ++a2)
            for (int b2 = 0; b2 < n; ++b2) {
              const auto coords = f_coordinates(img(a2, b2));
              for (int k2 = 0; k2 < t.d; ++k2) out(idx(a2, b2, k2), idx(a, b, k)) = coords[static_cast<std::size_t>(k2)];
            }
        }
  return out;
}

/// |product of the nonzero eigenvalues of Ad(delta)∘dtheta - 1|_F.
///
/// The map has an n-dimensional kernel for theta-regular delta, so the
/// charpoly coefficients c_0..c_{n-1} vanish and D = |c_n|_F.  Returns 0 when
/// c_n vanishes too.
inline Rational normalizing_factor_twisted(const TwistedElem& delta) {
  const int n = delta.g.rows();
  const Polynomial cp = charpoly(twisted_adjoint_minus_one(delta));
  int k0 = 0;
  while (k0 < static_cast<int>(cp.size()) && cp[static_cast<std::size_t>(k0)].is_zero()) ++k0;
  if (k0 < n) throw PrecisionExhausted("twisted centralizer smaller than expected at precision");
  if (k0 > n) return Rational(0);
  return abs_F(cp[static_cast<std::size_t>(n)]);
}

enum class FunctionSide { H, Twisted };

/// vol(K)^{-1} 1_K on H, or vol(K_E(m))^{-1} 1_{K_E(m) ⋊ theta}.
struct TestFunction {
  FunctionSide side = FunctionSide::H;
  CongruenceLevel level;

  /// The H-side partner of the twisted function at E-level m: K_E(m)^theta = K_F(ceil(m/e)).
  static TestFunction h_side(const TowerSpec& t, int m) {
    return {FunctionSide::H, {Side::F, theta_fixed_level(t.e, m)}};
  }
  static TestFunction twisted(int m) { return {FunctionSide::Twisted, {Side::E, m}}; }
};

/// Unnormalized value U and normalizing factor D; the normalized integral is D^{1/2} U.
struct OrbitalValue {
  Rational value = 0;
  Rational normalizing_factor = 0;
  int depth_used = 0;
  bool certified = false;
  long long lattices_visited = 0;
  long long admissible = 0;

  Rational normalized_squared() const { return normalizing_factor * value * value; }
};

namespace detail {

struct WalkOutcome {
  BigInt weight = 0;
  int depth_used = 0;
  bool certified = false;
  long long visited = 0;
  long long admissible = 0;
};

/// Breadth-first walk over the convex set of `stable` vertices.  Certified
/// when the set is exhausted, or when something was found and `quiet`
/// consecutive levels added nothing.
template <class Stable, class Weight>
WalkOutcome walk_tree(const Matrix& root, const PadicElem& uniformizer, const std::vector<PadicElem>& reps,
                      int max_depth, int quiet, Stable&& stable, Weight&& weight) {
  WalkOutcome out;
  std::vector<TreeNode> frontier{{root, 0, true}};
  out.visited = 1;
  {
    const BigInt w = weight(root);
    out.weight += w;
    if (w > 0) ++out.admissible;
  }
  int zero_run = 0;
  for (int depth = 1; depth <= max_depth; ++depth) {
    std::vector<TreeNode> next;
    BigInt level = 0;
    for (const auto& node : frontier)
      for (auto& child : tree_children(node, uniformizer, reps)) {
        ++out.visited;
        if (!stable(child.basis)) continue;
        const BigInt w = weight(child.basis);
        level += w;
        if (w > 0) ++out.admissible;
        next.push_back(std::move(child));
      }
    out.weight += level;
    out.depth_used = depth;
    frontier = std::move(next);
    if (frontier.empty()) {
      out.certified = true;
      return out;
    }
    zero_run = level == 0 ? zero_run + 1 : 0;
    if (out.weight > 0 && zero_run >= quiet) {
      out.certified = true;
      return out;
    }
  }
  if (max_depth == 0 && frontier.empty()) out.certified = true;
  return out;
}

/// Elements of O_E / pi^m as digit vectors.
inline std::vector<Digits> residue_ring(const TowerSpec& t, int m) {
  std::vector<Digits> out{Digits{}};
  for (int j = 0; j < t.e; ++j)
    for (int i = 0; i < t.f; ++i) {
      const i64 range = coefficient_modulus(t, m, j);
      if (range == 1) continue;
      std::vector<Digits> grown;
      grown.reserve(out.size() * static_cast<std::size_t>(range));
      for (const auto& base : out)
        for (i64 c = 0; c < range; ++c) {
          Digits x = base;
          x[t.index(i, j)] = c;
          grown.push_back(x);
        }
      out = std::move(grown);
    }
  return out;
}

/// Residue field F_q with elements coded as sum c_i p^i.
struct ResidueField {
  i64 p = 0;
  i64 q = 0;
  std::vector<int> mul;  // q*q table

  explicit ResidueField(const TowerSpec& t) : p(t.p), q(t.residue_size()), mul(static_cast<std::size_t>(q * q)) {
    const modarith::Poly h = residue_modulus(t);
    auto decode = [&](i64 c) {
      modarith::Poly r;
      for (int i = 0; i < t.f; ++i) {
        r.push_back(c % p);
        c /= p;
      }
      modarith::trim(r);
      return r;
    };
    auto encode = [&](const modarith::Poly& r) {
      i64 c = 0;
      for (std::size_t i = r.size(); i-- > 0;) c = c * p + modarith::mod(r[i], p);
      return c;
    };
    for (i64 a = 0; a < q; ++a)
      for (i64 b = 0; b < q; ++b)
        mul[static_cast<std::size_t>(a * q + b)] =
            static_cast<int>(encode(modarith::poly_rem(modarith::poly_mul(decode(a), decode(b), p), h, p)));
    f_ = t.f;
  }
  i64 sub(i64 a, i64 b) const {
    i64 r = 0;
    i64 w = 1;
    for (int i = 0; i < f_; ++i) {
      r += modarith::mod(a % p - b % p, p) * w;
      a /= p;
      b /= p;
      w *= p;
    }
    return r;
  }
  i64 times(i64 a, i64 b) const { return mul[static_cast<std::size_t>(a * q + b)]; }

 private:
  int f_ = 1;
};

inline i64 residue_code(const TowerSpec& t, const Digits& x) {
  i64 c = 0;
  for (int i = t.f; i-- > 0;) c = c * t.p + modarith::mod(x[t.index(i, 0)], t.p);
  return c;
}

/// Number of bases of O_E^n / pi^m made of vectors w with M theta(w) = w mod pi^m.
/// M is given by digit vectors (integral entries), row-major.
inline BigInt count_fixed_bases(const TowerSpec& t, const std::vector<Digits>& M, int n, int m,
                                const std::vector<Digits>& ring, const ResidueField& kf) {
  // fixed vectors, by residue class
  std::map<std::vector<i64>, long long> classes;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  const std::size_t R = ring.size();
  std::vector<Digits> th(R);
  for (std::size_t r = 0; r < R; ++r) th[r] = apply_theta_digits(t, ring[r]);
  while (true) {
    bool fixed = true;
    for (int a = 0; a < n && fixed; ++a) {
      Digits s{};
      for (int b = 0; b < n; ++b) s = add(t, s, mul(t, M[static_cast<std::size_t>(a * n + b)], th[idx[static_cast<std::size_t>(b)]]));
      const Digits lhs = truncate(t, s, m);
      const Digits& rhs = ring[idx[static_cast<std::size_t>(a)]];
      for (int k = 0; k < t.d; ++k)
        if (lhs[k] != rhs[k]) {
          fixed = false;
          break;
        }
    }
    if (fixed) {
      std::vector<i64> key;
      for (int a = 0; a < n; ++a) key.push_back(residue_code(t, ring[idx[static_cast<std::size_t>(a)]]));
      ++classes[key];
    }
    int pos = 0;
    while (pos < n && ++idx[static_cast<std::size_t>(pos)] == R) idx[static_cast<std::size_t>(pos++)] = 0;
    if (pos == n) break;
  }
  BigInt total = 0;
  if (n == 1) {
    for (const auto& [key, cnt] : classes)
      if (key[0] != 0) total += cnt;
    return total;
  }
  for (const auto& [k1, c1] : classes)
    for (const auto& [k2, c2] : classes) {
      const i64 det = kf.sub(kf.times(k1[0], k2[1]), kf.times(k1[1], k2[0]));
      if (det != 0) total += BigInt(c1) * c2;
    }
  return total;
}

}  // namespace detail

inline constexpr int kQuietLevels = 2;

/// Orbital integral of vol(K_F(k))^{-1} 1_{K_F(k)} at regular semisimple gamma in GL_n(F), n <= 2.
inline OrbitalValue orbital_integral(const TestFunction& fn, const Matrix& gamma, const HaarNormalization& norm,
                                     int depth) {
  (void)norm;
  if (fn.side != FunctionSide::H) throw NotInDomain("H-side orbital integral needs an H-side test function");
  const TowerSpec& t = gamma.tower();
  const int n = gamma.rows();
  if (n > 2) throw NotInDomain("orbital integrals implemented for n <= 2");
  if (!gamma.is_theta_fixed()) throw NotInDomain("gamma must lie in GL_n(F)");
  if (!is_regular_semisimple(gamma)) throw IrregularInput("gamma is not regular semisimple at precision");
  const int k = fn.level.m;
  OrbitalValue out;
  out.normalizing_factor = normalizing_factor_H(gamma);
  const BigInt fibre = gl_order_mod(t.p, n, k);
  const Matrix I = Matrix::identity(t, n);
  const Matrix Y = PadicElem::pi_power(t, -k * t.e) * (gamma - I);
  if (n == 1) {
    out.certified = true;
    out.lattices_visited = 1;
    if (integral_at_precision(Y, 1)) {
      out.admissible = 1;
      out.value = Rational(fibre);
    }
    return out;
  }
  // no Y-stable lattice unless O_F[Y] is an order
  const Polynomial cpY = charpoly(Y);
  for (const auto& c : cpY)
    if (!c.is_zero() && c.valuation() < 0) {
      out.certified = true;
      return out;
    }
  const TorusData torus = classify_torus(gamma);
  // Krylov root lattice O[Y] v, for the v among e_1, e_2, e_1 + e_2 with the smallest covolume
  Matrix root;
  int best = kInfVal;
  for (const auto& [a, b] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
    Matrix v(t, 2, 1);
    v(0, 0) = PadicElem::from_int(t, a);
    v(1, 0) = PadicElem::from_int(t, b);
    const Matrix Yv = Y * v;
    Matrix B(t, 2, 2);
    B(0, 0) = v(0, 0);
    B(1, 0) = v(1, 0);
    B(0, 1) = Yv(0, 0);
    B(1, 1) = Yv(1, 0);
    const PadicElem det = determinant(B);
    if (!det.is_zero() && det.valuation() < best) {
      best = det.valuation();
      root = B;
    }
  }
  if (best == kInfVal) throw IrregularInput("gamma is scalar at precision");
  const auto reps = residue_representatives(t, true);
  auto stable = [&](const Matrix& B) { return integral_at_precision(B.inverse() * Y * B, 1); };
  auto weight = [&](const Matrix& B) -> BigInt { return torus.window_count(torus.iota(B), t.e); };
  const auto w = detail::walk_tree(root, PadicElem::pi_power(t, t.e), reps, depth, kQuietLevels, stable, weight);
  out.value = Rational(fibre * w.weight);
  out.depth_used = w.depth_used;
  out.certified = w.certified;
  out.lattices_visited = w.visited;
  out.admissible = w.admissible;
  return out;
}

/// Twisted orbital integral of vol(K_E(m))^{-1} 1_{K_E(m) ⋊ theta} at delta ⋊ theta.
///
/// The twisted centralizer is taken to be F[N delta]^x, which needs
/// N delta in GL_n(F); this holds for theta-fixed delta and diagonal delta.
inline OrbitalValue orbital_integral(const TestFunction& fn, const TwistedElem& delta, const HaarNormalization& norm,
                                     int depth) {
  (void)norm;
  if (fn.side != FunctionSide::Twisted) throw NotInDomain("twisted orbital integral needs a twisted test function");
  const Matrix& D = delta.g;
  const TowerSpec& t = D.tower();
  const int n = D.rows();
  const int m = fn.level.m;
  if (n > 2) throw NotInDomain("orbital integrals implemented for n <= 2");
  const Matrix N = twisted_norm(delta);
  if (!N.is_theta_fixed()) throw NotInDomain("twisted centralizer supported only when N(delta) lies in GL_n(F)");
  if (!is_regular_semisimple(N)) throw IrregularInput("N(delta) is not regular semisimple at precision");
  OrbitalValue out;
  out.normalizing_factor = normalizing_factor_twisted(delta);
  // an admissible lattice makes N(delta) = Phi^d congruent to 1 mod pi^m
  if (!is_top_unipotent(N)) {
    out.certified = true;
    return out;
  }
  const TorusData torus = classify_torus(N);
  const auto ring = detail::residue_ring(t, m);
  const detail::ResidueField kf(t);
  std::vector<i64> zeta_pow(static_cast<std::size_t>(t.e));
  for (int s = 0; s < t.e; ++s) zeta_pow[static_cast<std::size_t>(s)] = modarith::powmod(t.zeta_e, static_cast<std::uint64_t>(s), t.modulus);

  auto phi_matrix = [&](const Matrix& B) { return B.inverse() * D * B.theta(); };
  auto stable = [&](const Matrix& B) { return integral_at_precision(phi_matrix(B), m); };
  auto weight = [&](const Matrix& B) -> BigInt {
    const Matrix M = phi_matrix(B);
    std::vector<Digits> md;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) md.push_back(M(a, b).integral_digits());
    const std::vector<int> io = torus.iota(B);
    BigInt total = 0;
    for (int s = 0; s < t.e; ++s) {
      // basis pi^s B: iota_i moves by s * n_i, M by zeta^s
      std::vector<int> ios = io;
      for (std::size_t i = 0; i < ios.size(); ++i) ios[i] += s * torus.dim[i];
      const int cnt = torus.window_count(ios, t.e);
      if (cnt == 0) continue;
      std::vector<Digits> ms = md;
      for (auto& x : ms) x = detail::scale(t, x, zeta_pow[static_cast<std::size_t>(s)]);
      total += BigInt(cnt) * detail::count_fixed_bases(t, ms, n, m, ring, kf);
    }
    return total;
  };

  // root: the O_E-span of Phi^i (N^k e_j), which is Phi-stable
  Matrix root;
  if (n == 1) {
    root = Matrix::identity(t, 1);
  } else {
    std::vector<std::vector<PadicElem>> gens;
    for (int j = 0; j < n; ++j) {
      Matrix v(t, n, 1);
      v(j, 0) = PadicElem::one(t);
      for (int k = 0; k < n; ++k) {
        Matrix w = v;
        for (int i = 0; i < t.d; ++i) {
          std::vector<PadicElem> col;
          for (int a = 0; a < n; ++a) col.push_back(w(a, 0));
          gens.push_back(col);
          w = D * w.theta();
        }
        v = N * v;
      }
    }
    root = lattice_span(gens, n);
  }
  if (n == 1) {
    out.certified = true;
    out.lattices_visited = 1;
    const BigInt w = stable(root) ? weight(root) : BigInt(0);
    out.admissible = w > 0 ? 1 : 0;
    out.value = Rational(w);
    return out;
  }
  const auto reps = residue_representatives(t, false);
  const auto w = detail::walk_tree(root, PadicElem::pi_power(t, 1), reps, depth * t.e, kQuietLevels * t.e, stable,
                                   weight);
  out.value = Rational(w.weight);
  out.depth_used = (w.depth_used + t.e - 1) / t.e;
  out.certified = w.certified;
  out.lattices_visited = w.visited;
  out.admissible = w.admissible;
  return out;
}

/// Transfer factor for a (gamma, delta) norm pair: identically 1.
inline Rational transfer_factor(const Matrix& gamma, const TwistedElem& delta) {
  if (!is_norm_of(gamma, delta)) throw NotANorm("gamma is not a norm of delta");
  return Rational(1);
}

enum class NormStatus { Norm, NotNorm, Undetermined };

inline const char* norm_status_name(NormStatus s) {
  switch (s) {
    case NormStatus::Norm: return "norm";
    case NormStatus::NotNorm: return "not_norm";
    case NormStatus::Undetermined: return "undetermined";
  }
  return "?";
}

struct MatchReport {
  i64 p = 0;
  int e = 1;
  int f = 1;
  int n = 1;
  int m = 1;
  int precision = 0;
  int depth = 0;
  Matrix gamma;
  bool irregular = false;
  NormStatus norm_status = NormStatus::Undetermined;
  std::optional<Matrix> witness;
  OrbitalValue lhs;
  OrbitalValue rhs;
  Rational transfer = 1;
  bool pass = false;
  std::optional<double> wall_ms;

  bool certified() const { return lhs.certified && rhs.certified; }
};

/// A delta in E^x with N(delta) = gamma for gamma in F^x, or nullopt when gamma is not a norm.
inline std::optional<PadicElem> norm_preimage_rank1(const PadicElem& gamma) {
  const TowerSpec& t = gamma.tower();
  if (gamma.is_zero()) throw PrecisionExhausted("gamma vanishes at precision");
  const int vF = valuation_F(gamma);
  if (vF % t.f != 0) return std::nullopt;
  const int a = vF / t.f;
  const PadicElem pia = PadicElem::pi_power(t, a);
  const i64 q = t.residue_size();
  for (i64 code = 1; code < q; ++code) {
    std::vector<i64> res(static_cast<std::size_t>(t.f));
    i64 c = code;
    for (int i = 0; i < t.f; ++i) {
      res[static_cast<std::size_t>(i)] = c % t.p;
      c /= t.p;
    }
    const PadicElem d0 = pia * teichmuller(t, res);
    const PadicElem u = gamma / norm_trace(d0).norm;
    const PadicElem diff = u - PadicElem::one(t);
    if (!diff.is_zero() && diff.valuation() < t.e) continue;
    const Matrix root = dth_root_tu(Matrix::diagonal(t, {u}), t.d);
    return d0 * root(0, 0);
  }
  return std::nullopt;
}

inline bool is_diagonal(const Matrix& A) {
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (i != j && !A(i, j).is_zero()) return false;
  return true;
}

/// Compares both sides of the matching identity for gamma in GL_n(F) with
/// the test functions at E-level m.
inline MatchReport check_matching(const Matrix& gamma, int m, const HaarNormalization& norm, int depth) {
  const auto start = std::chrono::steady_clock::now();
  const TowerSpec& t = gamma.tower();
  MatchReport r;
  r.p = t.p;
  r.e = t.e;
  r.f = t.f;
  r.n = gamma.rows();
  r.m = m;
  r.precision = t.precision;
  r.depth = depth;
  r.gamma = gamma;
  auto finish = [&]() {
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
  };
  if (!is_regular_semisimple(gamma)) {
    r.irregular = true;
    r.lhs.certified = r.rhs.certified = true;
    r.pass = true;
    return finish();
  }
  r.lhs = orbital_integral(TestFunction::h_side(t, m), gamma, norm, depth);

  bool tu = false;
  try {
    tu = is_top_unipotent(gamma);
  } catch (const PrecisionExhausted&) {
    tu = false;
  }
  if (tu) {
    r.witness = dth_root_tu(gamma, t.d);
    r.norm_status = NormStatus::Norm;
  } else if (r.n == 1) {
    const auto d = norm_preimage_rank1(gamma(0, 0));
    if (d) {
      r.witness = Matrix::diagonal(t, {*d});
      r.norm_status = NormStatus::Norm;
    } else {
      r.norm_status = NormStatus::NotNorm;
    }
  } else if (is_diagonal(gamma)) {
    std::vector<PadicElem> entries;
    r.norm_status = NormStatus::Norm;
    for (int i = 0; i < r.n; ++i) {
      const auto d = norm_preimage_rank1(gamma(i, i));
      if (!d) {
        r.norm_status = NormStatus::NotNorm;
        break;
      }
      entries.push_back(*d);
    }
    if (r.norm_status == NormStatus::Norm) r.witness = Matrix::diagonal(t, entries);
  }

  if (r.witness) {
    const TwistedElem delta{*r.witness};
    r.transfer = transfer_factor(gamma, delta);
    r.rhs = orbital_integral(TestFunction::twisted(m), delta, norm, depth);
    if (!r.certified()) throw UncertifiedComparison("orbital integral not certified at the given depth");
    r.pass = r.lhs.normalized_squared() == r.rhs.normalized_squared();
  } else {
    // not a norm, or undetermined for gamma outside H(F)_tu where both sides vanish
    r.rhs.certified = true;
    if (!r.lhs.certified) throw UncertifiedComparison("orbital integral not certified at the given depth");
    r.pass = r.lhs.value == 0;
  }
  return finish();
}

}  // namespace tamebc
