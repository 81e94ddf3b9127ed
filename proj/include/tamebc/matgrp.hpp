#pragma once

// Congruence subgroups, twisted conjugation, topological unipotence and the
// concrete norm map for GL_n over a tower.

#include <cstdint>
#include <vector>

#include "tamebc/errors.hpp"
#include "tamebc/localfield.hpp"
#include "tamebc/matrix.hpp"

namespace tamebc {

inline constexpr int kDefaultSlack = 2;

/// The F-level k' with K_E(m)^theta = K_F(k'), i.e. ceil(m / e).
inline int theta_fixed_level(int e, int m) {
  if (e < 1 || m < 1) throw NotInDomain("theta_fixed_level needs e >= 1 and m >= 1");
  const int k = m / e;
  const int r = m % e;
  return r != 0 ? k + 1 : k;
}

enum class Side { E, F };

struct CongruenceLevel {
  Side side = Side::E;
  int m = 1;  // 0 means the maximal compact GL_n(O)
};

/// Semantics g ⋊ theta.
struct TwistedElem {
  Matrix g;
};

inline bool has_unit_determinant(const Matrix& M) {
  if (!M.is_integral()) return false;
  const PadicElem det = determinant(M);
  if (det.is_zero()) {
    if (det.precision() <= 0) throw PrecisionExhausted("determinant valuation undetermined");
    return false;
  }
  return det.valuation() == 0;
}

inline bool in_congruence(const Matrix& M, const CongruenceLevel& level) {
  if (!M.square()) throw NotInDomain("congruence test of a non-square matrix");
  const TowerSpec& t = M.tower();
  if (level.side == Side::F && !M.is_theta_fixed()) return false;
  if (level.m == 0) return has_unit_determinant(M);
  const int need = level.side == Side::E ? level.m : level.m * t.e;
  if (M.precision() < need) throw PrecisionExhausted("precision below congruence level");
  const Matrix D = M - Matrix::identity(t, M.rows());
  return D.min_valuation() >= need;
}

/// Characteristic polynomial of M - 1 reduces to X^n modulo pi.
inline bool charpoly_unipotent_mod_pi(const Matrix& M) {
  const Polynomial cp = charpoly(M - Matrix::identity(M.tower(), M.rows()));
  for (int k = 0; k < M.rows(); ++k) {
    const PadicElem& c = cp[static_cast<std::size_t>(k)];
    if (c.is_zero()) {
      if (c.precision() < 1) throw PrecisionExhausted("charpoly reduction ambiguous");
      continue;
    }
    if (c.valuation() < 1) return false;
  }
  return true;
}

/// Smallest K with g^(p^K) = 1 at (precision - slack); -1 if not reached in `cap` steps.
inline int unipotence_exponent(const Matrix& g, int slack = kDefaultSlack, int cap = 256) {
  const TowerSpec& t = g.tower();
  const Matrix I = Matrix::identity(t, g.rows());
  Matrix h = g;
  for (int K = 0; K <= cap; ++K) {
    const Matrix D = h - I;
    if (D.min_valuation() >= h.precision() - slack || D.is_zero()) return K;
    h = h.pow(static_cast<std::uint64_t>(t.p));
  }
  return -1;
}

inline bool is_top_unipotent(const Matrix& g, int slack = kDefaultSlack) {
  if (!g.square()) throw NotInDomain("is_top_unipotent of a non-square matrix");
  if (!has_unit_determinant(g)) return false;
  const bool by_charpoly = charpoly_unipotent_mod_pi(g);
  if (!by_charpoly) return false;
  if (unipotence_exponent(g, slack) < 0)
    throw PrecisionExhausted("charpoly criterion and p-power limit disagree");
  return true;
}

/// The unique topologically unipotent d-th root, as gamma^(d^{-1} mod p^K).
inline Matrix dth_root_tu(const Matrix& gamma, int d) {
  const TowerSpec& t = gamma.tower();
  if (d % t.p == 0) throw NotInDomain("p divides d");
  if (!has_unit_determinant(gamma) || !charpoly_unipotent_mod_pi(gamma))
    throw NotTopologicallyUnipotent("dth_root_tu needs a topologically unipotent input");
  // exact triviality at working precision, not just up to slack
  const Matrix I = Matrix::identity(t, gamma.rows());
  Matrix h = gamma;
  int K = 0;
  while (!(h - I).is_zero()) {
    h = h.pow(static_cast<std::uint64_t>(t.p));
    ++K;
    if (K > 256) throw PrecisionExhausted("p-power iteration did not reach identity");
  }
  if (K == 0) return gamma;
  long double bound = 1;
  for (int i = 0; i < K; ++i) bound *= static_cast<long double>(t.p);
  if (bound > 4.0e18L) throw PrecisionExhausted("exponent modulus p^K exceeds 64 bits");
  const i64 pk = modarith::ipow(t.p, K);
  // d^{-1} mod p^K via phi(p^K) = p^K - p^{K-1}
  const i64 phi = pk - pk / t.p;
  const i64 u = modarith::powmod(modarith::mod(d, pk), static_cast<std::uint64_t>(phi - 1), pk);
  return gamma.pow(static_cast<std::uint64_t>(u));
}

/// N delta = delta theta(delta) ... theta^{d-1}(delta).
inline Matrix twisted_norm(const TwistedElem& delta) {
  const TowerSpec& t = delta.g.tower();
  Matrix r = delta.g;
  Matrix cur = delta.g;
  for (int i = 1; i < t.d; ++i) {
    cur = cur.theta();
    r = r * cur;
  }
  return r;
}

/// Coordinate of g^{-1} (delta ⋊ theta) g, namely g^{-1} delta theta(g).
inline TwistedElem twisted_conjugate(const Matrix& g, const TwistedElem& delta) {
  return {g.inverse() * delta.g * g.theta()};
}

/// Valuation of the charpoly discriminant, or nullopt when it vanishes at precision.
inline std::optional<int> discriminant_valuation(const Matrix& M) {
  const PadicElem disc = discriminant(charpoly(M));
  if (disc.is_zero()) return std::nullopt;
  return disc.valuation();
}

inline bool is_regular_semisimple(const Matrix& M, int slack = kDefaultSlack) {
  const PadicElem disc = discriminant(charpoly(M));
  if (disc.is_zero()) return false;
  return disc.valuation() < disc.precision() - slack;
}

inline bool is_norm_of(const Matrix& gamma, const TwistedElem& delta, int slack = kDefaultSlack) {
  if (!is_regular_semisimple(gamma, slack)) throw IrregularInput("gamma is not regular semisimple at precision");
  const Matrix N = twisted_norm(delta);
  if (!is_regular_semisimple(N, slack)) throw IrregularInput("N(delta) is not regular semisimple at precision");
  return poly_equal_at_precision(charpoly(N), charpoly(gamma));
}

}  // namespace tamebc
