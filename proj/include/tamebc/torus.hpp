#pragma once

// The centralizer torus F[A]^x of a regular semisimple A in GL_n(F), n <= 2,
// and the invariants used to pick one lattice per orbit of its free part.
//
// For each simple factor A_i of F[A] (residue degree f_i, dimension n_i) a
// lattice gets an integer iota_i, in pi_E units.  A uniformizer of A_i moves
// iota_i by e*f_i and fixes the others; the scalar p moves every iota_i by
// e*n_i.  Units fix every iota_i.  Lattices with iota_i in [0, e*f_i) for all
// i therefore form a fundamental set for T / T_0.

#include <algorithm>
#include <vector>

#include "tamebc/errors.hpp"
#include "tamebc/localfield.hpp"
#include "tamebc/matrix.hpp"

namespace tamebc {

enum class TorusKind { Split, Unramified, Ramified, Scalar1 };

inline const char* torus_kind_name(TorusKind k) {
  switch (k) {
    case TorusKind::Split: return "split";
    case TorusKind::Unramified: return "unramified";
    case TorusKind::Ramified: return "ramified";
    case TorusKind::Scalar1: return "rank1";
  }
  return "?";
}

/// Legendre symbol of a nonzero residue.
inline bool is_square_mod_p(i64 a, i64 p) {
  return modarith::powmod(modarith::mod(a, p), static_cast<std::uint64_t>((p - 1) / 2), p) == 1;
}

/// Square root in Q_p of a square unit (Newton from the residue root).
inline PadicElem sqrt_unit_F(const PadicElem& u) {
  const TowerSpec& t = u.tower();
  const i64 u0 = modarith::mod(u.unit()[0], t.p);
  i64 r = -1;
  for (i64 c = 1; c < t.p; ++c)
    if (modarith::mulmod(c, c, t.p) == u0) {
      r = c;
      break;
    }
  if (r < 0) throw NotInDomain("not a square unit");
  PadicElem y = PadicElem::from_int(t, r);
  const PadicElem half = PadicElem::from_rational(t, 1, 2);
  for (int k = 1; k < 2 * t.precision + 4; k *= 2) y = half * (y + u / y);
  return y;
}

struct TorusData {
  TorusKind kind = TorusKind::Scalar1;
  std::vector<int> f;    // residue degree of each factor
  std::vector<int> dim;  // F-dimension of each factor
  // split case: idempotents and the coordinate on which w_i is 1
  std::vector<Matrix> idempotent;
  std::vector<int> coord;

  /// iota_i of the lattice with basis columns B, in pi_E units.
  std::vector<int> iota(const Matrix& B) const {
    if (kind != TorusKind::Split) {
      const PadicElem det = determinant(B);
      if (det.is_zero()) throw PrecisionExhausted("lattice basis degenerate at precision");
      return {det.valuation()};
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < idempotent.size(); ++i) {
      const Matrix P = idempotent[i] * B;
      int best = kInfVal;
      for (int j = 0; j < B.cols(); ++j) {
        const PadicElem& lam = P(coord[i], j);
        if (lam.is_zero()) continue;
        best = std::min(best, lam.valuation());
      }
      if (best == kInfVal) throw PrecisionExhausted("eigenline projection vanishes at precision");
      out.push_back(best);
    }
    return out;
  }

  /// Number of k in Z with iota_i + k*e*n_i in [0, e*f_i) for every i.
  int window_count(const std::vector<int>& io, int e) const {
    long long lo = -(1LL << 40);
    long long hi = 1LL << 40;
    for (std::size_t i = 0; i < io.size(); ++i) {
      const long long step = static_cast<long long>(e) * dim[i];
      const long long top = static_cast<long long>(e) * f[i];
      // k*step >= -iota  and  k*step < top - iota
      auto ceil_div = [](long long a, long long b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); };
      lo = std::max(lo, ceil_div(-io[i], step));
      hi = std::min(hi, ceil_div(top - io[i], step) - 1);
    }
    return hi >= lo ? static_cast<int>(hi - lo + 1) : 0;
  }
};

/// Classifies F[A]^x for A in GL_n(F), n in {1, 2}, regular semisimple.
inline TorusData classify_torus(const Matrix& A) {
  const TowerSpec& t = A.tower();
  TorusData td;
  if (A.rows() == 1) {
    td.kind = TorusKind::Scalar1;
    td.f = {1};
    td.dim = {1};
    return td;
  }
  if (A.rows() != 2) throw NotInDomain("torus data implemented for n <= 2");
  const PadicElem tr = trace(A);
  const PadicElem det = determinant(A);
  const PadicElem disc = tr * tr - PadicElem::from_int(t, 4) * det;
  if (disc.is_zero()) throw IrregularInput("discriminant vanishes at precision");
  const int vE = disc.valuation();
  if (vE % t.e != 0) throw NotInDomain("matrix is not defined over F");
  const int vF = vE / t.e;
  if (vF % 2 != 0) {
    td.kind = TorusKind::Ramified;
    td.f = {1};
    td.dim = {2};
    return td;
  }
  const PadicElem u = disc * PadicElem::from_int(t, t.p).pow(-vF);
  if (!is_square_mod_p(u.unit()[0], t.p)) {
    td.kind = TorusKind::Unramified;
    td.f = {2};
    td.dim = {2};
    return td;
  }
  td.kind = TorusKind::Split;
  td.f = {1, 1};
  td.dim = {1, 1};
  const PadicElem sq = sqrt_unit_F(u) * PadicElem::from_int(t, t.p).pow(vF / 2);
  const PadicElem half = PadicElem::from_rational(t, 1, 2);
  const PadicElem r1 = half * (tr + sq);
  const PadicElem r2 = half * (tr - sq);
  const Matrix I = Matrix::identity(t, 2);
  const PadicElem diff_inv = (r1 - r2).inverse();
  for (int i = 0; i < 2; ++i) {
    const PadicElem& other = i == 0 ? r2 : r1;
    const PadicElem s = i == 0 ? diff_inv : -diff_inv;
    Matrix Pi = s * (A - other * I);
    // a row on which the eigenline has a nonzero coordinate
    int br = 0;
    int best = kInfVal;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        if (!Pi(r, c).is_zero() && Pi(r, c).valuation() < best) {
          best = Pi(r, c).valuation();
          br = r;
        }
    td.idempotent.push_back(Pi);
    td.coord.push_back(br);
  }
  return td;
}

}  // namespace tamebc
