#pragma once

// Cayley transform on gl_n(E), theta-eigenspace splitting and the descent
// iteration k -> (g, h) with k = g h theta(g)^{-1}, h theta-fixed.

#include <optional>
#include <utility>
#include <vector>

#include "tamebc/errors.hpp"
#include "tamebc/localfield.hpp"
#include "tamebc/matgrp.hpp"
#include "tamebc/matrix.hpp"

namespace tamebc {

/// charpoly(X) reduces to X^n modulo pi.
inline bool is_top_nilpotent(const Matrix& X) {
  if (!X.is_integral()) return false;
  const Polynomial cp = charpoly(X);
  for (int k = 0; k < X.rows(); ++k) {
    const PadicElem& c = cp[static_cast<std::size_t>(k)];
    if (c.is_zero()) continue;
    if (c.valuation() < 1) return false;
  }
  return true;
}

struct LieElement {
  Matrix X;
  bool top_nilpotent() const { return is_top_nilpotent(X); }
};

/// (1 + X/2)(1 - X/2)^{-1}
inline Matrix cayley(const Matrix& X) {
  if (!is_top_nilpotent(X)) throw NotInDomain("cayley needs a topologically nilpotent argument");
  const TowerSpec& t = X.tower();
  const Matrix I = Matrix::identity(t, X.rows());
  const Matrix half = PadicElem::from_rational(t, 1, 2) * X;
  return (I + half) * (I - half).inverse();
}

/// 2(g - 1)(g + 1)^{-1}
inline Matrix cayley_inv(const Matrix& g) {
  if (!is_top_unipotent(g)) throw NotInDomain("cayley_inv needs a topologically unipotent argument");
  const TowerSpec& t = g.tower();
  const Matrix I = Matrix::identity(t, g.rows());
  return PadicElem::from_int(t, 2) * ((g - I) * (g + I).inverse());
}

/// Averaging projector P = (1/d) sum theta^i onto the theta-fixed part.
inline Matrix theta_average(const Matrix& X) {
  const TowerSpec& t = X.tower();
  Matrix s = X;
  Matrix cur = X;
  for (int i = 1; i < t.d; ++i) {
    cur = cur.theta();
    s = s + cur;
  }
  return PadicElem::from_rational(t, 1, t.d) * s;
}

/// A primitive d-th root of unity in F = Q_p (Teichmuller lift), if d | p-1.
inline std::optional<PadicElem> primitive_root_in_base(const TowerSpec& t, int d) {
  if ((t.p - 1) % d != 0) return std::nullopt;
  for (i64 a = 1; a < t.p; ++a)
    if (modarith::order_mod(a, t.p) == d) return teichmuller(t, a);
  return std::nullopt;
}

struct EigenComponent {
  PadicElem eigenvalue;
  Matrix component;
};

/// X = sum_i X_i with theta(X_i) = zeta^i X_i, via P_i = (1/d) sum_k zeta^{-ik} theta^k.
///
/// The eigenvalues must be theta-fixed for P_i to be projectors, so zeta_d has
/// to lie in Q_p; otherwise RootOfUnityUnavailable.
inline std::vector<EigenComponent> split_theta_eigen(const Matrix& X) {
  const TowerSpec& t = X.tower();
  const auto zeta = primitive_root_in_base(t, t.d);
  if (!zeta) throw RootOfUnityUnavailable("no primitive d-th root of unity in the base field");
  std::vector<Matrix> orbit{X};
  for (int k = 1; k < t.d; ++k) orbit.push_back(orbit.back().theta());
  const PadicElem inv_d = PadicElem::from_rational(t, 1, t.d);
  const PadicElem zinv = zeta->inverse();
  std::vector<EigenComponent> out;
  for (int i = 0; i < t.d; ++i) {
    Matrix s(t, X.rows(), X.cols());
    const PadicElem step = zinv.pow(i);
    PadicElem w = PadicElem::one(t);
    for (int k = 0; k < t.d; ++k) {
      s = s + w * orbit[static_cast<std::size_t>(k)];
      w = w * step;
    }
    Matrix comp = inv_d * s;
    if (comp.is_zero()) continue;
    out.push_back({zeta->pow(i), std::move(comp)});
  }
  return out;
}

/// Solves (1 - theta) Y = X2 for X2 in the kernel of the averaging projector,
/// as Y = -(1/d) sum_{k=1}^{d-1} k theta^k(X2).  This equals sum_i (1 - zeta^i)^{-1} X2_i
/// without needing zeta_d.
inline Matrix solve_coboundary(const Matrix& X2) {
  const TowerSpec& t = X2.tower();
  Matrix s(t, X2.rows(), X2.cols());
  Matrix cur = X2;
  for (int k = 1; k < t.d; ++k) {
    cur = cur.theta();
    s = s + PadicElem::from_int(t, k) * cur;
  }
  return PadicElem::from_rational(t, -1, t.d) * s;
}

/// L = pi^m M_n(O_E).
struct LatticePair {
  int m = 1;

  void validate(const TowerSpec& t) const {
    if (m < std::max(1, t.e)) throw NotInDomain("lattice level m must satisfy m >= max(1, e)");
  }
  bool contains(const Matrix& X) const { return X.min_valuation() >= m; }
  Matrix project_fixed(const Matrix& X) const { return theta_average(X); }
  Matrix project_moving(const Matrix& X) const { return X - theta_average(X); }
};

struct DescentStep {
  int iteration = 0;
  int x2_valuation = 0;  // kInfVal once X2 vanishes
  int y_valuation = 0;
};

struct DescentResult {
  Matrix g;
  Matrix h;
  int iterations = 0;
  std::vector<DescentStep> trace;
};

inline DescentResult descend(const Matrix& k, const LatticePair& L) {
  const TowerSpec& t = k.tower();
  L.validate(t);
  const Matrix I = Matrix::identity(t, k.rows());
  if (!L.contains(k - I)) throw NotInDomain("k is not in 1 + L");
  DescentResult res{I, k, 0, {}};
  int last = -1;
  const int cap = t.precision;
  for (int it = 0;; ++it) {
    const Matrix X = res.h - I;
    const Matrix X2 = L.project_moving(X);
    if (X2.is_zero()) {
      res.trace.push_back({it, kInfVal, kInfVal});
      res.iterations = it;
      return res;
    }
    const int v2 = X2.min_valuation();
    if (it >= cap || v2 <= last) throw NonConvergence("X2 component did not contract");
    last = v2;
    const Matrix Y = solve_coboundary(X2);
    res.trace.push_back({it, v2, Y.min_valuation()});
    const Matrix c = cayley(Y);
    res.h = c.inverse() * res.h * c.theta();
    res.g = res.g * c;
  }
}

}  // namespace tamebc
