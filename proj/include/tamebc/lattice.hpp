#pragma once

// Lattices in E^2 given by basis columns, walked as vertices of the
// Bruhat-Tits tree of PGL_2.

#include <vector>

#include "tamebc/errors.hpp"
#include "tamebc/localfield.hpp"
#include "tamebc/matrix.hpp"

namespace tamebc {

struct TreeNode {
  Matrix basis;  // columns u1, u2; u2 points back to the parent
  int depth = 0;
  bool root = false;
};

/// Residue representatives of O/varpi for the tree walk: [0, p) when the
/// uniformizer is p (F-lattices), Teichmuller-free lifts of F_q otherwise.
inline std::vector<PadicElem> residue_representatives(const TowerSpec& t, bool base_field) {
  std::vector<PadicElem> reps;
  if (base_field) {
    for (i64 c = 0; c < t.p; ++c) reps.push_back(PadicElem::from_int(t, c));
    return reps;
  }
  const i64 q = t.residue_size();
  for (i64 code = 0; code < q; ++code) {
    std::vector<i64> res(static_cast<std::size_t>(t.f));
    i64 c = code;
    for (int i = 0; i < t.f; ++i) {
      res[static_cast<std::size_t>(i)] = c % t.p;
      c /= t.p;
    }
    reps.push_back(PadicElem::residue_lift(t, res));
  }
  return reps;
}

inline Matrix from_columns(const std::vector<PadicElem>& u1, const std::vector<PadicElem>& u2) {
  Matrix B(u1[0].tower(), 2, 2);
  for (int i = 0; i < 2; ++i) {
    B(i, 0) = u1[static_cast<std::size_t>(i)];
    B(i, 1) = u2[static_cast<std::size_t>(i)];
  }
  return B;
}

/// Neighbours of a vertex away from its parent (all of them at the root).
inline std::vector<TreeNode> tree_children(const TreeNode& node, const PadicElem& uniformizer,
                                           const std::vector<PadicElem>& reps) {
  std::vector<TreeNode> out;
  const Matrix& B = node.basis;
  std::vector<PadicElem> u1{B(0, 0), B(1, 0)};
  std::vector<PadicElem> u2{B(0, 1), B(1, 1)};
  for (const auto& c : reps) {
    std::vector<PadicElem> a{u1[0] + c * u2[0], u1[1] + c * u2[1]};
    std::vector<PadicElem> b{uniformizer * u2[0], uniformizer * u2[1]};
    out.push_back({from_columns(a, b), node.depth + 1, false});
  }
  if (node.root) {
    std::vector<PadicElem> b{uniformizer * u1[0], uniformizer * u1[1]};
    out.push_back({from_columns(u2, b), node.depth + 1, false});
  }
  return out;
}

/// O_E-span of a full-rank family of column vectors in E^n, as a lower
/// triangular basis (columns) with min-valuation pivots.
inline Matrix lattice_span(std::vector<std::vector<PadicElem>> vecs, int n) {
  if (vecs.empty()) throw NotInDomain("lattice_span of an empty family");
  const TowerSpec& t = vecs.front().front().tower();
  Matrix B(t, n, n);
  for (int row = 0; row < n; ++row) {
    int piv = -1;
    int best = kInfVal;
    for (std::size_t k = 0; k < vecs.size(); ++k) {
      const PadicElem& x = vecs[k][static_cast<std::size_t>(row)];
      if (x.is_zero()) continue;
      if (x.valuation() < best) {
        best = x.valuation();
        piv = static_cast<int>(k);
      }
    }
    if (piv < 0) throw PrecisionExhausted("family does not span a lattice at precision");
    const std::vector<PadicElem> pv = vecs[static_cast<std::size_t>(piv)];
    vecs.erase(vecs.begin() + piv);
    const PadicElem inv = pv[static_cast<std::size_t>(row)].inverse();
    for (auto& w : vecs) {
      const PadicElem r = w[static_cast<std::size_t>(row)] * inv;
      if (r.is_exact_zero()) continue;
      for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] - r * pv[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i) B(i, row) = pv[static_cast<std::size_t>(i)];
  }
  return B;
}

/// Every entry is integral; entries that vanish must do so at precision >= need.
inline bool integral_at_precision(const Matrix& M, int need) {
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) {
      const PadicElem& x = M(i, j);
      if (x.is_exact_zero()) continue;
      if (x.is_zero()) {
        if (x.precision() < need) throw PrecisionExhausted("lattice test ambiguous at working precision");
        continue;
      }
      if (x.valuation() < 0) return false;
      if (x.precision() < need) throw PrecisionExhausted("lattice test ambiguous at working precision");
    }
  return true;
}

}  // namespace tamebc
