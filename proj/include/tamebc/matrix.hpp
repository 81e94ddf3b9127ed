#pragma once

// Dense matrices and polynomials over a tower at finite precision.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "tamebc/errors.hpp"
#include "tamebc/localfield.hpp"

namespace tamebc {

/// Coefficients low to high: p[k] multiplies X^k.
using Polynomial = std::vector<PadicElem>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(const TowerSpec& t, int rows, int cols)
      : t_(&t), rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), PadicElem::zero(t)) {}

  static Matrix identity(const TowerSpec& t, int n) {
    Matrix m(t, n, n);
    for (int i = 0; i < n; ++i) m(i, i) = PadicElem::one(t);
    return m;
  }

  static Matrix from_ints(const TowerSpec& t, const std::vector<std::vector<i64>>& rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
    Matrix m(t, r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = PadicElem::from_int(t, rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    return m;
  }

  static Matrix diagonal(const TowerSpec& t, const std::vector<PadicElem>& d) {
    Matrix m(t, static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
  }

  const TowerSpec& tower() const { return *t_; }
  const TowerSpec* tower_ptr() const { return t_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  PadicElem& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
  const PadicElem& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix r(*a.t_, a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = a.a_[k] + b.a_[k];
    return r;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix r(*a.t_, a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = a.a_[k] - b.a_[k];
    return r;
  }
  Matrix operator-() const {
    Matrix r = *this;
    for (auto& x : r.a_) x = -x;
    return r;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw NotInDomain("matrix shape mismatch");
    Matrix r(*a.t_, a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const PadicElem& x = a(i, k);
        if (x.is_exact_zero()) continue;
        for (int j = 0; j < b.cols_; ++j) r(i, j) = r(i, j) + x * b(k, j);
      }
    return r;
  }
  friend Matrix operator*(const PadicElem& s, const Matrix& a) {
    Matrix r = a;
    for (auto& x : r.a_) x = s * x;
    return r;
  }

  Matrix theta() const {
    Matrix r = *this;
    for (auto& x : r.a_) x = x.theta();
    return r;
  }
  Matrix theta_pow(int k) const {
    Matrix r = *this;
    for (auto& x : r.a_) x = x.theta_pow(k);
    return r;
  }
  Matrix transpose() const {
    Matrix r(*t_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }
  Matrix with_precision(int prec) const {
    Matrix r = *this;
    for (auto& x : r.a_) x = x.with_precision(prec);
    return r;
  }
  Matrix rehome(const TowerSpec& other) const {
    Matrix r(other, rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k].rehome(other);
    return r;
  }

  /// Minimum entry valuation; entries zero at precision count as their precision.
  int min_valuation() const {
    int v = kInfVal;
    for (const auto& x : a_) {
      if (x.is_exact_zero()) continue;
      v = std::min(v, x.is_zero() ? x.precision() : x.valuation());
    }
    return v;
  }

  /// Minimum absolute precision over the entries.
  int precision() const {
    int p = kInfVal;
    for (const auto& x : a_) p = std::min(p, x.precision());
    return p;
  }

  bool is_zero() const {
    for (const auto& x : a_)
      if (!x.is_zero()) return false;
    return true;
  }
  bool equals_at_precision(const Matrix& b) const { return (*this - b).is_zero(); }
  bool is_theta_fixed() const { return theta().equals_at_precision(*this); }
  bool is_integral() const {
    for (const auto& x : a_)
      if (!x.is_zero() && x.valuation() < 0) return false;
    return true;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  Matrix pow(std::uint64_t ex) const {
    Matrix r = identity(*t_, rows_);
    Matrix base = *this;
    while (ex != 0) {
      if (ex & 1U) r = r * base;
      ex >>= 1U;
      if (ex != 0) base = base * base;
    }
    return r;
  }

  /// Gauss-Jordan with minimum-valuation pivots.
  Matrix inverse() const {
    if (!square()) throw NotInDomain("inverse of a non-square matrix");
    const int n = rows_;
    Matrix a = *this;
    Matrix inv = identity(*t_, n);
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      int best = kInfVal;
      for (int r = col; r < n; ++r) {
        const PadicElem& x = a(r, col);
        if (x.is_zero()) continue;
        if (x.valuation() < best) {
          best = x.valuation();
          piv = r;
        }
      }
      if (piv < 0) throw PrecisionExhausted("matrix is singular at working precision");
      if (piv != col)
        for (int j = 0; j < n; ++j) {
          std::swap(a(piv, j), a(col, j));
          std::swap(inv(piv, j), inv(col, j));
        }
      const PadicElem pinv = a(col, col).inverse();
      for (int j = 0; j < n; ++j) {
        a(col, j) = a(col, j) * pinv;
        inv(col, j) = inv(col, j) * pinv;
      }
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        const PadicElem factor = a(r, col);
        if (factor.is_exact_zero()) continue;
        for (int j = 0; j < n; ++j) {
          a(r, j) = a(r, j) - factor * a(col, j);
          inv(r, j) = inv(r, j) - factor * inv(col, j);
        }
      }
    }
    return inv;
  }

  std::vector<std::vector<std::string>> to_strings() const {
    std::vector<std::vector<std::string>> out(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out[static_cast<std::size_t>(i)].push_back((*this)(i, j).to_string());
    return out;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
      os << (i ? ", [" : "[");
      for (int j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j).to_string();
      os << "]";
    }
    os << "]";
    return os.str();
  }

 private:
  const TowerSpec* t_ = nullptr;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<PadicElem> a_;
};

/// Characteristic polynomial det(X - A) by Berkowitz' division-free algorithm.
inline Polynomial charpoly(const Matrix& A) {
  if (!A.square()) throw NotInDomain("charpoly of a non-square matrix");
  const TowerSpec& t = A.tower();
  const int n = A.rows();
  std::vector<PadicElem> p{PadicElem::one(t)};  // high to low
  for (int r = 0; r < n; ++r) {
    std::vector<PadicElem> col;
    col.reserve(static_cast<std::size_t>(r + 2));
    col.push_back(PadicElem::one(t));
    col.push_back(-A(r, r));
    // v = C, then M v repeatedly; entries -R M^k C
    std::vector<PadicElem> v(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) v[static_cast<std::size_t>(i)] = A(i, r);
    for (int k = 0; k < r; ++k) {
      PadicElem s = PadicElem::zero(t);
      for (int i = 0; i < r; ++i) s = s + A(r, i) * v[static_cast<std::size_t>(i)];
      col.push_back(-s);
      if (k + 1 < r) {
        std::vector<PadicElem> w(static_cast<std::size_t>(r), PadicElem::zero(t));
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] + A(i, j) * v[static_cast<std::size_t>(j)];
        v = std::move(w);
      }
    }
    std::vector<PadicElem> q(static_cast<std::size_t>(r + 2), PadicElem::zero(t));
    for (int i = 0; i <= r + 1; ++i)
      for (int j = 0; j <= std::min(i, r); ++j)
        q[static_cast<std::size_t>(i)] = q[static_cast<std::size_t>(i)] + col[static_cast<std::size_t>(i - j)] * p[static_cast<std::size_t>(j)];
    p = std::move(q);
  }
  return Polynomial(p.rbegin(), p.rend());
}

inline PadicElem determinant(const Matrix& A) {
  const Polynomial cp = charpoly(A);
  return (A.rows() % 2 == 0) ? cp[0] : -cp[0];
}

inline PadicElem trace(const Matrix& A) {
  PadicElem s = PadicElem::zero(A.tower());
  for (int i = 0; i < A.rows(); ++i) s = s + A(i, i);
  return s;
}

inline Polynomial derivative(const Polynomial& P) {
  Polynomial d;
  for (std::size_t k = 1; k < P.size(); ++k)
    d.push_back(PadicElem::from_int(P[k].tower(), static_cast<i64>(k)) * P[k]);
  return d;
}

/// Resultant via the Sylvester determinant (leading coefficients taken as given).
inline PadicElem resultant(const Polynomial& a, const Polynomial& b) {
  const TowerSpec& t = a.front().tower();
  const int m = static_cast<int>(a.size()) - 1;
  const int n = static_cast<int>(b.size()) - 1;
  if (m <= 0 && n <= 0) return PadicElem::one(t);
  if (m == 0) return a[0].pow(n);
  if (n == 0) return b[0].pow(m);
  Matrix S(t, m + n, m + n);
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) S(r, r + k) = a[static_cast<std::size_t>(m - k)];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) S(n + r, r + k) = b[static_cast<std::size_t>(n - k)];
  return determinant(S);
}

/// Discriminant of a monic polynomial.
inline PadicElem discriminant(const Polynomial& P) {
  const int n = static_cast<int>(P.size()) - 1;
  PadicElem r = resultant(P, derivative(P));
  return ((n * (n - 1) / 2) % 2 == 0) ? r : -r;
}

inline bool poly_equal_at_precision(const Polynomial& a, const Polynomial& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!a[k].equals_at_precision(b[k])) return false;
  return true;
}

inline Matrix poly_eval(const Polynomial& P, const Matrix& A) {
  Matrix r(A.tower(), A.rows(), A.cols());
  for (std::size_t k = P.size(); k-- > 0;) r = r * A + P[k] * Matrix::identity(A.tower(), A.rows());
  return r;
}

}  // namespace tamebc
