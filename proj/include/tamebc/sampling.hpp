#pragma once

// Seeded random elements.  The generator is std::mt19937_64, seeded per case
// from (seed, case index) through std::seed_seq; bounded draws use plain
// modular reduction so streams are identical on every standard library.

#include <cstdint>
#include <optional>
#include <random>

#include "tamebc/descent.hpp"
#include "tamebc/localfield.hpp"
#include "tamebc/matgrp.hpp"
#include "tamebc/matrix.hpp"

namespace tamebc::sampling {

using Rng = std::mt19937_64;

inline Rng case_rng(std::uint64_t seed, std::uint64_t case_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                    static_cast<std::uint32_t>(case_id), static_cast<std::uint32_t>(case_id >> 32U)};
  return Rng(seq);
}

inline i64 uniform(Rng& g, i64 bound) { return static_cast<i64>(g() % static_cast<std::uint64_t>(bound)); }

/// pi^v times a digit-uniform element of O_E.
inline PadicElem random_integral(const TowerSpec& t, Rng& g, int v = 0) {
  Digits c{};
  for (int k = 0; k < t.d; ++k) c[k] = uniform(g, t.modulus);
  return PadicElem::from_integral(t, v, c, t.precision);
}

/// p^v times a digit-uniform element of Z_p.
inline PadicElem random_integral_F(const TowerSpec& t, Rng& g, int v = 0) {
  Digits c{};
  c[0] = uniform(g, t.modulus);
  return PadicElem::from_integral(t, v * t.e, c, t.precision);
}

inline PadicElem random_unit(const TowerSpec& t, Rng& g) {
  for (;;) {
    PadicElem x = random_integral(t, g);
    if (!x.is_zero() && x.valuation() == 0) return x;
  }
}

inline Matrix random_matrix(const TowerSpec& t, int n, Rng& g, int v = 0) {
  Matrix M(t, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = random_integral(t, g, v);
  return M;
}

inline Matrix random_matrix_F(const TowerSpec& t, int n, Rng& g, int v = 0) {
  Matrix M(t, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = random_integral_F(t, g, v);
  return M;
}

/// Rejection-sampled element of GL_n(O_E).
inline Matrix random_gl(const TowerSpec& t, int n, Rng& g) {
  for (;;) {
    Matrix M = random_matrix(t, n, g);
    if (has_unit_determinant(M)) return M;
  }
}

inline Matrix random_gl_F(const TowerSpec& t, int n, Rng& g) {
  for (;;) {
    Matrix M = random_matrix_F(t, n, g);
    if (has_unit_determinant(M)) return M;
  }
}

/// Topologically nilpotent X in pi M_n(O_E).
inline Matrix random_top_nilpotent(const TowerSpec& t, int n, Rng& g) { return random_matrix(t, n, g, 1); }

/// Topologically unipotent regular semisimple gamma in GL_n(F), as the Cayley
/// transform of a random X in p M_n(Z_p); nullopt after `tries` rejections.
inline std::optional<Matrix> random_tu_regular_F(const TowerSpec& t, int n, Rng& g, int slack = kDefaultSlack,
                                                 int tries = 64) {
  for (int k = 0; k < tries; ++k) {
    const Matrix gamma = cayley(random_matrix_F(t, n, g, 1));
    if (is_regular_semisimple(gamma, slack)) return gamma;
  }
  return std::nullopt;
}

/// gamma = u p^v in F^x with u a unit class mod p^2 lifted by its integer representative.
inline PadicElem rank1_class(const TowerSpec& t, i64 unit_mod_p2, int v) {
  return PadicElem::from_int(t, unit_mod_p2) * PadicElem::from_int(t, t.p).pow(v);
}

}  // namespace tamebc::sampling
