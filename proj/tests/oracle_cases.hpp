// Fixed gamma for engine-vs-oracle comparisons, shared by the unit and acceptance tests.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "oracle.hpp"
#include "tamebc/matrix.hpp"

namespace oracle_cases {

struct OracleCase {
  long long p;
  std::array<std::array<long long, 2>, 2> gamma;
  std::optional<std::pair<long long, long long>> eigen;  // split case
  bool ramified = false;
};

// gamma = 1 + p Y at level k = 1, integral so that Z_p^2 is admissible.
inline const std::vector<OracleCase> kOracleCases{
    {3, {{{4, 0}, {0, 7}}}, std::pair{4LL, 7LL}},
    {3, {{{4, 0}, {0, 13}}}, std::pair{4LL, 13LL}},
    {3, {{{-5, 9}, {-18, 22}}}, std::pair{4LL, 13LL}},  // P diag(4, 13) P^{-1}, P = [[1, 1], [1, 2]]
    {3, {{{1, 3}, {6, 1}}}, std::nullopt},
    {3, {{{1, 9}, {18, 1}}}, std::nullopt},
    {3, {{{1, 3}, {9, 1}}}, std::nullopt, true},
    {3, {{{1, 9}, {27, 1}}}, std::nullopt, true},
    {5, {{{6, 0}, {0, 11}}}, std::pair{6LL, 11LL}},
    {5, {{{6, 0}, {0, 31}}}, std::pair{6LL, 31LL}},
    {5, {{{1, 5}, {10, 1}}}, std::nullopt},
    {5, {{{1, 5}, {25, 1}}}, std::nullopt, true},
};

inline oracle::M2 to_q(const OracleCase& c) {
  oracle::M2 g{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g[i][j] = c.gamma[i][j];
  return g;
}

inline oracle::Result run_oracle(const OracleCase& c, int R) {
  const oracle::M2 g = to_q(c);
  std::optional<oracle::M2> gen;
  int span = 1;
  if (c.eigen) {
    gen = oracle::split_generator(g, c.eigen->first, c.eigen->second, c.p);
    span = 2 * R + 2;
  } else if (c.ramified) {
    gen = oracle::traceless_part(g);
  }
  return oracle::orbital(g, c.p, 1, R, gen, span);
}

inline tamebc::Matrix engine_gamma(const OracleCase& c, const tamebc::TowerSpec& t) {
  return tamebc::Matrix::from_ints(t, {{c.gamma[0][0], c.gamma[0][1]}, {c.gamma[1][0], c.gamma[1][1]}});
}

}  // namespace oracle_cases
