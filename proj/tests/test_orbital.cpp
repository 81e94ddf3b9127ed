#include <catch_amalgamated.hpp>

#include "oracle_cases.hpp"
#include "tamebc/checks.hpp"
#include "tamebc/orbital.hpp"
#include "tamebc/sampling.hpp"

using namespace tamebc;
using oracle_cases::engine_gamma;
using oracle_cases::kOracleCases;
using oracle_cases::run_oracle;

TEST_CASE("congruence subgroup volumes", "[orbital]") {
  const Tower t = make_tower(3, 1, 1, 6);
  const HaarNormalization hn;
  CHECK(volume({Side::E, 1}, hn, 1, *t) == Rational(1, 2));
  CHECK(volume({Side::E, 1}, hn, 2, *t) == Rational(1, 48));
  CHECK(volume({Side::E, 0}, hn, 2, *t) == 1);
  CHECK(volume({Side::F, 2}, hn, 1, *t) == Rational(1, 6));
  const Tower u = make_tower(3, 1, 2, 6);
  CHECK(volume({Side::E, 1}, hn, 1, *u) == Rational(1, 8));
}

TEST_CASE("normalizing factor on H", "[orbital]") {
  const Tower t = make_tower(3, 1, 1, 10);
  CHECK(normalizing_factor_H(Matrix::from_ints(*t, {{4, 0}, {0, -2}})) == Rational(1, 9));
  CHECK(normalizing_factor_H(Matrix::from_ints(*t, {{1, 0}, {0, 2}})) == 1);
  CHECK(normalizing_factor_H(Matrix::from_ints(*t, {{2, 0}, {0, 2}})) == 0);
  CHECK(normalizing_factor_H(Matrix::from_ints(*t, {{5}})) == 1);
}

TEST_CASE("normalizing factor on the twisted side", "[orbital]") {
  const Tower t = make_tower(3, 2, 1, 10);
  CHECK(normalizing_factor_twisted({Matrix::identity(*t, 1)}) == 1);
  for (const auto& s : std::vector<std::array<int, 3>>{{3, 2, 1}, {3, 1, 2}, {5, 2, 1}}) {
    const Tower tw = make_tower(s[0], s[1], s[2], 12);
    const auto tally = checks::d_factor_coherence(*tw, 2, 8, 73);
    INFO(tally.name << " " << tally.first_failure);
    CHECK(tally.ok());
  }
}

TEST_CASE("rank one orbital integrals", "[orbital]") {
  const Tower t = make_tower(3, 2, 1, 10);
  const HaarNormalization hn;
  const OrbitalValue v = orbital_integral(TestFunction::h_side(*t, 2), Matrix::from_ints(*t, {{4}}), hn, 4);
  CHECK(v.value == 2);
  CHECK(v.certified);
  const OrbitalValue w = orbital_integral(TestFunction::h_side(*t, 2), Matrix::from_ints(*t, {{2}}), hn, 4);
  CHECK(w.value == 0);
  CHECK_THROWS_AS(orbital_integral(TestFunction::twisted(2), Matrix::from_ints(*t, {{4}}), hn, 4), NotInDomain);
}

TEST_CASE("rank one matching", "[orbital]") {
  const HaarNormalization hn;
  const Tower t = make_tower(3, 2, 1, 10);
  const MatchReport ok = check_matching(Matrix::from_ints(*t, {{4}}), 2, hn, 4);
  CHECK(ok.pass);
  CHECK(ok.certified());
  CHECK(ok.norm_status == NormStatus::Norm);
  CHECK(ok.lhs.value != 0);
  CHECK(ok.lhs.normalized_squared() == ok.rhs.normalized_squared());
  const MatchReport no = check_matching(Matrix::from_ints(*t, {{-1}}), 2, hn, 4);
  CHECK(no.pass);
  CHECK(no.norm_status == NormStatus::NotNorm);
  CHECK(no.lhs.value == 0);
  for (const auto& s : std::vector<std::array<int, 3>>{{3, 2, 1}, {3, 1, 2}, {5, 1, 2}})
    for (int m = 1; m <= 2; ++m) {
      const Tower tw = make_tower(s[0], s[1], s[2], 10);
      const auto tally = checks::rank1_matching_sweep(*tw, m, 4);
      INFO(tally.name << " " << tally.first_failure);
      CHECK(tally.ok());
    }
}

TEST_CASE("transfer factor", "[orbital]") {
  const Tower t = make_tower(3, 2, 1, 10);
  const PadicElem pi = PadicElem::pi_power(*t, 1);
  CHECK(transfer_factor(Matrix::from_ints(*t, {{-3}}), {Matrix::diagonal(*t, {pi})}) == 1);
  CHECK_THROWS_AS(transfer_factor(Matrix::from_ints(*t, {{3}}), {Matrix::diagonal(*t, {pi})}), NotANorm);
}

TEST_CASE("oracle is stable in the ball radius", "[orbital][oracle]") {
  for (const auto& c : kOracleCases) {
    INFO("p=" << c.p << " gamma=" << c.gamma[0][0] << "," << c.gamma[0][1] << "," << c.gamma[1][0] << ","
              << c.gamma[1][1]);
    CHECK(run_oracle(c, 2).value == run_oracle(c, 3).value);
  }
}

TEST_CASE("engine agrees with the brute-force oracle", "[orbital][oracle]") {
  const HaarNormalization hn;
  for (const auto& c : kOracleCases) {
    const Tower t = make_tower(c.p, 1, 1, 12);
    const Matrix g = engine_gamma(c, *t);
    const OrbitalValue v = orbital_integral(TestFunction::h_side(*t, 1), g, hn, 6);
    const auto o = run_oracle(c, 2);
    INFO("p=" << c.p << " gamma=" << g.to_string() << " engine " << to_string(v.value) << " oracle "
              << to_string(o.value));
    CHECK(v.certified);
    CHECK(v.value == o.value);
    CHECK(v.value > 0);
  }
}

TEST_CASE("orbital integrals are conjugation invariant", "[orbital]") {
  const HaarNormalization hn;
  const Tower t = make_tower(3, 1, 1, 12);
  auto rng = sampling::case_rng(79, 0);
  for (int i = 0; i < 6; ++i) {
    const auto gamma = sampling::random_tu_regular_F(*t, 2, rng);
    REQUIRE(gamma);
    const Matrix g = sampling::random_gl_F(*t, 2, rng);
    const OrbitalValue a = orbital_integral(TestFunction::h_side(*t, 1), *gamma, hn, 6);
    const OrbitalValue b = orbital_integral(TestFunction::h_side(*t, 1), g.inverse() * *gamma * g, hn, 6);
    CHECK(a.certified);
    CHECK(a.value == b.value);
    CHECK(a.normalizing_factor == b.normalizing_factor);
  }
}

TEST_CASE("twisted orbital integrals are twisted-conjugation invariant", "[orbital]") {
  const HaarNormalization hn;
  const Tower t = make_tower(3, 2, 1, 12);
  auto rng = sampling::case_rng(83, 0);
  for (int i = 0; i < 4; ++i) {
    const auto gamma = sampling::random_tu_regular_F(*t, 2, rng);
    REQUIRE(gamma);
    const TwistedElem delta{dth_root_tu(*gamma, t->d)};
    const OrbitalValue a = orbital_integral(TestFunction::twisted(1), delta, hn, 6);
    const PadicElem u = sampling::random_unit(*t, rng);
    const Matrix scalar = Matrix::diagonal(*t, {u, u});
    const Matrix h = sampling::random_gl_F(*t, 2, rng);
    for (const Matrix& g : {scalar, h}) {
      const OrbitalValue b = orbital_integral(TestFunction::twisted(1), twisted_conjugate(g, delta), hn, 6);
      CHECK(a.certified);
      CHECK(b.certified);
      CHECK(a.value == b.value);
      CHECK(a.normalizing_factor == b.normalizing_factor);
    }
  }
}

// For gamma in H_tu the twisted integral at gamma ⋊ theta equals the H-side one.
TEST_CASE("semisimple descent of orbital integrals", "[orbital]") {
  const HaarNormalization hn;
  for (const auto& s : std::vector<std::array<int, 3>>{{3, 2, 1}, {3, 1, 2}}) {
    const Tower t = make_tower(s[0], s[1], s[2], 12);
    auto rng = sampling::case_rng(89, 0);
    for (int i = 0; i < 3; ++i) {
      const auto gamma = sampling::random_tu_regular_F(*t, 2, rng);
      REQUIRE(gamma);
      const OrbitalValue h = orbital_integral(TestFunction::h_side(*t, 1), *gamma, hn, 6);
      const OrbitalValue tw = orbital_integral(TestFunction::twisted(1), TwistedElem{*gamma}, hn, 6);
      CHECK(h.certified);
      CHECK(tw.certified);
      CHECK(h.value == tw.value);
      CHECK(h.normalizing_factor == tw.normalizing_factor);
    }
  }
}

TEST_CASE("n = 2 matching on topologically unipotent gamma", "[orbital]") {
  const HaarNormalization hn;
  for (const auto& s : std::vector<std::array<int, 3>>{{3, 1, 2}, {5, 2, 1}}) {
    const Tower t = make_tower(s[0], s[1], s[2], 12);
    auto rng = sampling::case_rng(97, 0);
    for (int i = 0; i < 3; ++i) {
      const auto gamma = sampling::random_tu_regular_F(*t, 2, rng);
      REQUIRE(gamma);
      const MatchReport r = check_matching(*gamma, 1, hn, 6);
      INFO(gamma->to_string() << " lhs " << to_string(r.lhs.value) << " rhs " << to_string(r.rhs.value));
      CHECK(r.pass);
      CHECK(r.certified());
    }
  }
}

TEST_CASE("n = 2 matching on each torus type", "[orbital]") {
  const HaarNormalization hn;
  const Tower t = make_tower(5, 2, 1, 12);
  // split, unramified and ramified F[gamma], all of the form cayley(X)
  const std::vector<Matrix> xs{
      Matrix::from_ints(*t, {{5, 0}, {0, 10}}),
      Matrix::from_ints(*t, {{0, 5}, {10, 0}}),
      Matrix::from_ints(*t, {{0, 5}, {25, 0}}),
  };
  for (const Matrix& X : xs) {
    const Matrix gamma = cayley(X);
    const MatchReport r = check_matching(gamma, 1, hn, 6);
    INFO(torus_kind_name(classify_torus(gamma).kind) << " lhs " << to_string(r.lhs.value) << " rhs "
                                                      << to_string(r.rhs.value));
    CHECK(r.pass);
    CHECK(r.certified());
    CHECK(r.lhs.value > 0);
  }
}

TEST_CASE("certified values do not change with more depth", "[orbital]") {
  const HaarNormalization hn;
  const Tower t = make_tower(3, 1, 1, 14);
  for (const auto& c : kOracleCases) {
    if (c.p != 3) continue;
    const Matrix g = engine_gamma(c, *t);
    const OrbitalValue a = orbital_integral(TestFunction::h_side(*t, 1), g, hn, 6);
    const OrbitalValue b = orbital_integral(TestFunction::h_side(*t, 1), g, hn, 8);
    REQUIRE(a.certified);
    CHECK(a.value == b.value);
  }
}

TEST_CASE("outside the support both sides vanish", "[orbital]") {
  const HaarNormalization hn;
  const Tower t = make_tower(3, 2, 1, 12);
  const Matrix gamma = Matrix::from_ints(*t, {{2, 1}, {1, 1}});
  const MatchReport r = check_matching(gamma, 1, hn, 4);
  CHECK(r.pass);
  CHECK(r.lhs.value == 0);
  const MatchReport irr = check_matching(Matrix::from_ints(*t, {{4, 0}, {0, 4}}), 1, hn, 4);
  CHECK(irr.irregular);
  CHECK(irr.pass);
}
