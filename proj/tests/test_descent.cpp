#include <catch_amalgamated.hpp>

#include "tamebc/checks.hpp"
#include "tamebc/descent.hpp"
#include "tamebc/sampling.hpp"

using namespace tamebc;

namespace {

const std::vector<std::array<int, 3>> kTowers{{3, 2, 1}, {3, 1, 2}, {5, 2, 1}, {7, 3, 1}, {7, 3, 2}};

}  // namespace

TEST_CASE("Cayley transform basics", "[descent]") {
  const Tower t = make_tower(3, 2, 1, 10);
  const Matrix Z(*t, 2, 2);
  CHECK(cayley(Z).equals_at_precision(Matrix::identity(*t, 2)));
  Matrix N(*t, 2, 2);
  N(0, 1) = PadicElem::pi_power(*t, 1);
  CHECK(cayley(N).equals_at_precision(Matrix::identity(*t, 2) + N));
  CHECK(cayley_inv(cayley(N)).equals_at_precision(N));
  CHECK_THROWS_AS(cayley(Matrix::identity(*t, 2)), NotInDomain);
  CHECK_THROWS_AS(cayley_inv(Matrix::from_ints(*t, {{-1, 0}, {0, 1}})), NotInDomain);
  for (const auto& s : kTowers) {
    const Tower tw = make_tower(s[0], s[1], s[2], 10);
    const auto tally = checks::cayley_identities(*tw, 2, 20, 41);
    INFO(tally.name << " " << tally.first_failure);
    CHECK(tally.ok());
  }
}

TEST_CASE("theta eigen-splitting", "[descent]") {
  const Tower t = make_tower(3, 2, 1, 10);
  const Matrix A = Matrix::from_ints(*t, {{1, 2}, {0, 1}});
  const auto fixed = split_theta_eigen(A);
  REQUIRE(fixed.size() == 1);
  CHECK(fixed[0].eigenvalue.equals_at_precision(PadicElem::one(*t)));
  CHECK(fixed[0].component.equals_at_precision(A));
  const auto moving = split_theta_eigen(PadicElem::pi_power(*t, 1) * A);
  REQUIRE(moving.size() == 1);
  CHECK(moving[0].eigenvalue.equals_at_precision(PadicElem::from_int(*t, -1)));

  auto rng = sampling::case_rng(43, 0);
  for (const auto& s : std::vector<std::array<int, 3>>{{3, 2, 1}, {3, 1, 2}, {7, 3, 1}, {7, 3, 2}}) {
    const Tower tw = make_tower(s[0], s[1], s[2], 10);
    for (int i = 0; i < 5; ++i) {
      const Matrix X = sampling::random_matrix(*tw, 2, rng, 1);
      const auto parts = split_theta_eigen(X);
      Matrix sum(*tw, 2, 2);
      for (const auto& c : parts) {
        sum = sum + c.component;
        CHECK(c.component.theta().equals_at_precision(c.eigenvalue * c.component));
        CHECK(is_theta_fixed(c.eigenvalue));
      }
      CHECK(sum.equals_at_precision(X));
    }
  }
  // 4 does not divide 3 - 1, so zeta_4 is not in Q_3
  const Tower u = make_tower(3, 1, 4, 6);
  CHECK_THROWS_AS(split_theta_eigen(Matrix::identity(*u, 1)), RootOfUnityUnavailable);
}

TEST_CASE("coboundary solution agrees with the eigen formula", "[descent]") {
  auto rng = sampling::case_rng(47, 0);
  for (const auto& s : std::vector<std::array<int, 3>>{{3, 2, 1}, {3, 1, 2}, {7, 3, 1}, {7, 3, 2}}) {
    const Tower t = make_tower(s[0], s[1], s[2], 10);
    const LatticePair L{std::max(1, t->e)};
    for (int i = 0; i < 5; ++i) {
      const Matrix X = sampling::random_matrix(*t, 2, rng, L.m);
      const Matrix X2 = L.project_moving(X);
      const Matrix Y = solve_coboundary(X2);
      CHECK((Y - Y.theta()).equals_at_precision(X2));
      Matrix via(*t, 2, 2);
      for (const auto& c : split_theta_eigen(X2)) {
        REQUIRE_FALSE((PadicElem::one(*t) - c.eigenvalue).is_zero());
        via = via + (PadicElem::one(*t) - c.eigenvalue).inverse() * c.component;
      }
      CHECK(via.equals_at_precision(Y));
      CHECK(L.project_fixed(X2).is_zero());
    }
  }
}

TEST_CASE("projectors onto the fixed and moving parts", "[descent]") {
  const Tower t = make_tower(7, 3, 2, 9);
  const LatticePair L{3};
  auto rng = sampling::case_rng(53, 0);
  for (int i = 0; i < 10; ++i) {
    const Matrix X = sampling::random_matrix(*t, 2, rng, 3);
    const Matrix P = L.project_fixed(X);
    const Matrix Q = L.project_moving(X);
    CHECK(P.is_theta_fixed());
    CHECK(L.project_fixed(P).equals_at_precision(P));
    CHECK(L.project_fixed(Q).is_zero());
    CHECK((P + Q).equals_at_precision(X));
    CHECK(L.contains(P));
    CHECK(L.contains(Q));
  }
}

TEST_CASE("Cayley transform maps L onto K_L", "[descent]") {
  const Tower t = make_tower(5, 2, 1, 10);
  const LatticePair L{2};
  const Matrix I = Matrix::identity(*t, 2);
  auto rng = sampling::case_rng(59, 0);
  for (int i = 0; i < 20; ++i) {
    const Matrix X = sampling::random_matrix(*t, 2, rng, L.m);
    CHECK(L.contains(cayley(X) - I));
    const Matrix k = I + sampling::random_matrix(*t, 2, rng, L.m);
    CHECK(L.contains(cayley_inv(k)));
    const Matrix k2 = I + sampling::random_matrix(*t, 2, rng, L.m);
    CHECK(L.contains(k * k2 - I));
    CHECK(L.contains(k.inverse() - I));
  }
}

TEST_CASE("descent on theta-fixed input is immediate", "[descent]") {
  const Tower t = make_tower(3, 2, 1, 10);
  const Matrix k = Matrix::from_ints(*t, {{2, 3}, {9, 1}});
  const Matrix k2 = Matrix::identity(*t, 2) + PadicElem::from_int(*t, 3) * Matrix::from_ints(*t, {{1, 1}, {2, 0}});
  const DescentResult r = descend(k2, LatticePair{2});
  CHECK(r.iterations == 0);
  CHECK(r.g.equals_at_precision(Matrix::identity(*t, 2)));
  CHECK(r.h.equals_at_precision(k2));
  CHECK_THROWS_AS(descend(k, LatticePair{2}), NotInDomain);  // k - 1 has valuation 0
  CHECK_THROWS_AS(descend(k2, LatticePair{1}), NotInDomain);  // m < e
}

TEST_CASE("descent reconstructs k and contracts by e per step", "[descent]") {
  for (const auto& s : kTowers) {
    const Tower t = make_tower(s[0], s[1], s[2], 12);
    for (int m : {std::max(1, t->e), std::max(1, t->e) + 1}) {
      const auto tally = checks::descent_reconstruction(*t, 2, m, 8, 61);
      INFO(tally.name << " " << tally.first_failure);
      CHECK(tally.ok());
    }
    auto rng = sampling::case_rng(67, 0);
    const LatticePair L{std::max(1, t->e)};
    for (int i = 0; i < 6; ++i) {
      const Matrix k = Matrix::identity(*t, 2) + sampling::random_matrix(*t, 2, rng, L.m);
      const DescentResult r = descend(k, L);
      for (std::size_t j = 1; j + 1 < r.trace.size(); ++j)
        CHECK(r.trace[j].x2_valuation - r.trace[j - 1].x2_valuation >= t->e);
      CHECK(r.iterations <= t->precision);
    }
  }
}

// Different starting points in the same twisted class descend to conjugate h.
TEST_CASE("descended h is unique up to conjugacy", "[descent]") {
  const Tower t = make_tower(5, 2, 1, 12);
  const LatticePair L{2};
  const Matrix I = Matrix::identity(*t, 2);
  auto rng = sampling::case_rng(71, 0);
  for (int i = 0; i < 8; ++i) {
    const Matrix k = I + sampling::random_matrix(*t, 2, rng, L.m);
    const Matrix c = I + sampling::random_matrix(*t, 2, rng, L.m);
    const Matrix k2 = c.inverse() * k * c.theta();
    const DescentResult a = descend(k, L);
    const DescentResult b = descend(k2, L);
    CHECK(poly_equal_at_precision(charpoly(a.h), charpoly(b.h)));
  }
}
