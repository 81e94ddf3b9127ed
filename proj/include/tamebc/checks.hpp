#pragma once

// Randomized property checks shared by the self-check, the invariants mode
// and the acceptance run.  Each check samples from its own generator and
// returns a tally; any exception inside a sample counts as a failure.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tamebc/descent.hpp"
#include "tamebc/localfield.hpp"
#include "tamebc/matgrp.hpp"
#include "tamebc/orbital.hpp"
#include "tamebc/sampling.hpp"

namespace tamebc::checks {

struct Tally {
  std::string name;
  long long passed = 0;
  long long total = 0;
  std::string first_failure;

  Tally() = default;
  explicit Tally(std::string n) : name(std::move(n)) {}

  bool ok() const { return total > 0 && passed == total; }
  void record(bool good, const std::string& what) {
    ++total;
    if (good) {
      ++passed;
    } else if (first_failure.empty()) {
      first_failure = what;
    }
  }
  void merge(const Tally& o) {
    passed += o.passed;
    total += o.total;
    if (first_failure.empty()) first_failure = o.first_failure;
  }
};

/// Runs `body` once per sample, catching library errors as failures.
inline void run_samples(Tally& tally, int samples, const std::function<bool(int, std::string&)>& body) {
  for (int s = 0; s < samples; ++s) {
    std::string why;
    bool good = false;
    try {
      good = body(s, why);
    } catch (const Error& ex) {
      why = std::string(ex.kind()) + ": " + ex.what();
    }
    tally.record(good, "sample " + std::to_string(s) + (why.empty() ? "" : ": " + why));
  }
}

inline std::string tower_label(const TowerSpec& t) {
  return "(" + std::to_string(t.p) + "," + std::to_string(t.e) + "," + std::to_string(t.f) + ")";
}

/// theta is a ring automorphism of order d; norm and trace land in F.
inline Tally theta_automorphism(const TowerSpec& t, int samples, std::uint64_t seed) {
  Tally tally{"theta automorphism " + tower_label(t)};
  auto rng = sampling::case_rng(seed, 0);
  run_samples(tally, samples, [&](int, std::string& why) {
    const PadicElem x = sampling::random_integral(t, rng, static_cast<int>(sampling::uniform(rng, 3)) - 1);
    const PadicElem y = sampling::random_integral(t, rng, static_cast<int>(sampling::uniform(rng, 3)) - 1);
    if (!(x + y).theta().equals_at_precision(x.theta() + y.theta())) why = "theta(x+y)";
    if (!(x * y).theta().equals_at_precision(x.theta() * y.theta())) why = "theta(xy)";
    if (!x.theta_pow(0).equals_at_precision(x)) why = "theta^0";
    PadicElem z = x;
    for (int i = 0; i < t.d; ++i) z = z.theta();
    if (!z.equals_at_precision(x)) why = "theta^d != id";
    const NormTrace nt = norm_trace(x);
    if (!is_theta_fixed(nt.norm) || !is_theta_fixed(nt.trace)) why = "norm/trace not in F";
    return why.empty();
  });
  return tally;
}

/// Membership in K_E(m)^theta agrees with membership in K_F(ceil(m/e)).
inline Tally theta_level_cell(i64 p, int e, int m, int samples, std::uint64_t seed) {
  const int kp = theta_fixed_level(e, m);
  const Tower tw = make_tower(p, e, 1, e * (kp + 2) + 2);
  const TowerSpec& t = *tw;
  Tally tally{"K_E(" + std::to_string(m) + ")^theta = K_F(" + std::to_string(kp) + ") p=" + std::to_string(p) +
              " e=" + std::to_string(e)};
  auto rng = sampling::case_rng(seed, static_cast<std::uint64_t>(p * 1000 + e * 100 + m));
  const int n = 2;
  const Matrix I = Matrix::identity(t, n);
  long long inside = 0;
  run_samples(tally, samples, [&](int s, std::string& why) {
    const int a = static_cast<int>(sampling::uniform(rng, m + e + 1));
    Matrix M;
    switch (s % 3) {
      case 0:  // theta-fixed of valuation >= a
        M = I + theta_average(sampling::random_matrix(t, n, rng, a));
        break;
      case 1:  // F-rational, p-adic level
        M = I + sampling::random_matrix_F(t, n, rng, a / e);
        break;
      default:  // generic
        M = I + sampling::random_matrix(t, n, rng, a);
        break;
    }
    const bool lhs = in_congruence(M, {Side::E, m}) && M.is_theta_fixed();
    const bool rhs = in_congruence(M, {Side::F, kp});
    inside += lhs ? 1 : 0;
    if (lhs != rhs) why = "membership differs";
    return lhs == rhs;
  });
  if (inside == 0 || inside == tally.total) tally.record(false, "sampling never crossed the level boundary");
  return tally;
}

/// Cayley transform: inverse pair, c(-X) = c(X)^{-1}, Int(J) c = c Ad(J), c dtheta = theta c.
inline Tally cayley_identities(const TowerSpec& t, int n, int samples, std::uint64_t seed) {
  Tally tally{"Cayley identities " + tower_label(t)};
  auto rng = sampling::case_rng(seed, 1);
  run_samples(tally, samples, [&](int, std::string& why) {
    const Matrix X = sampling::random_top_nilpotent(t, n, rng);
    const Matrix c = cayley(X);
    if (!is_top_unipotent(c)) why = "c(X) not topologically unipotent";
    if (!cayley_inv(c).equals_at_precision(X)) why = "cayley_inv(cayley(X)) != X";
    if (!cayley(-X).equals_at_precision(c.inverse())) why = "c(-X) != c(X)^-1";
    const Matrix J = sampling::random_gl(t, n, rng);
    const Matrix Ji = J.inverse();
    if (!(J * c * Ji).equals_at_precision(cayley(J * X * Ji))) why = "Int(J) c != c Ad(J)";
    if (!cayley(X.theta()).equals_at_precision(c.theta())) why = "c dtheta != theta c";
    return why.empty();
  });
  return tally;
}

/// descend(k) reconstructs k = g h theta(g)^{-1} with h theta-fixed in K_L.
inline Tally descent_reconstruction(const TowerSpec& t, int n, int m, int samples, std::uint64_t seed) {
  Tally tally{"descent reconstruction " + tower_label(t) + " m=" + std::to_string(m)};
  auto rng = sampling::case_rng(seed, 2);
  const Matrix I = Matrix::identity(t, n);
  run_samples(tally, samples, [&](int, std::string& why) {
    const Matrix k = I + sampling::random_matrix(t, n, rng, m);
    const DescentResult r = descend(k, LatticePair{m});
    if (!r.h.is_theta_fixed()) why = "h not theta-fixed";
    if ((r.h - I).min_valuation() < m) why = "h not in K_L";
    if (!(r.g * r.h * r.g.theta().inverse()).equals_at_precision(k)) why = "g h theta(g)^-1 != k";
    if (r.iterations > t.precision) why = "iteration count above precision";
    return why.empty();
  });
  return tally;
}

/// D for gamma ⋊ theta equals D_H(gamma) on topologically unipotent regular gamma.
inline Tally d_factor_coherence(const TowerSpec& t, int n, int samples, std::uint64_t seed) {
  Tally tally{"D-factor coherence " + tower_label(t)};
  auto rng = sampling::case_rng(seed, 3);
  run_samples(tally, samples, [&](int, std::string& why) {
    const auto gamma = sampling::random_tu_regular_F(t, n, rng);
    if (!gamma) {
      why = "no regular sample";
      return false;
    }
    const Rational dh = normalizing_factor_H(*gamma);
    const Rational dt = normalizing_factor_twisted({*gamma});
    if (dh != dt) why = "D_H " + to_string(dh) + " vs D_tw " + to_string(dt);
    return why.empty();
  });
  return tally;
}

/// root(gamma)^d = gamma, root(r^d) = r, and the root is topologically unipotent.
inline Tally dth_root_homeomorphism(const TowerSpec& t, int n, int samples, std::uint64_t seed) {
  Tally tally{"d-th root " + tower_label(t)};
  auto rng = sampling::case_rng(seed, 4);
  const auto d = static_cast<std::uint64_t>(t.d);
  run_samples(tally, samples, [&](int, std::string& why) {
    const Matrix gamma = cayley(sampling::random_matrix_F(t, n, rng, 1));
    const Matrix r = dth_root_tu(gamma, t.d);
    if (!r.pow(d).equals_at_precision(gamma)) why = "root^d != gamma";
    if (!is_top_unipotent(r)) why = "root not topologically unipotent";
    if (!r.is_theta_fixed()) why = "root left H(F)";
    const Matrix s = cayley(sampling::random_matrix_F(t, n, rng, 1));
    if (!dth_root_tu(s.pow(d), t.d).equals_at_precision(s)) why = "root(s^d) != s";
    return why.empty();
  });
  return tally;
}

/// Matching dichotomy over gamma = u p^v, v in [-2, 2], u over unit classes mod p^2.
inline Tally rank1_matching_sweep(const TowerSpec& t, int m, int depth) {
  Tally tally{"n=1 matching " + tower_label(t) + " m=" + std::to_string(m)};
  const HaarNormalization hn;
  for (int v = -2; v <= 2; ++v)
    for (i64 u = 1; u < t.p * t.p; ++u) {
      if (u % t.p == 0) continue;
      std::string why;
      bool good = false;
      try {
        const Matrix gamma = Matrix::diagonal(t, {sampling::rank1_class(t, u, v)});
        const MatchReport r = check_matching(gamma, m, hn, depth);
        good = r.pass && r.certified();
        if (r.norm_status == NormStatus::NotNorm && r.lhs.value != 0) good = false;
        if (r.norm_status == NormStatus::Undetermined) good = false;
        if (!good) why = "lhs " + to_string(r.lhs.value) + " rhs " + to_string(r.rhs.value);
      } catch (const Error& ex) {
        why = std::string(ex.kind()) + ": " + ex.what();
      }
      tally.record(good, "u=" + std::to_string(u) + " v=" + std::to_string(v) + " " + why);
    }
  return tally;
}

}  // namespace tamebc::checks
