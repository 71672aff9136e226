#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gfs2d/core.hpp"

using namespace gfs2d;

TEST_CASE("conjugate exponent") {
  CHECK(conjugate_exponent(2.0) == Catch::Approx(2.0));
  CHECK(conjugate_exponent(4.0) == Catch::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(conjugate_exponent(1.0), UnsupportedExponent);
  CHECK_THROWS_AS(conjugate_exponent(0.5), UnsupportedExponent);
  CHECK_THROWS_AS(conjugate_exponent(std::numeric_limits<double>::infinity()),
                  UnsupportedExponent);
  CHECK_THROWS_AS(conjugate_exponent(std::numeric_limits<double>::quiet_NaN()),
                  UnsupportedExponent);
}

TEST_CASE("conjugate exponent is an involution on (1,100]") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(1.0 + 1e-6, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double p = uni(rng);
    CHECK(std::fabs(conjugate_exponent(conjugate_exponent(p)) - p) < 1e-12 * p);
  }
  CHECK(std::fabs(conjugate_exponent(conjugate_exponent(100.0)) - 100.0) < 1e-10);
}

TEST_CASE("LebesgueExponent holds the defining identity") {
  for (double p : {1.2, 1.5, 2.0, 3.0, 7.5}) {
    const LebesgueExponent e(p);
    CHECK(std::fabs(1.0 / e.p() + 1.0 / e.conj() - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(LebesgueExponent(1.0), UnsupportedExponent);
}

TEST_CASE("omega_contains") {
  CHECK_FALSE(omega_contains(ExclusionPattern::column_z(), {0, 5}));
  CHECK(omega_contains(ExclusionPattern::column_z0(), {0, 0}));
  CHECK_FALSE(omega_contains(ExclusionPattern::column_z0(), {0, 5}));
  CHECK(omega_contains(ExclusionPattern::point(0, 0), {1, 0}));
  CHECK_FALSE(omega_contains(ExclusionPattern::point(3, -2), {3, -2}));
}

TEST_CASE("omega partitions the lattice") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coord(-50, 50);
  const ExclusionPattern patterns[] = {ExclusionPattern::point(3, -2),
                                       ExclusionPattern::column_z(),
                                       ExclusionPattern::column_z0()};
  for (const auto& pat : patterns)
    for (int i = 0; i < 1000; ++i) {
      const FreqIndex idx{coord(rng), coord(rng)};
      const bool in_omega = omega_contains(pat, idx);
      const bool in_complement = [&] {
        switch (pat.kind()) {
          case ExclusionPattern::Kind::Point:
            return idx.k == pat.nu() && idx.m == pat.mu();
          case ExclusionPattern::Kind::ColumnZ:
            return idx.k == 0;
          case ExclusionPattern::Kind::ColumnZ0:
            return idx.k == 0 && idx.m != 0;
        }
        return false;
      }();
      CHECK(in_omega != in_complement);
    }
}

TEST_CASE("modulate_pattern") {
  const auto mod = modulate_pattern(ExclusionPattern::point(3, -2));
  CHECK(mod.canonical == ExclusionPattern::point(0, 0));
  CHECK(mod.phase_nu == 3);
  CHECK(mod.phase_mu == -2);

  const auto ident = modulate_pattern(ExclusionPattern::point(0, 0));
  CHECK(ident.phase_nu == 0);
  CHECK(ident.phase_mu == 0);

  CHECK_THROWS_AS(modulate_pattern(ExclusionPattern::column_z()), PatternMismatch);
}

TEST_CASE("torus grid nodes are exactly 2*pi*j/n") {
  const TorusGrid g(8, 16);
  CHECK(g.x(0) == 0.0);
  CHECK(g.x(4) == Catch::Approx(kPi));
  CHECK(g.y(8) == Catch::Approx(kPi));
  for (int i = 1; i < 8; ++i) CHECK(g.x(i) - g.x(i - 1) == Catch::Approx(g.dx()));
}

TEST_CASE("angle wrapping") {
  CHECK(wrap_angle(-0.5) == Catch::Approx(kTwoPi - 0.5));
  CHECK(wrap_delta(kTwoPi - 0.25) == Catch::Approx(-0.25));
  CHECK(wrap_delta(kPi) == Catch::Approx(kPi));
  CHECK(torus_dist(0.1, kTwoPi - 0.1) == Catch::Approx(0.2));
}

TEST_CASE("window enumeration: ring order, omega-filtered, deterministic") {
  const auto win = enumerate_window(ExclusionPattern::column_z(), 2);
  for (const auto& idx : win) CHECK(idx.k != 0);
  // rings are nondecreasing in max(|k|,|m|)
  int prev = 0;
  for (const auto& idx : win) {
    const int r = std::max(std::abs(idx.k), std::abs(idx.m));
    CHECK(r >= prev);
    prev = r;
  }
  CHECK(win == enumerate_window(ExclusionPattern::column_z(), 2));

  const auto win0 = enumerate_window(ExclusionPattern::point(0, 0), 1);
  CHECK(win0.size() == 8);  // 3x3 minus the excluded origin
}
