#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <random>

#include "gfs2d/weights.hpp"

using namespace gfs2d;

TEST_CASE("built-in weight formulas") {
  const Weight wx = Weight::example_x(0.0, 1.0);
  CHECK(wx.eval(0.0, 1.7) == 0.0);
  CHECK(wx.eval(kPi, 0.3) == Catch::Approx(1.0));

  const Weight ws = Weight::example_sum(1.0, 2.0, 0.7);
  CHECK(ws.eval(1.0, 2.0) == 0.0);
  CHECK(ws.eval(1.0 + kPi, 2.0 + kPi) == Catch::Approx(2.0));

  const Weight wc = Weight::constant(1.0);
  CHECK(wc.eval(0.1, 0.2) == 1.0);
}

TEST_CASE("line weight is independent of y") {
  const Weight w = Weight::example_x(1.3, 0.6);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    const double x = uni(rng), y1 = uni(rng), y2 = uni(rng);
    CHECK(w.eval(x, y1) == w.eval(x, y2));
  }
}

TEST_CASE("singular set metadata") {
  CHECK(Weight::example_x(0.5, 1.0).singular_set().kind == SingularSet::Kind::LineX);
  CHECK(Weight::example_sum(0.5, 1.5, 1.0).singular_set().kind == SingularSet::Kind::Point);
  CHECK(Weight::constant(2.0).singular_set().kind == SingularSet::Kind::Empty);
  CHECK(Weight::tabulated(4, 4, std::vector<double>(16, 0.5)).singular_set().kind ==
        SingularSet::Kind::Empty);
}

TEST_CASE("tabulated weights take the modulus on ingestion") {
  std::vector<double> vals(16, 1.0);
  vals[3] = -2.0;
  const Weight w = Weight::tabulated(4, 4, vals);
  CHECK(w.min_table_value() >= 0.0);
  CHECK(w.eval(0.0, kTwoPi * 3 / 4) == Catch::Approx(2.0));
}

TEST_CASE("weight CSV round trip") {
  const std::string path = "test_weight_roundtrip.csv";
  {
    std::ofstream out(path);
    out << "4,3\n";
    out << "1,2,3\n4,5,6\n7,8,9\n10,11,12\n";
  }
  const Weight w = Weight::from_csv(path);
  // grid nodes reproduce table values exactly
  CHECK(w.eval(0.0, 0.0) == Catch::Approx(1.0));
  CHECK(w.eval(kTwoPi / 4, kTwoPi / 3) == Catch::Approx(5.0));
  CHECK(w.eval(kTwoPi * 3 / 4, kTwoPi * 2 / 3) == Catch::Approx(12.0));
  // bilinear midpoint
  CHECK(w.eval(kTwoPi / 8, 0.0) == Catch::Approx(2.5));
  std::remove(path.c_str());

  CHECK_THROWS_AS(Weight::from_csv("does_not_exist.csv"), std::runtime_error);
}

TEST_CASE("phase functions are unimodular where declared") {
  const PhaseFunction pc = PhaseFunction::constant_unimodular(0.7);
  const PhaseFunction ph = PhaseFunction::first_harmonic();
  for (int j = 0; j < 64; ++j) {
    const double y = kTwoPi * j / 64;
    CHECK(std::abs(pc.eval(y)) == Catch::Approx(1.0));
    CHECK(std::abs(ph.eval(y)) == Catch::Approx(1.0));
  }
}

TEST_CASE("phase powers use the conjugate for negative exponents") {
  const PhaseFunction p = PhaseFunction::constant_unimodular(0.9);
  CHECK(std::abs(p.power(0.0, 3) - std::polar(1.0, 2.7)) < 1e-14);
  CHECK(std::abs(p.power(0.0, -3) - std::polar(1.0, -2.7)) < 1e-14);
  CHECK(p.power(1.0, 0) == Complex(1.0, 0.0));

  const PhaseFunction h = PhaseFunction::first_harmonic();
  CHECK(std::abs(h.power(0.5, -2) - std::polar(1.0, -1.0)) < 1e-14);
}

TEST_CASE("check_upsilon") {
  const auto c = check_upsilon(PhaseFunction::constant_unimodular(0.4));
  CHECK(c.in_upsilon);
  CHECK_FALSE(c.in_upsilon0);
  CHECK(c.ess_lo == Catch::Approx(1.0));
  CHECK(c.ess_hi == Catch::Approx(1.0));
  CHECK(std::abs(c.mean - std::polar(1.0, 0.4)) < 1e-12);

  const auto h = check_upsilon(PhaseFunction::first_harmonic());
  CHECK(h.in_upsilon);
  CHECK(h.in_upsilon0);
  CHECK(std::abs(h.mean) < 1e-12);

  const auto t = check_upsilon(PhaseFunction::tabulated(std::vector<Complex>(32, Complex(0.1, 0))));
  CHECK(t.in_upsilon);
  CHECK_FALSE(t.in_upsilon0);
  CHECK(t.ess_lo == Catch::Approx(0.1));
  CHECK(t.ess_hi == Catch::Approx(0.1));
  CHECK(std::abs(t.mean - Complex(0.1, 0)) < 1e-12);

  // zeros knock the phase out of the invertible class, without an error
  std::vector<Complex> with_zero(32, Complex(1.0, 0));
  with_zero[5] = Complex(0.0, 0.0);
  CHECK_FALSE(check_upsilon(PhaseFunction::tabulated(with_zero)).in_upsilon);
}

TEST_CASE("suggest_phase") {
  const Weight wx = Weight::example_x(1.0, 0.7);
  const PhaseFunction p = suggest_phase(wx);
  CHECK(p.kind() == PhaseFunction::Kind::ConstantUnimodular);
  CHECK(p.x0() == Catch::Approx(1.0));
  // the phase traces the zero set: evaluating the weight at arg(P(y)) gives 0
  for (int j = 0; j < 32; ++j) {
    const double y = kTwoPi * j / 32;
    CHECK(wx.eval(std::arg(p.eval(y)) + (std::arg(p.eval(y)) < 0 ? kTwoPi : 0.0), y) == 0.0);
  }

  CHECK_THROWS_AS(suggest_phase(Weight::example_sum(1.0, 2.0, 0.7)), NoLineSingularity);
  CHECK_THROWS_AS(suggest_phase(Weight::tabulated(4, 4, std::vector<double>(16, 1.0))),
                  NoLineSingularity);
}
