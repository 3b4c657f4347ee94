#include <doctest.h>

#include "oracles.hpp"
#include "pmtop/distfn.hpp"

using namespace pmtop;
using DF = DistributionFunction;

TEST_CASE("eval follows the kind semantics") {
  CHECK(DF::rational(1)(1.0) == doctest::Approx(0.5));
  CHECK(DF::step(2)(2.0) == 0.0);
  CHECK(DF::step(2)(2.0000001) == 1.0);
  CHECK(DF::rational(1)(-1.0) == 0.0);
  CHECK(DF::step(1)(-1.0) == 0.0);
  CHECK(DF::rational(0)(1e-300) == 1.0);
  CHECK(DF::rational(0)(0.0) == 0.0);
  for (double t : {1e-3, 0.1, 1.0, 7.5, 1e3}) {
    CHECK(DF::rational(3.0)(t) == doctest::Approx(oracle::rational(3.0, t)).epsilon(1e-15));
    CHECK(DF::step(3.0)(t) == oracle::step(3.0, t));
  }
}

TEST_CASE("closed step is right-continuous") {
  CHECK(DF::step(1, true)(1.0) == 1.0);
  CHECK(DF::step(1, true)(0.999) == 0.0);
}

TEST_CASE("piecewise linear interpolates between breakpoints") {
  const auto f = DF::piecewise_linear({{1.0, 0.2}, {3.0, 1.0}});
  CHECK(f(0.5) == 0.0);
  CHECK(f(1.0) == doctest::Approx(0.2));
  CHECK(f(2.0) == doctest::Approx(0.6));
  CHECK(f(10.0) == 1.0);
  CHECK(f.critical_points() == std::vector<double>{1.0, 3.0});
}

TEST_CASE("pointwise_min") {
  CHECK(pointwise_min(DF::rational(1), DF::rational(3), 1.0) == doctest::Approx(0.25));
  const auto f = DF::rational(2);
  for (double t : {0.1, 1.0, 5.0}) CHECK(pointwise_min(f, f, t) == f(t));
  CHECK(pointwise_min(DF::step(1), DF::step(2), 1.5) == 0.0);
}

TEST_CASE("origin mass places an atom at zero") {
  const auto f = DF::rational(1, 0.1);
  CHECK(f(0.0) == doctest::Approx(0.1));
  CHECK(f(-1e-12) == 0.0);
  CHECK(f(1.0) == doctest::Approx(0.5));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS(DF::rational(-1));
  CHECK_THROWS(DF::step(-1));
  CHECK_THROWS(DF::piecewise_linear({}));
  CHECK_THROWS(DF::rational(1, 1.5));
}

TEST_CASE("check_delta_membership") {
  SampleBudget b;
  CHECK(check_delta_membership(DF::rational(2), b).passed());
  CHECK(check_delta_membership(DF::step(0), b).passed());
  CHECK(check_delta_membership(DF::step(5), b).passed());
  const auto r = check_delta_membership(DF::piecewise_linear({{0.0, 0.5}, {1.0, 0.2}}), b);
  CHECK(r.failed());
  // Never reaching 1 is not a distribution function.
  CHECK(check_delta_membership(DF::piecewise_linear({{1.0, 0.0}, {2.0, 0.7}}), b).failed());
}

TEST_CASE("check_left_continuity") {
  SampleBudget b;
  CHECK(check_left_continuity(DF::rational(1), 1.0, b).passed());
  CHECK(check_left_continuity(DF::step(1), 1.0, b).passed());
  CHECK(check_left_continuity(DF::step(1, true), 1.0, b).failed());
  // A jump represented by two breakpoints closer than the smallest probe step.
  const double t = 1.0 + 1e-12;
  const auto jump = DF::piecewise_linear({{1.0, 0.2}, {t, 0.8}, {2.0, 1.0}});
  CHECK(check_left_continuity(jump, t, b).failed());
  CHECK_THROWS_AS(check_left_continuity(DF::rational(1), 0.0, b), PreconditionError);
}

TEST_CASE("check_upsilon") {
  SampleBudget b;
  CHECK(check_upsilon(DF::rational(1), b).passed());
  CHECK(check_upsilon(DF::step(1), b).failed());
  // Flat interior segment between values 0 and 1.
  const auto flat = DF::piecewise_linear({{0.01, 0.0}, {0.1, 0.5}, {10.0, 0.5}, {100.0, 1.0}});
  const auto r = check_upsilon(flat, b);
  CHECK(r.failed());
  REQUIRE(r.part("strict_increase") != nullptr);
  CHECK(r.part("strict_increase")->failed());
  CHECK(r.part("continuity")->passed());
}
