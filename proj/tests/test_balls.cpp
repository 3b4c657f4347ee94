#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pmtop/balls.hpp"

using namespace pmtop;

namespace {

PMSpace rat1(int dim = 1) { return PMSpace(dim, Family::rational_from, ClassicalModular::p_power(1), 2.0, 1.0); }

}  // namespace

TEST_CASE("contains examples") {
  const auto s = rat1();
  const Ball b = make_ball({0.0}, 0.5, 1.0);
  CHECK(contains(s, b, Vector{0.9}));
  CHECK_FALSE(contains(s, b, Vector{1.1}));
  CHECK(contains(s, b, Vector{0.0}));
  CHECK_THROWS_AS(make_ball({0.0}, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(make_ball({0.0}, 0.5, 0.0), PreconditionError);
}

TEST_CASE("contains agrees with the radius oracle") {
  Rng rng(3);
  for (auto fam : {Family::rational_from, Family::step_from}) {
    const PMSpace s(2, fam, ClassicalModular::p_power(1));
    for (int i = 0; i < 5000; ++i) {
      const Vector x = random_vector(rng, 2), y = random_vector(rng, 2);
      const double level = 0.05 + 0.9 * uniform01(rng);
      const double scale = std::exp(4 * uniform01(rng) - 2);
      const double r = oracle::rho_p(oracle::diff(x, y), 1);
      const double radius = fam == Family::rational_from ? oracle::rational_radius(level, scale)
                                                         : oracle::step_radius(scale);
      if (std::fabs(r - radius) < 1e-9 * radius) continue;
      CHECK(contains(s, Ball{x, level, scale}, y) == (r < radius));
    }
  }
}

TEST_CASE("sampled members are members") {
  const auto s = rat1(3);
  Rng rng(11);
  for (double scale : {1e-3, 1.0, 1e3}) {
    const Ball b{Vector{1, 2, 3}, 0.3, scale};
    BallSampler sampler(s, b, rng);
    const auto m = sampler.members(100);
    CHECK(m.size() == 100);
    for (const auto& y : m) {
      CHECK(oracle::rho_p(oracle::diff(b.center, y), 1) < oracle::rational_radius(0.3, scale));
    }
  }
}

TEST_CASE("lemma1_witness examples") {
  const auto s = rat1();
  const double ts = lemma1_witness(s, make_ball({0.0}, 0.6, 1.0), Vector{1.0});
  CHECK(ts > 2.0 / 3.0);
  CHECK(ts < 1.0);
  CHECK(ts == doctest::Approx((2.0 / 3.0 + 1.0) / 2.0).epsilon(1e-9));
  CHECK(lemma1_witness(s, make_ball({0.0}, 0.6, 1.0), Vector{0.0}) == doctest::Approx(0.5).epsilon(1e-9));

  const PMSpace st(1, Family::step_from, ClassicalModular::p_power(1));
  const double t2 = lemma1_witness(st, make_ball({0.0}, 0.5, 1.0), Vector{0.999});
  CHECK(t2 > 0.999);
  CHECK(t2 < 1.0);
  CHECK(t2 == doctest::Approx(0.9995).epsilon(1e-9));

  CHECK_THROWS_AS(lemma1_witness(s, make_ball({0.0}, 0.5, 1.0), Vector{2.0}), PreconditionError);

  // A right-continuous jump at the scale leaves no room below it.
  const PMSpace closed(1, Family::step_from, ClassicalModular::p_power(1), 2.0, 1.0,
                       Mutation{MutationKind::break_left_continuity, 0});
  CHECK_THROWS_AS(lemma1_witness(closed, make_ball({0.0}, 0.5, 1.0), Vector{1.0}), InfeasibleError);
}

TEST_CASE("translate_identity") {
  SampleBudget b;
  const auto s = rat1(2);
  CHECK(translate_identity(s, {3.0, -1.0}, 0.5, 1.0, b).passed());
  CHECK(translate_identity(s, {0.0, 0.0}, 0.5, 1.0, b).passed());
  const Membership broken = [](const PMSpace& sp, const Ball& ball, std::span<const double> y) {
    return sp.mu(add(ball.center, y))(ball.scale) > 1.0 - ball.level;
  };
  CHECK(translate_identity(s, {3.0, -1.0}, 0.5, 1.0, b, broken).failed());
}

TEST_CASE("scaling_identity") {
  SampleBudget b;
  b.n_scalar_pairs = 2000;
  const PMSpace w(1, Family::rational_from, ClassicalModular::weighted_abs({1.0}));
  CHECK(scaling_identity(w, 1.0, 0.5, 2.0, b).passed());
  CHECK(scaling_identity(w, 1.0, 0.5, 1.0, b).passed());
  const PMSpace p2(2, Family::rational_from, ClassicalModular::p_power(2));
  CHECK(scaling_identity(p2, 1.0, 0.5, 2.0, b).failed());
  // The identity happens to hold at t = 1 even though the exponent is wrong.
  const auto r = scaling_identity(p2, 1.0, 0.5, 1.0, b);
  CHECK(r.infeasible());
}

TEST_CASE("monotonicity in scale and level") {
  SampleBudget b;
  const auto s = rat1(2);
  CHECK(monotone_in_scale(s, 0.5, 1.0, 2.0, b).passed());
  CHECK(monotone_in_scale(s, 0.5, 1.0, 1.0, b).passed());
  CHECK_THROWS_AS(monotone_in_scale(s, 0.5, 2.0, 1.0, b), PreconditionError);
  CHECK(monotone_in_level(s, 0.2, 0.7, 1.0, b).passed());
  CHECK(monotone_in_level(s, 0.4, 0.4, 1.0, b).passed());
  CHECK_THROWS_AS(monotone_in_level(s, 0.7, 0.2, 1.0, b), PreconditionError);
}

TEST_CASE("balanced and convex balls") {
  SampleBudget b;
  const auto s = rat1(2);
  const Ball ball = make_ball({0.0, 0.0}, 0.5, 1.0);
  CHECK(is_balanced_sampled(s, ball, b).passed());
  CHECK(is_convex_sampled(s, ball, b).passed());
  CHECK_THROWS_AS(is_balanced_sampled(s, make_ball({1.0, 0.0}, 0.5, 1.0), b), PreconditionError);
  CHECK_THROWS_AS(is_convex_sampled(s, make_ball({1.0, 0.0}, 0.5, 1.0), b), PreconditionError);

  // Union of two disjoint balls, tested as if it were one set.
  const Ball left = make_ball({-3.0, 0.0}, 0.5, 1.0), right = make_ball({3.0, 0.0}, 0.5, 1.0);
  SampledSet both{
      [&](std::span<const double> y) { return contains(s, left, y) || contains(s, right, y); },
      [&](std::size_t n, Rng& rng) {
        auto a = BallSampler(s, left, rng).members(n / 2);
        auto c = BallSampler(s, right, rng).members(n - n / 2);
        std::vector<Vector> out;
        for (std::size_t i = 0; i < std::max(a.size(), c.size()); ++i) {
          if (i < a.size()) out.push_back(a[i]);
          if (i < c.size()) out.push_back(c[i]);
        }
        return out;
      }};
  CHECK(check_convex(both, b).failed());
}
