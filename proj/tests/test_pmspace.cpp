#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pmtop/pmspace.hpp"

using namespace pmtop;

namespace {

PMSpace rational_p(int dim, double p) { return PMSpace(dim, Family::rational_from, ClassicalModular::p_power(p)); }
PMSpace step_p(int dim, double p) { return PMSpace(dim, Family::step_from, ClassicalModular::p_power(p)); }

SampleBudget small_budget() {
  SampleBudget b;
  b.n_vectors = 2000;
  b.n_scalar_pairs = 2000;
  return b;
}

}  // namespace

TEST_CASE("modular values match the closed forms") {
  const auto p1 = ClassicalModular::p_power(1);
  const auto p2 = ClassicalModular::p_power(2);
  const auto w = ClassicalModular::weighted_abs({0.5, 2.0});
  const std::vector<double> x{1.5, -2.0};
  CHECK(p1(x) == doctest::Approx(oracle::rho_p(x, 1)));
  CHECK(p2(x) == doctest::Approx(oracle::rho_p(x, 2)));
  CHECK(w(x) == doctest::Approx(oracle::rho_w(x, {0.5, 2.0})));
  CHECK(ClassicalModular::p_power(3)(x) == doctest::Approx(oracle::rho_p(x, 3)));
  CHECK_THROWS(ClassicalModular::p_power(0.5));
  CHECK_THROWS(ClassicalModular::weighted_abs({1.0, 0.0}));
}

TEST_CASE("mu examples") {
  CHECK(rational_p(1, 1).mu(Vector{1.0})(1.0) == doctest::Approx(0.5));
  CHECK(step_p(1, 1).mu(Vector{2.0})(3.0) == 1.0);
  for (double t : {1e-6, 1.0, 1e6}) CHECK(rational_p(3, 2).mu(Vector{0, 0, 0})(t) == 1.0);
  CHECK_THROWS_AS(rational_p(2, 1).mu(Vector{1.0}), PreconditionError);
}

TEST_CASE("space validation") {
  CHECK_THROWS(rational_p(0, 1));
  CHECK_THROWS(rational_p(9, 1));
  CHECK_THROWS(PMSpace(2, Family::rational_from, ClassicalModular::weighted_abs({1.0})));
  CHECK_THROWS(PMSpace(1, Family::rational_from, ClassicalModular::p_power(1), -1.0));
  CHECK_THROWS(PMSpace(1, Family::rational_from, ClassicalModular::p_power(1), 2.0, 1.5));
  CHECK_THROWS(PMSpace(1, Family::rational_from, ClassicalModular::p_power(1), 2.0, 1.0,
                       Mutation{MutationKind::break_pm1, 3}));
}

// Independent brute-force PM4 loop before trusting the checker: for
// rational_from(p_power(2)) in two dimensions, mu_{ax+by}(s+t) >= min(mu_x(s), mu_y(t)).
TEST_CASE("brute-force PM4 oracle agrees with check_axioms on rational p=2") {
  Rng rng(12345);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int i = 0; i < 20000; ++i) {
    std::vector<double> x{g(rng), g(rng)}, y{g(rng), g(rng)};
    const double a = u(rng), b = 1.0 - a;
    const double s = std::exp(6.0 * u(rng) - 3.0), t = std::exp(6.0 * u(rng) - 3.0);
    std::vector<double> z{a * x[0] + b * y[0], a * x[1] + b * y[1]};
    const double lhs = oracle::rational(oracle::rho_p(z, 2), s + t);
    const double rhs = std::min(oracle::rational(oracle::rho_p(x, 2), s), oracle::rational(oracle::rho_p(y, 2), t));
    if (lhs < rhs - 1e-12) ++violations;
  }
  CHECK(violations == 0);
  CHECK(check_axioms(rational_p(2, 2), SampleBudget{}).passed());
}

TEST_CASE("check_axioms on reference families") {
  CHECK(check_axioms(PMSpace(1, Family::step_from, ClassicalModular::weighted_abs({1.0})), small_budget()).passed());
  CHECK(check_axioms(rational_p(3, 1), small_budget()).passed());
  const auto r = check_axioms(step_p(2, 2), small_budget());
  CHECK(r.passed());
  CHECK(r.parts.size() == 4);
}

TEST_CASE("each mutation breaks its axiom") {
  const auto b = small_budget();
  for (auto fam : {Family::rational_from, Family::step_from}) {
    for (auto [kind, part] : {std::pair{MutationKind::break_pm1, "pm1"}, std::pair{MutationKind::break_pm2, "pm2"},
                              std::pair{MutationKind::break_pm3, "pm3"}, std::pair{MutationKind::break_pm4, "pm4"}}) {
      CAPTURE(part);
      const PMSpace s(2, fam, ClassicalModular::p_power(1), 2.0, 1.0, Mutation{kind, 1});
      const auto r = check_axioms(s, b);
      CHECK(r.failed());
      CHECK(r.part(part)->failed());
      for (const char* other : {"pm1", "pm2", "pm3", "pm4"}) {
        if (std::string(other) != part) CHECK(r.part(other)->passed());
      }
    }
  }
}

TEST_CASE("symmetric break of PM3 by doubling the negative side") {
  // mu_x = rational(rho(x)) for x >= 0 and rational(2 rho(x)) otherwise, in one dimension.
  SampleBudget b = small_budget();
  int bad = 0;
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = standard_normal(rng);
    const auto f = [](double v) { return v >= 0 ? DistributionFunction::rational(std::fabs(v))
                                                : DistributionFunction::rational(2 * std::fabs(v)); };
    for (double t : b.t_grid) {
      if (std::fabs(f(x)(t) - f(-x)(t)) > b.epsilon) {
        ++bad;
        break;
      }
    }
  }
  CHECK(bad > 900);
}

TEST_CASE("find_delta2_constant examples") {
  const auto b = small_budget();
  CHECK(find_delta2_constant(rational_p(1, 1), b, std::vector<double>{1, 1.5, 2, 4}) == 2.0);
  CHECK(find_delta2_constant(step_p(1, 1), b, std::vector<double>{1, 2, 4}) == 2.0);
  CHECK(find_delta2_constant(rational_p(1, 2), b, std::vector<double>{2, 4, 8}) == 4.0);
  CHECK(find_delta2_constant(rational_p(2, 2), b, default_delta2_candidates()) == 4.0);
  CHECK_FALSE(find_delta2_constant(rational_p(1, 2), b, std::vector<double>{1, 2, 3}).has_value());
  // Brute-force scan for the p=2 constant: c = 4 is tight.
  for (double t : b.t_grid) {
    const double r = 0.7;
    CHECK(oracle::rational(4 * r, t) >= oracle::rational(r, t / 4) - 1e-15);
  }
  CHECK(oracle::rational(4 * 0.7, 1.0) < oracle::rational(0.7, 1.0 / 3.9));
}

TEST_CASE("check_beta_homogeneous") {
  const auto b = small_budget();
  CHECK(check_beta_homogeneous(PMSpace(1, Family::rational_from, ClassicalModular::weighted_abs({1.0})), 1.0, b)
            .passed());
  CHECK(check_beta_homogeneous(rational_p(2, 2), 1.0, b).failed());
  CHECK(check_beta_homogeneous(step_p(3, 1), 1.0, b).passed());
  CHECK_THROWS(check_beta_homogeneous(rational_p(1, 1), 0.0, b));
}

TEST_CASE("check_upsilon_space") {
  const auto b = small_budget();
  CHECK(check_upsilon_space(rational_p(1, 1), b).passed());
  CHECK(check_upsilon_space(step_p(1, 1), b).failed());
  const std::vector<Vector> only_zero{Vector{0.0}, Vector{0.0}};
  const auto r = check_upsilon_space(rational_p(1, 1), only_zero, b);
  CHECK(r.passed());
  CHECK(r.params.at("nonzero_samples") == 0.0);
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("sampled checks are reproducible and independent of the worker count") {
  const auto b = small_budget();
  const PMSpace s(3, Family::rational_from, ClassicalModular::p_power(1), 2.0, 1.0,
                  Mutation{MutationKind::break_pm4, 0});
  const auto r1 = check_axioms(s, b);
  setenv("PM_TOPOLOGY_THREADS", "1", 1);
  const auto r2 = check_axioms(s, b);
  unsetenv("PM_TOPOLOGY_THREADS");
  CHECK(r1 == r2);
}
