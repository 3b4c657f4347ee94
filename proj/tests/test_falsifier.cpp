#include <doctest.h>

#include "pmtop/balls.hpp"
#include "pmtop/falsifier.hpp"

using namespace pmtop;

TEST_CASE("generate_instance is deterministic") {
  for (std::uint64_t seed : {0u, 1u, 17u}) {
    CHECK(generate_instance(seed, Family::rational_from) == generate_instance(seed, Family::rational_from));
    CHECK(generate_instance(seed, Family::step_from, MutationKind::break_pm3) ==
          generate_instance(seed, Family::step_from, MutationKind::break_pm3));
  }
  const auto s = generate_instance(1, Family::rational_from);
  CHECK(s.dim() >= 1);
  CHECK(s.dim() <= 4);
  CHECK_FALSE(s.mutation());
  REQUIRE(s.declared_c());
  CHECK(*s.declared_c() == true_delta2_constant(s.modular()));
}

TEST_CASE("valid seed passes the axioms") {
  CHECK(check_axioms(generate_instance(1, Family::rational_from), SampleBudget{}).passed());
}

TEST_CASE("break_pm3 fails PM3 and only PM3 among the axioms") {
  const auto r = check_axioms(generate_instance(1, Family::rational_from, MutationKind::break_pm3), SampleBudget{});
  CHECK(r.part("pm3")->failed());
  CHECK(r.part("pm1")->passed());
  CHECK(r.part("pm2")->passed());
  CHECK(r.part("pm4")->passed());
}

TEST_CASE("break_left_continuity defeats lemma1 on boundary-adjacent members") {
  const auto s = generate_instance(1, Family::step_from, MutationKind::break_left_continuity);
  const Vector x(static_cast<std::size_t>(s.dim()), 0.0);
  const Vector y = unit(s.dim(), 0);
  const double theta = s.modular_value(y);
  CHECK_THROWS_AS(lemma1_witness(s, Ball{x, 0.5, theta}, y), InfeasibleError);
}

TEST_CASE("registry on valid instances") {
  SampleBudget b;
  b.n_vectors = b.n_scalar_pairs = 2000;
  const auto rat = run_registry(generate_instance(3, Family::rational_from), b);
  CHECK(rat.results.size() == registry_predicates().size());
  CHECK(rat.failures() == 0);
  const auto step = run_registry(generate_instance(3, Family::step_from), b);
  CHECK(step.failures() == 0);
  CHECK(step.results.at("refine_ball").passed());
  CHECK(step.results.at("separation").passed());
  CHECK(step.results.at("upsilon").infeasible());
  CHECK(step.results.at("homogeneous_separation").infeasible());
  CHECK(step.results.at("addition_continuity").infeasible());
}

TEST_CASE("registry detects every mutation and gates dependent predicates") {
  SampleBudget b;
  b.n_vectors = b.n_scalar_pairs = 2000;
  for (auto m : kAllMutations) {
    CAPTURE(to_string(m));
    const auto run = run_registry(generate_instance(5, Family::rational_from, m), b);
    CHECK(run.results.at(target_predicate(m)).failed());
  }
  const auto pm4 = run_registry(generate_instance(5, Family::rational_from, MutationKind::break_pm4), b);
  CHECK(pm4.results.at("refine_ball").infeasible());
  CHECK(pm4.results.at("separation").infeasible());
}

TEST_CASE("registry runs are reproducible") {
  SampleBudget b;
  b.n_vectors = b.n_scalar_pairs = 1000;
  b.rng_seed = 9;
  const auto s = generate_instance(9, Family::step_from, MutationKind::break_delta2_declaration);
  const auto r1 = run_registry(s, b);
  const auto r2 = run_registry(s, b);
  CHECK(r1.results == r2.results);
}
