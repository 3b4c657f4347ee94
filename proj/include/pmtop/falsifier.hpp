#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmtop/pmspace.hpp"
#include "pmtop/report.hpp"
#include "pmtop/sampling.hpp"

namespace pmtop {

/// Deterministic instance from a seed: dimension 1..4, modular sum |x_i|^p
/// (p in {1, 2}) or a weighted l1 sum, the true doubling constant declared,
/// and beta = 1 declared whenever the modular is 1-homogeneous.
/// A mutation replaces the formula (or the declaration) it targets.
PMSpace generate_instance(std::uint64_t seed, Family family, std::optional<MutationKind> mutation = std::nullopt);

/// The doubling constant of the unmutated instance: 2^p for sum |x_i|^p, 2 for weighted l1.
double true_delta2_constant(const ClassicalModular& modular);

struct FalsifierRun {
  std::uint64_t seed = 0;
  SampleBudget budget;
  PMSpace instance;
  std::map<std::string, CheckReport> results;

  std::size_t failures() const;
  std::size_t infeasibles() const;
};

/// Every predicate name the registry runs, in execution order.
const std::vector<std::string>& registry_predicates();

/// The predicate a mutation is designed to break.
std::string target_predicate(MutationKind m);

/// Run every predicate on the instance. Nothing throws: a precondition or
/// construction failure becomes an infeasible report. Predicates whose
/// hypotheses failed earlier in the run are reported infeasible without
/// being executed.
FalsifierRun run_registry(const PMSpace& instance, const SampleBudget& budget);

}  // namespace pmtop
