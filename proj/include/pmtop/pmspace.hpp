#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pmtop/distfn.hpp"
#include "pmtop/report.hpp"
#include "pmtop/sampling.hpp"

namespace pmtop {

/// Classical modular rho on R^n: either sum |x_i|^p (p >= 1) or
/// sum w_i |x_i| with positive weights.
class ClassicalModular {
 public:
  enum class Kind { p_power, weighted_abs };

  static ClassicalModular p_power(double p);
  static ClassicalModular weighted_abs(std::vector<double> weights);

  double operator()(std::span<const double> x) const;

  /// rho of the vector with a single nonzero coordinate c on `axis`.
  double on_axis(int axis, double c) const;

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Exponent k with rho(a x) = |a|^k rho(x): p for p_power, 1 for weighted_abs.
  double degree() const { return kind_ == Kind::p_power ? p_ : 1.0; }

  friend bool operator==(const ClassicalModular&, const ClassicalModular&) = default;

 private:
  ClassicalModular(Kind kind, double p, std::vector<double> weights)
      : kind_(kind), p_(p), weights_(std::move(weights)) {}

  Kind kind_ = Kind::p_power;
  double p_ = 1.0;
  std::vector<double> weights_;
};

/// How the distribution function mu_x is built from the modular value.
enum class Family { rational_from, step_from };

/// Structural breakages used by the falsifier. Each targets one hypothesis.
enum class MutationKind {
  break_pm1,                 // mu_x(0) = 0.1
  break_pm2,                 // a nonzero axis vector has mu == 1 on t > 0
  break_pm3,                 // rho inflated on the half-space x_axis > 0
  break_pm4,                 // rho replaced by a non-monotone hump
  break_left_continuity,     // right-continuous step 1_{t >= theta}
  break_delta2_declaration,  // declared c below the true constant
};

inline constexpr MutationKind kAllMutations[] = {
    MutationKind::break_pm1,  MutationKind::break_pm2,
    MutationKind::break_pm3,  MutationKind::break_pm4,
    MutationKind::break_left_continuity, MutationKind::break_delta2_declaration,
};

std::string_view to_string(MutationKind m);
MutationKind mutation_from_string(std::string_view s);
std::string_view to_string(Family f);
Family family_from_string(std::string_view s);

struct Mutation {
  MutationKind kind = MutationKind::break_pm1;
  int axis = 0;
  friend bool operator==(const Mutation&, const Mutation&) = default;
};

/// A finite-dimensional probabilistic modular space: R^dim with the map
/// x -> mu_x built from a classical modular and a family.
class PMSpace {
 public:
  PMSpace(int dim, Family family, ClassicalModular modular, std::optional<double> declared_c = std::nullopt,
          std::optional<double> declared_beta = std::nullopt, std::optional<Mutation> mutation = std::nullopt);

  int dim() const { return dim_; }
  Family family() const { return family_; }
  const ClassicalModular& modular() const { return modular_; }
  std::optional<double> declared_c() const { return declared_c_; }
  std::optional<double> declared_beta() const { return declared_beta_; }
  const std::optional<Mutation>& mutation() const { return mutation_; }

  /// The effective modular value feeding mu_x (rho, or its mutated form).
  double modular_value(std::span<const double> x) const;

  /// mu_x. Throws PreconditionError on a dimension mismatch.
  DistributionFunction mu(std::span<const double> x) const;

  friend bool operator==(const PMSpace&, const PMSpace&) = default;

 private:
  int dim_;
  Family family_;
  ClassicalModular modular_;
  std::optional<double> declared_c_;
  std::optional<double> declared_beta_;
  std::optional<Mutation> mutation_;
};

/// Axioms PM1..PM4 over sampled vectors, weights and grid arguments.
/// Parts are named "pm1".."pm4".
CheckReport check_axioms(const PMSpace& space, const SampleBudget& budget);

CheckReport check_pm1(const PMSpace& space, const SampleBudget& budget);
CheckReport check_pm2(const PMSpace& space, const SampleBudget& budget);
CheckReport check_pm3(const PMSpace& space, const SampleBudget& budget);
CheckReport check_pm4(const PMSpace& space, const SampleBudget& budget);

/// mu_{2x}(t) >= mu_x(t/c) - epsilon over sampled x and t.
CheckReport check_delta2(const PMSpace& space, double c, const SampleBudget& budget);

/// {2^(k/4) : k = 0..16}.
std::vector<double> default_delta2_candidates();

/// Smallest candidate that passes check_delta2, if any.
std::optional<double> find_delta2_constant(const PMSpace& space, const SampleBudget& budget,
                                           std::span<const double> candidates);

/// |mu_{a x}(t) - mu_x(t / |a|^beta)| <= epsilon for sampled x, a != 0, t.
CheckReport check_beta_homogeneous(const PMSpace& space, double beta, const SampleBudget& budget);

/// check_upsilon on mu_x for every sampled nonzero x.
CheckReport check_upsilon_space(const PMSpace& space, const SampleBudget& budget);

/// check_upsilon_space over a caller-supplied sample set.
CheckReport check_upsilon_space(const PMSpace& space, std::span<const Vector> samples,
                                const SampleBudget& budget);

}  // namespace pmtop
