#pragma once

#include <functional>
#include <optional>

#include "pmtop/pmspace.hpp"
#include "pmtop/report.hpp"
#include "pmtop/sampling.hpp"

namespace pmtop {

/// B(center, level, scale) = { y : mu_{center - y}(scale) > 1 - level }.
struct Ball {
  Vector center;
  double level = 0.5;
  double scale = 1.0;

  /// Throws PreconditionError unless 0 < level < 1 and scale > 0.
  void validate() const;

  friend bool operator==(const Ball&, const Ball&) = default;
};

Ball make_ball(Vector center, double level, double scale);

inline constexpr double kEpsilonStrict = 1e-12;

/// mu_{center - y}(scale) - (1 - level). Positive means inside.
double membership_margin(const PMSpace& space, const Ball& ball, std::span<const double> y);

/// Strict membership with a guard: margin > epsilon_strict.
bool contains(const PMSpace& space, const Ball& ball, std::span<const double> y,
              double epsilon_strict = kEpsilonStrict);

/// Membership rule used by the identity checks. Swappable so tests can feed
/// a deliberately broken rule.
using Membership = std::function<bool(const PMSpace&, const Ball&, std::span<const double>)>;

bool default_membership(const PMSpace& space, const Ball& ball, std::span<const double> y);

/// Gaussian proposals around a ball center, with a spread tuned so that
/// between 10% and 60% of proposals land in the ball.
class BallSampler {
 public:
  BallSampler(const PMSpace& space, Ball ball, Rng& rng, double band = 1e-9);

  /// A fresh proposal (member or not).
  Vector propose();

  /// Up to n members, skipping proposals within `band` of the boundary.
  /// Stops after 200 * n proposals.
  std::vector<Vector> members(std::size_t n);

  double spread() const { return spread_; }
  const Ball& ball() const { return ball_; }

 private:
  double initial_spread();

  const PMSpace& space_;
  Ball ball_;
  Rng& rng_;
  double band_;
  double spread_ = 1.0;
};

/// Some t* in (0, scale) with mu_{center - y}(t*) > 1 - level: the midpoint
/// of the feasible interval located by 60 bisection steps.
/// Throws PreconditionError if y is not a member and InfeasibleError if no
/// feasible argument is found above relative resolution 1e-12 (the
/// distribution function is not left-continuous at the scale).
double lemma1_witness(const PMSpace& space, const Ball& ball, std::span<const double> y);

/// contains(B(x, a, t), y) == contains(B(0, a, t), y - x) on sampled y.
CheckReport translate_identity(const PMSpace& space, const Vector& x, double level, double scale,
                               const SampleBudget& budget, const Membership& member = default_membership);

/// y in B(0, a, t^beta) <=> y / t in B(0, a, 1) on sampled y. Runs the
/// homogeneity check first; its failure alone makes the report infeasible,
/// while sampled identity violations make it fail. A precomputed homogeneity
/// report may be passed to skip that check.
CheckReport scaling_identity(const PMSpace& space, double beta, double level, double scale,
                             const SampleBudget& budget, const CheckReport* homogeneity = nullptr);

/// Members of B(0, a, t1) lie in B(0, a, t2). Requires t1 <= t2.
CheckReport monotone_in_scale(const PMSpace& space, double level, double t1, double t2, const SampleBudget& budget);

/// Members of B(0, a1, t) lie in B(0, a2, t). Requires a1 <= a2.
CheckReport monotone_in_level(const PMSpace& space, double level1, double level2, double scale,
                              const SampleBudget& budget);

/// A set known only through a membership test and a way to draw members.
struct SampledSet {
  std::function<bool(std::span<const double>)> contains;
  std::function<std::vector<Vector>(std::size_t n, Rng& rng)> members;
};

SampledSet ball_set(const PMSpace& space, const Ball& ball);

/// lambda * y stays in the set for sampled members y and |lambda| <= 1.
CheckReport check_balanced(const SampledSet& set, const SampleBudget& budget);

/// l x + (1 - l) y stays in the set for sampled members x, y and l in (0,1).
CheckReport check_convex(const SampledSet& set, const SampleBudget& budget);

/// Balancedness of a ball centered at 0. Throws PreconditionError otherwise.
CheckReport is_balanced_sampled(const PMSpace& space, const Ball& ball, const SampleBudget& budget);

/// Convexity of a ball centered at 0. Throws PreconditionError otherwise.
CheckReport is_convex_sampled(const PMSpace& space, const Ball& ball, const SampleBudget& budget);

}  // namespace pmtop
