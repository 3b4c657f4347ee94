#pragma once

#include <optional>
#include <string>

#include "pmtop/balls.hpp"

namespace pmtop {

/// A basis ball around z inside an outer ball, with the parameters chosen
/// along the way.
struct RefinementWitness {
  /// "delta2": split t = t* + (t - t*) with weights (1/2, 1/2) and the
  /// doubling constant. "homogeneous": weights (a, 1 - a) and the exponent.
  enum class Route { delta2, homogeneous };

  Ball inner;
  double t_star = 0.0;
  double alpha_star = 0.0;
  double s = 0.0;
  double alpha_1 = 0.0;
  Route route = Route::delta2;
  double weight = 0.5;  // a in the homogeneous route
  CheckReport verification;
};

std::string_view to_string(RefinementWitness::Route r);

/// Basis ball around z inside outer, verified on sampled members of the
/// inner ball.
///
/// The doubling route needs mu_{x-z}(t/c) > 1 - alpha. When it does not hold
/// and beta is given, the construction falls back to the homogeneous route,
/// which works for every member. Throws PreconditionError if z is not a
/// member (or lies within budget.epsilon of the boundary) and InfeasibleError
/// when neither route applies.
RefinementWitness refine_ball(const PMSpace& space, double c, const Ball& outer, const Vector& z,
                              const SampleBudget& budget, std::optional<double> beta = std::nullopt);

/// Two basis balls sharing z: refine each, then take the smaller level and
/// scale. Verified on sampled members against both outer balls.
struct IntersectionWitness {
  Ball inner;
  RefinementWitness first;
  RefinementWitness second;
  CheckReport verification;
};

IntersectionWitness refine_intersection(const PMSpace& space, double c, const Ball& b1, const Ball& b2,
                                        const Vector& z, const SampleBudget& budget,
                                        std::optional<double> beta = std::nullopt);

/// Least n with 1/n < min(level, scale), so that B(x, 1/n, 1/n) lies in outer.
long least_local_base_index(double level, double scale);

struct LocalBaseWitness {
  long n = 0;
  Ball inner;
  CheckReport verification;
};

LocalBaseWitness local_base_containment(const PMSpace& space, const Ball& outer, const SampleBudget& budget);

struct SeparationWitness {
  Ball ball_x;
  Ball ball_y;
  double t0 = 0.0;
  double alpha_1 = 0.0;
  CheckReport verification;
};

/// Disjoint balls B(x, 1 - a1, t0/(2c)) and B(y, 1 - a1, t0/(2c)).
/// t0 is the grid point whose mu_{x-y} value is closest to 1/2 among those
/// below 1 - epsilon; a1 is the midpoint of (mu_{x-y}(t0), 1).
SeparationWitness separation_witness(const PMSpace& space, double c, const Vector& x, const Vector& y,
                                     const SampleBudget& budget);

/// Disjoint balls B(0, a0, t0/2^(beta+1)) and B(x, a0, t0/2^(beta+1)) with
/// 0 < mu_x(t0) < 1 and a0 = (1 - mu_x(t0))/2. mu_x must satisfy (Upsilon).
SeparationWitness homogeneous_separation_witness(const PMSpace& space, double beta, const Vector& x,
                                                 const SampleBudget& budget);

struct ContinuityWitness {
  enum class Kind { addition, scalar };

  Kind kind = Kind::addition;
  Ball b1;
  std::optional<Ball> b2;  // addition only
  double r = 0.0;          // scalar only
  double lambda = 0.0;     // scalar only
  CheckReport verification;
};

inline constexpr double kLambdaFloor = 1e-6;

/// B1 = B2 = B(0, alpha/2, t/2^(beta+2)); sampled x in B1, y in B2 give
/// x + y in target.
ContinuityWitness addition_continuity_witness(const PMSpace& space, double beta, const Ball& target,
                                              const SampleBudget& budget);

/// B1 = B(0, alpha/2, t1) with t1 = t / (4 max(|lambda|, floor)^beta) and
/// r = (t / (2 t1))^(1/beta); sampled x in B1 and |xi - lambda| < r give
/// xi x in target.
ContinuityWitness scalar_continuity_witness(const PMSpace& space, double beta, const Ball& target, double lambda,
                                            const SampleBudget& budget);

}  // namespace pmtop
