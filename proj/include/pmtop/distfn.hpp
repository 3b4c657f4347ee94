#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "pmtop/report.hpp"
#include "pmtop/sampling.hpp"

namespace pmtop {

/// t / (t + r) for t > 0. rational(0) is identically 1 on t > 0.
struct Rational {
  double r = 0.0;
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// 1 if t > threshold, else 0. With `closed` set the jump is taken at the
/// threshold itself (1 if t >= threshold), which is right- but not
/// left-continuous.
struct Step {
  double threshold = 0.0;
  bool closed = false;
  friend bool operator==(const Step&, const Step&) = default;
};

struct Breakpoint {
  double t = 0.0;
  double v = 0.0;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Linear interpolation between breakpoints; 0 left of the first one and
/// the last value right of the last one.
struct PiecewiseLinear {
  std::vector<Breakpoint> breakpoints;
  friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;
};

/// A non-decreasing map R -> [0,1] of one of three closed kinds.
///
/// Every kind evaluates to 0 for t < 0. At t >= 0 the value is
/// max(origin_mass, kind(t)), where kind(t) is 0 at t <= 0. A nonzero
/// origin mass places an atom at 0; valid modulars keep it at 0.
class DistributionFunction {
 public:
  using Kind = std::variant<Rational, Step, PiecewiseLinear>;

  static DistributionFunction rational(double r, double origin_mass = 0.0);
  static DistributionFunction step(double threshold, bool closed = false, double origin_mass = 0.0);
  static DistributionFunction piecewise_linear(std::vector<Breakpoint> breakpoints,
                                               double origin_mass = 0.0);

  double operator()(double t) const;

  const Kind& kind() const { return kind_; }
  double origin_mass() const { return origin_mass_; }

  /// Positive arguments where the function may jump or have a kink,
  /// sorted ascending. Empty for the rational kind.
  std::vector<double> critical_points() const;

  friend bool operator==(const DistributionFunction&, const DistributionFunction&) = default;

 private:
  DistributionFunction(Kind kind, double origin_mass);

  Kind kind_;
  double origin_mass_ = 0.0;
};

inline double eval(const DistributionFunction& f, double t) { return f(t); }

/// min(f(t), g(t)), the meet used by the modular triangle inequality.
double pointwise_min(const DistributionFunction& f, const DistributionFunction& g, double t);

/// Probe points just left and right of every critical point.
std::vector<double> near_critical_points(const DistributionFunction& f);

/// Monotonicity on adjacent points of the extended grid, range in [0,1],
/// and the limits 0 and 1 at the extreme probes.
CheckReport check_delta_membership(const DistributionFunction& f, const SampleBudget& budget);

/// f(t) - f(t - delta) <= epsilon for the smallest probe step. Steps are
/// relative to t. Throws PreconditionError unless t > 0.
CheckReport check_left_continuity(const DistributionFunction& f, double t, const SampleBudget& budget);

/// Two clauses, reported as separate parts: "continuity" (two-sided, at
/// grid and critical points) and "strict_increase" (adjacent grid pairs
/// inside {0 < f < 1} must increase by more than epsilon_strict).
CheckReport check_upsilon(const DistributionFunction& f, const SampleBudget& budget);

}  // namespace pmtop
