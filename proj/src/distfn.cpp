#include "pmtop/distfn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pmtop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_origin_mass(double m) {
  if (!(m >= 0.0 && m < 1.0)) throw std::invalid_argument("origin mass must lie in [0, 1)");
}

double eval_kind(const DistributionFunction::Kind& kind, double t) {
  if (!(t > 0.0)) return 0.0;
  return std::visit(overloaded{
                        [t](const Rational& k) { return t / (t + k.r); },
                        [t](const Step& k) {
                          return (k.closed ? t >= k.threshold : t > k.threshold) ? 1.0 : 0.0;
                        },
                        [t](const PiecewiseLinear& k) {
                          const auto& bp = k.breakpoints;
                          if (t < bp.front().t) return 0.0;
                          if (t >= bp.back().t) return bp.back().v;
                          auto hi = std::upper_bound(bp.begin(), bp.end(), t,
                                                     [](double x, const Breakpoint& b) { return x < b.t; });
                          auto lo = hi - 1;
                          const double w = (t - lo->t) / (hi->t - lo->t);
                          return lo->v + (hi->v - lo->v) * w;
                        },
                    },
                    kind);
}

}  // namespace

DistributionFunction::DistributionFunction(Kind kind, double origin_mass)
    : kind_(std::move(kind)), origin_mass_(origin_mass) {
  check_origin_mass(origin_mass);
}

DistributionFunction DistributionFunction::rational(double r, double origin_mass) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("rational parameter must be finite and >= 0");
  return DistributionFunction(Rational{r}, origin_mass);
}

DistributionFunction DistributionFunction::step(double threshold, bool closed, double origin_mass) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("step threshold must be finite and >= 0");
  }
  return DistributionFunction(Step{threshold, closed}, origin_mass);
}

DistributionFunction DistributionFunction::piecewise_linear(std::vector<Breakpoint> breakpoints,
                                                            double origin_mass) {
  if (breakpoints.empty()) throw std::invalid_argument("piecewise_linear needs at least one breakpoint");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const auto& b = breakpoints[i];
    if (!std::isfinite(b.t) || !(b.v >= 0.0 && b.v <= 1.0)) {
      throw std::invalid_argument("breakpoint values must lie in [0,1] at finite t");
    }
    if (i > 0 && !(b.t > breakpoints[i - 1].t)) {
      throw std::invalid_argument("breakpoints must be strictly increasing in t");
    }
  }
  return DistributionFunction(PiecewiseLinear{std::move(breakpoints)}, origin_mass);
}

double DistributionFunction::operator()(double t) const {
  if (t < 0.0) return 0.0;
  return std::max(origin_mass_, eval_kind(kind_, t));
}

std::vector<double> DistributionFunction::critical_points() const {
  std::vector<double> pts;
  std::visit(overloaded{
                 [](const Rational&) {},
                 [&pts](const Step& k) {
                   if (k.threshold > 0.0) pts.push_back(k.threshold);
                 },
                 [&pts](const PiecewiseLinear& k) {
                   for (const auto& b : k.breakpoints) {
                     if (b.t > 0.0) pts.push_back(b.t);
                   }
                 },
             },
             kind_);
  return pts;
}

double pointwise_min(const DistributionFunction& f, const DistributionFunction& g, double t) {
  return std::min(f(t), g(t));
}

std::vector<double> near_critical_points(const DistributionFunction& f) {
  std::vector<double> pts;
  for (double c : f.critical_points()) {
    pts.push_back(c * (1.0 - kCriticalOffset));
    pts.push_back(c * (1.0 + kCriticalOffset));
  }
  return pts;
}

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

CheckReport check_delta_membership(const DistributionFunction& f, const SampleBudget& budget) {
  CheckReport report("delta_membership", budget.rng_seed);
  constexpr double kFar = 1e300;
  std::vector<double> pts{-kFar, -1.0, -1e-3, 0.0, kFar};
  pts.insert(pts.end(), budget.t_grid.begin(), budget.t_grid.end());
  for (double c : f.critical_points()) pts.push_back(c);
  for (double c : near_critical_points(f)) pts.push_back(c);
  pts = sorted_unique(std::move(pts));

  std::vector<double> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);
  report.samples_run = pts.size();

  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(vals[i] >= 0.0 && vals[i] <= 1.0)) {
      report.add_violation({"range", "t=" + fmt_num(pts[i]), vals[i], 1.0});
    }
    if (i > 0 && vals[i] < vals[i - 1]) {
      report.add_violation(
          {"monotone", "s=" + fmt_num(pts[i - 1]) + " t=" + fmt_num(pts[i]), vals[i - 1], vals[i]});
    }
  }
  if (vals.front() > budget.epsilon) {
    report.add_violation({"infimum", "t=" + fmt_num(pts.front()), vals.front(), 0.0});
  }
  if (vals.back() < 1.0 - budget.epsilon) {
    report.add_violation({"supremum", "t=" + fmt_num(pts.back()), vals.back(), 1.0});
  }
  return report;
}

CheckReport check_left_continuity(const DistributionFunction& f, double t, const SampleBudget& budget) {
  if (!(t > 0.0)) throw PreconditionError("left continuity is probed at t > 0 only");
  CheckReport report("left_continuity", budget.rng_seed);
  const double ft = f(t);
  double last_gap = 0.0;
  for (double step : kProbeSteps) {
    const double gap = ft - f(t - step * t);
    report.params["gap@" + fmt_num(step)] = gap;
    last_gap = gap;
    ++report.samples_run;
  }
  if (last_gap > budget.epsilon) {
    report.add_violation({"left_limit", "t=" + fmt_num(t), ft, ft - last_gap});
  }
  return report;
}

CheckReport check_upsilon(const DistributionFunction& f, const SampleBudget& budget) {
  CheckReport report("upsilon", budget.rng_seed);

  CheckReport continuity("continuity", budget.rng_seed);
  std::vector<double> pts = budget.t_grid;
  for (double c : f.critical_points()) pts.push_back(c);
  pts = sorted_unique(std::move(pts));
  const double rel = kProbeSteps.back();
  for (double t : pts) {
    const double lo = f(t - rel * t);
    const double hi = f(t + rel * t);
    ++continuity.samples_run;
    if (std::abs(hi - lo) > budget.epsilon) {
      continuity.add_violation({"continuity", "t=" + fmt_num(t), hi, lo});
    }
  }

  CheckReport strict("strict_increase", budget.rng_seed);
  const auto& grid = budget.t_grid;
  double prev = f(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = f(grid[i]);
    const bool inside = prev > 0.0 && prev < 1.0 && cur > 0.0 && cur < 1.0;
    if (inside) {
      ++strict.samples_run;
      if (!(cur > prev + budget.epsilon_strict)) {
        strict.add_violation(
            {"strict_increase", "s=" + fmt_num(grid[i - 1]) + " t=" + fmt_num(grid[i]), prev, cur});
      }
    }
    prev = cur;
  }
  if (strict.samples_run == 0) strict.note = "{0 < f < 1} holds at no adjacent grid pair; clause vacuous";

  report.add_part(std::move(continuity));
  report.add_part(std::move(strict));
  return report;
}

}  // namespace pmtop
