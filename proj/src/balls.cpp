#include "pmtop/balls.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pmtop {

void Ball::validate() const {
  if (!(level > 0.0 && level < 1.0)) throw PreconditionError("ball level must lie in (0, 1)");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw PreconditionError("ball scale must be positive");
  if (center.empty()) throw PreconditionError("ball center is empty");
}

Ball make_ball(Vector center, double level, double scale) {
  Ball b{std::move(center), level, scale};
  b.validate();
  return b;
}

double membership_margin(const PMSpace& space, const Ball& ball, std::span<const double> y) {
  const auto f = space.mu(sub(ball.center, y));
  return f(ball.scale) - (1.0 - ball.level);
}

bool contains(const PMSpace& space, const Ball& ball, std::span<const double> y, double epsilon_strict) {
  return membership_margin(space, ball, y) > epsilon_strict;
}

bool default_membership(const PMSpace& space, const Ball& ball, std::span<const double> y) {
  return contains(space, ball, y);
}

// ---------------------------------------------------------------------------

BallSampler::BallSampler(const PMSpace& space, Ball ball, Rng& rng, double band)
    : space_(space), ball_(std::move(ball)), rng_(rng), band_(band) {
  ball_.validate();
  spread_ = initial_spread();
  constexpr int kBatch = 64;
  double factor = 2.0;
  int last_direction = 0;
  for (int iter = 0; iter < 200 && factor > 1.01; ++iter) {
    int hits = 0;
    for (int k = 0; k < kBatch; ++k) {
      if (contains(space_, ball_, propose())) ++hits;
    }
    const double rate = static_cast<double>(hits) / kBatch;
    int direction = 0;
    if (rate < 0.1 && spread_ > 1e-30) direction = -1;
    if (rate > 0.6 && spread_ < 1e6) direction = +1;
    if (direction == 0) break;
    if (last_direction != 0 && direction != last_direction) factor = std::sqrt(factor);
    spread_ = direction > 0 ? spread_ * factor : spread_ / factor;
    last_direction = direction;
  }
}

// Distance to the boundary along one random direction, scaled so that a
// Gaussian cloud of that spread has its typical norm inside the ball.
double BallSampler::initial_spread() {
  const std::size_t dim = ball_.center.size();
  Vector u(dim);
  double norm = 0.0;
  for (auto& c : u) {
    c = standard_normal(rng_);
    norm += c * c;
  }
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) return 1.0;
  auto inside = [&](double r) { return contains(space_, ball_, axpby(1.0, ball_.center, r / norm, u)); };
  double lo = 1.0;
  double hi = 1.0;
  if (inside(1.0)) {
    while (inside(hi) && hi < 1e6) hi *= 16.0;
    lo = hi / 16.0;
    if (inside(hi)) return 1e6;
  } else {
    while (!inside(lo) && lo > 1e-30) lo /= 16.0;
    hi = lo * 16.0;
    if (!inside(lo)) return 1.0;
  }
  for (int i = 0; i < 12; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (inside(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.7 * lo / std::sqrt(static_cast<double>(dim));
}

Vector BallSampler::propose() {
  Vector y = ball_.center;
  for (auto& c : y) c += spread_ * standard_normal(rng_);
  return y;
}

std::vector<Vector> BallSampler::members(std::size_t n) {
  std::vector<Vector> out;
  out.reserve(n);
  const std::size_t max_proposals = 200 * n;
  for (std::size_t k = 0; k < max_proposals && out.size() < n; ++k) {
    Vector y = propose();
    const double m = membership_margin(space_, ball_, y);
    if (std::abs(m) <= band_) continue;
    if (m > kEpsilonStrict) out.push_back(std::move(y));
  }
  return out;
}

// ---------------------------------------------------------------------------

double lemma1_witness(const PMSpace& space, const Ball& ball, std::span<const double> y) {
  ball.validate();
  if (!contains(space, ball, y)) throw PreconditionError("lemma1_witness: y is not a member of the ball");
  const auto f = space.mu(sub(ball.center, y));
  const double threshold = 1.0 - ball.level;
  const double t = ball.scale;
  double lo = 0.0;
  double hi = t;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > threshold) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (t - hi <= 1e-12 * t) {
    throw InfeasibleError("lemma1_witness: mu_{x-y}(s) <= 1-alpha for every s < t=" + fmt_num(t) +
                          " although mu_{x-y}(t) > 1-alpha (no left continuity at t)");
  }
  return 0.5 * (hi + t);
}

// ---------------------------------------------------------------------------

namespace {

Vector zeros(int dim) { return Vector(static_cast<std::size_t>(dim), 0.0); }

bool in_band(const PMSpace& space, const Ball& ball, std::span<const double> y, double eps) {
  return std::abs(membership_margin(space, ball, y)) <= eps;
}

std::string describe_ball(const Ball& b) {
  return "B(" + fmt_vec(b.center) + "," + fmt_num(b.level) + "," + fmt_num(b.scale) + ")";
}

}  // namespace

CheckReport translate_identity(const PMSpace& space, const Vector& x, double level, double scale,
                               const SampleBudget& budget, const Membership& member) {
  const Ball shifted = make_ball(x, level, scale);
  const Ball origin = make_ball(zeros(space.dim()), level, scale);
  CheckReport report("translate_identity", budget.rng_seed);
  Rng rng = make_rng(budget.rng_seed, stream_id("translate"));
  BallSampler sampler(space, shifted, rng);
  std::size_t drawn = 0;
  for (std::size_t k = 0; k < 20 * budget.verify_samples && drawn < budget.verify_samples; ++k) {
    const Vector y = sampler.propose();
    const Vector y_minus_x = sub(y, x);
    if (in_band(space, shifted, y, budget.epsilon) || in_band(space, origin, y_minus_x, budget.epsilon)) continue;
    ++drawn;
    const bool lhs = member(space, shifted, y);
    const bool rhs = member(space, origin, y_minus_x);
    if (lhs != rhs) {
      report.add_violation({"translate", describe_ball(shifted) + " y=" + fmt_vec(y), lhs ? 1.0 : 0.0,
                            rhs ? 1.0 : 0.0});
    }
  }
  report.samples_run = drawn;
  return report;
}

CheckReport scaling_identity(const PMSpace& space, double beta, double level, double scale,
                             const SampleBudget& budget, const CheckReport* homogeneity) {
  if (!(scale > 0.0)) throw PreconditionError("scaling_identity needs t > 0");
  CheckReport report("scaling_identity", budget.rng_seed);
  CheckReport pre = homogeneity ? *homogeneity : check_beta_homogeneous(space, beta, budget);

  const Ball big = make_ball(zeros(space.dim()), level, std::pow(scale, beta));
  const Ball unit_ball = make_ball(zeros(space.dim()), level, 1.0);
  Rng rng = make_rng(budget.rng_seed, stream_id("scaling"));
  BallSampler sampler(space, big, rng);
  std::size_t drawn = 0;
  for (std::size_t k = 0; k < 20 * budget.verify_samples && drawn < budget.verify_samples; ++k) {
    const Vector y = sampler.propose();
    const Vector y_over_t = pmtop::scale(1.0 / scale, y);
    if (in_band(space, big, y, budget.epsilon) || in_band(space, unit_ball, y_over_t, budget.epsilon)) continue;
    ++drawn;
    const bool lhs = contains(space, big, y);
    const bool rhs = contains(space, unit_ball, y_over_t);
    if (lhs != rhs) {
      report.add_violation({"scaling", "t=" + fmt_num(scale) + " alpha=" + fmt_num(level) + " y=" + fmt_vec(y),
                            lhs ? 1.0 : 0.0, rhs ? 1.0 : 0.0});
    }
  }
  report.samples_run = drawn;
  report.params["beta"] = beta;
  if (!report.failed() && !pre.passed()) {
    report.mark_infeasible("precondition: space is not " + fmt_num(beta) + "-homogeneous");
  }
  return report;
}

namespace {

CheckReport subset_check(const char* name, const PMSpace& space, const Ball& small, const Ball& large,
                         const SampleBudget& budget) {
  CheckReport report(name, budget.rng_seed);
  Rng rng = make_rng(budget.rng_seed, stream_id(name));
  BallSampler sampler(space, small, rng, budget.epsilon);
  const auto members = sampler.members(budget.verify_samples);
  for (const auto& y : members) {
    ++report.samples_run;
    if (!contains(space, large, y)) {
      report.add_violation({"subset", describe_ball(small) + " y=" + fmt_vec(y),
                            membership_margin(space, small, y), membership_margin(space, large, y)});
    }
  }
  return report;
}

}  // namespace

CheckReport monotone_in_scale(const PMSpace& space, double level, double t1, double t2, const SampleBudget& budget) {
  if (t1 > t2) throw PreconditionError("monotone_in_scale needs t1 <= t2");
  return subset_check("monotone_in_scale", space, make_ball(zeros(space.dim()), level, t1),
                      make_ball(zeros(space.dim()), level, t2), budget);
}

CheckReport monotone_in_level(const PMSpace& space, double level1, double level2, double scale,
                              const SampleBudget& budget) {
  if (level1 > level2) throw PreconditionError("monotone_in_level needs alpha1 <= alpha2");
  return subset_check("monotone_in_level", space, make_ball(zeros(space.dim()), level1, scale),
                      make_ball(zeros(space.dim()), level2, scale), budget);
}

// ---------------------------------------------------------------------------

SampledSet ball_set(const PMSpace& space, const Ball& ball) {
  return SampledSet{
      [&space, ball](std::span<const double> y) { return contains(space, ball, y); },
      [&space, ball](std::size_t n, Rng& rng) { return BallSampler(space, ball, rng).members(n); },
  };
}

CheckReport check_balanced(const SampledSet& set, const SampleBudget& budget) {
  CheckReport report("balanced", budget.rng_seed);
  Rng rng = make_rng(budget.rng_seed, stream_id("balanced"));
  const auto members = set.members(budget.verify_samples, rng);
  for (std::size_t i = 0; i < members.size(); ++i) {
    double lambda;
    switch (i) {
      case 0: lambda = 0.0; break;
      case 1: lambda = 1.0; break;
      case 2: lambda = -1.0; break;
      default: lambda = 2.0 * uniform01(rng) - 1.0;
    }
    ++report.samples_run;
    const Vector v = scale(lambda, members[i]);
    if (!set.contains(v)) {
      report.add_violation({"balanced", "lambda=" + fmt_num(lambda) + " y=" + fmt_vec(members[i]), 0.0, 1.0});
    }
  }
  if (members.empty()) report.mark_infeasible("no members could be sampled");
  return report;
}

CheckReport check_convex(const SampledSet& set, const SampleBudget& budget) {
  CheckReport report("convex", budget.rng_seed);
  Rng rng = make_rng(budget.rng_seed, stream_id("convex"));
  const auto xs = set.members(budget.verify_samples, rng);
  auto ys = set.members(budget.verify_samples, rng);
  std::shuffle(ys.begin(), ys.end(), rng);
  const std::size_t n = std::min(xs.size(), ys.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = uniform01(rng);
    ++report.samples_run;
    const Vector v = axpby(lambda, xs[i], 1.0 - lambda, ys[i]);
    if (!set.contains(v)) {
      report.add_violation(
          {"convex", "lambda=" + fmt_num(lambda) + " x=" + fmt_vec(xs[i]) + " y=" + fmt_vec(ys[i]), 0.0, 1.0});
    }
  }
  if (n == 0) report.mark_infeasible("no members could be sampled");
  return report;
}

CheckReport is_balanced_sampled(const PMSpace& space, const Ball& ball, const SampleBudget& budget) {
  ball.validate();
  if (!is_zero(ball.center)) throw PreconditionError("balancedness is checked for balls centered at 0");
  return check_balanced(ball_set(space, ball), budget);
}

CheckReport is_convex_sampled(const PMSpace& space, const Ball& ball, const SampleBudget& budget) {
  ball.validate();
  if (!is_zero(ball.center)) throw PreconditionError("convexity is checked for balls centered at 0");
  return check_convex(ball_set(space, ball), budget);
}

}  // namespace pmtop
