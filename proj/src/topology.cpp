#include "pmtop/topology.hpp"

#include <algorithm>
#include <cmath>

namespace pmtop {

std::string_view to_string(RefinementWitness::Route r) {
  return r == RefinementWitness::Route::delta2 ? "delta2" : "homogeneous";
}

namespace {

Vector zeros(std::size_t dim) { return Vector(dim, 0.0); }

std::string describe(const Ball& b) {
  return "B(" + fmt_vec(b.center) + "," + fmt_num(b.level) + "," + fmt_num(b.scale) + ")";
}

Ball checked_ball(Vector center, double level, double scale, const char* what) {
  if (!(level > 0.0 && level < 1.0) || !(scale > 0.0) || !std::isfinite(scale)) {
    throw InfeasibleError(std::string(what) + ": degenerate ball (level " + fmt_num(level) + ", scale " +
                          fmt_num(scale) + ")");
  }
  return Ball{std::move(center), level, scale};
}

/// Sampled members of `inner` must belong to every ball in `outers`.
CheckReport verify_inside(const std::string& name, const PMSpace& space, const Ball& inner,
                          std::initializer_list<const Ball*> outers, const SampleBudget& budget) {
  CheckReport report(name, budget.rng_seed);
  Rng rng = make_rng(budget.rng_seed, stream_id(name.c_str()));
  BallSampler sampler(space, inner, rng, budget.epsilon);
  const auto members = sampler.members(budget.verify_samples);
  for (const auto& y : members) {
    ++report.samples_run;
    for (const Ball* outer : outers) {
      if (!contains(space, *outer, y)) {
        report.add_violation({"containment", describe(inner) + " in " + describe(*outer) + " y=" + fmt_vec(y),
                              membership_margin(space, inner, y), membership_margin(space, *outer, y)});
      }
    }
  }
  if (members.empty()) report.mark_infeasible("no members of " + describe(inner) + " could be sampled");
  return report;
}

/// No sampled member of either ball belongs to the other.
CheckReport verify_disjoint(const std::string& name, const PMSpace& space, const Ball& a, const Ball& b,
                            const SampleBudget& budget) {
  CheckReport report(name, budget.rng_seed);
  Rng rng = make_rng(budget.rng_seed, stream_id(name.c_str()));
  std::size_t sampled = 0;
  for (const auto& [from, other] : {std::pair{&a, &b}, std::pair{&b, &a}}) {
    BallSampler sampler(space, *from, rng, budget.epsilon);
    const auto members = sampler.members(budget.verify_samples);
    sampled += members.size();
    for (const auto& y : members) {
      ++report.samples_run;
      if (contains(space, *other, y)) {
        report.add_violation({"disjoint", describe(*from) + " and " + describe(*other) + " share y=" + fmt_vec(y),
                              membership_margin(space, *from, y), membership_margin(space, *other, y)});
      }
    }
  }
  if (sampled == 0) report.mark_infeasible("no members could be sampled");
  return report;
}

/// Largest feasible-side point after 60 bisection steps on (0, hi) for a
/// non-decreasing g with g(hi) > threshold.
double bisect_feasible(const std::function<double(double)>& g, double threshold, double hi) {
  double lo = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > threshold) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<double> sorted_grid(const SampleBudget& budget) {
  std::vector<double> g = budget.t_grid;
  std::sort(g.begin(), g.end());
  return g;
}

/// Grid point with f(t) in the open band (lo, hi) whose value is closest to
/// 1/2; ties go to the larger t.
std::optional<double> pick_middle(const DistributionFunction& f, std::span<const double> grid, double lo, double hi) {
  std::optional<double> best;
  double best_gap = 0.0;
  for (double t : grid) {
    const double v = f(t);
    if (!(v > lo && v < hi)) continue;
    const double gap = std::abs(v - 0.5);
    if (!best || gap <= best_gap) {
      best = t;
      best_gap = gap;
    }
  }
  return best;
}

void record_ball(CheckReport& r, const std::string& prefix, const Ball& b) {
  r.params[prefix + "_level"] = b.level;
  r.params[prefix + "_scale"] = b.scale;
}

}  // namespace

// ---------------------------------------------------------------------------

RefinementWitness refine_ball(const PMSpace& space, double c, const Ball& outer, const Vector& z,
                              const SampleBudget& budget, std::optional<double> beta) {
  outer.validate();
  if (!(c > 0.0)) throw PreconditionError("refine_ball needs c > 0");
  const double margin = membership_margin(space, outer, z);
  if (!(margin > budget.epsilon)) {
    throw PreconditionError("refine_ball: z=" + fmt_vec(z) + " is not a member of " + describe(outer) +
                            " beyond the boundary band");
  }
  const auto f = space.mu(sub(outer.center, z));
  const double threshold = 1.0 - outer.level;
  const double t = outer.scale;

  RefinementWitness w;
  std::string delta2_failure;
  bool built = false;

  if (f(t / c) > threshold) {
    const double hi = bisect_feasible([&](double s) { return f(s / c); }, threshold, t);
    if (t - hi > 1e-12 * t) {
      w.route = RefinementWitness::Route::delta2;
      w.t_star = 0.5 * (hi + t);
      w.alpha_star = f(w.t_star / c);
      const double one_minus_s = 0.5 * (threshold + w.alpha_star);
      w.s = 1.0 - one_minus_s;
      w.alpha_1 = 0.5 * (one_minus_s + 1.0);
      if (w.alpha_star > one_minus_s && w.alpha_1 > one_minus_s && one_minus_s > threshold) {
        w.inner = checked_ball(z, 1.0 - w.alpha_1, (t - w.t_star) / c, "refine_ball");
        built = true;
      } else {
        delta2_failure = "alpha* ^ alpha_1 > 1-s > 1-alpha has no room (alpha*=" + fmt_num(w.alpha_star) + ")";
      }
    } else {
      delta2_failure = "mu_{x-z}(s/c) <= 1-alpha for every s < t (no left continuity at t)";
    }
  } else {
    delta2_failure = "mu_{x-z}(t/c)=" + fmt_num(f(t / c)) + " <= 1-alpha=" + fmt_num(threshold);
  }

  if (!built && beta) {
    const double b = *beta;
    const double t_prime = lemma1_witness(space, outer, z);
    w.route = RefinementWitness::Route::homogeneous;
    w.t_star = 0.5 * (t_prime + t);
    w.weight = std::pow(t_prime / w.t_star, 1.0 / b);
    w.alpha_star = f(w.t_star * std::pow(w.weight, b));
    const double one_minus_s = 0.5 * (threshold + w.alpha_star);
    w.s = 1.0 - one_minus_s;
    w.alpha_1 = 0.5 * (one_minus_s + 1.0);
    if (!(w.alpha_star > one_minus_s && one_minus_s > threshold && w.weight < 1.0)) {
      throw InfeasibleError("refine_ball: mu_{x-z}(t* a^beta)=" + fmt_num(w.alpha_star) + " <= 1-alpha=" +
                            fmt_num(threshold));
    }
    w.inner = checked_ball(z, 1.0 - w.alpha_1, (t - w.t_star) * std::pow(1.0 - w.weight, b), "refine_ball");
    built = true;
  }
  if (!built) throw InfeasibleError("refine_ball: " + delta2_failure);

  w.verification = verify_inside("refine_ball", space, w.inner, {&outer}, budget);
  auto& p = w.verification.params;
  p["c"] = c;
  if (beta) p["beta"] = *beta;
  p["t_star"] = w.t_star;
  p["alpha_star"] = w.alpha_star;
  p["s"] = w.s;
  p["alpha_1"] = w.alpha_1;
  p["weight"] = w.weight;
  record_ball(w.verification, "inner", w.inner);
  w.verification.note = std::string("route ") + std::string(to_string(w.route));
  return w;
}

IntersectionWitness refine_intersection(const PMSpace& space, double c, const Ball& b1, const Ball& b2,
                                        const Vector& z, const SampleBudget& budget, std::optional<double> beta) {
  IntersectionWitness w;
  w.first = refine_ball(space, c, b1, z, budget, beta);
  w.second = refine_ball(space, c, b2, z, budget, beta);
  w.inner = Ball{z, std::min(w.first.inner.level, w.second.inner.level),
                 std::min(w.first.inner.scale, w.second.inner.scale)};
  w.verification = verify_inside("refine_intersection", space, w.inner, {&b1, &b2}, budget);
  record_ball(w.verification, "inner", w.inner);
  return w;
}

long least_local_base_index(double level, double scale) {
  const double m = std::min(level, scale);
  if (!(m > 0.0)) throw PreconditionError("local base index needs positive level and scale");
  long n = static_cast<long>(std::min(std::floor(1.0 / m), 1e15)) + 1;
  while (n > 1 && 1.0 / static_cast<double>(n - 1) < m) --n;
  while (!(1.0 / static_cast<double>(n) < m)) ++n;
  return n;
}

LocalBaseWitness local_base_containment(const PMSpace& space, const Ball& outer, const SampleBudget& budget) {
  outer.validate();
  LocalBaseWitness w;
  w.n = least_local_base_index(outer.level, outer.scale);
  const double r = 1.0 / static_cast<double>(w.n);
  w.inner = Ball{outer.center, r, r};
  w.verification = verify_inside("local_base", space, w.inner, {&outer}, budget);
  w.verification.params["n"] = static_cast<double>(w.n);
  return w;
}

// ---------------------------------------------------------------------------

SeparationWitness separation_witness(const PMSpace& space, double c, const Vector& x, const Vector& y,
                                     const SampleBudget& budget) {
  if (!(c > 0.0)) throw PreconditionError("separation_witness needs c > 0");
  if (x.size() != y.size()) throw PreconditionError("separation_witness: dimension mismatch");
  const Vector d = sub(x, y);
  if (is_zero(d)) throw PreconditionError("separation_witness needs x != y");
  const auto f = space.mu(d);
  const auto grid = sorted_grid(budget);
  auto t0 = pick_middle(f, grid, -1.0, 1.0 - budget.epsilon);
  if (!t0 && !grid.empty()) {
    auto lower = log_grid(grid.front() * 1e-2, grid.front(), 17);
    lower.pop_back();
    t0 = pick_middle(f, lower, -1.0, 1.0 - budget.epsilon);
  }
  if (!t0) {
    throw InfeasibleError("separation_witness: mu_{x-y}(t) >= 1-eps on the whole grid (x - y behaves like 0)");
  }
  SeparationWitness w;
  w.t0 = *t0;
  const double mu0 = f(w.t0);
  w.alpha_1 = 0.5 * (mu0 + 1.0);
  const double level = 1.0 - w.alpha_1;
  const double scale = w.t0 / (2.0 * c);
  w.ball_x = checked_ball(x, level, scale, "separation_witness");
  w.ball_y = checked_ball(y, level, scale, "separation_witness");
  w.verification = verify_disjoint("separation", space, w.ball_x, w.ball_y, budget);
  auto& p = w.verification.params;
  p["c"] = c;
  p["t0"] = w.t0;
  p["mu_t0"] = mu0;
  p["alpha_1"] = w.alpha_1;
  record_ball(w.verification, "ball", w.ball_x);
  return w;
}

SeparationWitness homogeneous_separation_witness(const PMSpace& space, double beta, const Vector& x,
                                                 const SampleBudget& budget) {
  if (!(beta > 0.0 && beta <= 1.0)) throw PreconditionError("homogeneous_separation_witness needs beta in (0, 1]");
  if (is_zero(x)) throw PreconditionError("homogeneous_separation_witness needs x != 0");
  const auto f = space.mu(x);
  const CheckReport ups = check_upsilon(f, budget);
  if (!ups.passed()) {
    std::string why = ups.violations.empty() ? ups.note : ups.violations.front().what + " " + ups.violations.front().inputs;
    throw PreconditionError("homogeneous_separation_witness: mu_x fails (Upsilon): " + why);
  }
  const auto grid = sorted_grid(budget);
  const auto t0 = pick_middle(f, grid, budget.epsilon, 1.0 - budget.epsilon);
  if (!t0) throw InfeasibleError("homogeneous_separation_witness: no grid t with 0 < mu_x(t) < 1");

  SeparationWitness w;
  w.t0 = *t0;
  const double mu0 = f(w.t0);
  const double alpha0 = 0.5 * (1.0 - mu0);
  w.alpha_1 = alpha0;
  const double scale = w.t0 / std::exp2(beta + 1.0);
  w.ball_x = checked_ball(zeros(x.size()), alpha0, scale, "homogeneous_separation_witness");
  w.ball_y = checked_ball(x, alpha0, scale, "homogeneous_separation_witness");
  w.verification = verify_disjoint("homogeneous_separation", space, w.ball_x, w.ball_y, budget);
  auto& p = w.verification.params;
  p["beta"] = beta;
  p["t0"] = w.t0;
  p["mu_t0"] = mu0;
  p["alpha_0"] = alpha0;
  record_ball(w.verification, "ball", w.ball_x);
  return w;
}

// ---------------------------------------------------------------------------

namespace {

void require_centered(const Ball& target, const char* who) {
  target.validate();
  if (!is_zero(target.center)) throw PreconditionError(std::string(who) + " needs a target ball centered at 0");
}

}  // namespace

ContinuityWitness addition_continuity_witness(const PMSpace& space, double beta, const Ball& target,
                                              const SampleBudget& budget) {
  require_centered(target, "addition_continuity_witness");
  if (!(beta > 0.0 && beta <= 1.0)) throw PreconditionError("addition_continuity_witness needs beta in (0, 1]");
  ContinuityWitness w;
  w.kind = ContinuityWitness::Kind::addition;
  w.b1 = Ball{target.center, target.level / 2.0, target.scale / std::exp2(beta + 2.0)};
  w.b2 = w.b1;

  CheckReport report("addition_continuity", budget.rng_seed);
  Rng rng = make_rng(budget.rng_seed, stream_id("addition_continuity"));
  BallSampler s1(space, w.b1, rng, budget.epsilon);
  const auto xs = s1.members(budget.verify_samples);
  BallSampler s2(space, *w.b2, rng, budget.epsilon);
  const auto ys = s2.members(budget.verify_samples);
  const std::size_t n = std::min(xs.size(), ys.size());
  for (std::size_t i = 0; i < n; ++i) {
    ++report.samples_run;
    const Vector sum = add(xs[i], ys[i]);
    if (!contains(space, target, sum)) {
      report.add_violation({"x+y in target", "x=" + fmt_vec(xs[i]) + " y=" + fmt_vec(ys[i]),
                            membership_margin(space, target, sum), 0.0});
    }
  }
  if (n == 0) report.mark_infeasible("no members could be sampled");
  report.params["beta"] = beta;
  record_ball(report, "b1", w.b1);
  w.verification = std::move(report);
  return w;
}

ContinuityWitness scalar_continuity_witness(const PMSpace& space, double beta, const Ball& target, double lambda,
                                            const SampleBudget& budget) {
  require_centered(target, "scalar_continuity_witness");
  if (!(beta > 0.0 && beta <= 1.0)) throw PreconditionError("scalar_continuity_witness needs beta in (0, 1]");
  if (!std::isfinite(lambda)) throw PreconditionError("scalar_continuity_witness needs a finite lambda");
  ContinuityWitness w;
  w.kind = ContinuityWitness::Kind::scalar;
  w.lambda = lambda;
  const double floor_lambda = std::max(std::abs(lambda), kLambdaFloor);
  const double t1 = target.scale / (2.0 * std::pow(floor_lambda, beta) * 2.0);
  w.r = std::pow(target.scale / (2.0 * t1), 1.0 / beta);
  w.b1 = Ball{target.center, target.level / 2.0, t1};

  CheckReport report("scalar_continuity", budget.rng_seed);
  Rng rng = make_rng(budget.rng_seed, stream_id("scalar_continuity"));
  BallSampler sampler(space, w.b1, rng, budget.epsilon);
  const auto xs = sampler.members(budget.verify_samples);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    // The first sample checks xi = lambda itself.
    const double xi = i == 0 ? lambda : lambda + w.r * (2.0 * uniform01(rng) - 1.0);
    ++report.samples_run;
    const Vector prod = scale(xi, xs[i]);
    if (!contains(space, target, prod)) {
      report.add_violation({"xi x in target", "xi=" + fmt_num(xi) + " x=" + fmt_vec(xs[i]),
                            membership_margin(space, target, prod), 0.0});
    }
  }
  if (xs.empty()) report.mark_infeasible("no members could be sampled");
  report.params["beta"] = beta;
  report.params["lambda"] = lambda;
  report.params["r"] = w.r;
  record_ball(report, "b1", w.b1);
  w.verification = std::move(report);
  return w;
}

}  // namespace pmtop
