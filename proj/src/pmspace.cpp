#include "pmtop/pmspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chunked.hpp"

namespace pmtop {

// ---------------------------------------------------------------------------
// ClassicalModular

ClassicalModular ClassicalModular::p_power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p_power needs finite p >= 1");
  return ClassicalModular(Kind::p_power, p, {});
}

ClassicalModular ClassicalModular::weighted_abs(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("weighted_abs needs at least one weight");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("weighted_abs weights must be positive");
  }
  return ClassicalModular(Kind::weighted_abs, 1.0, std::move(weights));
}

namespace {
double abs_pow(double c, double p) {
  const double a = std::abs(c);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}
}  // namespace

double ClassicalModular::operator()(std::span<const double> x) const {
  double sum = 0.0;
  if (kind_ == Kind::p_power) {
    for (double c : x) sum += abs_pow(c, p_);
  } else {
    if (x.size() != weights_.size()) throw PreconditionError("weighted_abs: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) sum += weights_[i] * std::abs(x[i]);
  }
  return sum;
}

double ClassicalModular::on_axis(int axis, double c) const {
  if (kind_ == Kind::p_power) return abs_pow(c, p_);
  return weights_.at(static_cast<std::size_t>(axis)) * std::abs(c);
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(MutationKind m) {
  switch (m) {
    case MutationKind::break_pm1:
      return "break_pm1";
    case MutationKind::break_pm2:
      return "break_pm2";
    case MutationKind::break_pm3:
      return "break_pm3";
    case MutationKind::break_pm4:
      return "break_pm4";
    case MutationKind::break_left_continuity:
      return "break_left_continuity";
    case MutationKind::break_delta2_declaration:
      return "break_delta2_declaration";
  }
  return "?";
}

MutationKind mutation_from_string(std::string_view s) {
  for (MutationKind m : kAllMutations) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown mutation: " + std::string(s));
}

std::string_view to_string(Family f) { return f == Family::rational_from ? "rational_from" : "step_from"; }

Family family_from_string(std::string_view s) {
  if (s == "rational_from") return Family::rational_from;
  if (s == "step_from") return Family::step_from;
  throw std::invalid_argument("unknown family: " + std::string(s));
}

// ---------------------------------------------------------------------------
// PMSpace

PMSpace::PMSpace(int dim, Family family, ClassicalModular modular, std::optional<double> declared_c,
                 std::optional<double> declared_beta, std::optional<Mutation> mutation)
    : dim_(dim),
      family_(family),
      modular_(std::move(modular)),
      declared_c_(declared_c),
      declared_beta_(declared_beta),
      mutation_(mutation) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dim must lie in [1, 8]");
  if (modular_.kind() == ClassicalModular::Kind::weighted_abs &&
      modular_.weights().size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("weighted_abs needs one weight per coordinate");
  }
  if (declared_c && !(*declared_c > 0.0 && std::isfinite(*declared_c))) {
    throw std::invalid_argument("declared Delta2 constant must be positive");
  }
  if (declared_beta && !(*declared_beta > 0.0 && *declared_beta <= 1.0)) {
    throw std::invalid_argument("declared beta must lie in (0, 1]");
  }
  if (mutation && (mutation->axis < 0 || mutation->axis >= dim)) {
    throw std::invalid_argument("mutation axis out of range");
  }
}

double PMSpace::modular_value(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim_)) {
    throw PreconditionError("vector of dimension " + std::to_string(x.size()) + " in a space of dimension " +
                            std::to_string(dim_));
  }
  if (!mutation_) return modular_(x);
  switch (mutation_->kind) {
    case MutationKind::break_pm2: {
      double x_axis[kMaxDim];
      std::copy(x.begin(), x.end(), x_axis);
      x_axis[mutation_->axis] = 0.0;
      return modular_(std::span<const double>(x_axis, x.size()));
    }
    case MutationKind::break_pm3: {
      const double c = x[static_cast<std::size_t>(mutation_->axis)];
      return modular_(x) + modular_.on_axis(mutation_->axis, std::max(0.0, c));
    }
    case MutationKind::break_pm4: {
      const double r = modular_(x);
      return r * (std::exp(-4.0 * r) + 0.01);
    }
    default:
      return modular_(x);
  }
}

DistributionFunction PMSpace::mu(std::span<const double> x) const {
  const double r = modular_value(x);
  if (mutation_) {
    switch (mutation_->kind) {
      case MutationKind::break_pm1:
        return family_ == Family::rational_from ? DistributionFunction::rational(r, 0.1)
                                                : DistributionFunction::step(r, false, 0.1);
      case MutationKind::break_left_continuity:
        return DistributionFunction::step(r, true);
      default:
        break;
    }
  }
  return family_ == Family::rational_from ? DistributionFunction::rational(r) : DistributionFunction::step(r);
}

// ---------------------------------------------------------------------------
// Sampled checks

namespace {

using detail::run_chunked;

/// Global sample index i: deterministic probes first, then random draws.
Vector sample_vector(std::size_t i, const std::vector<Vector>& probes, Rng& rng, int dim) {
  if (i < probes.size()) return probes[i];
  return random_vector(rng, dim);
}

std::vector<double> grid_with_zero(const SampleBudget& budget) {
  std::vector<double> g{0.0};
  g.insert(g.end(), budget.t_grid.begin(), budget.t_grid.end());
  return g;
}

/// Smallest t on a geometric bracket with f(t) >= level, or nullopt.
std::optional<double> quantile(const DistributionFunction& f, double level, double lo, double hi) {
  if (f(hi) < level) return std::nullopt;
  if (f(lo) >= level) return lo;
  for (int i = 0; i < 80; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (f(mid) >= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

CheckReport check_pm1(const PMSpace& space, const SampleBudget& budget) {
  budget.validate();
  const auto probes = probe_vectors(space.dim());
  return run_chunked("pm1", budget, "pm1", budget.n_vectors,
                     [&](CheckReport& rep, Rng& rng, std::size_t begin, std::size_t end) {
                       for (std::size_t i = begin; i < end; ++i) {
                         const Vector x = sample_vector(i, probes, rng, space.dim());
                         const double v = space.mu(x)(0.0);
                         ++rep.samples_run;
                         if (std::abs(v) > budget.epsilon) {
                           rep.add_violation({"pm1", "x=" + fmt_vec(x), v, 0.0});
                         }
                       }
                     });
}

CheckReport check_pm2(const PMSpace& space, const SampleBudget& budget) {
  budget.validate();
  const auto probes = probe_vectors(space.dim());
  // Nonzero vectors may have mu_x(t) close to 1 across the whole grid when
  // rho(x) is tiny; extend the search twelve decades below the grid.
  std::vector<double> low_probes;
  for (int k = 1; k <= 12; ++k) low_probes.push_back(budget.t_grid.front() * std::pow(10.0, -k));
  return run_chunked(
      "pm2", budget, "pm2", budget.n_vectors, [&](CheckReport& rep, Rng& rng, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const Vector x = sample_vector(i, probes, rng, space.dim());
          const auto f = space.mu(x);
          ++rep.samples_run;
          if (is_zero(x)) {
            for (double t : budget.t_grid) {
              if (f(t) != 1.0) {
                rep.add_violation({"pm2_zero", "x=0 t=" + fmt_num(t), f(t), 1.0});
                break;
              }
            }
            continue;
          }
          double lowest = 1.0;
          auto visit = [&](double t) {
            if (t > 0.0) lowest = std::min(lowest, f(t));
          };
          for (double t : budget.t_grid) visit(t);
          for (double t : near_critical_points(f)) visit(t);
          for (double t : low_probes) visit(t);
          if (!(lowest < 1.0 - budget.epsilon)) {
            rep.add_violation({"pm2_nonzero", "x=" + fmt_vec(x), lowest, 1.0 - budget.epsilon});
          }
        }
      });
}

CheckReport check_pm3(const PMSpace& space, const SampleBudget& budget) {
  budget.validate();
  const auto probes = probe_vectors(space.dim());
  const auto base = grid_with_zero(budget);
  return run_chunked("pm3", budget, "pm3", budget.n_vectors,
                     [&](CheckReport& rep, Rng& rng, std::size_t begin, std::size_t end) {
                       for (std::size_t i = begin; i < end; ++i) {
                         const Vector x = sample_vector(i, probes, rng, space.dim());
                         const auto f = space.mu(x);
                         const auto g = space.mu(neg(x));
                         auto test = [&](double t) {
                           const double a = g(t);
                           const double b = f(t);
                           if (std::abs(a - b) > budget.epsilon) {
                             rep.add_violation({"pm3", "x=" + fmt_vec(x) + " t=" + fmt_num(t), a, b});
                             return false;
                           }
                           return true;
                         };
                         ++rep.samples_run;
                         bool ok = true;
                         for (double t : base) ok = ok && test(t);
                         for (double t : near_critical_points(f)) ok = ok && test(t);
                         for (double t : near_critical_points(g)) ok = ok && test(t);
                       }
                     });
}

CheckReport check_pm4(const PMSpace& space, const SampleBudget& budget) {
  budget.validate();
  const auto probes = probe_vectors(space.dim());
  const auto args = grid_with_zero(budget);
  const std::size_t n_probe_pairs = probes.size() * probes.size();
  const double lo_bracket = budget.t_grid.front() * 1e-6;
  const double hi_bracket = budget.t_grid.back() * 1e6;
  return run_chunked(
      "pm4", budget, "pm4", budget.n_vectors, [&](CheckReport& rep, Rng& rng, std::size_t begin, std::size_t end) {
        std::uniform_int_distribution<std::size_t> pick(0, args.size() - 1);
        for (std::size_t i = begin; i < end; ++i) {
          Vector x, y;
          if (i < n_probe_pairs) {
            x = probes[i / probes.size()];
            y = probes[i % probes.size()];
          } else {
            x = random_vector(rng, space.dim());
            y = random_vector(rng, space.dim());
          }
          const double a = convex_weight(rng);
          const double b = 1.0 - a;
          const Vector z = axpby(a, x, b, y);
          const auto fx = space.mu(x);
          const auto fy = space.mu(y);
          const auto fz = space.mu(z);

          std::vector<std::pair<double, double>> pairs;
          for (int k = 0; k < 4; ++k) pairs.emplace_back(args[pick(rng)], args[pick(rng)]);
          // Pair of arguments at which mu_x and mu_y take (nearly) the same value:
          // the modular triangle inequality is tightest there.
          const double s = budget.t_grid[pick(rng) % budget.t_grid.size()];
          const double level = fx(s);
          if (level > 0.0 && level < 1.0) {
            if (auto t = quantile(fy, level, lo_bracket, hi_bracket)) pairs.emplace_back(s, *t);
          }
          const auto cx = fx.critical_points();
          const auto cy = fy.critical_points();
          if (!cx.empty() && !cy.empty()) {
            pairs.emplace_back(cx.front() * (1.0 + kCriticalOffset), cy.front() * (1.0 + kCriticalOffset));
          }

          ++rep.samples_run;
          for (const auto& [ss, tt] : pairs) {
            const double lhs = fz(ss + tt);
            const double rhs = std::min(fx(ss), fy(tt));
            if (lhs < rhs - budget.epsilon) {
              rep.add_violation({"pm4",
                                 "x=" + fmt_vec(x) + " y=" + fmt_vec(y) + " a=" + fmt_num(a) + " s=" + fmt_num(ss) +
                                     " t=" + fmt_num(tt),
                                 lhs, rhs});
              break;
            }
          }
        }
      });
}

CheckReport check_axioms(const PMSpace& space, const SampleBudget& budget) {
  CheckReport report("axioms", budget.rng_seed);
  report.add_part(check_pm1(space, budget));
  report.add_part(check_pm2(space, budget));
  report.add_part(check_pm3(space, budget));
  report.add_part(check_pm4(space, budget));
  return report;
}

CheckReport check_delta2(const PMSpace& space, double c, const SampleBudget& budget) {
  budget.validate();
  if (!(c > 0.0)) throw PreconditionError("Delta2 constant must be positive");
  const auto probes = probe_vectors(space.dim());
  auto report = run_chunked(
      "delta2", budget, "delta2", budget.n_vectors, [&](CheckReport& rep, Rng& rng, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const Vector x = sample_vector(i, probes, rng, space.dim());
          const auto f = space.mu(x);
          const auto f2 = space.mu(scale(2.0, x));
          std::vector<double> pts = budget.t_grid;
          for (double t : near_critical_points(f2)) pts.push_back(t);
          for (double t : near_critical_points(f)) pts.push_back(c * t);
          ++rep.samples_run;
          for (double t : pts) {
            const double lhs = f2(t);
            const double rhs = f(t / c);
            if (lhs < rhs - budget.epsilon) {
              rep.add_violation({"delta2", "x=" + fmt_vec(x) + " t=" + fmt_num(t), lhs, rhs});
              break;
            }
          }
        }
      });
  report.params["c"] = c;
  return report;
}

std::vector<double> default_delta2_candidates() {
  std::vector<double> c;
  for (int k = 0; k <= 16; ++k) c.push_back(std::exp2(k / 4.0));
  return c;
}

std::optional<double> find_delta2_constant(const PMSpace& space, const SampleBudget& budget,
                                           std::span<const double> candidates) {
  if (candidates.empty()) throw PreconditionError("no Delta2 candidates given");
  for (double c : candidates) {
    if (!(c > 0.0)) throw PreconditionError("Delta2 candidates must be positive");
  }
  std::vector<double> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  for (double c : sorted) {
    if (check_delta2(space, c, budget).passed()) return c;
  }
  return std::nullopt;
}

CheckReport check_beta_homogeneous(const PMSpace& space, double beta, const SampleBudget& budget) {
  budget.validate();
  if (!(beta > 0.0 && beta <= 1.0)) throw PreconditionError("beta must lie in (0, 1]");
  const auto probes = probe_vectors(space.dim());
  auto report = run_chunked(
      "beta_homogeneous", budget, "homogeneous", budget.n_scalar_pairs,
      [&](CheckReport& rep, Rng& rng, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const Vector x = sample_vector(i, probes, rng, space.dim());
          const double a = homogeneity_scalar(rng);
          const auto f = space.mu(x);
          const auto fa = space.mu(scale(a, x));
          const double factor = std::pow(std::abs(a), beta);
          std::vector<double> pts = budget.t_grid;
          for (double t : near_critical_points(fa)) pts.push_back(t);
          ++rep.samples_run;
          for (double t : pts) {
            const double lhs = fa(t);
            const double rhs = f(t / factor);
            if (std::abs(lhs - rhs) > budget.epsilon) {
              rep.add_violation(
                  {"homogeneity", "x=" + fmt_vec(x) + " a=" + fmt_num(a) + " t=" + fmt_num(t), lhs, rhs});
              break;
            }
          }
        }
      });
  report.params["beta"] = beta;
  return report;
}

namespace {

void upsilon_into(const PMSpace& space, const Vector& x, const SampleBudget& budget, CheckReport& continuity,
                  CheckReport& strict) {
  const auto u = check_upsilon(space.mu(x), budget);
  for (const auto& p : u.parts) {
    CheckReport& dst = p.name == "continuity" ? continuity : strict;
    dst.samples_run += p.samples_run;
    for (auto v : p.violations) {
      v.inputs = "x=" + fmt_vec(x) + " " + v.inputs;
      if (dst.violations.size() < CheckReport::kMaxRecordedViolations) dst.violations.push_back(std::move(v));
    }
    dst.violation_count += p.violation_count;
    if (dst.violation_count) dst.verdict = Verdict::fail;
  }
}

CheckReport assemble_upsilon(const SampleBudget& budget, CheckReport continuity, CheckReport strict,
                             std::size_t nonzero) {
  CheckReport report("upsilon", budget.rng_seed);
  report.add_part(std::move(continuity));
  report.add_part(std::move(strict));
  report.params["nonzero_samples"] = static_cast<double>(nonzero);
  if (nonzero == 0) report.note = "no nonzero samples; condition is vacuous";
  return report;
}

}  // namespace

CheckReport check_upsilon_space(const PMSpace& space, std::span<const Vector> samples, const SampleBudget& budget) {
  budget.validate();
  CheckReport continuity("continuity", budget.rng_seed);
  CheckReport strict("strict_increase", budget.rng_seed);
  std::size_t nonzero = 0;
  for (const auto& x : samples) {
    if (is_zero(x)) continue;
    ++nonzero;
    upsilon_into(space, x, budget, continuity, strict);
  }
  return assemble_upsilon(budget, std::move(continuity), std::move(strict), nonzero);
}

CheckReport check_upsilon_space(const PMSpace& space, const SampleBudget& budget) {
  budget.validate();
  const auto probes = probe_vectors(space.dim());
  std::vector<CheckReport> cont(kChunks), strict(kChunks);
  std::vector<std::size_t> nonzero(kChunks, 0);
  const std::size_t total = budget.n_vectors;
  parallel_chunks(kChunks, [&](std::size_t c) {
    Rng rng = make_rng(budget.rng_seed, stream_id("upsilon", c));
    cont[c] = CheckReport("continuity", budget.rng_seed);
    strict[c] = CheckReport("strict_increase", budget.rng_seed);
    for (std::size_t i = chunk_begin(total, c); i < chunk_begin(total, c + 1); ++i) {
      const Vector x = sample_vector(i, probes, rng, space.dim());
      if (is_zero(x)) continue;
      ++nonzero[c];
      upsilon_into(space, x, budget, cont[c], strict[c]);
    }
  });
  CheckReport all_cont("continuity", budget.rng_seed), all_strict("strict_increase", budget.rng_seed);
  std::size_t n = 0;
  for (std::size_t c = 0; c < kChunks; ++c) {
    all_cont.merge(cont[c]);
    all_strict.merge(strict[c]);
    n += nonzero[c];
  }
  return assemble_upsilon(budget, std::move(all_cont), std::move(all_strict), n);
}

}  // namespace pmtop
