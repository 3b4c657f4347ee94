#include "pmtop/falsifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pmtop/balls.hpp"
#include "pmtop/convergence.hpp"
#include "pmtop/topology.hpp"

namespace pmtop {

double true_delta2_constant(const ClassicalModular& modular) { return std::exp2(modular.degree()); }

PMSpace generate_instance(std::uint64_t seed, Family family, std::optional<MutationKind> mutation) {
  Rng rng = make_rng(seed, stream_id("instance"));
  const int dim = 1 + static_cast<int>(rng() % 4);
  const bool weighted = rng() % 2 == 0;
  ClassicalModular modular = ClassicalModular::p_power(1.0);
  if (weighted) {
    std::vector<double> w(static_cast<std::size_t>(dim));
    for (auto& wi : w) wi = 0.5 + 1.5 * uniform01(rng);
    modular = ClassicalModular::weighted_abs(std::move(w));
  } else {
    modular = ClassicalModular::p_power(rng() % 2 == 0 ? 1.0 : 2.0);
  }
  double c = true_delta2_constant(modular);
  const std::optional<double> beta = modular.degree() == 1.0 ? std::optional<double>(1.0) : std::nullopt;
  std::optional<Mutation> mut;
  if (mutation) {
    mut = Mutation{*mutation, static_cast<int>(rng() % static_cast<std::uint64_t>(dim))};
    if (*mutation == MutationKind::break_delta2_declaration) c *= 0.5 + 0.4 * uniform01(rng);
  }
  return PMSpace(dim, family, std::move(modular), c, beta, mut);
}

std::size_t FalsifierRun::failures() const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const auto& kv) { return kv.second.failed(); }));
}

std::size_t FalsifierRun::infeasibles() const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const auto& kv) { return kv.second.infeasible(); }));
}

std::string target_predicate(MutationKind m) {
  switch (m) {
    case MutationKind::break_pm1: return "pm1";
    case MutationKind::break_pm2: return "pm2";
    case MutationKind::break_pm3: return "pm3";
    case MutationKind::break_pm4: return "pm4";
    case MutationKind::break_left_continuity: return "left_continuity";
    case MutationKind::break_delta2_declaration: return "delta2_declared";
  }
  return "";
}

const std::vector<std::string>& registry_predicates() {
  static const std::vector<std::string> names{
      "delta_membership", "pm1", "pm2", "pm3", "pm4", "left_continuity", "delta2_declared", "beta_homogeneous",
      "upsilon", "lemma1", "ball_translate", "ball_scaling", "monotone_scale", "monotone_level", "balanced",
      "convex", "refine_ball", "basis_intersection", "local_base", "separation", "homogeneous_separation",
      "addition_continuity", "scalar_continuity", "convergence_equivalence",
  };
  return names;
}

namespace {

/// Probe vectors followed by n random normal vectors.
std::vector<Vector> function_samples(const PMSpace& space, std::size_t n, Rng& rng) {
  auto out = probe_vectors(space.dim());
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_vector(rng, space.dim()));
  return out;
}

double random_level(Rng& rng) { return 0.05 + 0.9 * uniform01(rng); }

double random_scale(Rng& rng, const SampleBudget& b) { return b.t_grid[rng() % b.t_grid.size()]; }

/// Per-input witness runs: construction failures are counted, violations
/// are kept, and the report is infeasible only if no input was feasible.
class WitnessTally {
 public:
  WitnessTally(std::string name, const SampleBudget& budget) : report_(std::move(name), budget.rng_seed) {}

  template <class Fn>
  void attempt(Fn&& fn) {
    try {
      CheckReport r = fn();
      if (r.infeasible()) {
        record_infeasible(r.note);
        return;
      }
      ++feasible_;
      report_.merge(r);
    } catch (const InfeasibleError& e) {
      record_infeasible(e.what());
    } catch (const PreconditionError& e) {
      record_infeasible(e.what());
    }
  }

  CheckReport finish() && {
    report_.params["feasible_inputs"] = static_cast<double>(feasible_);
    report_.params["infeasible_inputs"] = static_cast<double>(infeasible_);
    if (feasible_ == 0 && !report_.failed()) {
      report_.mark_infeasible("no feasible input" + (first_note_.empty() ? "" : ": " + first_note_));
    } else if (infeasible_ > 0 && report_.note.empty()) {
      report_.note = "some inputs infeasible: " + first_note_;
    }
    return std::move(report_);
  }

 private:
  void record_infeasible(const std::string& why) {
    ++infeasible_;
    if (first_note_.empty()) first_note_ = why;
  }

  CheckReport report_;
  std::size_t feasible_ = 0;
  std::size_t infeasible_ = 0;
  std::string first_note_;
};

/// Fold per-sample reports into one named report.
CheckReport fold(const std::string& name, const SampleBudget& budget, const std::vector<CheckReport>& parts) {
  CheckReport out(name, budget.rng_seed);
  for (const auto& p : parts) {
    out.samples_run += p.samples_run;
    for (const auto& v : p.violations) out.add_violation(v);
    // add_violation counted the recorded ones; add the unrecorded remainder.
    out.violation_count += p.violation_count - p.violations.size();
    if (p.infeasible() && !out.failed()) out.mark_infeasible(p.name + ": " + p.note);
  }
  return out;
}

/// A member of a random ball, or nullopt if none could be sampled.
std::optional<std::pair<Ball, Vector>> random_ball_and_member(const PMSpace& space, const SampleBudget& budget,
                                                              Rng& rng, bool centered = false) {
  Vector center = centered ? Vector(static_cast<std::size_t>(space.dim()), 0.0) : random_vector(rng, space.dim());
  Ball ball{std::move(center), random_level(rng), random_scale(rng, budget)};
  BallSampler sampler(space, ball, rng, budget.epsilon);
  auto members = sampler.members(1);
  if (members.empty()) return std::nullopt;
  return std::pair{ball, members.front()};
}

struct Registry {
  const PMSpace& space;
  const SampleBudget& budget;
  std::map<std::string, CheckReport>& results;

  Rng rng_for(const std::string& name) const { return make_rng(budget.rng_seed, stream_id(name.c_str())); }

  bool ok(const std::string& name) const {
    auto it = results.find(name);
    return it != results.end() && it->second.passed();
  }

  /// First unmet hypothesis among `needs`, if any.
  std::optional<std::string> missing(std::initializer_list<const char*> needs) const {
    for (const char* n : needs) {
      if (!ok(n)) return std::string(n);
    }
    return std::nullopt;
  }

  void run(const std::string& name, std::initializer_list<const char*> needs, const std::function<CheckReport()>& fn) {
    if (auto m = missing(needs)) {
      CheckReport r(name, budget.rng_seed);
      r.mark_infeasible("hypothesis not verified: " + *m);
      results[name] = std::move(r);
      return;
    }
    CheckReport r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = CheckReport(name, budget.rng_seed);
      r.mark_infeasible(e.what());
    }
    r.name = name;
    results[name] = std::move(r);
  }
};

}  // namespace

FalsifierRun run_registry(const PMSpace& instance, const SampleBudget& budget) {
  budget.validate();
  FalsifierRun run{budget.rng_seed, budget, instance, {}};
  Registry reg{instance, budget, run.results};
  const PMSpace& space = instance;
  const std::size_t n_fn = budget.n_witnesses;
  const auto declared_c = space.declared_c();
  const auto declared_beta = space.declared_beta();

  reg.run("delta_membership", {}, [&] {
    Rng rng = reg.rng_for("delta_membership");
    std::vector<CheckReport> parts;
    for (const auto& x : function_samples(space, n_fn, rng)) parts.push_back(check_delta_membership(space.mu(x), budget));
    return fold("delta_membership", budget, parts);
  });
  reg.run("pm1", {}, [&] { return check_pm1(space, budget); });
  reg.run("pm2", {}, [&] { return check_pm2(space, budget); });
  reg.run("pm3", {}, [&] { return check_pm3(space, budget); });
  reg.run("pm4", {}, [&] { return check_pm4(space, budget); });
  reg.run("left_continuity", {}, [&] {
    Rng rng = reg.rng_for("left_continuity");
    std::vector<CheckReport> parts;
    for (const auto& x : function_samples(space, n_fn, rng)) {
      const auto f = space.mu(x);
      auto points = budget.t_grid;
      for (double c : f.critical_points()) points.push_back(c);
      for (double t : points) parts.push_back(check_left_continuity(f, t, budget));
    }
    return fold("left_continuity", budget, parts);
  });
  reg.run("delta2_declared", {}, [&] {
    if (!declared_c) {
      CheckReport r("delta2_declared", budget.rng_seed);
      r.mark_infeasible("no doubling constant declared");
      return r;
    }
    return check_delta2(space, *declared_c, budget);
  });
  reg.run("beta_homogeneous", {}, [&] {
    if (!declared_beta) {
      CheckReport r("beta_homogeneous", budget.rng_seed);
      r.mark_infeasible("no homogeneity exponent declared");
      return r;
    }
    return check_beta_homogeneous(space, *declared_beta, budget);
  });
  reg.run("upsilon", {}, [&] {
    // (Upsilon) is an optional condition, not a claim of the instance:
    // when it does not hold the dependent theorems are out of scope.
    Rng rng = reg.rng_for("upsilon");
    auto samples = function_samples(space, n_fn, rng);
    CheckReport r = check_upsilon_space(space, samples, budget);
    if (r.failed()) {
      CheckReport out("upsilon", budget.rng_seed);
      out.samples_run = r.samples_run;
      out.params = r.params;
      const std::string first = r.violations.empty() ? "" : ": " + r.violations.front().inputs;
      out.mark_infeasible("condition (Upsilon) does not hold" + first);
      return out;
    }
    return r;
  });

  const std::initializer_list<const char*> axioms{"delta_membership", "pm1", "pm2", "pm3", "pm4"};

  reg.run("lemma1", {"delta_membership", "pm1", "pm2", "pm3", "pm4"}, [&] {
    CheckReport r("lemma1", budget.rng_seed);
    Rng rng = reg.rng_for("lemma1");
    auto try_one = [&](const Ball& ball, const Vector& y) {
      if (!contains(space, ball, y)) return;
      ++r.samples_run;
      try {
        const double ts = lemma1_witness(space, ball, y);
        const double v = space.mu(sub(ball.center, y))(ts);
        if (!(ts > 0.0 && ts < ball.scale && v > 1.0 - ball.level)) {
          r.add_violation({"t* inequality", "t*=" + fmt_num(ts) + " y=" + fmt_vec(y), v, 1.0 - ball.level});
        }
      } catch (const InfeasibleError& e) {
        r.add_violation({"no t* found", e.what(), 0.0, 0.0});
      }
    };
    for (std::size_t i = 0; i < n_fn; ++i) {
      if (auto bm = random_ball_and_member(space, budget, rng)) try_one(bm->first, bm->second);
      // Boundary probes: the scale sits exactly on a jump of mu_{x-y}.
      const Vector x = random_vector(rng, space.dim());
      const Vector y = random_vector(rng, space.dim());
      for (double c : space.mu(sub(x, y)).critical_points()) try_one(Ball{x, random_level(rng), c}, y);
    }
    return r;
  });
  reg.run("ball_translate", axioms, [&] {
    Rng rng = reg.rng_for("ball_translate");
    std::vector<CheckReport> parts;
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      parts.push_back(translate_identity(space, random_vector(rng, space.dim()), random_level(rng),
                                         random_scale(rng, budget), b));
    }
    return fold("ball_translate", budget, parts);
  });
  reg.run("ball_scaling", {"delta_membership", "pm1", "pm2", "pm3", "pm4", "beta_homogeneous"}, [&] {
    Rng rng = reg.rng_for("ball_scaling");
    const CheckReport& hom = run.results.at("beta_homogeneous");
    std::vector<CheckReport> parts;
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      parts.push_back(
          scaling_identity(space, *declared_beta, random_level(rng), random_scale(rng, budget), b, &hom));
    }
    return fold("ball_scaling", budget, parts);
  });
  reg.run("monotone_scale", axioms, [&] {
    Rng rng = reg.rng_for("monotone_scale");
    std::vector<CheckReport> parts;
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      double t1 = random_scale(rng, budget), t2 = random_scale(rng, budget);
      if (t1 > t2) std::swap(t1, t2);
      parts.push_back(monotone_in_scale(space, random_level(rng), t1, t2, b));
    }
    return fold("monotone_scale", budget, parts);
  });
  reg.run("monotone_level", axioms, [&] {
    Rng rng = reg.rng_for("monotone_level");
    std::vector<CheckReport> parts;
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      double a1 = random_level(rng), a2 = random_level(rng);
      if (a1 > a2) std::swap(a1, a2);
      parts.push_back(monotone_in_level(space, a1, a2, random_scale(rng, budget), b));
    }
    return fold("monotone_level", budget, parts);
  });
  for (const char* name : {"balanced", "convex"}) {
    reg.run(name, {"delta_membership", "pm1", "pm2", "pm3", "pm4", "beta_homogeneous"}, [&, name] {
      Rng rng = reg.rng_for(name);
      std::vector<CheckReport> parts;
      for (std::size_t i = 0; i < n_fn; ++i) {
        SampleBudget b = budget;
        b.rng_seed = rng();
        const Ball ball{Vector(static_cast<std::size_t>(space.dim()), 0.0), random_level(rng),
                        random_scale(rng, budget)};
        parts.push_back(std::string(name) == "balanced" ? is_balanced_sampled(space, ball, b)
                                                        : is_convex_sampled(space, ball, b));
      }
      return fold(name, budget, parts);
    });
  }

  const std::optional<double> verified_beta = reg.ok("beta_homogeneous") ? declared_beta : std::nullopt;

  reg.run("refine_ball", {"delta_membership", "pm1", "pm2", "pm3", "pm4", "delta2_declared"}, [&] {
    Rng rng = reg.rng_for("refine_ball");
    WitnessTally tally("refine_ball", budget);
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      tally.attempt([&] {
        auto bm = random_ball_and_member(space, budget, rng);
        if (!bm) throw InfeasibleError("no member sampled");
        return refine_ball(space, *declared_c, bm->first, bm->second, b, verified_beta).verification;
      });
    }
    return std::move(tally).finish();
  });
  reg.run("basis_intersection", {"delta_membership", "pm1", "pm2", "pm3", "pm4", "delta2_declared"}, [&] {
    Rng rng = reg.rng_for("basis_intersection");
    WitnessTally tally("basis_intersection", budget);
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      tally.attempt([&] {
        // Two balls around nearby centers, both containing z.
        const Vector z = random_vector(rng, space.dim());
        std::vector<Ball> balls;
        for (int k = 0; k < 2; ++k) {
          const Vector center = add(z, random_vector(rng, space.dim(), 0.5));
          const double level = random_level(rng);
          const auto f = space.mu(sub(center, z));
          double t = budget.t_grid.front();
          while (!(f(t) > 1.0 - level + 1e-3) && t < 1e12) t *= 2.0;
          balls.push_back(Ball{center, level, t});
        }
        return refine_intersection(space, *declared_c, balls[0], balls[1], z, b, verified_beta).verification;
      });
    }
    return std::move(tally).finish();
  });
  reg.run("local_base", axioms, [&] {
    Rng rng = reg.rng_for("local_base");
    std::vector<CheckReport> parts;
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      const Ball outer{random_vector(rng, space.dim()), random_level(rng), random_scale(rng, budget)};
      parts.push_back(local_base_containment(space, outer, b).verification);
    }
    return fold("local_base", budget, parts);
  });
  reg.run("separation", {"delta_membership", "pm1", "pm2", "pm3", "pm4", "delta2_declared"}, [&] {
    Rng rng = reg.rng_for("separation");
    WitnessTally tally("separation", budget);
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      const Vector x = random_vector(rng, space.dim());
      const Vector y = random_vector(rng, space.dim());
      tally.attempt([&] { return separation_witness(space, *declared_c, x, y, b).verification; });
    }
    return std::move(tally).finish();
  });

  const std::initializer_list<const char*> tvs{"delta_membership", "pm1", "pm2", "pm3", "pm4",
                                               "beta_homogeneous", "upsilon"};
  reg.run("homogeneous_separation", tvs, [&] {
    Rng rng = reg.rng_for("homogeneous_separation");
    WitnessTally tally("homogeneous_separation", budget);
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      const Vector x = random_vector(rng, space.dim());
      tally.attempt([&] { return homogeneous_separation_witness(space, *declared_beta, x, b).verification; });
    }
    return std::move(tally).finish();
  });
  reg.run("addition_continuity", tvs, [&] {
    Rng rng = reg.rng_for("addition_continuity");
    WitnessTally tally("addition_continuity", budget);
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      const Ball target{Vector(static_cast<std::size_t>(space.dim()), 0.0), random_level(rng),
                        random_scale(rng, budget)};
      tally.attempt([&] { return addition_continuity_witness(space, *declared_beta, target, b).verification; });
    }
    return std::move(tally).finish();
  });
  reg.run("scalar_continuity", tvs, [&] {
    Rng rng = reg.rng_for("scalar_continuity");
    WitnessTally tally("scalar_continuity", budget);
    for (std::size_t i = 0; i < n_fn; ++i) {
      SampleBudget b = budget;
      b.rng_seed = rng();
      const Ball target{Vector(static_cast<std::size_t>(space.dim()), 0.0), random_level(rng),
                        random_scale(rng, budget)};
      const double lambda = i == 0 ? 0.0 : 4.0 * standard_normal(rng);
      tally.attempt(
          [&] { return scalar_continuity_witness(space, *declared_beta, target, lambda, b).verification; });
    }
    return std::move(tally).finish();
  });
  reg.run("convergence_equivalence", axioms, [&] {
    Rng rng = reg.rng_for("convergence_equivalence");
    std::vector<CheckReport> parts;
    for (auto kind : kAllSequenceKinds) {
      const Vector x = random_vector(rng, space.dim());
      const Vector v = normalized_direction(space, random_vector(rng, space.dim()));
      parts.push_back(convergence_equivalence(space, make_sequence(kind, x, v, 0.5), budget.t_grid));
    }
    return fold("convergence_equivalence", budget, parts);
  });

  return run;
}

}  // namespace pmtop
