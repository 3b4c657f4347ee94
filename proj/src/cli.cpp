#include "pmtop/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>

namespace pmtop {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::string> out;
  std::optional<std::string> t_grid;
  std::optional<double> epsilon;
};

struct Context {
  std::string operation;
  std::optional<PMSpace> instance;
  SampleBudget budget;
  Json params;

  const PMSpace& space() const {
    if (!instance) throw ConfigError(operation + " needs an instance in the config");
    return *instance;
  }
};

Json record(const Context& ctx, const PMSpace& space, const SampleBudget& budget, const CheckReport& r,
            const Json& witness = nullptr) {
  Json j;
  j["operation"] = ctx.operation;
  j["instance"] = to_json(space);
  j["budget"] = to_json(budget);
  j["seed"] = budget.rng_seed;
  j["check"] = to_json(r);
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

Json record(const Context& ctx, const CheckReport& r, const Json& witness = nullptr) {
  return record(ctx, ctx.space(), ctx.budget, r, witness);
}

/// Run fn; library precondition and construction failures become an
/// infeasible record named `name`.
void guarded(std::vector<Json>& out, const Context& ctx, const std::string& name,
             const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    CheckReport r(name, ctx.budget.rng_seed);
    r.mark_infeasible(e.what());
    out.push_back(record(ctx, r));
  }
}

// ---------------------------------------------------------------------------
// Parameter access

void allow_params(const Context& ctx, std::initializer_list<std::string_view> keys) {
  for (const auto& item : ctx.params.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
      throw ConfigError("params for " + ctx.operation + ": unknown field '" + item.key() + "'");
    }
  }
}

std::optional<double> opt_number(const Context& ctx, const char* key) {
  if (!ctx.params.contains(key)) return std::nullopt;
  const Json& j = ctx.params[key];
  if (!j.is_number()) throw ConfigError(std::string("params.") + key + ": expected a number");
  return j.get<double>();
}

Vector vector_param(const Context& ctx, const char* key, Vector fallback) {
  if (!ctx.params.contains(key)) return fallback;
  Vector v = vector_from_json(ctx.params[key], key);
  if (v.size() != static_cast<std::size_t>(ctx.space().dim())) {
    throw ConfigError(std::string("params.") + key + " has dimension " + std::to_string(v.size()) +
                      ", instance has " + std::to_string(ctx.space().dim()));
  }
  return v;
}

Ball ball_param(const Context& ctx, const char* key, Ball fallback) {
  if (!ctx.params.contains(key)) return fallback;
  Ball b = ball_from_json(ctx.params[key]);
  if (b.center.size() != static_cast<std::size_t>(ctx.space().dim())) {
    throw ConfigError(std::string("params.") + key + ".center does not match the instance dimension");
  }
  return b;
}

Vector zeros(const Context& ctx) { return Vector(static_cast<std::size_t>(ctx.space().dim()), 0.0); }

double c_param(const Context& ctx) {
  if (auto c = opt_number(ctx, "c")) return *c;
  if (auto c = ctx.space().declared_c()) return *c;
  throw ConfigError(ctx.operation + " needs params.c or a declared_c on the instance");
}

std::optional<double> beta_param(const Context& ctx) {
  if (auto b = opt_number(ctx, "beta")) return b;
  return ctx.space().declared_beta();
}

double required_beta(const Context& ctx) {
  if (auto b = beta_param(ctx)) return *b;
  throw ConfigError(ctx.operation + " needs params.beta or a declared_beta on the instance");
}

// ---------------------------------------------------------------------------
// Operations

using Handler = std::function<std::vector<Json>(const Context&)>;

std::vector<Json> op_check_axioms(const Context& ctx) {
  allow_params(ctx, {});
  std::vector<Json> out;
  guarded(out, ctx, "axioms", [&] { out.push_back(record(ctx, check_axioms(ctx.space(), ctx.budget))); });
  return out;
}

std::vector<Json> op_check_delta2(const Context& ctx) {
  allow_params(ctx, {"c", "candidates"});
  std::vector<Json> out;
  const PMSpace& space = ctx.space();
  if (auto c = opt_number(ctx, "c")) {
    guarded(out, ctx, "delta2", [&] { out.push_back(record(ctx, check_delta2(space, *c, ctx.budget))); });
    return out;
  }
  std::vector<double> candidates = default_delta2_candidates();
  if (ctx.params.contains("candidates")) candidates = vector_from_json(ctx.params["candidates"], "candidates");
  guarded(out, ctx, "find_delta2", [&] {
    CheckReport r("find_delta2", ctx.budget.rng_seed);
    const auto found = find_delta2_constant(space, ctx.budget, candidates);
    r.samples_run = candidates.size();
    if (found) {
      r.params["c"] = *found;
    } else {
      r.mark_infeasible("no candidate constant passes");
    }
    Json w{{"candidates", candidates}, {"c", found ? Json(*found) : Json(nullptr)}};
    out.push_back(record(ctx, r, w));
  });
  if (auto declared = space.declared_c()) {
    guarded(out, ctx, "delta2", [&] { out.push_back(record(ctx, check_delta2(space, *declared, ctx.budget))); });
  }
  return out;
}

std::vector<Json> op_check_homogeneous(const Context& ctx) {
  allow_params(ctx, {"beta"});
  const double beta = required_beta(ctx);
  std::vector<Json> out;
  guarded(out, ctx, "beta_homogeneous",
          [&] { out.push_back(record(ctx, check_beta_homogeneous(ctx.space(), beta, ctx.budget))); });
  return out;
}

std::vector<Json> op_check_upsilon(const Context& ctx) {
  allow_params(ctx, {});
  std::vector<Json> out;
  guarded(out, ctx, "upsilon", [&] { out.push_back(record(ctx, check_upsilon_space(ctx.space(), ctx.budget))); });
  return out;
}

std::vector<Json> op_ball_identities(const Context& ctx) {
  allow_params(ctx, {"x", "level", "scale", "t1", "t2", "level1", "level2", "beta"});
  const PMSpace& space = ctx.space();
  const Vector x = vector_param(ctx, "x", zeros(ctx));
  const double level = opt_number(ctx, "level").value_or(0.5);
  const double scale = opt_number(ctx, "scale").value_or(1.0);
  const double t1 = opt_number(ctx, "t1").value_or(scale / 2.0);
  const double t2 = opt_number(ctx, "t2").value_or(scale);
  const double level1 = opt_number(ctx, "level1").value_or(level / 2.0);
  const double level2 = opt_number(ctx, "level2").value_or(level);
  const auto beta = beta_param(ctx);
  const Ball origin_ball{zeros(ctx), level, scale};

  std::vector<Json> out;
  guarded(out, ctx, "translate_identity",
          [&] { out.push_back(record(ctx, translate_identity(space, x, level, scale, ctx.budget))); });
  guarded(out, ctx, "monotone_in_scale",
          [&] { out.push_back(record(ctx, monotone_in_scale(space, level, t1, t2, ctx.budget))); });
  guarded(out, ctx, "monotone_in_level",
          [&] { out.push_back(record(ctx, monotone_in_level(space, level1, level2, scale, ctx.budget))); });
  for (const char* name : {"scaling_identity", "balanced", "convex"}) {
    guarded(out, ctx, name, [&] {
      if (!beta) throw PreconditionError(std::string(name) + " needs a homogeneity exponent (params.beta)");
      const std::string n = name;
      CheckReport r = n == "scaling_identity" ? scaling_identity(space, *beta, level, scale, ctx.budget)
                      : n == "balanced"       ? is_balanced_sampled(space, origin_ball, ctx.budget)
                                              : is_convex_sampled(space, origin_ball, ctx.budget);
      r.params["beta"] = *beta;
      out.push_back(record(ctx, r));
    });
  }
  return out;
}

std::vector<Json> op_witness_refine(const Context& ctx) {
  allow_params(ctx, {"c", "beta", "outer", "z", "outer2"});
  const PMSpace& space = ctx.space();
  const double c = c_param(ctx);
  const auto beta = beta_param(ctx);
  const Ball outer = ball_param(ctx, "outer", Ball{zeros(ctx), 0.5, 1.0});
  const Vector z = vector_param(ctx, "z", outer.center);
  std::vector<Json> out;
  guarded(out, ctx, "refine_ball", [&] {
    const auto w = refine_ball(space, c, outer, z, ctx.budget, beta);
    out.push_back(record(ctx, w.verification, to_json(w)));
  });
  if (ctx.params.contains("outer2")) {
    const Ball outer2 = ball_param(ctx, "outer2", outer);
    guarded(out, ctx, "refine_intersection", [&] {
      const auto w = refine_intersection(space, c, outer, outer2, z, ctx.budget, beta);
      out.push_back(record(ctx, w.verification, to_json(w)));
    });
  }
  guarded(out, ctx, "local_base", [&] {
    const auto w = local_base_containment(space, outer, ctx.budget);
    out.push_back(record(ctx, w.verification, to_json(w)));
  });
  return out;
}

std::vector<Json> op_witness_separate(const Context& ctx) {
  allow_params(ctx, {"mode", "c", "beta", "x", "y"});
  const PMSpace& space = ctx.space();
  std::string mode = "delta2";
  if (ctx.params.contains("mode")) {
    if (!ctx.params["mode"].is_string()) throw ConfigError("params.mode: expected a string");
    mode = ctx.params["mode"].get<std::string>();
  }
  std::vector<Json> out;
  if (mode == "delta2") {
    const double c = c_param(ctx);
    const Vector x = vector_param(ctx, "x", zeros(ctx));
    const Vector y = vector_param(ctx, "y", unit(space.dim(), 0));
    guarded(out, ctx, "separation", [&] {
      const auto w = separation_witness(space, c, x, y, ctx.budget);
      out.push_back(record(ctx, w.verification, to_json(w)));
    });
  } else if (mode == "homogeneous") {
    const double beta = required_beta(ctx);
    const Vector x = vector_param(ctx, "x", unit(space.dim(), 0));
    guarded(out, ctx, "homogeneous_separation", [&] {
      const auto w = homogeneous_separation_witness(space, beta, x, ctx.budget);
      out.push_back(record(ctx, w.verification, to_json(w)));
    });
  } else {
    throw ConfigError("params.mode must be delta2 or homogeneous, got '" + mode + "'");
  }
  return out;
}

std::vector<Json> op_witness_continuity(const Context& ctx) {
  allow_params(ctx, {"beta", "target", "lambda"});
  const PMSpace& space = ctx.space();
  const double beta = required_beta(ctx);
  const Ball target = ball_param(ctx, "target", Ball{zeros(ctx), 0.5, 1.0});
  const double lambda = opt_number(ctx, "lambda").value_or(1.0);
  std::vector<Json> out;
  guarded(out, ctx, "addition_continuity", [&] {
    const auto w = addition_continuity_witness(space, beta, target, ctx.budget);
    out.push_back(record(ctx, w.verification, to_json(w)));
  });
  guarded(out, ctx, "scalar_continuity", [&] {
    const auto w = scalar_continuity_witness(space, beta, target, lambda, ctx.budget);
    out.push_back(record(ctx, w.verification, to_json(w)));
  });
  return out;
}

std::vector<Json> op_check_convergence(const Context& ctx) {
  allow_params(ctx, {"sequence", "n_max", "eps_conv", "K"});
  const PMSpace& space = ctx.space();
  SequenceSpec seq = ctx.params.contains("sequence")
                         ? sequence_from_json(ctx.params["sequence"])
                         : make_sequence(SequenceKind::harmonic, zeros(ctx), unit(space.dim(), 0));
  if (seq.x.size() != static_cast<std::size_t>(space.dim())) {
    throw ConfigError("params.sequence does not match the instance dimension");
  }
  std::uint64_t n_max = kDefaultNMax;
  if (ctx.params.contains("n_max")) {
    const Json& j = ctx.params["n_max"];
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1) throw ConfigError("params.n_max: expected an integer >= 1");
    n_max = j.get<std::uint64_t>();
  }
  const double eps_conv = opt_number(ctx, "eps_conv").value_or(kConvergenceEpsilon);
  int K = 10;
  if (ctx.params.contains("K")) {
    const Json& j = ctx.params["K"];
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1 || j.get<std::int64_t>() > 1000000) {
      throw ConfigError("params.K: expected an integer in [1, 1e6]");
    }
    K = j.get<int>();
  }
  std::vector<Json> out;
  guarded(out, ctx, "mu_convergence", [&] {
    const auto v = check_mu_convergence(space, seq, ctx.budget.t_grid, eps_conv, n_max);
    CheckReport r("mu_convergence", ctx.budget.rng_seed);
    r.samples_run = v.per_t.size();
    r.params["converges"] = v.converges ? 1.0 : 0.0;
    Json w = to_json(v);
    w["sequence"] = to_json(seq);
    out.push_back(record(ctx, r, w));
  });
  guarded(out, ctx, "topological_convergence", [&] {
    const auto balls = default_local_base(seq.candidate_limit, K);
    const auto v = check_topological_convergence(space, seq, balls, n_max);
    CheckReport r("topological_convergence", ctx.budget.rng_seed);
    r.samples_run = balls.size();
    r.params["converges"] = v.converges ? 1.0 : 0.0;
    if (v.vacuous) r.note = "empty ball list: vacuously true";
    Json w = to_json(v);
    w["K"] = K;
    out.push_back(record(ctx, r, w));
  });
  guarded(out, ctx, "convergence_equivalence", [&] {
    CheckReport r = convergence_equivalence(space, seq, ctx.budget.t_grid, eps_conv, n_max, K);
    r.seed = ctx.budget.rng_seed;
    out.push_back(record(ctx, r));
  });
  return out;
}

std::vector<Json> op_falsify(const Context& ctx) {
  allow_params(ctx, {"runs", "family", "mutation"});
  std::vector<Json> out;
  auto emit = [&](const PMSpace& space, const SampleBudget& budget) {
    const FalsifierRun run = run_registry(space, budget);
    CheckReport summary("falsify", budget.rng_seed);
    for (const auto& name : registry_predicates()) summary.add_part(run.results.at(name));
    summary.params["failures"] = static_cast<double>(run.failures());
    summary.params["infeasible"] = static_cast<double>(run.infeasibles());
    out.push_back(record(ctx, space, budget, summary));
  };
  if (ctx.instance) {
    if (ctx.params.contains("runs") || ctx.params.contains("family") || ctx.params.contains("mutation")) {
      throw ConfigError("params.runs/family/mutation only apply when the config has no instance");
    }
    emit(*ctx.instance, ctx.budget);
    return out;
  }
  std::uint64_t runs = 1;
  if (ctx.params.contains("runs")) {
    const Json& j = ctx.params["runs"];
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1) throw ConfigError("params.runs: expected an integer >= 1");
    runs = j.get<std::uint64_t>();
  }
  Family family = Family::rational_from;
  std::optional<MutationKind> mutation;
  try {
    if (ctx.params.contains("family")) family = family_from_string(ctx.params["family"].get<std::string>());
    if (ctx.params.contains("mutation") && !ctx.params["mutation"].is_null()) {
      mutation = mutation_from_string(ctx.params["mutation"].get<std::string>());
    }
  } catch (const std::exception& e) {
    throw ConfigError(std::string("params for falsify: ") + e.what());
  }
  for (std::uint64_t i = 0; i < runs; ++i) {
    SampleBudget budget = ctx.budget;
    budget.rng_seed = ctx.budget.rng_seed + i;
    emit(generate_instance(budget.rng_seed, family, mutation), budget);
  }
  return out;
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"check-axioms", op_check_axioms},
      {"check-delta2", op_check_delta2},
      {"check-homogeneous", op_check_homogeneous},
      {"check-upsilon", op_check_upsilon},
      {"ball-identities", op_ball_identities},
      {"witness-refine", op_witness_refine},
      {"witness-separate", op_witness_separate},
      {"witness-continuity", op_witness_continuity},
      {"check-convergence", op_check_convergence},
      {"falsify", op_falsify},
  };
  return h;
}

const char* describe(const std::string& op) {
  static const std::map<std::string, const char*> d{
      {"check-axioms", "PM1-PM4 on sampled vectors, weights and arguments"},
      {"check-delta2", "doubling condition for a given c, or the smallest passing candidate"},
      {"check-homogeneous", "beta-homogeneity"},
      {"check-upsilon", "continuity and strict increase on {0 < mu_x < 1}"},
      {"ball-identities", "translation, scaling, monotonicity, balancedness and convexity of balls"},
      {"witness-refine", "basis refinement and local base witnesses"},
      {"witness-separate", "Hausdorff separation witnesses"},
      {"witness-continuity", "continuity witnesses for addition and scalar multiplication"},
      {"check-convergence", "sequence convergence by the mu criterion and by local-base membership"},
      {"falsify", "run every predicate on a (possibly mutated) instance"},
  };
  return d.at(op);
}

}  // namespace

int exit_code_for(const std::vector<Json>& records) {
  bool any_fail = false;
  bool any_infeasible = false;
  for (const auto& r : records) {
    const auto verdict = r.at("check").at("verdict").get<std::string>();
    any_fail = any_fail || verdict == "fail";
    any_infeasible = any_infeasible || verdict == "infeasible";
  }
  if (any_fail) return 1;
  if (any_infeasible) return 2;
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Checks and witness constructions for probabilistic modular spaces", "pmtop"};
  app.require_subcommand(1);
  Flags flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, handler] : handlers()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", flags.config, "config file (JSON)");
    sub->add_option("--seed", flags.seed, "RNG seed (default 0)");
    sub->add_option("--samples", flags.samples, "sampled vectors and scalar pairs per check")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "report path (default: standard output)");
    sub->add_option("--t-grid", flags.t_grid, "evaluation grid \"min,max,count\"");
    sub->add_option("--epsilon", flags.epsilon, "comparison tolerance")->check(CLI::PositiveNumber);
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 3;
  }

  std::string op;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) op = name;
  }

  std::vector<Json> records;
  std::optional<std::string> out_path;
  try {
    Config cfg;
    if (!flags.config.empty()) cfg = load_config(flags.config);
    if (cfg.operation && *cfg.operation != op) {
      throw ConfigError("config operation '" + *cfg.operation + "' does not match subcommand '" + op + "'");
    }
    if (flags.seed) cfg.budget.rng_seed = *flags.seed;
    if (flags.samples) {
      cfg.budget.n_vectors = *flags.samples;
      cfg.budget.n_scalar_pairs = *flags.samples;
    }
    if (flags.t_grid) cfg.budget.t_grid = parse_t_grid(*flags.t_grid);
    if (flags.epsilon) cfg.budget.epsilon = *flags.epsilon;
    try {
      cfg.budget.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("budget: ") + e.what());
    }
    out_path = flags.out ? flags.out : cfg.output;

    Context ctx{op, cfg.instance, cfg.budget, cfg.params};
    records = handlers().at(op)(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "pmtop: config error: " << e.what() << "\n";
    return 3;
  }

  std::string text;
  for (const auto& r : records) text += dump_record(r) + "\n";
  if (out_path) {
    std::ofstream f(*out_path, std::ios::binary);
    if (!f || !(f << text)) {
      std::cerr << "pmtop: cannot write report to '" << *out_path << "'\n";
      return 3;
    }
  } else {
    std::cout << text << std::flush;
  }
  return exit_code_for(records);
}

}  // namespace pmtop
