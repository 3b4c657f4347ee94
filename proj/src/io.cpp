#include "pmtop/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pmtop {

namespace {

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError(where + ": unknown field '" + item.key() + "'");
    }
  }
}

const Json& required(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing field '" + key + "'");
  return *it;
}

// Non-finite values are written as strings so that records stay valid JSON.
Json num(double d) {
  if (std::isfinite(d)) return d;
  if (std::isnan(d)) return "nan";
  return d > 0 ? "inf" : "-inf";
}

double as_double(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError(where + ": expected a number");
}

std::uint64_t as_unsigned(const Json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v >= 0) return static_cast<std::uint64_t>(v);
  }
  throw ConfigError(where + ": expected a non-negative integer");
}

std::int64_t as_integer(const Json& j, const std::string& where) {
  if (j.is_number_integer() || j.is_number_unsigned()) return j.get<std::int64_t>();
  throw ConfigError(where + ": expected an integer");
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (double d : v) a.push_back(num(d));
  return a;
}

template <class T, class F>
T translate_errors(F&& f, const std::string& where) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

Vector vector_from_json(const Json& j, const char* where) {
  if (!j.is_array()) throw ConfigError(std::string(where) + ": expected an array of numbers");
  Vector v;
  for (const auto& e : j) v.push_back(as_double(e, where));
  return v;
}

// ---------------------------------------------------------------------------
// Budget

std::vector<double> parse_t_grid(const std::string& spec) {
  std::stringstream ss(spec);
  std::string a, b, c;
  if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c) ) {
    throw ConfigError("t-grid must be \"min,max,count\"");
  }
  try {
    std::size_t pos = 0;
    const double lo = std::stod(a, &pos);
    if (pos != a.size()) throw std::invalid_argument(a);
    const double hi = std::stod(b, &pos);
    if (pos != b.size()) throw std::invalid_argument(b);
    const long count = std::stol(c, &pos);
    if (pos != c.size()) throw std::invalid_argument(c);
    if (!(lo > 0.0) || !(hi >= lo) || count < 1 || (count == 1 && hi != lo)) throw std::invalid_argument("range");
    return log_grid(lo, hi, static_cast<std::size_t>(count));
  } catch (const std::exception&) {
    throw ConfigError("t-grid must be \"min,max,count\" with 0 < min <= max and count >= 1, got \"" + spec + "\"");
  }
}

Json to_json(const SampleBudget& b) {
  Json j;
  j["n_vectors"] = b.n_vectors;
  j["n_scalar_pairs"] = b.n_scalar_pairs;
  j["n_witnesses"] = b.n_witnesses;
  j["verify_samples"] = b.verify_samples;
  j["t_grid"] = vec_json(b.t_grid);
  j["epsilon"] = b.epsilon;
  j["epsilon_strict"] = b.epsilon_strict;
  j["rng_seed"] = b.rng_seed;
  return j;
}

SampleBudget budget_from_json(const Json& j) {
  const std::string where = "budget";
  check_keys(j, {"n_vectors", "n_scalar_pairs", "n_witnesses", "verify_samples", "t_grid", "epsilon",
                 "epsilon_strict", "rng_seed"},
             where);
  SampleBudget b;
  if (j.contains("n_vectors")) b.n_vectors = as_unsigned(j["n_vectors"], where + ".n_vectors");
  if (j.contains("n_scalar_pairs")) b.n_scalar_pairs = as_unsigned(j["n_scalar_pairs"], where + ".n_scalar_pairs");
  if (j.contains("n_witnesses")) b.n_witnesses = as_unsigned(j["n_witnesses"], where + ".n_witnesses");
  if (j.contains("verify_samples")) b.verify_samples = as_unsigned(j["verify_samples"], where + ".verify_samples");
  if (j.contains("epsilon")) b.epsilon = as_double(j["epsilon"], where + ".epsilon");
  if (j.contains("epsilon_strict")) b.epsilon_strict = as_double(j["epsilon_strict"], where + ".epsilon_strict");
  if (j.contains("rng_seed")) b.rng_seed = as_unsigned(j["rng_seed"], where + ".rng_seed");
  if (j.contains("t_grid")) {
    const Json& g = j["t_grid"];
    if (g.is_array()) {
      b.t_grid = vector_from_json(g, "budget.t_grid");
    } else if (g.is_string()) {
      b.t_grid = parse_t_grid(g.get<std::string>());
    } else {
      check_keys(g, {"min", "max", "count"}, "budget.t_grid");
      const double lo = as_double(required(g, "min", "budget.t_grid"), "budget.t_grid.min");
      const double hi = as_double(required(g, "max", "budget.t_grid"), "budget.t_grid.max");
      const auto count = as_unsigned(required(g, "count", "budget.t_grid"), "budget.t_grid.count");
      b.t_grid = parse_t_grid(fmt_num(lo) + "," + fmt_num(hi) + "," + std::to_string(count));
    }
  }
  translate_errors<int>([&] { b.validate(); return 0; }, where);
  return b;
}

// ---------------------------------------------------------------------------
// Instance

Json to_json(const PMSpace& s) {
  Json j;
  j["dim"] = s.dim();
  j["family"] = std::string(to_string(s.family()));
  Json m;
  if (s.modular().kind() == ClassicalModular::Kind::p_power) {
    m["kind"] = "p_power";
    m["p"] = s.modular().p();
  } else {
    m["kind"] = "weighted_abs";
    m["weights"] = vec_json(s.modular().weights());
  }
  j["modular"] = m;
  if (s.declared_c()) j["declared_c"] = *s.declared_c();
  if (s.declared_beta()) j["declared_beta"] = *s.declared_beta();
  if (s.mutation()) {
    j["mutation"] = Json{{"kind", std::string(to_string(s.mutation()->kind))}, {"axis", s.mutation()->axis}};
  }
  return j;
}

PMSpace instance_from_json(const Json& j) {
  const std::string where = "instance";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  if (j.contains("generate")) {
    check_keys(j, {"generate"}, where);
    const Json& g = j["generate"];
    check_keys(g, {"seed", "family", "mutation"}, "instance.generate");
    const auto seed = as_unsigned(required(g, "seed", "instance.generate"), "instance.generate.seed");
    const auto family = translate_errors<Family>(
        [&] { return family_from_string(as_string(required(g, "family", "instance.generate"), "family")); },
        "instance.generate.family");
    std::optional<MutationKind> mutation;
    if (g.contains("mutation") && !g["mutation"].is_null()) {
      mutation = translate_errors<MutationKind>(
          [&] { return mutation_from_string(as_string(g["mutation"], "mutation")); }, "instance.generate.mutation");
    }
    return generate_instance(seed, family, mutation);
  }
  check_keys(j, {"dim", "family", "modular", "declared_c", "declared_beta", "mutation"}, where);
  const auto dim = as_integer(required(j, "dim", where), "instance.dim");
  if (dim < 1 || dim > kMaxDim) throw ConfigError("instance.dim must lie in [1, " + std::to_string(kMaxDim) + "]");
  const auto family = translate_errors<Family>(
      [&] { return family_from_string(as_string(required(j, "family", where), "family")); }, "instance.family");

  const Json& m = required(j, "modular", where);
  if (!m.is_object()) throw ConfigError("instance.modular: expected an object");
  const auto kind = as_string(required(m, "kind", "instance.modular"), "instance.modular.kind");
  std::optional<ClassicalModular> modular;
  if (kind == "p_power") {
    check_keys(m, {"kind", "p"}, "instance.modular");
    const double p = as_double(required(m, "p", "instance.modular"), "instance.modular.p");
    modular = translate_errors<ClassicalModular>([&] { return ClassicalModular::p_power(p); }, "instance.modular");
  } else if (kind == "weighted_abs") {
    check_keys(m, {"kind", "weights"}, "instance.modular");
    auto w = vector_from_json(required(m, "weights", "instance.modular"), "instance.modular.weights");
    modular = translate_errors<ClassicalModular>([&] { return ClassicalModular::weighted_abs(w); },
                                                 "instance.modular");
  } else {
    throw ConfigError("instance.modular.kind must be p_power or weighted_abs, got '" + kind + "'");
  }

  std::optional<double> c, beta;
  if (j.contains("declared_c") && !j["declared_c"].is_null()) c = as_double(j["declared_c"], "instance.declared_c");
  if (j.contains("declared_beta") && !j["declared_beta"].is_null()) {
    beta = as_double(j["declared_beta"], "instance.declared_beta");
  }
  std::optional<Mutation> mutation;
  if (j.contains("mutation") && !j["mutation"].is_null()) {
    const Json& mu = j["mutation"];
    check_keys(mu, {"kind", "axis"}, "instance.mutation");
    Mutation mm;
    mm.kind = translate_errors<MutationKind>(
        [&] { return mutation_from_string(as_string(required(mu, "kind", "instance.mutation"), "kind")); },
        "instance.mutation.kind");
    if (mu.contains("axis")) mm.axis = static_cast<int>(as_integer(mu["axis"], "instance.mutation.axis"));
    mutation = mm;
  }
  return translate_errors<PMSpace>(
      [&] { return PMSpace(static_cast<int>(dim), family, *modular, c, beta, mutation); }, where);
}

// ---------------------------------------------------------------------------
// Balls and sequences

Json to_json(const Ball& b) { return Json{{"center", vec_json(b.center)}, {"level", num(b.level)}, {"scale", num(b.scale)}}; }

Ball ball_from_json(const Json& j) {
  check_keys(j, {"center", "level", "scale"}, "ball");
  Ball b;
  b.center = vector_from_json(required(j, "center", "ball"), "ball.center");
  b.level = as_double(required(j, "level", "ball"), "ball.level");
  b.scale = as_double(required(j, "scale", "ball"), "ball.scale");
  return b;
}

Json to_json(const SequenceSpec& s) {
  Json j{{"kind", std::string(to_string(s.kind))},
         {"x", vec_json(s.x)},
         {"v", vec_json(s.v)},
         {"candidate_limit", vec_json(s.candidate_limit)}};
  if (s.kind == SequenceKind::geometric) j["q"] = s.q;
  return j;
}

SequenceSpec sequence_from_json(const Json& j) {
  check_keys(j, {"kind", "x", "v", "q", "candidate_limit"}, "sequence");
  SequenceSpec s;
  s.kind = translate_errors<SequenceKind>(
      [&] { return sequence_kind_from_string(as_string(required(j, "kind", "sequence"), "sequence.kind")); },
      "sequence.kind");
  s.x = vector_from_json(required(j, "x", "sequence"), "sequence.x");
  s.v = vector_from_json(required(j, "v", "sequence"), "sequence.v");
  if (j.contains("q")) s.q = as_double(j["q"], "sequence.q");
  s.candidate_limit = j.contains("candidate_limit") ? vector_from_json(j["candidate_limit"], "sequence.candidate_limit")
                                                    : s.x;
  translate_errors<int>([&] { s.validate(); return 0; }, "sequence");
  return s;
}

// ---------------------------------------------------------------------------
// Reports

Json to_json(const Violation& v) {
  return Json{{"what", v.what}, {"inputs", v.inputs}, {"lhs", num(v.lhs)}, {"rhs", num(v.rhs)}};
}

Json to_json(const CheckReport& r) {
  Json j;
  j["name"] = r.name;
  j["verdict"] = std::string(to_string(r.verdict));
  Json vs = Json::array();
  for (const auto& v : r.violations) vs.push_back(to_json(v));
  j["violations"] = vs;
  j["violation_count"] = r.violation_count;
  j["samples_run"] = r.samples_run;
  j["seed"] = r.seed;
  j["note"] = r.note;
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = num(v);
  j["params"] = params;
  Json parts = Json::array();
  for (const auto& p : r.parts) parts.push_back(to_json(p));
  j["parts"] = parts;
  return j;
}

CheckReport report_from_json(const Json& j) {
  const std::string where = "report";
  check_keys(j, {"name", "verdict", "violations", "violation_count", "samples_run", "seed", "note", "params", "parts"},
             where);
  CheckReport r;
  r.name = as_string(required(j, "name", where), "report.name");
  r.verdict = translate_errors<Verdict>(
      [&] { return verdict_from_string(as_string(required(j, "verdict", where), "report.verdict")); },
      "report.verdict");
  for (const auto& v : required(j, "violations", where)) {
    check_keys(v, {"what", "inputs", "lhs", "rhs"}, "report.violation");
    r.violations.push_back(Violation{as_string(required(v, "what", "violation"), "violation.what"),
                                     as_string(required(v, "inputs", "violation"), "violation.inputs"),
                                     as_double(required(v, "lhs", "violation"), "violation.lhs"),
                                     as_double(required(v, "rhs", "violation"), "violation.rhs")});
  }
  r.violation_count = as_unsigned(required(j, "violation_count", where), "report.violation_count");
  r.samples_run = as_unsigned(required(j, "samples_run", where), "report.samples_run");
  r.seed = as_unsigned(required(j, "seed", where), "report.seed");
  r.note = as_string(required(j, "note", where), "report.note");
  const Json& params = required(j, "params", where);
  if (!params.is_object()) throw ConfigError("report.params: expected an object");
  for (const auto& item : params.items()) r.params[item.key()] = as_double(item.value(), "report.params");
  for (const auto& p : required(j, "parts", where)) r.parts.push_back(report_from_json(p));
  return r;
}

// ---------------------------------------------------------------------------
// Witnesses and verdicts

Json to_json(const RefinementWitness& w) {
  return Json{{"inner", to_json(w.inner)},       {"t_star", num(w.t_star)}, {"alpha_star", num(w.alpha_star)},
              {"s", num(w.s)},                   {"alpha_1", num(w.alpha_1)},
              {"route", std::string(to_string(w.route))}, {"weight", num(w.weight)}};
}

Json to_json(const IntersectionWitness& w) {
  return Json{{"inner", to_json(w.inner)}, {"first", to_json(w.first)}, {"second", to_json(w.second)}};
}

Json to_json(const LocalBaseWitness& w) { return Json{{"n", w.n}, {"inner", to_json(w.inner)}}; }

Json to_json(const SeparationWitness& w) {
  return Json{{"ball_x", to_json(w.ball_x)}, {"ball_y", to_json(w.ball_y)}, {"t0", num(w.t0)},
              {"alpha_1", num(w.alpha_1)}};
}

Json to_json(const ContinuityWitness& w) {
  Json j{{"kind", w.kind == ContinuityWitness::Kind::addition ? "addition" : "scalar"}, {"b1", to_json(w.b1)}};
  if (w.b2) j["b2"] = to_json(*w.b2);
  if (w.kind == ContinuityWitness::Kind::scalar) {
    j["r"] = num(w.r);
    j["lambda"] = num(w.lambda);
  }
  return j;
}

Json to_json(const ConvergenceVerdict& v) {
  Json per_t = Json::array();
  for (const auto& e : v.per_t) {
    per_t.push_back(Json{{"t", num(e.t)}, {"n0", e.n0 ? Json(*e.n0) : Json(nullptr)}, {"final_gap", num(e.final_gap)}});
  }
  return Json{{"converges", v.converges}, {"n_used", v.n_used}, {"per_t", per_t}};
}

Json to_json(const TopologicalVerdict& v) {
  Json n0 = Json::array();
  for (const auto& e : v.n0) n0.push_back(e ? Json(*e) : Json(nullptr));
  return Json{{"converges", v.converges}, {"vacuous", v.vacuous}, {"n0", n0}};
}

// ---------------------------------------------------------------------------
// Config

Config config_from_json(const Json& j) {
  check_keys(j, {"instance", "budget", "operation", "params", "output"}, "config");
  Config c;
  if (j.contains("instance")) c.instance = instance_from_json(j["instance"]);
  if (j.contains("budget")) c.budget = budget_from_json(j["budget"]);
  if (j.contains("operation")) c.operation = as_string(j["operation"], "config.operation");
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("config.params: expected an object");
    c.params = j["params"];
  }
  if (j.contains("output")) c.output = as_string(j["output"], "config.output");
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string dump_record(const Json& record) { return record.dump(); }

}  // namespace pmtop
