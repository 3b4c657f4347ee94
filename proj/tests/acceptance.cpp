// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "pmtop/balls.hpp"
#include "pmtop/convergence.hpp"
#include "pmtop/falsifier.hpp"
#include "pmtop/io.hpp"
#include "pmtop/topology.hpp"

using namespace pmtop;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int g_failed = 0;

void criterion(int n, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = limit_s <= 0 || secs < limit_s;
  const bool pass = o.ok && in_time;
  if (!pass) ++g_failed;
  std::ostringstream line;
  line << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << " (" << o.detail << "; " << std::fixed;
  line.precision(2);
  line << secs << " s";
  if (limit_s > 0) line << " of " << limit_s << " s";
  line << ")";
  std::cout << line.str() << std::endl;
}

SampleBudget samples(std::size_t n) {
  SampleBudget b;
  b.n_vectors = n;
  b.n_scalar_pairs = n;
  return b;
}

std::vector<double> random_weights(Rng& rng, int dim) {
  std::vector<double> w;
  for (int i = 0; i < dim; ++i) w.push_back(0.5 + 1.5 * uniform01(rng));
  return w;
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * uniform01(rng));
}

Outcome axiom_suite() {
  const auto b = samples(10000);
  Rng rng = make_rng(1, stream_id("acceptance-weights"));
  int cases = 0;
  std::size_t violations = 0;
  std::string bad;
  for (int dim : {1, 2, 4}) {
    const PMSpace spaces[] = {
        PMSpace(dim, Family::rational_from, ClassicalModular::p_power(1)),
        PMSpace(dim, Family::rational_from, ClassicalModular::p_power(2)),
        PMSpace(dim, Family::step_from, ClassicalModular::weighted_abs(random_weights(rng, dim))),
    };
    for (const auto& s : spaces) {
      const auto r = check_axioms(s, b);
      ++cases;
      violations += r.violation_count;
      if (!r.passed()) bad += " " + dump_record(to_json(s));
    }
  }
  return {violations == 0 && bad.empty(),
          std::to_string(cases) + " spaces, " + std::to_string(violations) + " violations" + bad};
}

Outcome delta2_estimation() {
  const auto b = samples(10000);
  const auto c1 = find_delta2_constant(PMSpace(1, Family::rational_from, ClassicalModular::p_power(1)), b,
                                       default_delta2_candidates());
  const auto c2 = find_delta2_constant(PMSpace(1, Family::rational_from, ClassicalModular::p_power(2)), b,
                                       default_delta2_candidates());
  auto show = [](const std::optional<double>& c) { return c ? fmt_num(*c) : std::string("none"); };
  return {c1 == 2.0 && c2 == 4.0, "p=1 -> " + show(c1) + ", p=2 -> " + show(c2)};
}

Outcome homogeneity() {
  const auto b = samples(10000);
  const auto w = check_beta_homogeneous(
      PMSpace(2, Family::rational_from, ClassicalModular::weighted_abs({0.7, 1.9})), 1.0, b);
  const auto p2 = check_beta_homogeneous(PMSpace(2, Family::rational_from, ClassicalModular::p_power(2)), 1.0, b);
  return {w.passed() && p2.failed(),
          "weighted_abs " + std::string(to_string(w.verdict)) + ", p_power(2) " + std::string(to_string(p2.verdict))};
}

// Each identity runs on 10 random (x, level, scale) settings with 100 sampled
// members each, so 10^3 (x, level, scale, y) draws per identity.
Outcome ball_algebra() {
  SampleBudget b = samples(2000);
  b.verify_samples = 100;
  Rng rng = make_rng(4, stream_id("acceptance-balls"));
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // draws, violations
  bool all_pass = true;
  for (int i = 0; i < 10; ++i) {
    const int dim = 1 + i % 4;
    const PMSpace s(dim, Family::rational_from, ClassicalModular::p_power(1), 2.0, 1.0);
    b.rng_seed = static_cast<std::uint64_t>(i);
    const Vector x = random_vector(rng, dim, 3.0);
    const double level = 0.05 + 0.9 * uniform01(rng);
    const double level2 = level + (1.0 - level) * uniform01(rng);
    const double t = log_uniform(rng, 1e-2, 1e2);
    const double t2 = t * log_uniform(rng, 1.0, 1e2);
    const CheckReport reports[] = {
        translate_identity(s, x, level, t, b),
        scaling_identity(s, 1.0, level, t, b),
        monotone_in_scale(s, level, t, t2, b),
        monotone_in_level(s, level, level2, t, b),
    };
    for (const auto& r : reports) {
      tally[r.name].first += r.samples_run;
      tally[r.name].second += r.violation_count;
      all_pass = all_pass && r.passed();
    }
  }
  std::string detail;
  for (const auto& [name, counts] : tally) {
    all_pass = all_pass && counts.first >= 1000 && counts.second == 0;
    detail += (detail.empty() ? "" : ", ") + name + " " + std::to_string(counts.first) + " draws/" +
              std::to_string(counts.second) + " violations";
  }
  return {all_pass && tally.size() == 4, detail};
}

struct WitnessTally {
  int inputs = 0;
  int ok = 0;
  std::size_t violations = 0;
  std::size_t verify = 0;
  std::string first_problem;

  void record(const CheckReport& v) {
    ++inputs;
    violations += v.violation_count;
    verify += v.samples_run;
    if (v.passed() && v.samples_run >= 200) {
      ++ok;
    } else if (first_problem.empty()) {
      first_problem = v.name + ": " + std::string(to_string(v.verdict)) + " " + v.note;
    }
  }
  void error(const std::exception& e) {
    ++inputs;
    if (first_problem.empty()) first_problem = e.what();
  }
};

Outcome witnesses() {
  constexpr int kInputs = 1000;
  SampleBudget b;
  std::map<std::string, WitnessTally> t;
  Rng rng = make_rng(5, stream_id("acceptance-witness"));
  for (int i = 0; i < kInputs; ++i) {
    const int dim = 1 + i % 4;
    b.rng_seed = static_cast<std::uint64_t>(i);
    const PMSpace rat(dim, Family::rational_from, ClassicalModular::p_power(1), 2.0, 1.0);
    const PMSpace step(dim, Family::step_from, ClassicalModular::weighted_abs(random_weights(rng, dim)), 2.0, 1.0);
    const PMSpace& delta2_space = i % 2 == 0 ? rat : step;
    const double level = 0.05 + 0.9 * uniform01(rng);
    const double scale = log_uniform(rng, 1e-2, 1e2);

    try {
      const Ball outer{random_vector(rng, dim, 3.0), level, scale};
      BallSampler sampler(delta2_space, outer, rng, 1e-6);
      const auto z = sampler.members(1);
      if (z.empty()) throw InfeasibleError("no member of the outer ball was drawn");
      t["refine_ball"].record(refine_ball(delta2_space, 2.0, outer, z[0], b, 1.0).verification);
    } catch (const std::exception& e) {
      t["refine_ball"].error(e);
    }
    try {
      const Vector x = random_vector(rng, dim, 3.0), y = random_vector(rng, dim, 3.0);
      t["separation"].record(separation_witness(delta2_space, 2.0, x, y, b).verification);
    } catch (const std::exception& e) {
      t["separation"].error(e);
    }
    try {
      t["homogeneous_separation"].record(
          homogeneous_separation_witness(rat, 1.0, random_vector(rng, dim, 3.0), b).verification);
    } catch (const std::exception& e) {
      t["homogeneous_separation"].error(e);
    }
    const Ball target{Vector(static_cast<std::size_t>(dim), 0.0), level, scale};
    try {
      t["addition_continuity"].record(addition_continuity_witness(rat, 1.0, target, b).verification);
    } catch (const std::exception& e) {
      t["addition_continuity"].error(e);
    }
    try {
      const double lambda = i % 10 == 0 ? 0.0 : homogeneity_scalar(rng);
      t["scalar_continuity"].record(scalar_continuity_witness(rat, 1.0, target, lambda, b).verification);
    } catch (const std::exception& e) {
      t["scalar_continuity"].error(e);
    }
  }
  bool pass = t.size() == 5;
  std::string detail;
  for (const auto& [name, w] : t) {
    pass = pass && w.ok == kInputs && w.violations == 0;
    detail += (detail.empty() ? "" : ", ") + name + " " + std::to_string(w.ok) + "/" + std::to_string(w.inputs);
    if (!w.first_problem.empty()) detail += " [" + w.first_problem + "]";
  }
  return {pass, detail};
}

Outcome convergence() {
  int cases = 0, agree = 0, expected = 0;
  for (auto fam : {Family::rational_from, Family::step_from}) {
    for (int dim : {1, 2}) {
      const PMSpace s(dim, fam, ClassicalModular::p_power(1));
      for (auto kind : kAllSequenceKinds) {
        const Vector x(static_cast<std::size_t>(dim), 0.5);
        Vector v(static_cast<std::size_t>(dim), 1.0);
        v[0] = -2.0;
        const auto r = convergence_equivalence(s, make_sequence(kind, x, normalized_direction(s, v)), default_t_grid());
        ++cases;
        if (r.passed()) ++agree;
        const bool should = kind == SequenceKind::harmonic || kind == SequenceKind::geometric;
        const bool mu = r.params.at("mu_converges") == 1.0;
        const bool top = r.params.at("topological_converges") == 1.0;
        if (mu == should && top == should) ++expected;
      }
    }
  }
  return {agree == cases && expected == cases, std::to_string(agree) + "/" + std::to_string(cases) + " agree, " +
                                                   std::to_string(expected) + "/" + std::to_string(cases) +
                                                   " match the expected verdict"};
}

// 100 seeds for valid instances and for each mutation; the family alternates
// with the seed.
Outcome falsifier_power() {
  const auto b = samples(10000);
  std::string detail;
  bool pass = true;
  std::size_t valid_failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SampleBudget bs = b;
    bs.rng_seed = seed;
    const auto fam = seed % 2 == 0 ? Family::rational_from : Family::step_from;
    valid_failures += run_registry(generate_instance(seed, fam), bs).failures();
  }
  pass = valid_failures == 0;
  detail = "valid failures " + std::to_string(valid_failures);
  for (auto m : kAllMutations) {
    int detected = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      SampleBudget bs = b;
      bs.rng_seed = seed;
      const auto fam = seed % 2 == 0 ? Family::rational_from : Family::step_from;
      const auto run = run_registry(generate_instance(seed, fam, m), bs);
      if (run.results.at(target_predicate(m)).failed()) ++detected;
    }
    pass = pass && detected >= 95;
    detail += ", " + std::string(to_string(m)) + " " + std::to_string(detected) + "/100";
  }
  return {pass, detail};
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "pmtop_acceptance";
  fs::create_directories(dir);
  const fs::path cfg = dir / "instance.json";
  std::ofstream(cfg) << R"({"instance": {"dim": 2, "family": "rational_from",
    "modular": {"kind": "p_power", "p": 1}, "declared_c": 2, "declared_beta": 1}})";
  const char* ops[] = {"check-axioms",     "check-delta2",       "check-homogeneous", "check-upsilon",
                       "ball-identities",  "witness-refine",     "witness-separate",  "witness-continuity",
                       "check-convergence", "falsify"};
  int identical = 0, total = 0;
  std::string bad;
  for (const char* op : ops) {
    std::string outs[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / (std::string(op) + "_" + std::to_string(k) + ".ndjson");
      fs::remove(out);
      const std::string cmd = std::string(PMTOP_CLI_PATH) + " " + op + " --config " + cfg.string() +
                              " --seed 11 --samples 2000 --out " + out.string();
      const int status = std::system(cmd.c_str());
      if (status == -1 || WEXITSTATUS(status) == 3) bad += std::string(" ") + op + "(exit 3)";
      outs[k] = read_file(out);
    }
    ++total;
    if (!outs[0].empty() && outs[0] == outs[1]) {
      ++identical;
    } else {
      bad += std::string(" ") + op;
    }
  }
  return {identical == total && bad.empty(),
          std::to_string(identical) + "/" + std::to_string(total) + " subcommands byte-identical" + bad};
}

}  // namespace

int main() {
  criterion(1, 30, axiom_suite);
  criterion(2, 5, delta2_estimation);
  criterion(3, 5, homogeneity);
  criterion(4, 10, ball_algebra);
  criterion(5, 60, witnesses);
  criterion(6, 20, convergence);
  criterion(7, 120, falsifier_power);
  criterion(8, 0, reproducibility);
  std::cout << (g_failed == 0 ? "all criteria passed" : std::to_string(g_failed) + " criteria failed") << std::endl;
  return g_failed == 0 ? 0 : 1;
}
