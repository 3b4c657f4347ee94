#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "pmtop/cli.hpp"
#include "pmtop/io.hpp"

using namespace pmtop;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "pmtop_unit";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pmtop");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

const char* kValid = R"({"instance": {"dim": 2, "family": "rational_from",
  "modular": {"kind": "p_power", "p": 1}, "declared_c": 2, "declared_beta": 1},
  "budget": {"n_vectors": 500, "n_scalar_pairs": 500, "t_grid": "0.001,1000,31"}})";

const char* kBrokenPm3 = R"({"instance": {"dim": 2, "family": "rational_from",
  "modular": {"kind": "p_power", "p": 1}, "declared_c": 2, "declared_beta": 1,
  "mutation": {"kind": "break_pm3", "axis": 0}},
  "budget": {"n_vectors": 500, "n_scalar_pairs": 500}})";

}  // namespace

TEST_CASE("budget and instance round trip") {
  SampleBudget b;
  b.n_vectors = 123;
  b.rng_seed = 42;
  b.t_grid = {0.5, 1.0, 2.0};
  const auto j = to_json(b);
  CHECK(dump_record(to_json(budget_from_json(j))) == dump_record(j));

  const PMSpace s(3, Family::step_from, ClassicalModular::weighted_abs({1.0, 2.0, 0.5}), 2.0, std::nullopt,
                  Mutation{MutationKind::break_pm2, 1});
  const auto js = to_json(s);
  CHECK(dump_record(to_json(instance_from_json(js))) == dump_record(js));
  CHECK(instance_from_json(js) == s);

  const auto gen = instance_from_json(Json::parse(R"({"generate": {"seed": 4, "family": "rational_from"}})"));
  CHECK(gen == generate_instance(4, Family::rational_from));
}

TEST_CASE("report round trip keeps the bytes") {
  CheckReport r("pm1", 10);
  r.params["c"] = 2.0;
  r.note = "x";
  r.samples_run = 3;
  r.add_violation(Violation{"pm1", "t=1", 0.5, 0.25});
  CheckReport sub("inner", 10);
  sub.params["inf"] = std::numeric_limits<double>::infinity();
  r.add_part(sub);
  const auto j = to_json(r);
  CHECK(dump_record(to_json(report_from_json(j))) == dump_record(j));
  CHECK(dump_record(j).find('\n') == std::string::npos);
}

TEST_CASE("t grid parsing") {
  const auto g = parse_t_grid("1,100,3");
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK_THROWS_AS(parse_t_grid("1,100"), ConfigError);
  CHECK_THROWS_AS(parse_t_grid("100,1,3"), ConfigError);
}

TEST_CASE("unknown fields are rejected") {
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"budget": {"n_vectors": 10, "bogus": 1}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"instanse": {}})")), ConfigError);
  CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"dim": -1, "family": "rational_from",
      "modular": {"kind": "p_power", "p": 1}})")),
                  ConfigError);
}

TEST_CASE("cli exit codes") {
  const auto valid = scratch("valid.json"), broken = scratch("broken.json"), bad = scratch("bad.json");
  write_file(valid, kValid);
  write_file(broken, kBrokenPm3);
  write_file(bad, R"({"instance": {"dim": -1}})");
  const auto out = scratch("out.ndjson").string();
  CHECK(cli({"check-axioms", "--config", valid.string(), "--out", out}) == 0);
  CHECK(cli({"check-axioms", "--config", broken.string(), "--out", out}) == 1);
  const auto rec = Json::parse(read_file(out));
  CHECK(rec.at("check").at("verdict") == "fail");
  CHECK(rec.at("operation") == "check-axioms");
  CHECK(cli({"check-axioms", "--config", bad.string(), "--out", out}) == 3);
  CHECK(cli({"check-axioms", "--config", scratch("missing.json").string()}) == 3);
  CHECK(cli({"check-axioms", "--no-such-flag"}) == 3);
  CHECK(cli({"witness-separate", "--config", valid.string(), "--out", out}) == 0);
}

TEST_CASE("cli reports are byte-identical across runs") {
  const auto valid = scratch("valid_rep.json");
  write_file(valid, kValid);
  const auto a = scratch("a.ndjson").string(), b = scratch("b.ndjson").string();
  for (const char* op : {"check-axioms", "ball-identities", "check-convergence"}) {
    CAPTURE(op);
    cli({op, "--config", valid.string(), "--seed", "7", "--out", a});
    cli({op, "--config", valid.string(), "--seed", "7", "--out", b});
    const auto ta = read_file(a);
    CHECK_FALSE(ta.empty());
    CHECK(ta == read_file(b));
    Json first;
    CHECK_NOTHROW(first = Json::parse(ta.substr(0, ta.find('\n'))));
  }
}

TEST_CASE("exit_code_for") {
  auto rec = [](const char* v) { return Json{{"check", {{"verdict", v}}}}; };
  CHECK(exit_code_for({rec("pass"), rec("pass")}) == 0);
  CHECK(exit_code_for({rec("pass"), rec("infeasible")}) == 2);
  CHECK(exit_code_for({rec("infeasible"), rec("fail")}) == 1);
}
