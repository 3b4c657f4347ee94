#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pmtop/balls.hpp"
#include "pmtop/convergence.hpp"
#include "pmtop/falsifier.hpp"
#include "pmtop/topology.hpp"

namespace pmtop {

using Json = nlohmann::json;

/// Schema violation in a config or report document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every to_json below produces objects with sorted keys. The matching
// *_from_json functions reject unknown fields and throw ConfigError.

Json to_json(const SampleBudget& b);
SampleBudget budget_from_json(const Json& j);

/// "min,max,count" as used by the --t-grid flag.
std::vector<double> parse_t_grid(const std::string& spec);

/// Explicit form {dim, family, modular, declared_c?, declared_beta?, mutation?}.
Json to_json(const PMSpace& s);

/// Accepts the explicit form or {"generate": {seed, family, mutation?}}.
PMSpace instance_from_json(const Json& j);

Json to_json(const Ball& b);
Ball ball_from_json(const Json& j);

Json to_json(const SequenceSpec& s);
SequenceSpec sequence_from_json(const Json& j);

Json to_json(const Violation& v);
Json to_json(const CheckReport& r);
CheckReport report_from_json(const Json& j);

Json to_json(const RefinementWitness& w);
Json to_json(const IntersectionWitness& w);
Json to_json(const LocalBaseWitness& w);
Json to_json(const SeparationWitness& w);
Json to_json(const ContinuityWitness& w);
Json to_json(const ConvergenceVerdict& v);
Json to_json(const TopologicalVerdict& v);

Vector vector_from_json(const Json& j, const char* where);

/// Batch configuration: what to run, on which instance, with which budget.
struct Config {
  std::optional<PMSpace> instance;
  SampleBudget budget;
  std::optional<std::string> operation;
  Json params = Json::object();
  std::optional<std::string> output;
};

Config config_from_json(const Json& j);

/// Read and validate a config file. Throws ConfigError.
Config load_config(const std::string& path);

/// Compact one-line serialization with sorted keys.
std::string dump_record(const Json& record);

}  // namespace pmtop
