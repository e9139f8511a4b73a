#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmoc/ocp/ocp.hpp"
#include "dmoc/sqp/sqp.hpp"

namespace dmoc::cli {

using Json = nlohmann::ordered_json;

/// Unforced rollout of the problem's system instead of an optimal control solve.
struct RolloutConfig {
  double h = 0.1;
  int steps = 10000;
  Vec q0;     ///< defaults to the problem's initial configuration
  Vec qdot0;  ///< defaults to the problem's initial velocity
};

struct AuditConfig {
  int generator = 0;
  std::optional<RolloutConfig> rollout;
};

struct ConvergeConfig {
  /// Coarse grids followed by the reference grid (largest entry); every
  /// entry must divide the reference.
  std::vector<int> grids{8, 16, 32, 64, 128, 512};
  /// Feasibility tolerance of the sweep solves. At the reference grid the
  /// 1/h-scaled rows carry round-off near eps·|q|/h², above 1e-10.
  double feasibility_tol = 1e-9;
  int workers = 0;  ///< 0: hardware concurrency
};

struct RunConfig {
  std::string problem = "orbital";
  Json params = Json::object();  ///< resolved problem parameters
  std::string method = "dmoc";
  int N = 32;
  sqp::SqpOptions solver;
  std::string output_dir = "out";
  bool deterministic = true;  ///< runs carry no seeds; must stay true
  ConvergeConfig converge;
  AuditConfig audit;
};

/// Validates names, ranges and keys (unknown keys are rejected) and fills
/// defaults. Throws ConfigError.
RunConfig parse_config(const Json& j);

/// Reads a JSON file; parse and I/O problems become ConfigError.
RunConfig load_config(const std::string& path);

/// Full resolved config, defaults included.
Json to_json(const RunConfig& cfg);

/// Problem instance on N intervals.
Ocp build_problem(const RunConfig& cfg, int N);

}  // namespace dmoc::cli
