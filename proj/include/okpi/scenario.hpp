#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "okpi/model.hpp"

namespace okpi {

struct OracleLimits {
  int max_nodes = 8;
  int max_chain_len = 4;
  long max_strings = 100000;  // per-hop route enumeration cap (refusal, not truncation)
  int hop_bound = 6;          // max physical links per string
};

struct PlannerConfig {
  int gamma = 10;
  int k_paths = 4;
  int max_candidates = 64;
  int max_instance_replication = 3;
  double cost_period_s = 1000.0;  // 1 Mb/s over 1000 s == 1 Gbit
  double quant_epsilon = 1e-9;    // tolerance inside ceil() for exact-integer weights
  OracleLimits oracle;

  // Transport cost of pushing `mbps` across a link for one accounting period.
  double traffic_cost(double cost_per_gbit, double mbps) const {
    return cost_per_gbit * mbps * cost_period_s / 1000.0;
  }
};

struct Scenario {
  std::string name;
  PhysicalGraph graph;
  std::vector<ServiceRequest> services;
  PlannerConfig config;
};

// Scenario file errors carry the location (JSON-pointer-ish path) of the
// offending field.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), location(where) {}
  std::string location;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& origin);

}  // namespace okpi
