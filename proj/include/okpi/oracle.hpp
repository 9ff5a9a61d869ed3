#pragma once

#include <string>
#include <vector>

#include "okpi/planner.hpp"

namespace okpi {

// Identity of one concrete deployment choice: per (chain, position) host and
// per (chain, flow) physical string. Used by the exhaustiveness test to ban
// the previously selected optimum and re-run.
struct DeploymentSignature {
  std::vector<std::vector<int>> hosts;                // [chain][position]
  std::vector<std::vector<std::vector<int>>> routes;  // [chain][flow] -> links
  bool operator==(const DeploymentSignature&) const = default;
  bool operator<(const DeploymentSignature& o) const {
    if (hosts != o.hosts) return hosts < o.hosts;
    return routes < o.routes;
  }
};

struct OracleResult {
  bool refused = false;       // instance exceeds the declared limits
  std::string refusal;        // why (never silent truncation)
  PlanOutcome outcome;
  DeploymentSignature selected;  // meaningful when accepted
};

// Exhaustive minimum-cost search over all VNF-to-node assignments and all
// simple-path route strings (one string per flow), with per-combination
// optimal CPU assignment. Shares the KPI checker and the CPU solver with the
// planner. Commits to the ledger on acceptance.
OracleResult oracle_optimal(const ServiceRequest& req, const PhysicalGraph& g,
                            ResidualLedger* ledger, const PlannerConfig& cfg,
                            const std::vector<DeploymentSignature>& banned = {});

}  // namespace okpi
