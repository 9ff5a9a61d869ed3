#pragma once

#include <string>
#include <vector>

#include "okpi/expanded_graph.hpp"
#include "okpi/kpi_check.hpp"
#include "okpi/residual_ledger.hpp"
#include "okpi/scenario.hpp"

namespace okpi {

enum class RejectReason { kNone, kAvailability, kAdditiveKpi, kDelay, kCapacity };

const char* reject_reason_name(RejectReason r);

struct PlanOutcome {
  bool accepted = false;
  RejectReason reason = RejectReason::kNone;
  std::string diagnostics;
  int gamma = 0;
  Deployment deployment;  // meaningful when accepted
  KpiReport report;       // checker verdict on the accepted deployment
};

// One chain to place, in flow order, with per-position instance counts.
// Chains are planned in declaration order; VNFs already placed by an earlier
// chain are anchored ("deployment decisions are cascaded").
struct PlannedChain {
  int chain = -1;
  bool downlink = false;
  std::vector<int> vnfs;
  std::vector<int> instance_count;
};

std::vector<PlannedChain> decompose(const ServiceRequest& req);

// Traffic-order flow structure of one chain at a given endpoint load: per-flow
// demands (chi-scaled), the endpoint-out search layering and per-layer
// processing traffic. Flow j of an uplink chain enters v_j; flow j of a
// downlink chain leaves v_j (the last one terminates at the endpoint).
struct FlowInfo {
  std::vector<double> flow_demand;
  std::vector<int> layer_vnf;
  std::vector<int> layer_pos;
  std::vector<int> layer_flow;
  std::vector<double> layer_lambda;
  int flow_count() const { return static_cast<int>(flow_demand.size()); }
};

FlowInfo chain_flows(const ServiceRequest& req, const PlannedChain& ch, double load);

// Total cost of a deployment under the scenario's cost model.
CostBreakdown cost_deployment(const Deployment& dep, const PhysicalGraph& g,
                              const PlannerConfig& cfg);

// The full pipeline per endpoint and chain: decision graph over residuals ->
// availability pruning -> KPI weights -> quantized expansion -> layered
// candidate search -> non-CPU sizing + CPU assignment -> lowest total cost,
// with bottleneck-VNF replication retries when CPU capacity defeats the delay
// target. Commits to `ledger` atomically on acceptance.
PlanOutcome plan(const ServiceRequest& req, const PhysicalGraph& g,
                 ResidualLedger* ledger, const PlannerConfig& cfg);

struct SweepPoint {
  std::string axis;
  double value = 0.0;
  std::vector<PlanOutcome> outcomes;  // one per service, in scenario order
  double wall_ms = 0.0;

  bool all_accepted() const {
    for (const auto& o : outcomes)
      if (!o.accepted) return false;
    return !outcomes.empty();
  }
  double total_cost() const {
    double c = 0.0;
    for (const auto& o : outcomes) c += o.deployment.cost.total();
    return c;
  }
};

// Runs plan() on a fresh ledger per value of the swept axis
// (delay | load | reliability | gamma), applied to every service.
std::vector<SweepPoint> sweep(const Scenario& sc, const std::string& axis,
                              const std::vector<double>& values);

// Applies one sweep-axis value to a copy of the request.
ServiceRequest apply_axis(const ServiceRequest& req, const std::string& axis,
                          double value);

}  // namespace okpi
