#pragma once

#include <string>
#include <vector>

#include "okpi/model.hpp"
#include "okpi/residual_ledger.hpp"

namespace okpi {

struct EndpointKpi {
  double net_delay_ms = 0.0;
  double proc_delay_ms = 0.0;  // +inf when some queue is unstable (a <= r*lambda)
  double min_reliability = 1.0;  // worst over the endpoint's lifetime steps
  bool delay_ok = true;
  bool reliability_ok = true;
  bool availability_ok = true;
  double total_delay_ms() const { return net_delay_ms + proc_delay_ms; }
};

struct KpiReport {
  std::vector<EndpointKpi> endpoints;
  bool capacity_ok = true;
  bool interface_ok = true;
  bool coupling_ok = true;  // non-CPU assignments at exact coupling equality
  std::vector<std::string> violations;

  bool ok() const {
    if (!capacity_ok || !interface_ok || !coupling_ok) return false;
    for (const auto& e : endpoints)
      if (!e.delay_ok || !e.reliability_ok || !e.availability_ok) return false;
    return true;
  }
};

// Independent evaluation of a deployment against every KPI and structural
// invariant: delay (network + M/M/1-PS processing), reliability at every
// lifetime step, geographic availability, link/node capacities against the
// given pre-deployment residuals, interface requirements and the resource
// coupling rule. A pure function of its inputs.
KpiReport evaluate_deployment(const Deployment& dep, const ServiceRequest& req,
                              const PhysicalGraph& g, const ResidualLedger& residuals);

}  // namespace okpi
