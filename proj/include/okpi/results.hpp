#pragma once

#include <string>
#include <vector>

#include "okpi/planner.hpp"

namespace okpi {

// One machine-readable result line of a plan / sweep / compare run.
struct ResultRow {
  std::string scenario;
  std::string axis = "-";
  double value = 0.0;
  int gamma = 0;
  std::string outcome;  // accepted | rejected
  std::string reason;   // none | availability | additive-kpi | delay | capacity
  CostBreakdown cost;
  double max_endpoint_delay_ms = 0.0;
  double min_endpoint_reliability = 1.0;
  std::string poas;   // sorted, ';'-joined PoA node ids traversed by routes
  std::string tiers;  // sorted, ';'-joined tiers hosting instances
  double wall_ms = 0.0;
};

ResultRow make_row(const Scenario& sc, const std::string& axis, double value, int gamma,
                   const std::vector<PlanOutcome>& outcomes, double wall_ms);

// Stable column order, locale-independent formatting. Timing columns are
// opt-in so that default output is byte-stable across runs.
std::string csv_header(bool timings);
std::string csv_line(const ResultRow& row, bool timings);
std::string format_number(double v);

std::vector<std::string> selected_poas(const Deployment& dep, const PhysicalGraph& g);
std::vector<std::string> selected_tiers(const Deployment& dep, const PhysicalGraph& g);

}  // namespace okpi
