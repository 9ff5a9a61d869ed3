#include "okpi/results.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace okpi {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::string> selected_poas(const Deployment& dep, const PhysicalGraph& g) {
  std::set<std::string> poas;
  for (const auto& hop : dep.routes)
    for (int l : hop.links) {
      const auto& link = g.links[static_cast<size_t>(l)];
      for (int v : {link.from, link.to})
        if (g.is_node_vertex(v) && g.nodes[static_cast<size_t>(v)].tier == "poa")
          poas.insert(g.nodes[static_cast<size_t>(v)].id);
    }
  return {poas.begin(), poas.end()};
}

std::vector<std::string> selected_tiers(const Deployment& dep, const PhysicalGraph& g) {
  std::set<std::string> tiers;
  for (const auto& inst : dep.instances)
    tiers.insert(g.nodes[static_cast<size_t>(inst.node)].tier);
  return {tiers.begin(), tiers.end()};
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ";";
    out += parts[i];
  }
  return out.empty() ? "-" : out;
}

}  // namespace

ResultRow make_row(const Scenario& sc, const std::string& axis, double value, int gamma,
                   const std::vector<PlanOutcome>& outcomes, double wall_ms) {
  ResultRow row;
  row.scenario = sc.name;
  row.axis = axis;
  row.value = value;
  row.gamma = gamma;
  row.wall_ms = wall_ms;
  bool all_accepted = !outcomes.empty();
  std::set<std::string> poas, tiers;
  for (const auto& o : outcomes) {
    if (!o.accepted) {
      all_accepted = false;
      if (row.reason.empty()) row.reason = reject_reason_name(o.reason);
      continue;
    }
    row.cost.instantiation += o.deployment.cost.instantiation;
    row.cost.resource += o.deployment.cost.resource;
    row.cost.transport += o.deployment.cost.transport;
    for (const auto& e : o.report.endpoints) {
      row.max_endpoint_delay_ms = std::max(row.max_endpoint_delay_ms, e.total_delay_ms());
      row.min_endpoint_reliability = std::min(row.min_endpoint_reliability, e.min_reliability);
    }
    for (const auto& p : selected_poas(o.deployment, sc.graph)) poas.insert(p);
    for (const auto& t : selected_tiers(o.deployment, sc.graph)) tiers.insert(t);
  }
  row.outcome = all_accepted ? "accepted" : "rejected";
  if (all_accepted) row.reason = "none";
  if (row.reason.empty()) row.reason = "none";
  row.poas = join({poas.begin(), poas.end()});
  row.tiers = join({tiers.begin(), tiers.end()});
  return row;
}

std::string csv_header(bool timings) {
  std::string h =
      "scenario,axis,value,gamma,outcome,reason,cost_total,cost_instantiation,"
      "cost_resource,cost_transport,max_endpoint_delay_ms,min_endpoint_reliability,"
      "poas,tiers";
  if (timings) h += ",wall_ms";
  return h + "\n";
}

std::string csv_line(const ResultRow& row, bool timings) {
  std::string line = row.scenario + "," + row.axis + "," + format_number(row.value) + "," +
                     std::to_string(row.gamma) + "," + row.outcome + "," + row.reason + "," +
                     format_number(row.cost.total()) + "," +
                     format_number(row.cost.instantiation) + "," +
                     format_number(row.cost.resource) + "," +
                     format_number(row.cost.transport) + "," +
                     format_number(row.max_endpoint_delay_ms) + "," +
                     format_number(row.min_endpoint_reliability) + "," + row.poas + "," +
                     row.tiers;
  if (timings) line += "," + format_number(row.wall_ms);
  return line + "\n";
}

}  // namespace okpi
