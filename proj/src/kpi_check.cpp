#include "okpi/kpi_check.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace okpi {
namespace {

constexpr double kRelTol = 1e-12;  // multiplicative slack on reliability targets
constexpr double kAbsTol = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

KpiReport evaluate_deployment(const Deployment& dep, const ServiceRequest& req,
                              const PhysicalGraph& g, const ResidualLedger& residuals) {
  KpiReport report;
  report.endpoints.resize(req.endpoints.size());

  // lambda_c(e, v): traffic of endpoint e processed at each instance.
  std::map<std::pair<int, int>, double> lambda;  // (instance, endpoint) -> Mb/s
  for (const auto& hop : dep.routes)
    if (hop.instance >= 0) lambda[{hop.instance, hop.endpoint}] += hop.demand_mbps;

  // Interfaces and resource coupling.
  for (size_t i = 0; i < dep.instances.size(); ++i) {
    const auto& inst = dep.instances[i];
    const auto& node = g.nodes[static_cast<size_t>(inst.node)];
    const auto& vnf = g.vnfs[static_cast<size_t>(inst.vnf)];
    for (int itf : vnf.required_interfaces)
      if (!node.has_interface(itf)) {
        report.interface_ok = false;
        report.violations.push_back("instance of " + vnf.id + " on " + node.id +
                                    " lacks interface " +
                                    g.interfaces[static_cast<size_t>(itf)]);
      }
    for (size_t e = 0; e < req.endpoints.size(); ++e) {
      auto lit = lambda.find({static_cast<int>(i), static_cast<int>(e)});
      double lam = lit == lambda.end() ? 0.0 : lit->second;
      for (int k = 1; k < g.kind_count(); ++k) {
        double need = vnf.per_unit[static_cast<size_t>(k)] * lam;
        auto ait = inst.other_by_endpoint.find({static_cast<int>(e), k});
        double have = ait == inst.other_by_endpoint.end() ? 0.0 : ait->second;
        if (std::abs(have - need) > kAbsTol + 1e-9 * std::max(have, need)) {
          report.coupling_ok = false;
          report.violations.push_back("instance of " + vnf.id + " on " + node.id +
                                      ": resource " +
                                      g.resource_kinds[static_cast<size_t>(k)] +
                                      " assigned " + fmt(have) + ", coupling needs " +
                                      fmt(need));
        }
      }
    }
  }

  // Capacities against the pre-deployment residuals.
  {
    ResidualLedger::Draw draw = ResidualLedger::draw_of(dep);
    for (const auto& [l, mbps] : draw.per_link)
      if (mbps > residuals.link_residual(l) + kAbsTol) {
        report.capacity_ok = false;
        report.violations.push_back("link " + g.links[static_cast<size_t>(l)].id +
                                    " overloaded: " + fmt(mbps) + " > " +
                                    fmt(residuals.link_residual(l)));
      }
    for (const auto& [nk, units] : draw.per_node)
      if (units > residuals.node_residual(nk.first, nk.second) + kAbsTol) {
        report.capacity_ok = false;
        report.violations.push_back(
            "node " + g.nodes[static_cast<size_t>(nk.first)].id + " resource " +
            g.resource_kinds[static_cast<size_t>(nk.second)] + " overloaded: " +
            fmt(units) + " > " + fmt(residuals.node_residual(nk.first, nk.second)));
      }
  }

  // Per-endpoint delay, reliability, availability.
  for (size_t e = 0; e < req.endpoints.size(); ++e) {
    EndpointKpi& kpi = report.endpoints[e];
    const EndpointSpec& ep = req.endpoints[e];
    int loc_vertex = g.location_vertex(ep.location);

    // Network delay: weighted sum of per-string delays (flow fractions).
    for (const auto& hop : dep.routes) {
      if (hop.endpoint != static_cast<int>(e)) continue;
      double string_delay = 0.0;
      for (int l : hop.links) string_delay += g.links[static_cast<size_t>(l)].delay_ms;
      kpi.net_delay_ms += hop.fraction * string_delay;
    }

    // Processing delay: sum over flows of f * 1/(a - r*lambda).
    for (const auto& hop : dep.routes) {
      if (hop.endpoint != static_cast<int>(e) || hop.instance < 0) continue;
      const auto& inst = dep.instances[static_cast<size_t>(hop.instance)];
      const auto& vnf = g.vnfs[static_cast<size_t>(inst.vnf)];
      auto ait = inst.cpu_by_endpoint.find(static_cast<int>(e));
      double a = ait == inst.cpu_by_endpoint.end() ? 0.0 : ait->second;
      double lam = lambda[{hop.instance, static_cast<int>(e)}];
      double margin = a - vnf.per_unit[kCpu] * lam;
      if (margin <= 0) {
        kpi.proc_delay_ms = kInfinity;  // unstable queue: report, do not throw
        break;
      }
      kpi.proc_delay_ms += hop.fraction / margin;
    }

    kpi.delay_ok = kpi.total_delay_ms() <= req.max_delay_ms + kAbsTol;
    if (!kpi.delay_ok)
      report.violations.push_back("endpoint " + std::to_string(e) + " delay " +
                                  fmt(kpi.total_delay_ms()) + " ms > " +
                                  fmt(req.max_delay_ms));

    // Reliability at every lifetime step: product over flows of the
    // fraction-weighted string reliabilities; each string contributes the
    // product of link reliabilities times the link-target node reliabilities.
    for (int t : ep.lifetime) {
      // group hops by flow (chain, hop index)
      std::map<std::pair<int, int>, double> flow_rel;
      std::set<std::pair<int, int>> flows_seen;
      for (const auto& hop : dep.routes) {
        if (hop.endpoint != static_cast<int>(e)) continue;
        double string_rel = 1.0;
        for (int l : hop.links) {
          const auto& link = g.links[static_cast<size_t>(l)];
          string_rel *= link.reliability.at(t);
          string_rel *= g.node_reliability_at(link.to, t);
        }
        flow_rel[{hop.chain, hop.hop}] += hop.fraction * string_rel;
        flows_seen.insert({hop.chain, hop.hop});
      }
      double total = 1.0;
      for (const auto& [flow, rel] : flow_rel) total *= rel;
      (void)flows_seen;
      kpi.min_reliability = std::min(kpi.min_reliability, total);
    }
    kpi.reliability_ok =
        kpi.min_reliability >= req.min_reliability * (1.0 - kRelTol);
    if (!kpi.reliability_ok)
      report.violations.push_back("endpoint " + std::to_string(e) + " reliability " +
                                  fmt(kpi.min_reliability) + " < " +
                                  fmt(req.min_reliability));

    // Availability: every chain of this endpoint must attach through a node
    // that covers the endpoint's location with a radio interface.
    for (size_t c = 0; c < req.chains.size(); ++c) {
      bool attached = false;
      bool covered = true;
      for (const auto& hop : dep.routes) {
        if (hop.endpoint != static_cast<int>(e) || hop.chain != static_cast<int>(c))
          continue;
        for (int l : hop.links) {
          const auto& link = g.links[static_cast<size_t>(l)];
          int access = -1;
          if (link.from == loc_vertex) access = link.to;
          if (link.to == loc_vertex) access = link.from;
          if (access < 0) continue;
          attached = true;
          const auto& node = g.nodes[static_cast<size_t>(access)];
          if (!node.covers(ep.location) || node.interfaces.empty()) covered = false;
        }
      }
      if (!attached || !covered) {
        kpi.availability_ok = false;
        report.violations.push_back("endpoint " + std::to_string(e) + " chain " +
                                    std::to_string(c) +
                                    (attached ? " access node does not cover location"
                                              : " is not attached to the endpoint"));
      }
    }
  }

  return report;
}

}  // namespace okpi
