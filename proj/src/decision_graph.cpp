#include "okpi/decision_graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "okpi/graph_paths.hpp"

namespace okpi {
namespace {

// Folds a physical realization into a decision edge. Reliability follows the
// per-string rule: every link contributes its own reliability times its
// target vertex's (links listed in traffic order, so the far host is included
// for uplink hops and the endpoint side resolves to 1).
DecisionEdge fold_realization(const PhysicalGraph& g, const ResidualLedger& ledger,
                              const PlannerConfig& cfg, const PhysicalPath& path,
                              int endpoint_location_vertex) {
  DecisionEdge e;
  e.delay_ms = 0.0;
  e.capacity_mbps = kInfinity;
  e.rel_by_step.assign(static_cast<size_t>(g.step_count()), 1.0);
  for (int li : path.links) {
    const auto& link = g.links[static_cast<size_t>(li)];
    e.delay_ms += link.delay_ms;
    e.capacity_mbps = std::min(e.capacity_mbps, ledger.link_residual(li));
    e.transport_cost_per_mbps += cfg.traffic_cost(link.cost_per_gbit, 1.0);
    for (int t = 0; t < g.step_count(); ++t) {
      e.rel_by_step[static_cast<size_t>(t)] *= link.reliability.at(t);
      e.rel_by_step[static_cast<size_t>(t)] *= g.node_reliability_at(link.to, t);
    }
    if (e.access_node < 0) {
      if (link.from == endpoint_location_vertex && g.is_node_vertex(link.to))
        e.access_node = link.to;
      if (link.to == endpoint_location_vertex && g.is_node_vertex(link.from))
        e.access_node = link.from;
    }
  }
  e.links = path.links;
  return e;
}

}  // namespace

DecisionGraph build_decision_graph(const PhysicalGraph& g, const ResidualLedger& ledger,
                                   const ServiceRequest& req, int n_instances,
                                   bool downlink, const PlannerConfig& cfg) {
  DecisionGraph dg;
  dg.replicas_per_node = std::max(1, n_instances);

  for (size_t e = 0; e < req.endpoints.size(); ++e) {
    dg.endpoint_vertex[static_cast<int>(e)] = static_cast<int>(dg.vertices.size());
    dg.vertices.push_back(DecisionVertex{static_cast<int>(e), -1, 0});
  }
  std::vector<int> compute_nodes;
  for (int n = 0; n < g.node_count(); ++n)
    if (g.nodes[static_cast<size_t>(n)].is_compute()) compute_nodes.push_back(n);
  for (int n : compute_nodes) {
    dg.node_base_vertex[n] = static_cast<int>(dg.vertices.size());
    for (int r = 0; r < dg.replicas_per_node; ++r)
      dg.vertices.push_back(DecisionVertex{-1, n, r});
  }

  // Auxiliary edges along each replica chain.
  for (int n : compute_nodes) {
    int base = dg.node_base_vertex[n];
    for (int r = 0; r + 1 < dg.replicas_per_node; ++r) {
      DecisionEdge aux;
      aux.from = base + r;
      aux.to = base + r + 1;
      aux.aux = true;
      aux.delay_ms = 0.0;
      aux.capacity_mbps = kInfinity;
      aux.rel_by_step.assign(static_cast<size_t>(g.step_count()), 1.0);
      dg.edges.push_back(std::move(aux));
    }
  }

  // Virtual edges: endpoint -> compute base, and compute (every replica) ->
  // other compute base, one edge per enumerated physical realization.
  for (size_t e = 0; e < req.endpoints.size(); ++e) {
    int src_vertex = dg.endpoint_vertex[static_cast<int>(e)];
    int src_phys = g.location_vertex(req.endpoints[e].location);
    for (int n : compute_nodes) {
      auto paths = k_shortest_paths(g, src_phys, n, cfg.k_paths, downlink);
      for (const auto& p : paths) {
        DecisionEdge edge = fold_realization(g, ledger, cfg, p, src_phys);
        edge.from = src_vertex;
        edge.to = dg.node_base_vertex[n];
        dg.edges.push_back(std::move(edge));
      }
    }
  }
  for (int a : compute_nodes) {
    for (int b : compute_nodes) {
      if (a == b) continue;
      auto paths = k_shortest_paths(g, a, b, cfg.k_paths, downlink);
      for (const auto& p : paths) {
        DecisionEdge proto = fold_realization(g, ledger, cfg, p, -1);
        proto.to = dg.node_base_vertex[b];
        for (int r = 0; r < dg.replicas_per_node; ++r) {
          DecisionEdge edge = proto;
          edge.from = dg.node_base_vertex[a] + r;
          dg.edges.push_back(std::move(edge));
        }
      }
    }
  }

  dg.rebuild_out();
  return dg;
}

DecisionGraph prune_availability(const DecisionGraph& dg, const PhysicalGraph& g,
                                 const ServiceRequest& req, std::vector<int>* uncovered) {
  DecisionGraph out = dg;
  out.edges.clear();
  std::vector<int> adjacent(req.endpoints.size(), 0);
  for (const auto& e : dg.edges) {
    const DecisionVertex& from = dg.vertices[static_cast<size_t>(e.from)];
    if (from.is_endpoint()) {
      const EndpointSpec& ep = req.endpoints[static_cast<size_t>(from.endpoint)];
      if (e.access_node < 0) continue;
      const PhysicalNode& access = g.nodes[static_cast<size_t>(e.access_node)];
      if (!access.covers(ep.location) || access.interfaces.empty()) continue;
      bool alive = true;
      for (int t : ep.lifetime)
        if (!(e.rel_at(t) > 0.0)) alive = false;
      if (!alive) continue;
      adjacent[static_cast<size_t>(from.endpoint)]++;
    }
    out.edges.push_back(e);
  }
  if (uncovered != nullptr) {
    uncovered->clear();
    for (size_t e = 0; e < req.endpoints.size(); ++e)
      if (adjacent[e] == 0) uncovered->push_back(static_cast<int>(e));
  }
  out.rebuild_out();
  return out;
}

void assign_weights(DecisionGraph* dg, double max_delay_ms, double min_reliability,
                    const std::vector<int>& lifetime) {
  const bool delay_bound = std::isfinite(max_delay_ms);
  const bool rel_bound = min_reliability > 0.0;
  const double log_target = rel_bound ? std::log(min_reliability) : 0.0;
  for (auto& e : dg->edges) {
    e.weight = KpiWeight{};
    if (e.aux) continue;
    if (delay_bound) e.weight.delay_frac = e.delay_ms / max_delay_ms;
    if (rel_bound) {
      double worst = e.worst_rel(lifetime);
      if (worst < 1.0) e.weight.rel_frac = std::log(worst) / log_target;
    }
  }
}

std::string decision_graph_dot(const DecisionGraph& dg, const PhysicalGraph& g) {
  std::ostringstream os;
  os << "digraph decision {\n";
  for (size_t i = 0; i < dg.vertices.size(); ++i) {
    const auto& v = dg.vertices[i];
    os << "  v" << i << " [label=\"";
    if (v.is_endpoint())
      os << "endpoint" << v.endpoint;
    else
      os << g.nodes[static_cast<size_t>(v.node)].id << "#" << v.replica;
    os << "\"];\n";
  }
  for (const auto& e : dg.edges) {
    os << "  v" << e.from << " -> v" << e.to << " [label=\"";
    if (e.aux) {
      os << "aux";
    } else {
      os << e.delay_ms << "ms cap=" << e.capacity_mbps << " rel=" << e.rel_at(0)
         << " steep=(" << e.steep_delay << "," << e.steep_rel << ")";
    }
    os << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace okpi
