#pragma once

#include <map>
#include <vector>

#include "okpi/model.hpp"
#include "okpi/residual_ledger.hpp"
#include "okpi/scenario.hpp"

namespace okpi {

// Vertex of the decision graph: an endpoint of the request, or a
// computation-capable node together with a replica index. Replica 0 is the
// real node; walking the replica chain places consecutive VNFs on that node.
struct DecisionVertex {
  int endpoint = -1;  // >= 0 for endpoint vertices
  int node = -1;      // >= 0 for compute vertices
  int replica = 0;
  bool is_endpoint() const { return endpoint >= 0; }
};

// Dimensionless fraction of each KPI budget an edge consumes.
struct KpiWeight {
  double delay_frac = 0.0;
  double rel_frac = 0.0;  // log eta / log H, natural logs
};

struct DecisionEdge {
  int from = -1;
  int to = -1;
  bool aux = false;  // replica-chain edge: zero delay, infinite capacity, reliability 1
  double delay_ms = 0.0;
  double capacity_mbps = kInfinity;       // min residual over the realization
  double transport_cost_per_mbps = 0.0;   // per accounting period
  std::vector<double> rel_by_step;        // folded reliability per time step
  std::vector<int> links;                 // physical realization, traffic order
  int access_node = -1;                   // node adjacent to the endpoint (endpoint edges)
  KpiWeight weight;                       // set by assign_weights
  int steep_delay = 0;                    // set by expand
  int steep_rel = 0;

  double rel_at(int step) const {
    return rel_by_step.empty() ? 1.0 : rel_by_step[static_cast<size_t>(step)];
  }
  double worst_rel(const std::vector<int>& steps) const {
    double w = 1.0;
    for (int t : steps) w = std::min(w, rel_at(t));
    return w;
  }
};

struct DecisionGraph {
  int replicas_per_node = 1;  // == number of VNF instances to place
  std::vector<DecisionVertex> vertices;
  std::vector<DecisionEdge> edges;
  std::vector<std::vector<int>> out;         // by vertex
  std::map<int, int> endpoint_vertex;        // endpoint index -> vertex
  std::map<int, int> node_base_vertex;       // node -> replica-0 vertex

  void rebuild_out() {
    out.assign(vertices.size(), {});
    for (size_t i = 0; i < edges.size(); ++i)
      out[static_cast<size_t>(edges[i].from)].push_back(static_cast<int>(i));
  }
};

// Builds the decision graph for one chain of `req`: endpoint vertices,
// compute vertices with (n_instances - 1) replicas, auxiliary replica-chain
// edges, and virtual edges holding the K minimum-delay physical realizations
// between every relevant vertex pair. Capacities reflect ledger residuals.
// With `downlink`, realizations run against link direction (traffic towards
// the endpoint).
DecisionGraph build_decision_graph(const PhysicalGraph& g, const ResidualLedger& ledger,
                                   const ServiceRequest& req, int n_instances,
                                   bool downlink, const PlannerConfig& cfg);

// Drops endpoint-adjacent edges whose access node does not cover the
// endpoint's location (or has no radio interface), and edges with vanishing
// reliability during the endpoint's lifetime. Endpoints left without any
// adjacent edge are reported in `uncovered`.
DecisionGraph prune_availability(const DecisionGraph& dg, const PhysicalGraph& g,
                                 const ServiceRequest& req, std::vector<int>* uncovered);

// Multi-dimensional weights per Eq. (weight): consumed fraction of the delay
// and (log-domain) reliability budgets. Absent KPIs degenerate to 0.
// Reliability uses the worst value over `lifetime`.
void assign_weights(DecisionGraph* dg, double max_delay_ms, double min_reliability,
                    const std::vector<int>& lifetime);

// Graphviz dump for debugging.
std::string decision_graph_dot(const DecisionGraph& dg, const PhysicalGraph& g);

}  // namespace okpi
