#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace okpi {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Resource kind 0 is always "cpu"; further kinds (memory, storage, ...) are
// whatever the scenario declares.
inline constexpr int kCpu = 0;

// Reliability of a node or link: either constant or a step function over the
// scenario's discrete time steps. Values live in (0, 1].
struct ReliabilityProfile {
  double constant = 1.0;
  std::vector<double> per_step;  // empty => constant at every step

  double at(int step) const {
    if (per_step.empty()) return constant;
    return per_step.at(static_cast<size_t>(step));
  }
  double worst(const std::vector<int>& steps) const {
    if (per_step.empty()) return constant;
    double w = 1.0;
    for (int t : steps) w = std::min(w, at(t));
    return w;
  }
};

struct PhysicalNode {
  std::string id;
  std::string tier;  // fog | poa | mec | aggregation | cloud | switch | ...
  std::vector<double> capacity;       // per resource kind, units
  std::vector<double> resource_cost;  // per resource kind, currency per unit
  std::vector<int> interfaces;        // interface indices, sorted
  std::vector<int> coverage;          // location indices, sorted
  ReliabilityProfile reliability;
  std::map<int, double> vnf_cost;  // vnf index -> instantiation cost
  double vnf_cost_default = 0.0;

  bool is_compute() const {
    for (double c : capacity)
      if (c > 0) return true;
    return false;
  }
  bool has_interface(int itf) const {
    for (int i : interfaces)
      if (i == itf) return true;
    return false;
  }
  bool covers(int location) const {
    for (int l : coverage)
      if (l == location) return true;
    return false;
  }
  double instantiation_cost(int vnf) const {
    auto it = vnf_cost.find(vnf);
    return it == vnf_cost.end() ? vnf_cost_default : it->second;
  }
};

// Directed physical link. Scenario links declared bidirectional produce two
// of these, each with its own capacity pool. `from`/`to` are physical vertex
// indices: 0..nodes-1 are nodes, nodes..nodes+locations-1 are locations
// (endpoint attachment points).
struct PhysicalLink {
  std::string id;
  int from = -1;
  int to = -1;
  double delay_ms = 0.0;
  double capacity_mbps = 0.0;
  double cost_per_gbit = 0.0;
  ReliabilityProfile reliability;
};

struct Vnf {
  std::string id;
  std::vector<double> per_unit;         // r_kappa(v): units per Mb/s, per kind
  std::vector<int> required_interfaces; // sorted interface indices
};

struct PhysicalGraph {
  std::vector<std::string> time_steps;      // at least one
  std::vector<std::string> resource_kinds;  // [0] == "cpu"
  std::vector<std::string> interfaces;
  std::vector<std::string> locations;
  std::vector<PhysicalNode> nodes;
  std::vector<PhysicalLink> links;
  std::vector<Vnf> vnfs;

  // adjacency: per physical vertex, outgoing link indices (built by loader)
  std::vector<std::vector<int>> out_links;
  std::vector<std::vector<int>> in_links;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int vertex_count() const {
    return static_cast<int>(nodes.size() + locations.size());
  }
  bool is_node_vertex(int v) const { return v < node_count(); }
  int location_vertex(int location) const { return node_count() + location; }
  int step_count() const { return static_cast<int>(time_steps.size()); }
  int kind_count() const { return static_cast<int>(resource_kinds.size()); }

  double node_reliability_at(int vertex, int step) const {
    if (!is_node_vertex(vertex)) return 1.0;  // endpoints/locations: sources
    return nodes[static_cast<size_t>(vertex)].reliability.at(step);
  }

  void build_adjacency() {
    out_links.assign(static_cast<size_t>(vertex_count()), {});
    in_links.assign(static_cast<size_t>(vertex_count()), {});
    for (size_t i = 0; i < links.size(); ++i) {
      out_links[static_cast<size_t>(links[i].from)].push_back(
          static_cast<int>(i));
      in_links[static_cast<size_t>(links[i].to)].push_back(
          static_cast<int>(i));
    }
  }
};

// One chain of a service graph, in traffic order. `downlink` chains carry
// traffic from vnfs.back() towards the endpoint; they are planned from the
// endpoint over reversed links.
struct ChainSpec {
  std::vector<int> vnfs;            // vnf indices, traffic order
  bool downlink = false;
  double load_factor = 1.0;         // chain initial load = endpoint load * factor
  std::vector<int> instance_count;  // per position; planner replication mutates
};

struct EndpointSpec {
  int location = -1;
  double load_mbps = 0.0;
  std::vector<int> lifetime;  // time step indices, sorted; never empty
};

// chi key: (prev, cur, next); prev == -1 means "the endpoint".
using ChiKey = std::tuple<int, int, int>;

struct ServiceRequest {
  std::string id;
  std::vector<ChainSpec> chains;
  std::map<ChiKey, double> chi;
  std::vector<EndpointSpec> endpoints;
  double max_delay_ms = kInfinity;  // absent KPI => non-binding
  double min_reliability = 0.0;     // absent KPI => non-binding
  bool isolated = false;

  bool delay_bound() const { return std::isfinite(max_delay_ms); }
  bool reliability_bound() const { return min_reliability > 0.0; }

  double chi_value(int prev, int cur, int next) const {
    auto it = chi.find({prev, cur, next});
    return it == chi.end() ? 1.0 : it->second;
  }

  // Per-hop demand of a chain at unit instance counts, starting from `load`.
  // demand[k] is the traffic entering the k-th VNF of the chain.
  std::vector<double> hop_demands(const ChainSpec& chain, double load) const {
    std::vector<double> d(chain.vnfs.size(), 0.0);
    double cur = load * chain.load_factor;
    for (size_t k = 0; k < chain.vnfs.size(); ++k) {
      d[k] = cur;
      if (k + 1 < chain.vnfs.size()) {
        int prev = k == 0 ? -1 : chain.vnfs[k - 1];
        cur *= chi_value(prev, chain.vnfs[k], chain.vnfs[k + 1]);
      }
    }
    return d;
  }
};

// ---------------------------------------------------------------------------
// Deployment: the output of the planner / oracle, input of the KPI checker.

struct PlacedInstance {
  int chain = -1;     // chain index within the request
  int position = -1;  // position within the chain
  int vnf = -1;
  int node = -1;
  bool reused = false;  // true => no instantiation cost was paid
  // a_c(e, v, cpu), per endpoint index
  std::map<int, double> cpu_by_endpoint;
  // non-CPU assignments: (endpoint, kind) -> units, sized at Eq.-coupling equality
  std::map<std::pair<int, int>, double> other_by_endpoint;
};

// One hop of one service flow: traffic of `endpoint`, chain `chain`, entering
// the instance at `instance` (or leaving the network if instance == -1,
// e.g. the last hop of a downlink chain).
struct RouteHop {
  int endpoint = -1;
  int chain = -1;
  int hop = -1;           // hop index within the chain's flow order
  double fraction = 1.0;  // flow fraction on this string (instance splits)
  double demand_mbps = 0.0;
  std::vector<int> links;  // physical link indices in traversal order; may be
                           // empty (co-located consecutive VNFs)
  int instance = -1;       // index into Deployment::instances
};

struct CostBreakdown {
  double instantiation = 0.0;
  double resource = 0.0;
  double transport = 0.0;
  double total() const { return instantiation + resource + transport; }
};

struct Deployment {
  std::vector<PlacedInstance> instances;
  std::vector<RouteHop> routes;
  CostBreakdown cost;
};

}  // namespace okpi
