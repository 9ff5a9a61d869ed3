#pragma once

#include <functional>
#include <vector>

#include "okpi/decision_graph.hpp"

namespace okpi {

// The expanded graph replicates every decision vertex (gamma+1) times per
// binding additive KPI; a vertex's depth encodes the consumed fraction of
// that KPI budget and edges are unweighted. Vertices are kept implicit as
// (decision vertex, depth...) tuples; edges are the decision edges labeled
// with their quantized steepness.
struct ExpandedGraph {
  DecisionGraph dg;
  int gamma = 1;
  bool dim_delay = false;
  bool dim_rel = false;
  double min_demand_mbps = 0.0;

  size_t vertex_count() const {
    size_t levels = 1;
    if (dim_delay) levels *= static_cast<size_t>(gamma) + 1;
    if (dim_rel) levels *= static_cast<size_t>(gamma) + 1;
    return dg.vertices.size() * levels;
  }
  size_t edge_count() const {
    size_t levels = 1;
    if (dim_delay) levels *= static_cast<size_t>(gamma) + 1;
    if (dim_rel) levels *= static_cast<size_t>(gamma) + 1;
    size_t usable = 0;
    for (const auto& e : dg.edges)
      if (e.capacity_mbps + 1e-9 >= min_demand_mbps) ++usable;
    return usable * levels;  // upper bound: edges leaving the depth range exist only partially
  }
};

// ceil(gamma * frac) with a small tolerance so exact-integer products are not
// bumped one level up by FP rounding. Exact KPI re-verification downstream
// makes the tolerance safe.
int quantized_steepness(double frac, int gamma, double eps);

// Builds the expanded graph: labels every edge with its steepness per binding
// dimension and records the capacity threshold (edges with capacity below the
// traffic to process are excluded from the search).
ExpandedGraph expand(const DecisionGraph& dg, int gamma, double demand_mbps,
                     bool dim_delay, bool dim_rel, double eps = 1e-9);

// One VNF placement layer of a chain search.
struct LayerSpec {
  int vnf = -1;         // VNF placed at this layer's target
  double demand = 0.0;  // traffic on the hop entering the target (capacity/transport)
  double lambda = 0.0;  // traffic processed by this layer's VNF instance
  double weight = 0.0;  // flow-fraction weight of the instance's queue term
  int anchor = -1;      // pin the layer to this node (-1: free)
};

struct CandidateQuery {
  int endpoint = 0;
  std::vector<LayerSpec> layers;
  double max_delay_ms = kInfinity;
  double min_reliability = 0.0;
  std::vector<int> lifetime;
  int max_candidates = 64;
  long max_pops = 2000000;
  bool ignore_capacity = false;  // diagnostic mode: classify empty results
  // residual node resources; nullptr falls back to full graph capacities
  const ResidualLedger* ledger = nullptr;
  // instantiation cost of placing `vnf` at `node` in the current plan context
  // (0 when a reusable instance exists)
  std::function<double(int node, int vnf)> instantiation_cost;
};

struct Candidate {
  std::vector<int> edge_ids;  // decision edge per layer
  std::vector<int> hosts;     // base node per layer
  double net_delay_ms = 0.0;
  std::vector<double> rel_by_step;  // aligned with query lifetime
  double provisional_cost = 0.0;    // true lower bound on the full cost
  int steep_delay = 0;
  int steep_rel = 0;
};

struct SearchStats {
  long pops = 0;
  bool truncated = false;  // hit max_pops
  std::vector<long> reachable_per_layer;
};

// Hop-layered shortest-path search: exactly layers.size() relaxation rounds
// from (endpoint, depth 0) over the expanded graph, enumerating candidate
// paths in ascending provisional-cost order (transport + sized resources +
// instantiation + CPU at base load — a lower bound on the achievable cost).
// Every candidate is re-verified against the exact KPI targets before being
// returned. Deterministic: ties break on (total steepness, host ids, edges).
std::vector<Candidate> find_candidates(const ExpandedGraph& xg, const PhysicalGraph& g,
                                       const CandidateQuery& q,
                                       SearchStats* stats = nullptr);

}  // namespace okpi
