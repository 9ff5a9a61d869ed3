#include "okpi/expanded_graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace okpi {

int quantized_steepness(double frac, int gamma, double eps) {
  if (frac <= 0.0) return 0;
  double t = static_cast<double>(gamma) * frac;
  int s = static_cast<int>(std::ceil(t - eps));
  return std::max(s, 0);
}

ExpandedGraph expand(const DecisionGraph& dg, int gamma, double demand_mbps,
                     bool dim_delay, bool dim_rel, double eps) {
  ExpandedGraph xg;
  xg.dg = dg;
  xg.gamma = gamma;
  xg.dim_delay = dim_delay;
  xg.dim_rel = dim_rel;
  xg.min_demand_mbps = demand_mbps;
  for (auto& e : xg.dg.edges) {
    e.steep_delay = dim_delay ? quantized_steepness(e.weight.delay_frac, gamma, eps) : 0;
    e.steep_rel = dim_rel ? quantized_steepness(e.weight.rel_frac, gamma, eps) : 0;
  }
  return xg;
}

namespace {

struct PartialPath {
  double cost = 0.0;
  int steep_sum = 0;
  int layer = 0;
  int vertex = -1;
  int depth_delay = 0;
  int depth_rel = 0;
  double delay_ms = 0.0;
  std::vector<double> rel;  // per lifetime step
  std::vector<int> edge_ids;
  std::vector<int> hosts;
};

struct PathOrder {
  const std::vector<int>* node_rank;
  bool operator()(const PartialPath& a, const PartialPath& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    if (a.steep_sum != b.steep_sum) return a.steep_sum > b.steep_sum;
    const size_t n = std::min(a.hosts.size(), b.hosts.size());
    for (size_t i = 0; i < n; ++i) {
      int ra = (*node_rank)[static_cast<size_t>(a.hosts[i])];
      int rb = (*node_rank)[static_cast<size_t>(b.hosts[i])];
      if (ra != rb) return ra > rb;
    }
    if (a.hosts.size() != b.hosts.size()) return a.hosts.size() > b.hosts.size();
    return a.edge_ids > b.edge_ids;
  }
};

}  // namespace

std::vector<Candidate> find_candidates(const ExpandedGraph& xg, const PhysicalGraph& g,
                                       const CandidateQuery& q, SearchStats* stats) {
  const DecisionGraph& dg = xg.dg;
  const int n_layers = static_cast<int>(q.layers.size());
  std::vector<Candidate> out;
  auto ep_it = dg.endpoint_vertex.find(q.endpoint);
  if (ep_it == dg.endpoint_vertex.end() || n_layers == 0) return out;

  // Lexicographic rank of nodes by their id string, for deterministic ties.
  std::vector<int> node_rank(g.nodes.size(), 0);
  {
    std::vector<int> order(g.nodes.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return g.nodes[static_cast<size_t>(a)].id < g.nodes[static_cast<size_t>(b)].id;
    });
    for (size_t r = 0; r < order.size(); ++r)
      node_rank[static_cast<size_t>(order[r])] = static_cast<int>(r);
  }

  // Per-layer host admissibility (interfaces + residual resources for the
  // exactly-sized non-CPU assignment and a stable CPU queue).
  auto residual = [&](int node, int kind) {
    if (q.ledger != nullptr) return q.ledger->node_residual(node, kind);
    return g.nodes[static_cast<size_t>(node)].capacity[static_cast<size_t>(kind)];
  };
  auto host_ok = [&](int layer, int node) {
    const LayerSpec& spec = q.layers[static_cast<size_t>(layer)];
    if (spec.anchor >= 0 && spec.anchor != node) return false;
    const PhysicalNode& pn = g.nodes[static_cast<size_t>(node)];
    const Vnf& vnf = g.vnfs[static_cast<size_t>(spec.vnf)];
    for (int itf : vnf.required_interfaces)
      if (!pn.has_interface(itf)) return false;
    if (q.ignore_capacity) return true;
    for (int k = 1; k < g.kind_count(); ++k)
      if (vnf.per_unit[static_cast<size_t>(k)] * spec.lambda > residual(node, k) + 1e-9)
        return false;
    if (spec.weight > 0.0 && vnf.per_unit[kCpu] * spec.lambda >= residual(node, kCpu) - 1e-12)
      return false;
    return true;
  };

  // Provisional cost of taking `edge` as layer `layer`, given hosts so far.
  auto edge_cost = [&](const DecisionEdge& edge, int layer,
                       const std::vector<int>& hosts_so_far) {
    const LayerSpec& spec = q.layers[static_cast<size_t>(layer)];
    int node = dg.vertices[static_cast<size_t>(edge.to)].node;
    const PhysicalNode& pn = g.nodes[static_cast<size_t>(node)];
    const Vnf& vnf = g.vnfs[static_cast<size_t>(spec.vnf)];
    double c = edge.transport_cost_per_mbps * spec.demand;
    for (int k = 1; k < g.kind_count(); ++k)
      c += vnf.per_unit[static_cast<size_t>(k)] * spec.lambda *
           pn.resource_cost[static_cast<size_t>(k)];
    c += vnf.per_unit[kCpu] * spec.lambda * pn.resource_cost[kCpu];
    bool placed_before = false;
    for (size_t i = 0; i < hosts_so_far.size(); ++i)
      if (hosts_so_far[i] == node && q.layers[i].vnf == spec.vnf) placed_before = true;
    if (!placed_before && q.instantiation_cost)
      c += q.instantiation_cost(node, spec.vnf);
    return c;
  };

  std::priority_queue<PartialPath, std::vector<PartialPath>, PathOrder> queue{
      PathOrder{&node_rank}};
  PartialPath start;
  start.vertex = ep_it->second;
  start.rel.assign(q.lifetime.size(), 1.0);
  queue.push(start);

  std::vector<std::set<std::tuple<int, int, int>>> reachable;
  if (stats != nullptr) {
    reachable.resize(static_cast<size_t>(n_layers) + 1);
    stats->pops = 0;
    stats->truncated = false;
  }

  long pops = 0;
  while (!queue.empty() && static_cast<int>(out.size()) < q.max_candidates) {
    if (pops++ > q.max_pops) {
      if (stats != nullptr) stats->truncated = true;
      break;
    }
    PartialPath cur = queue.top();
    queue.pop();
    if (stats != nullptr)
      reachable[static_cast<size_t>(cur.layer)].insert(
          {cur.vertex, cur.depth_delay, cur.depth_rel});

    if (cur.layer == n_layers) {
      // Lemma-1 safety net: quantization only over-counts, but the exact KPIs
      // are asserted, not assumed.
      if (cur.delay_ms > q.max_delay_ms + 1e-9) continue;
      bool rel_ok = true;
      for (double r : cur.rel)
        if (r < q.min_reliability * (1.0 - 1e-12)) rel_ok = false;
      if (!rel_ok) continue;
      Candidate cand;
      cand.edge_ids = cur.edge_ids;
      cand.hosts = cur.hosts;
      cand.net_delay_ms = cur.delay_ms;
      cand.rel_by_step = cur.rel;
      cand.provisional_cost = cur.cost;
      cand.steep_delay = cur.depth_delay;
      cand.steep_rel = cur.depth_rel;
      out.push_back(std::move(cand));
      continue;
    }

    const LayerSpec& spec = q.layers[static_cast<size_t>(cur.layer)];
    for (int ei : dg.out[static_cast<size_t>(cur.vertex)]) {
      const DecisionEdge& edge = dg.edges[static_cast<size_t>(ei)];
      if (!q.ignore_capacity && !edge.aux && edge.capacity_mbps + 1e-9 < spec.demand)
        continue;
      int dd = cur.depth_delay + edge.steep_delay;
      int dr = cur.depth_rel + edge.steep_rel;
      if (xg.dim_delay && dd > xg.gamma) continue;
      if (xg.dim_rel && dr > xg.gamma) continue;
      int node = dg.vertices[static_cast<size_t>(edge.to)].node;
      if (node < 0) continue;  // chains never return to endpoints
      if (!host_ok(cur.layer, node)) continue;

      PartialPath next = cur;
      next.layer += 1;
      next.vertex = edge.to;
      next.depth_delay = dd;
      next.depth_rel = dr;
      next.steep_sum = dd + dr;
      next.delay_ms += edge.delay_ms;
      for (size_t t = 0; t < q.lifetime.size(); ++t)
        next.rel[t] *= edge.rel_at(q.lifetime[t]);
      next.cost += edge_cost(edge, cur.layer, cur.hosts);
      next.edge_ids.push_back(ei);
      next.hosts.push_back(node);
      queue.push(std::move(next));
    }
  }

  if (stats != nullptr) {
    stats->pops = pops;
    stats->reachable_per_layer.clear();
    for (const auto& layer : reachable)
      stats->reachable_per_layer.push_back(static_cast<long>(layer.size()));
  }
  return out;
}

}  // namespace okpi
