#include "okpi/scenario_gen.hpp"

#include <algorithm>
#include <random>

namespace okpi {

Scenario random_scenario(uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto pick = [&](int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto chance = [&](double p) { return uniform(0.0, 1.0) < p; };

  Scenario sc;
  sc.name = "random-" + std::to_string(seed);
  PhysicalGraph& g = sc.graph;

  const int n_steps = pick(1, 2);
  for (int t = 0; t < n_steps; ++t) g.time_steps.push_back("t" + std::to_string(t));
  g.resource_kinds = {"cpu"};
  const bool with_memory = chance(0.4);
  if (with_memory) g.resource_kinds.push_back("memory");
  g.interfaces = {"radio", "actuator"};
  const int n_locations = pick(1, 2);
  for (int l = 0; l < n_locations; ++l) g.locations.push_back("loc" + std::to_string(l));

  auto random_reliability = [&]() {
    ReliabilityProfile p;
    p.constant = 1.0 - std::pow(10.0, uniform(-6.0, -1.5));
    if (n_steps > 1 && chance(0.3)) {
      p.per_step.resize(static_cast<size_t>(n_steps));
      for (int t = 0; t < n_steps; ++t)
        p.per_step[static_cast<size_t>(t)] = 1.0 - std::pow(10.0, uniform(-6.0, -1.5));
    }
    return p;
  };

  const int n_nodes = pick(3, 6);
  const double base_load = uniform(0.5, 3.0);
  for (int n = 0; n < n_nodes; ++n) {
    PhysicalNode node;
    node.id = "n" + std::to_string(n);
    node.capacity.assign(g.resource_kinds.size(), 0.0);
    node.resource_cost.assign(g.resource_kinds.size(), 0.0);
    bool compute = n < 2 || chance(0.7);  // at least two compute nodes
    if (compute) {
      node.tier = chance(0.5) ? "fog" : "mec";
      node.capacity[kCpu] = base_load * uniform(1.0, 6.0);
      node.resource_cost[kCpu] = uniform(0.5, 3.0);
      if (with_memory) {
        node.capacity[1] = base_load * uniform(1.0, 8.0);
        node.resource_cost[1] = uniform(0.05, 0.5);
      }
      node.vnf_cost_default = uniform(0.0, 1.0);
    } else {
      node.tier = "poa";
    }
    node.reliability = random_reliability();
    // coverage: compute or relay nodes may carry radio
    if (chance(0.6)) {
      node.interfaces.push_back(0);
      int covered = pick(0, n_locations - 1);
      node.coverage.push_back(covered);
    }
    if (compute && chance(0.3)) node.interfaces.push_back(1);
    std::sort(node.interfaces.begin(), node.interfaces.end());
    node.interfaces.erase(std::unique(node.interfaces.begin(), node.interfaces.end()),
                          node.interfaces.end());
    g.nodes.push_back(std::move(node));
  }
  // Every location needs at least one covering node for interesting cases;
  // leave a small chance of none (availability rejects are valid outcomes).
  for (int l = 0; l < n_locations; ++l) {
    bool covered = false;
    for (const auto& n : g.nodes) covered |= n.covers(l);
    if (!covered && chance(0.8)) {
      auto& n = g.nodes[static_cast<size_t>(pick(0, n_nodes - 1))];
      n.coverage.push_back(l);
      std::sort(n.coverage.begin(), n.coverage.end());
      if (n.interfaces.empty()) n.interfaces.push_back(0);
    }
  }

  auto add_link = [&](int from, int to, double delay, double cap, double cost) {
    PhysicalLink l;
    l.id = "l" + std::to_string(g.links.size());
    l.from = from;
    l.to = to;
    l.delay_ms = delay;
    l.capacity_mbps = cap;
    l.cost_per_gbit = cost;
    l.reliability = chance(0.5) ? ReliabilityProfile{} : random_reliability();
    PhysicalLink rev = l;
    std::swap(rev.from, rev.to);
    rev.id += "~rev";
    g.links.push_back(l);
    g.links.push_back(rev);
  };

  // spanning tree + extra edges
  for (int n = 1; n < n_nodes; ++n)
    add_link(pick(0, n - 1), n, uniform(0.5, 5.0), base_load * uniform(0.8, 5.0),
             uniform(0.1, 2.0));
  int extra = pick(0, n_nodes);
  for (int i = 0; i < extra; ++i) {
    int a = pick(0, n_nodes - 1), b = pick(0, n_nodes - 1);
    bool exists = a == b;
    for (const auto& l : g.links)
      if (l.from == a && l.to == b) exists = true;
    if (!exists)
      add_link(a, b, uniform(0.5, 5.0), base_load * uniform(0.8, 5.0), uniform(0.1, 2.0));
  }
  // access links from locations to their covering nodes
  for (int l = 0; l < n_locations; ++l)
    for (int n = 0; n < n_nodes; ++n)
      if (g.nodes[static_cast<size_t>(n)].covers(l))
        add_link(g.location_vertex(l), n, uniform(0.5, 3.0), base_load * uniform(1.0, 5.0),
                 uniform(0.0, 1.0));

  const int n_vnfs = pick(1, 3);
  for (int v = 0; v < n_vnfs; ++v) {
    Vnf vnf;
    vnf.id = "vnf" + std::to_string(v);
    vnf.per_unit.assign(g.resource_kinds.size(), 0.0);
    vnf.per_unit[kCpu] = uniform(0.3, 1.5);
    if (with_memory && chance(0.5)) vnf.per_unit[1] = uniform(0.1, 1.0);
    if (v == 0 && chance(0.25)) vnf.required_interfaces.push_back(1);
    g.vnfs.push_back(std::move(vnf));
  }

  ServiceRequest s;
  s.id = "svc";
  ChainSpec chain;
  for (int v = 0; v < n_vnfs; ++v) chain.vnfs.push_back(v);
  chain.downlink = chance(0.15) && n_vnfs >= 2;
  chain.instance_count.assign(chain.vnfs.size(), 1);
  s.chains.push_back(chain);
  if (n_vnfs >= 3 && chance(0.3)) {
    // second chain sharing the tail VNF
    ChainSpec c2;
    c2.vnfs = {n_vnfs - 1, n_vnfs - 2};
    c2.downlink = true;
    c2.load_factor = uniform(0.3, 1.0);
    c2.instance_count.assign(2, 1);
    s.chains.push_back(c2);
  }
  if (n_vnfs >= 2 && chance(0.4))
    s.chi[{-1, chain.vnfs[0], chain.vnfs[1]}] = uniform(0.4, 1.6);
  const int n_endpoints = pick(1, std::min(2, n_locations));
  for (int e = 0; e < n_endpoints; ++e) {
    EndpointSpec ep;
    ep.location = e % n_locations;
    ep.load_mbps = base_load * uniform(0.5, 1.0);
    for (int t = 0; t < n_steps; ++t)
      if (t == 0 || chance(0.7)) ep.lifetime.push_back(t);
    s.endpoints.push_back(ep);
  }
  if (chance(0.7)) s.max_delay_ms = uniform(5.0, 100.0);
  if (chance(0.7)) {
    const double targets[] = {0.9, 0.99, 0.999};
    s.min_reliability = targets[pick(0, 2)];
  }
  s.isolated = chance(0.1);
  sc.services.push_back(std::move(s));

  sc.config.gamma = pick(2, 8);
  sc.config.k_paths = pick(2, 4);
  sc.config.max_candidates = 64;
  sc.config.cost_period_s = 1000.0;
  sc.config.oracle.hop_bound = 6;
  g.build_adjacency();
  return sc;
}

}  // namespace okpi
