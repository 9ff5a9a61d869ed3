#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "okpi/expanded_graph.hpp"
#include "okpi/planner.hpp"
#include "okpi/scenario.hpp"
#include "okpi/scenario_gen.hpp"

using namespace okpi;

namespace {

std::string scenario_path(const char* name) {
  return std::string(OKPI_SCENARIO_DIR) + "/" + name;
}

// Three-vertex delay-only graph: two 1 ms hops in series and one 2 ms shortcut,
// 3 ms target.
struct ShortcutGraph {
  PhysicalGraph g;
  DecisionGraph dg;
  int v_end = 0, v_n2 = 1, v_n2r = 2, v_n3 = 3, v_n3r = 4;

  ShortcutGraph() {
    g.time_steps = {"t0"};
    g.resource_kinds = {"cpu"};
    g.locations = {"s"};
    for (const char* id : {"n2", "n3"}) {
      PhysicalNode n;
      n.id = id;
      n.capacity = {100.0};
      n.resource_cost = {1.0};
      g.nodes.push_back(n);
    }
    Vnf f;
    f.id = "f";
    f.per_unit = {0.1};
    g.vnfs.push_back(f);
    g.build_adjacency();

    dg.replicas_per_node = 2;
    dg.vertices.push_back(DecisionVertex{0, -1, 0});   // endpoint
    dg.vertices.push_back(DecisionVertex{-1, 0, 0});   // n2
    dg.vertices.push_back(DecisionVertex{-1, 0, 1});   // n2'
    dg.vertices.push_back(DecisionVertex{-1, 1, 0});   // n3
    dg.vertices.push_back(DecisionVertex{-1, 1, 1});   // n3'
    dg.endpoint_vertex[0] = v_end;
    dg.node_base_vertex[0] = v_n2;
    dg.node_base_vertex[1] = v_n3;
    auto edge = [&](int from, int to, double delay, bool aux = false) {
      DecisionEdge e;
      e.from = from;
      e.to = to;
      e.aux = aux;
      e.delay_ms = aux ? 0.0 : delay;
      e.capacity_mbps = kInfinity;
      e.rel_by_step = {1.0};
      dg.edges.push_back(e);
    };
    edge(v_end, v_n2, 1.0);
    edge(v_n2, v_n3, 1.0);
    edge(v_n2r, v_n3, 1.0);
    edge(v_end, v_n3, 2.0);
    edge(v_n3, v_n2, 2.0);  // a second 2 ms hop available after the shortcut
    edge(v_n3r, v_n2, 2.0);
    edge(v_n2, v_n2r, 0.0, true);
    edge(v_n3, v_n3r, 0.0, true);
    dg.rebuild_out();
    assign_weights(&dg, 3.0, 0.0, {0});
  }
};

CandidateQuery two_layer_query() {
  CandidateQuery q;
  q.endpoint = 0;
  for (int k = 0; k < 2; ++k) {
    LayerSpec spec;
    spec.vnf = 0;
    spec.demand = 1.0;
    spec.lambda = 1.0;
    spec.weight = 1.0;
    q.layers.push_back(spec);
  }
  q.max_delay_ms = 3.0;
  q.lifetime = {0};
  q.max_candidates = 64;
  return q;
}

}  // namespace

TEST_CASE("weights are consumed budget fractions") {
  ShortcutGraph sg;
  // the 2 ms shortcut against a 3 ms target
  CHECK(sg.dg.edges[3].weight.delay_frac == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(sg.dg.edges[0].weight.delay_frac == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(sg.dg.edges[6].weight.delay_frac == 0.0);  // aux

  SUBCASE("log-domain reliability fraction") {
    DecisionGraph dg = sg.dg;
    dg.edges[0].rel_by_step = {0.9994};
    dg.edges[1].rel_by_step = {1.0};
    assign_weights(&dg, kInfinity, 0.999, {0});
    CHECK(dg.edges[0].weight.rel_frac ==
          doctest::Approx(std::log(0.9994) / std::log(0.999)).epsilon(1e-12));
    CHECK(dg.edges[0].weight.rel_frac == doctest::Approx(0.59988).epsilon(1e-4));
    CHECK(dg.edges[1].weight.rel_frac == 0.0);  // perfectly reliable edge
    CHECK(dg.edges[0].weight.delay_frac == 0.0);  // delay target absent
  }
}

TEST_CASE("expansion quantizes the shortcut to steepness 2 at resolution 3") {
  ShortcutGraph sg;
  ExpandedGraph xg = expand(sg.dg, 3, 1.0, true, false, 1e-9);
  CHECK(xg.dg.edges[3].steep_delay == 2);  // ceil(3 * 2/3) == 2 exactly
  CHECK(xg.dg.edges[0].steep_delay == 1);
  CHECK(xg.dg.edges[6].steep_delay == 0);  // aux
  CHECK(xg.vertex_count() == sg.dg.vertices.size() * 16);  // (gamma+1)^1 per dim
}

TEST_CASE("two-edge paths within the budget are found, over-steep ones are not") {
  ShortcutGraph sg;
  ExpandedGraph xg = expand(sg.dg, 3, 1.0, true, false, 1e-9);
  auto cands = find_candidates(xg, sg.g, two_layer_query());

  std::set<std::vector<int>> hostings;
  for (const auto& c : cands) hostings.insert(c.hosts);
  // series path: f on n2 then f on n3 (total steepness 2)
  CHECK(hostings.count({0, 1}) == 1);
  // shortcut path: both on n3 via the replica (steepness 2 + 0)
  CHECK(hostings.count({1, 1}) == 1);
  // shortcut then the second 2 ms hop would need steepness 4 > 3
  CHECK(hostings.count({1, 0}) == 0);
  for (const auto& c : cands) CHECK(c.net_delay_ms <= 3.0 + 1e-9);
}

TEST_CASE("at resolution 1 every lossy edge consumes the whole budget") {
  ShortcutGraph sg;
  ExpandedGraph xg = expand(sg.dg, 1, 1.0, true, false, 1e-9);
  for (const auto& e : xg.dg.edges)
    if (!e.aux) CHECK(e.steep_delay == 1);
  auto cands = find_candidates(xg, sg.g, two_layer_query());
  // any 2-hop path has total steepness 2 > 1, so only lossy-then-aux survives
  for (const auto& c : cands) {
    int lossy = 0;
    for (int ei : c.edge_ids)
      if (!xg.dg.edges[static_cast<size_t>(ei)].aux) lossy++;
    CHECK(lossy <= 1);
  }
  CHECK_FALSE(cands.empty());
}

TEST_CASE("a single compute node hosts the whole chain through replicas") {
  Scenario sc = parse_scenario(R"({
    "locations": ["s"],
    "vnfs": [{"id": "f1", "cpu_per_mbps": 1}, {"id": "f2", "cpu_per_mbps": 1},
             {"id": "f3", "cpu_per_mbps": 1}],
    "nodes": [{"id": "c", "resources": {"cpu": 50}, "interfaces": ["r"], "coverage": ["s"]}],
    "interfaces": ["r"],
    "links": [{"from": "s", "to": "c", "delay_ms": 1, "capacity_mbps": 10}],
    "services": [{"id": "svc", "chains": [{"vnfs": ["f1", "f2", "f3"]}],
                  "endpoints": [{"location": "s", "load_mbps": 1}],
                  "max_delay_ms": 20, "min_reliability": 0.5}]
  })", "single");
  ResidualLedger ledger(sc.graph);
  const ServiceRequest& req = sc.services[0];
  DecisionGraph dg = build_decision_graph(sc.graph, ledger, req, 3, false, sc.config);
  assign_weights(&dg, req.max_delay_ms, req.min_reliability, req.endpoints[0].lifetime);
  ExpandedGraph xg = expand(dg, 4, 1.0, true, true, 1e-9);
  CandidateQuery q;
  q.endpoint = 0;
  for (int k = 0; k < 3; ++k) {
    LayerSpec spec;
    spec.vnf = k;
    spec.demand = 1.0;
    spec.lambda = 1.0;
    spec.weight = 1.0;
    q.layers.push_back(spec);
  }
  q.max_delay_ms = req.max_delay_ms;
  q.min_reliability = req.min_reliability;
  q.lifetime = {0};
  q.max_candidates = 16;
  q.ledger = &ledger;
  auto cands = find_candidates(xg, sc.graph, q);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].hosts == std::vector<int>{0, 0, 0});
  CHECK(cands[0].net_delay_ms == doctest::Approx(1.0));  // access hop only
}

TEST_CASE("quantized candidate placements survive at any integer multiple of gamma") {
  int compared = 0;
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    Scenario sc = random_scenario(seed);
    const ServiceRequest& req = sc.services[0];
    if (req.chains.size() != 1 || req.chains[0].downlink) continue;
    if (!req.delay_bound() && !req.reliability_bound()) continue;
    ResidualLedger ledger(sc.graph);
    int n = static_cast<int>(req.chains[0].vnfs.size());
    DecisionGraph dg = build_decision_graph(sc.graph, ledger, req, n, false, sc.config);
    std::vector<int> uncovered;
    dg = prune_availability(dg, sc.graph, req, &uncovered);
    if (!uncovered.empty()) continue;
    assign_weights(&dg, req.max_delay_ms, req.min_reliability, req.endpoints[0].lifetime);

    FlowInfo flows = chain_flows(req, decompose(req)[0], req.endpoints[0].load_mbps);
    CandidateQuery q;
    q.endpoint = 0;
    for (size_t k = 0; k < flows.layer_vnf.size(); ++k) {
      LayerSpec spec;
      spec.vnf = flows.layer_vnf[k];
      spec.demand = flows.flow_demand[static_cast<size_t>(flows.layer_flow[k])];
      spec.lambda = flows.layer_lambda[k];
      spec.weight = 1.0;
      q.layers.push_back(spec);
    }
    q.max_delay_ms = req.max_delay_ms;
    q.min_reliability = req.min_reliability;
    q.lifetime = req.endpoints[0].lifetime;
    q.max_candidates = 4096;
    q.ledger = &ledger;

    const int gamma = sc.config.gamma;
    auto coarse = find_candidates(
        expand(dg, gamma, 0.0, req.delay_bound(), req.reliability_bound(), 1e-9),
        sc.graph, q);
    auto fine = find_candidates(
        expand(dg, 3 * gamma, 0.0, req.delay_bound(), req.reliability_bound(), 1e-9),
        sc.graph, q);
    std::set<std::pair<std::vector<int>, std::vector<int>>> fine_set;
    for (const auto& c : fine) fine_set.insert({c.hosts, c.edge_ids});
    for (const auto& c : coarse) {
      CHECK(fine_set.count({c.hosts, c.edge_ids}) == 1);
      compared++;
    }
  }
  CHECK(compared > 50);
}

TEST_CASE("candidates always honor the exact targets (quantization over-counts)") {
  int checked = 0;
  for (uint64_t seed = 100; seed < 160; ++seed) {
    Scenario sc = random_scenario(seed);
    const ServiceRequest& req = sc.services[0];
    if (req.chains.size() != 1 || req.chains[0].downlink) continue;
    ResidualLedger ledger(sc.graph);
    int n = static_cast<int>(req.chains[0].vnfs.size());
    DecisionGraph dg = build_decision_graph(sc.graph, ledger, req, n, false, sc.config);
    std::vector<int> uncovered;
    dg = prune_availability(dg, sc.graph, req, &uncovered);
    assign_weights(&dg, req.max_delay_ms, req.min_reliability, req.endpoints[0].lifetime);
    ExpandedGraph xg = expand(dg, sc.config.gamma, 0.0, req.delay_bound(),
                              req.reliability_bound(), 1e-9);
    FlowInfo flows = chain_flows(req, decompose(req)[0], req.endpoints[0].load_mbps);
    CandidateQuery q;
    q.endpoint = 0;
    for (size_t k = 0; k < flows.layer_vnf.size(); ++k) {
      LayerSpec spec;
      spec.vnf = flows.layer_vnf[k];
      spec.demand = flows.flow_demand[static_cast<size_t>(flows.layer_flow[k])];
      spec.lambda = flows.layer_lambda[k];
      spec.weight = 1.0;
      q.layers.push_back(spec);
    }
    q.max_delay_ms = req.max_delay_ms;
    q.min_reliability = req.min_reliability;
    q.lifetime = req.endpoints[0].lifetime;
    q.max_candidates = 256;
    q.ledger = &ledger;
    for (const auto& c : find_candidates(xg, sc.graph, q)) {
      CHECK(c.net_delay_ms <= req.max_delay_ms + 1e-9);
      for (double r : c.rel_by_step)
        CHECK(r >= req.min_reliability * (1.0 - 1e-12));
      // steepness never exceeds the resolution in either dimension
      CHECK(c.steep_delay <= sc.config.gamma);
      CHECK(c.steep_rel <= sc.config.gamma);
      checked++;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("expanded graph size respects the accounting bound") {
  for (const char* name : {"robots.json", "vehicular.json"}) {
    Scenario sc = load_scenario(scenario_path(name));
    const ServiceRequest& req = sc.services[0];
    ResidualLedger ledger(sc.graph);
    int n = static_cast<int>(req.chains[0].vnfs.size());
    DecisionGraph dg = build_decision_graph(sc.graph, ledger, req, n, false, sc.config);
    assign_weights(&dg, req.max_delay_ms, req.min_reliability, req.endpoints[0].lifetime);
    ExpandedGraph xg = expand(dg, sc.config.gamma, 0.0, true, true, 1e-9);
    int compute = 0;
    for (const auto& node : sc.graph.nodes)
      if (node.is_compute()) compute++;
    size_t levels = static_cast<size_t>(sc.config.gamma + 1);
    size_t bound =
        levels * levels *
        (static_cast<size_t>(n) * static_cast<size_t>(compute) + req.endpoints.size());
    CHECK(xg.vertex_count() <= bound);
  }
}

TEST_CASE("candidate enumeration is deterministic") {
  Scenario sc = load_scenario(scenario_path("robots.json"));
  const ServiceRequest& req = sc.services[0];
  ResidualLedger ledger(sc.graph);
  DecisionGraph dg = build_decision_graph(sc.graph, ledger, req, 3, false, sc.config);
  assign_weights(&dg, req.max_delay_ms, req.min_reliability, req.endpoints[0].lifetime);
  ExpandedGraph xg = expand(dg, 10, 1.0, true, true, 1e-9);
  CandidateQuery q;
  q.endpoint = 0;
  for (int k = 0; k < 3; ++k) {
    LayerSpec spec;
    spec.vnf = k;
    spec.demand = 1.0;
    spec.lambda = 1.0;
    spec.weight = 1.0;
    q.layers.push_back(spec);
  }
  q.max_delay_ms = req.max_delay_ms;
  q.min_reliability = req.min_reliability;
  q.lifetime = {0};
  q.max_candidates = 128;
  q.ledger = &ledger;
  auto a = find_candidates(xg, sc.graph, q);
  auto b = find_candidates(xg, sc.graph, q);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].edge_ids == b[i].edge_ids);
    CHECK(a[i].provisional_cost == b[i].provisional_cost);
  }
  // ascending provisional order
  for (size_t i = 1; i < a.size(); ++i)
    CHECK(a[i - 1].provisional_cost <= a[i].provisional_cost + 1e-12);
}
