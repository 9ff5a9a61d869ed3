#include <doctest.h>

#include <cmath>

#include "okpi/decision_graph.hpp"
#include "okpi/scenario.hpp"

using namespace okpi;

namespace {

std::string scenario_path(const char* name) {
  return std::string(OKPI_SCENARIO_DIR) + "/" + name;
}

int node_index(const PhysicalGraph& g, const std::string& id) {
  for (int n = 0; n < g.node_count(); ++n)
    if (g.nodes[static_cast<size_t>(n)].id == id) return n;
  return -1;
}

Scenario one_node_scenario() {
  return parse_scenario(R"({
    "locations": ["s"],
    "vnfs": [{"id": "f1", "cpu_per_mbps": 1}, {"id": "f2", "cpu_per_mbps": 1},
             {"id": "f3", "cpu_per_mbps": 1}],
    "nodes": [{"id": "c", "resources": {"cpu": 50}, "interfaces": ["r"], "coverage": ["s"]}],
    "interfaces": ["r"],
    "links": [{"from": "s", "to": "c", "delay_ms": 1, "capacity_mbps": 10}],
    "services": [{"id": "svc", "chains": [{"vnfs": ["f1", "f2", "f3"]}],
                  "endpoints": [{"location": "s", "load_mbps": 1}]}]
  })", "one-node");
}

}  // namespace

TEST_CASE("a 3-vnf chain over one compute node yields the replica chain") {
  Scenario sc = one_node_scenario();
  ResidualLedger ledger(sc.graph);
  DecisionGraph dg =
      build_decision_graph(sc.graph, ledger, sc.services[0], 3, false, sc.config);
  // vertices: endpoint, c, c', c''
  REQUIRE(dg.vertices.size() == 4);
  int aux = 0, virt = 0;
  for (const auto& e : dg.edges) {
    if (e.aux) {
      aux++;
      CHECK(e.delay_ms == 0.0);
      CHECK(std::isinf(e.capacity_mbps));
      CHECK(e.rel_at(0) == 1.0);
    } else {
      virt++;
      CHECK(dg.vertices[static_cast<size_t>(e.from)].is_endpoint());
    }
  }
  CHECK(aux == 2);   // c -> c' -> c''
  CHECK(virt == 1);  // endpoint -> c
}

TEST_CASE("decision vertex count is endpoints plus compute nodes times chain length") {
  Scenario sc = load_scenario(scenario_path("robots.json"));
  ResidualLedger ledger(sc.graph);
  DecisionGraph dg =
      build_decision_graph(sc.graph, ledger, sc.services[0], 3, false, sc.config);
  int compute = 0;
  for (const auto& n : sc.graph.nodes)
    if (n.is_compute()) compute++;
  CHECK(dg.vertices.size() ==
        sc.services[0].endpoints.size() + static_cast<size_t>(compute) * 3);
}

TEST_CASE("virtual edges fold their physical realization") {
  Scenario sc = load_scenario(scenario_path("robots.json"));
  const PhysicalGraph& g = sc.graph;
  ResidualLedger ledger(g);
  DecisionGraph dg = build_decision_graph(g, ledger, sc.services[0], 3, false, sc.config);

  bool saw_femto_robo2 = false;
  for (const auto& e : dg.edges) {
    if (e.aux) continue;
    // recompute the fold from the stored realization
    double delay = 0.0, cap = kInfinity, rel = 1.0;
    for (int l : e.links) {
      const auto& link = g.links[static_cast<size_t>(l)];
      delay += link.delay_ms;
      cap = std::min(cap, ledger.link_residual(l));
      rel *= link.reliability.at(0);
      if (g.is_node_vertex(link.to))
        rel *= g.nodes[static_cast<size_t>(link.to)].reliability.at(0);
    }
    CHECK(e.delay_ms == doctest::Approx(delay).epsilon(1e-12));
    CHECK(e.capacity_mbps == doctest::Approx(cap).epsilon(1e-12));
    CHECK(e.rel_at(0) == doctest::Approx(rel).epsilon(1e-12));

    const auto& from = dg.vertices[static_cast<size_t>(e.from)];
    const auto& to = dg.vertices[static_cast<size_t>(e.to)];
    if (!from.is_endpoint() && from.node == node_index(g, "robo1") &&
        to.node == node_index(g, "robo2") && e.links.size() == 2 &&
        g.links[static_cast<size_t>(e.links[0])].to == node_index(g, "femto")) {
      saw_femto_robo2 = true;
      CHECK(e.rel_at(0) == doctest::Approx(0.9994 * 0.99999).epsilon(1e-12));
    }
  }
  CHECK(saw_femto_robo2);
}

TEST_CASE("virtual edges with insufficient residual capacity still exist") {
  Scenario sc = one_node_scenario();
  sc.services[0].endpoints[0].load_mbps = 25.0;  // above the 10 Mb/s access link
  ResidualLedger ledger(sc.graph);
  DecisionGraph dg =
      build_decision_graph(sc.graph, ledger, sc.services[0], 1, false, sc.config);
  bool found = false;
  for (const auto& e : dg.edges)
    if (!e.aux) {
      found = true;
      CHECK(e.capacity_mbps == doctest::Approx(10.0));  // recorded, filtered later
    }
  CHECK(found);
}

TEST_CASE("commit and rollback restore the ledger exactly") {
  Scenario sc = one_node_scenario();
  ResidualLedger ledger(sc.graph);
  ResidualLedger before = ledger;

  Deployment dep;
  PlacedInstance inst;
  inst.vnf = 0;
  inst.node = 0;
  inst.cpu_by_endpoint[0] = 3.0;
  dep.instances.push_back(inst);
  RouteHop hop;
  hop.endpoint = 0;
  hop.demand_mbps = 6.0;
  hop.links = {0};
  dep.routes.push_back(hop);

  REQUIRE(ledger.commit(dep, true));
  CHECK(ledger.link_residual(0) == doctest::Approx(4.0));
  CHECK(ledger.node_residual(0, kCpu) == doctest::Approx(47.0));
  CHECK(ledger.has_instance(0, 0));
  ledger.rollback(dep);
  CHECK(ledger.same_state(before));

  SUBCASE("a second service exceeding the shared link is rejected atomically") {
    REQUIRE(ledger.commit(dep, true));  // 6 of 10 used
    ResidualLedger after_first = ledger;
    CHECK_FALSE(ledger.commit(dep, true));  // 6 + 6 > 10
    CHECK(ledger.same_state(after_first));
  }
}

TEST_CASE("the instance registry drives reuse") {
  Scenario sc = one_node_scenario();
  ResidualLedger ledger(sc.graph);
  Deployment dep;
  PlacedInstance inst;
  inst.vnf = 1;
  inst.node = 0;
  inst.cpu_by_endpoint[0] = 1.0;
  dep.instances.push_back(inst);
  CHECK_FALSE(ledger.has_instance(0, 1));
  REQUIRE(ledger.commit(dep, true));
  CHECK(ledger.has_instance(0, 1));
  // isolated services do not register
  ResidualLedger ledger2(sc.graph);
  REQUIRE(ledger2.commit(dep, false));
  CHECK_FALSE(ledger2.has_instance(0, 1));
}

TEST_CASE("availability pruning keeps only covering access nodes") {
  Scenario sc = parse_scenario(R"({
    "locations": ["here", "there"],
    "vnfs": [{"id": "f", "cpu_per_mbps": 1}],
    "interfaces": ["r"],
    "nodes": [
      {"id": "near", "resources": {"cpu": 5}, "interfaces": ["r"], "coverage": ["here"]},
      {"id": "far", "resources": {"cpu": 5}, "interfaces": ["r"], "coverage": ["there"]}
    ],
    "links": [
      {"from": "here", "to": "near", "delay_ms": 1, "capacity_mbps": 5},
      {"from": "here", "to": "far", "delay_ms": 1, "capacity_mbps": 5},
      {"from": "near", "to": "far", "delay_ms": 1, "capacity_mbps": 5}
    ],
    "services": [{"id": "svc", "chains": [{"vnfs": ["f"]}],
                  "endpoints": [{"location": "here", "load_mbps": 1}]}]
  })", "prune");
  ResidualLedger ledger(sc.graph);
  DecisionGraph dg =
      build_decision_graph(sc.graph, ledger, sc.services[0], 1, false, sc.config);
  std::vector<int> uncovered;
  DecisionGraph pruned = prune_availability(dg, sc.graph, sc.services[0], &uncovered);
  CHECK(uncovered.empty());
  for (const auto& e : pruned.edges) {
    if (!dg.vertices[static_cast<size_t>(e.from)].is_endpoint()) continue;
    // every surviving endpoint-adjacent edge enters through the covering node
    CHECK(e.access_node == node_index(sc.graph, "near"));
  }

  SUBCASE("no covering access node means immediate availability infeasibility") {
    Scenario bad = sc;
    bad.graph.nodes[0].coverage.clear();  // "near" no longer covers "here"
    DecisionGraph dg2 =
        build_decision_graph(bad.graph, ledger, bad.services[0], 1, false, bad.config);
    std::vector<int> unc2;
    prune_availability(dg2, bad.graph, bad.services[0], &unc2);
    REQUIRE(unc2.size() == 1);
    CHECK(unc2[0] == 0);
  }
}
