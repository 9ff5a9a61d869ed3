#include <doctest.h>

#include <cmath>

#include "okpi/kpi_check.hpp"
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

int link_index(const PhysicalGraph& g, const std::string& id) {
  for (size_t l = 0; l < g.links.size(); ++l)
    if (g.links[l].id == id) return static_cast<int>(l);
  return -1;
}

// one compute node, one endpoint location, one zero-delay access link
Scenario tiny_scenario() {
  return parse_scenario(R"({
    "name": "tiny",
    "locations": ["site"],
    "vnfs": [{"id": "fn", "cpu_per_mbps": 1.0}],
    "nodes": [{"id": "box", "tier": "mec", "resources": {"cpu": 10.0},
               "resource_costs": {"cpu": 1.0}, "interfaces": [],
               "reliability": 0.99}],
    "links": [{"id": "acc", "from": "site", "to": "box", "delay_ms": 0.0,
               "capacity_mbps": 10.0, "cost_per_gbit": 0.0}],
    "services": [{"id": "svc", "chains": [{"vnfs": ["fn"]}],
                  "endpoints": [{"location": "site", "load_mbps": 1.0}],
                  "max_delay_ms": 20.0}]
  })", "tiny");
}

}  // namespace

TEST_CASE("robots scenario loads with the published reliability ladder") {
  Scenario sc = load_scenario(scenario_path("robots.json"));
  const PhysicalGraph& g = sc.graph;
  CHECK(g.nodes[static_cast<size_t>(node_index(g, "robo1"))].reliability.constant ==
        doctest::Approx(0.999999).epsilon(1e-12));
  CHECK(g.nodes[static_cast<size_t>(node_index(g, "robo2"))].reliability.constant ==
        doctest::Approx(0.99999).epsilon(1e-12));
  CHECK(g.nodes[static_cast<size_t>(node_index(g, "robo3"))].reliability.constant ==
        doctest::Approx(0.9999).epsilon(1e-12));
  CHECK(g.nodes[static_cast<size_t>(node_index(g, "femto"))].reliability.constant ==
        doctest::Approx(0.9994).epsilon(1e-12));
  REQUIRE(sc.services.size() == 1);
  CHECK(sc.services[0].endpoints[0].load_mbps == doctest::Approx(1.0));
  CHECK(sc.services[0].chains[0].vnfs.size() == 3);
}

TEST_CASE("vehicular scenario loads the macro-cell row") {
  Scenario sc = load_scenario(scenario_path("vehicular.json"));
  const PhysicalGraph& g = sc.graph;
  int macro = node_index(g, "macro1");
  REQUIRE(macro >= 0);
  CHECK(g.nodes[static_cast<size_t>(macro)].reliability.constant ==
        doctest::Approx(0.99999999).epsilon(1e-15));
  int access = link_index(g, "x1-macro1");
  REQUIRE(access >= 0);
  CHECK(g.links[static_cast<size_t>(access)].delay_ms == doctest::Approx(6.0));
  CHECK(g.links[static_cast<size_t>(access)].cost_per_gbit == doctest::Approx(1.02));
  // x9 is covered by the macro cell only
  for (const auto& n : g.nodes)
    if (n.id != "macro1") CHECK_FALSE(n.covers(8));
}

TEST_CASE("degenerate and malformed scenario files are rejected with locations") {
  CHECK_THROWS_AS(parse_scenario(R"({"nodes": []})", "x"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"nodes": [{"id": "a"}], "bogus": 1})", "x"),
                  ScenarioError);
  // dangling link endpoint
  CHECK_THROWS_AS(parse_scenario(R"({
    "nodes": [{"id": "a"}],
    "links": [{"from": "a", "to": "zz", "delay_ms": 1, "capacity_mbps": 1}]
  })", "x"), ScenarioError);
  // reliability outside (0, 1]
  CHECK_THROWS_AS(parse_scenario(R"({
    "nodes": [{"id": "a", "reliability": 1.5}]
  })", "x"), ScenarioError);
  // non-positive capacity
  CHECK_THROWS_AS(parse_scenario(R"({
    "nodes": [{"id": "a"}, {"id": "b"}],
    "links": [{"from": "a", "to": "b", "delay_ms": 1, "capacity_mbps": 0}]
  })", "x"), ScenarioError);
  // cyclic service graph
  CHECK_THROWS_AS(parse_scenario(R"({
    "locations": ["s"],
    "vnfs": [{"id": "f", "cpu_per_mbps": 1}, {"id": "g", "cpu_per_mbps": 1}],
    "nodes": [{"id": "a", "resources": {"cpu": 1}}],
    "services": [{"id": "svc",
      "chains": [{"vnfs": ["f", "g"]}, {"vnfs": ["g", "f"]}],
      "endpoints": [{"location": "s", "load_mbps": 1}]}]
  })", "x"), ScenarioError);
  try {
    parse_scenario(R"({"nodes": [{"id": "a", "wat": 3}]})", "f.json");
    FAIL("expected a scenario error");
  } catch (const ScenarioError& e) {
    CHECK(e.location.find("f.json/nodes/0/wat") != std::string::npos);
  }
}

TEST_CASE("processing delay follows the processor-sharing formula") {
  Scenario sc = tiny_scenario();
  const ServiceRequest& req = sc.services[0];
  ResidualLedger ledger(sc.graph);

  Deployment dep;
  PlacedInstance inst;
  inst.chain = 0;
  inst.position = 0;
  inst.vnf = 0;
  inst.node = 0;
  inst.cpu_by_endpoint[0] = 1.1;  // margin a - r*lambda = 0.1 per ms
  dep.instances.push_back(inst);
  RouteHop hop;
  hop.endpoint = 0;
  hop.chain = 0;
  hop.hop = 0;
  hop.demand_mbps = 1.0;
  hop.links = {0};
  hop.instance = 0;
  dep.routes.push_back(hop);

  KpiReport report = evaluate_deployment(dep, req, sc.graph, ledger);
  CHECK(report.endpoints[0].net_delay_ms == doctest::Approx(0.0));
  CHECK(report.endpoints[0].proc_delay_ms == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(report.endpoints[0].delay_ok);

  SUBCASE("an unstable queue reports infinite delay instead of throwing") {
    dep.instances[0].cpu_by_endpoint[0] = 0.9;  // below r*lambda
    KpiReport bad = evaluate_deployment(dep, req, sc.graph, ledger);
    CHECK(std::isinf(bad.endpoints[0].proc_delay_ms));
    CHECK_FALSE(bad.endpoints[0].delay_ok);
  }

  SUBCASE("more cpu strictly decreases the reported delay") {
    double last = kInfinity;
    for (double a = 1.05; a < 3.0; a += 0.15) {
      dep.instances[0].cpu_by_endpoint[0] = a;
      KpiReport r = evaluate_deployment(dep, req, sc.graph, ledger);
      CHECK(r.endpoints[0].proc_delay_ms < last);
      last = r.endpoints[0].proc_delay_ms;
    }
  }

  SUBCASE("evaluation is pure") {
    KpiReport a = evaluate_deployment(dep, req, sc.graph, ledger);
    KpiReport b = evaluate_deployment(dep, req, sc.graph, ledger);
    CHECK(a.endpoints[0].proc_delay_ms == b.endpoints[0].proc_delay_ms);
    CHECK(a.endpoints[0].min_reliability == b.endpoints[0].min_reliability);
    CHECK(a.ok() == b.ok());
  }
}

TEST_CASE("reliability products match the log-domain route") {
  // 0.99999 * 0.9994, computed directly
  const double direct = 0.99999 * 0.9994;
  CHECK(direct == doctest::Approx(0.999390006).epsilon(1e-12));
  const double via_logs = std::exp(std::log(0.99999) + std::log(0.9994));
  CHECK(std::abs(direct - via_logs) / direct < 1e-12);
}

TEST_CASE("a chain through two robots and the pico cell multiplies what it touches") {
  Scenario sc = load_scenario(scenario_path("robots.json"));
  const PhysicalGraph& g = sc.graph;
  ServiceRequest req = sc.services[0];
  req.max_delay_ms = kInfinity;  // only reliability matters here
  ResidualLedger ledger(g);

  // robo-master on robo1, robo-slave on robo2 via the pico cell, mct on robo2
  Deployment dep;
  auto add_instance = [&](int vnf, const char* node, double a) {
    PlacedInstance inst;
    inst.chain = 0;
    inst.position = vnf;
    inst.vnf = vnf;
    inst.node = node_index(g, node);
    inst.cpu_by_endpoint[0] = a;
    dep.instances.push_back(inst);
    return static_cast<int>(dep.instances.size() - 1);
  };
  int master = add_instance(0, "robo1", 1.5);
  int slave = add_instance(1, "robo2", 1.02);
  // mct co-located with the slave: the third hop has no links
  dep.instances[static_cast<size_t>(slave)].cpu_by_endpoint[0] = 1.02;
  int mct = add_instance(2, "robo2", 1.02);

  auto add_hop = [&](int hopidx, std::vector<std::string> link_ids, int instance) {
    RouteHop hop;
    hop.endpoint = 0;
    hop.chain = 0;
    hop.hop = hopidx;
    hop.demand_mbps = 1.0;
    for (const auto& id : link_ids) hop.links.push_back(link_index(g, id));
    hop.instance = instance;
    dep.routes.push_back(hop);
  };
  add_hop(0, {"hall-robo1"}, master);
  add_hop(1, {"robo1-pico", "pico-robo2"}, slave);
  (void)mct;
  add_hop(2, {}, mct);

  // pico-robo2 is the reverse direction of the declared robo2-pico link
  REQUIRE(link_index(g, "pico-robo2") == -1);
  dep.routes[1].links[1] = link_index(g, "robo2-pico~rev");
  REQUIRE(dep.routes[1].links[1] >= 0);

  KpiReport report = evaluate_deployment(dep, req, g, ledger);
  const double expected = 0.999999 * 0.99999 * 0.99999;  // robo1, pico, robo2
  CHECK(report.endpoints[0].min_reliability == doctest::Approx(expected).epsilon(1e-12));
  CHECK(report.endpoints[0].reliability_ok);  // 0.99997900... >= 0.999
  CHECK(report.endpoints[0].availability_ok);
}

TEST_CASE("step reliability profiles are evaluated at every lifetime step") {
  Scenario sc = parse_scenario(R"({
    "time_steps": ["t0", "t1"],
    "locations": ["s"],
    "vnfs": [{"id": "f", "cpu_per_mbps": 1}],
    "nodes": [{"id": "a", "resources": {"cpu": 5}, "interfaces": ["r"], "coverage": ["s"],
               "reliability": {"steps": {"t0": 0.999, "t1": 0.9}}}],
    "interfaces": ["r"],
    "links": [{"from": "s", "to": "a", "delay_ms": 1, "capacity_mbps": 5}],
    "services": [{"id": "svc", "chains": [{"vnfs": ["f"]}],
                  "endpoints": [{"location": "s", "load_mbps": 1, "lifetime": ["t0", "t1"]}],
                  "min_reliability": 0.99}]
  })", "steps");
  ResidualLedger ledger(sc.graph);
  Deployment dep;
  PlacedInstance inst;
  inst.vnf = 0;
  inst.node = 0;
  inst.chain = 0;
  inst.position = 0;
  inst.cpu_by_endpoint[0] = 2.0;
  dep.instances.push_back(inst);
  RouteHop hop;
  hop.endpoint = 0;
  hop.chain = 0;
  hop.hop = 0;
  hop.demand_mbps = 1.0;
  hop.links = {0};
  hop.instance = 0;
  dep.routes.push_back(hop);
  KpiReport report = evaluate_deployment(dep, sc.services[0], sc.graph, ledger);
  CHECK(report.endpoints[0].min_reliability == doctest::Approx(0.9));  // worst step
  CHECK_FALSE(report.endpoints[0].reliability_ok);
}
