#include <doctest.h>

#include <cmath>

#include "okpi/oracle.hpp"
#include "okpi/planner.hpp"
#include "okpi/scenario.hpp"
#include "okpi/scenario_gen.hpp"

using namespace okpi;

namespace {

std::string scenario_path(const char* name) {
  return std::string(OKPI_SCENARIO_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("one node, one vnf: the only deployment is the optimum") {
  Scenario sc = parse_scenario(R"({
    "locations": ["s"],
    "interfaces": ["r"],
    "vnfs": [{"id": "f", "cpu_per_mbps": 1}],
    "nodes": [{"id": "c", "resources": {"cpu": 10}, "resource_costs": {"cpu": 2.0},
               "interfaces": ["r"], "coverage": ["s"], "vnf_cost_default": 1.0}],
    "links": [{"from": "s", "to": "c", "delay_ms": 1, "capacity_mbps": 10,
               "cost_per_gbit": 1.0}],
    "services": [{"id": "svc", "chains": [{"vnfs": ["f"]}],
                  "endpoints": [{"location": "s", "load_mbps": 2}], "max_delay_ms": 10}]
  })", "solo");
  ResidualLedger ledger(sc.graph);
  OracleResult res = oracle_optimal(sc.services[0], sc.graph, &ledger, sc.config);
  REQUIRE_FALSE(res.refused);
  REQUIRE(res.outcome.accepted);
  CHECK(res.outcome.report.ok());
  // instantiation 1.0; cpu a = b + 1/T' where T = 10 - 1 = 9 -> a = 2 + 1/9
  const double expected_cpu = (2.0 + 1.0 / 9.0) * 2.0;
  CHECK(res.outcome.deployment.cost.instantiation == doctest::Approx(1.0));
  CHECK(res.outcome.deployment.cost.resource == doctest::Approx(expected_cpu).epsilon(1e-9));
  CHECK(res.outcome.deployment.cost.transport == doctest::Approx(2.0));  // 2 Mb/s * 1 USD/Gbit
}

TEST_CASE("the oracle refuses oversized instances explicitly") {
  Scenario sc = load_scenario(scenario_path("vehicular.json"));
  ResidualLedger ledger(sc.graph);
  OracleResult res = oracle_optimal(sc.services[0], sc.graph, &ledger, sc.config);
  CHECK(res.refused);
  CHECK(res.refusal.find("max_nodes") != std::string::npos);

  Scenario robots = load_scenario(scenario_path("robots.json"));
  PlannerConfig strangled = robots.config;
  strangled.oracle.max_strings = 2;
  ResidualLedger l2(robots.graph);
  OracleResult res2 = oracle_optimal(robots.services[0], robots.graph, &l2, strangled);
  CHECK(res2.refused);  // never silent truncation
}

TEST_CASE("banning the selected optimum never finds anything cheaper") {
  Scenario sc = load_scenario(scenario_path("robots.json"));
  ResidualLedger ledger(sc.graph);
  OracleResult first = oracle_optimal(sc.services[0], sc.graph, &ledger, sc.config);
  REQUIRE(first.outcome.accepted);
  ResidualLedger l2(sc.graph);
  OracleResult second =
      oracle_optimal(sc.services[0], sc.graph, &l2, sc.config, {first.selected});
  REQUIRE(second.outcome.accepted);
  CHECK_FALSE(second.selected == first.selected);
  CHECK(second.outcome.deployment.cost.total() >=
        first.outcome.deployment.cost.total() - 1e-9);
}

TEST_CASE("the oracle never loses to the planner on small instances") {
  int both_accepted = 0, equal_at_high_gamma = 0, oracle_ran = 0;
  for (uint64_t seed = 300; seed < 420; ++seed) {
    Scenario sc = random_scenario(seed);
    const ServiceRequest& req = sc.services[0];
    if (req.endpoints.size() != 1 || req.chains.size() != 1) continue;
    if (req.chains[0].vnfs.size() > 2 || sc.graph.node_count() > 5) continue;
    // identical route universes: the planner enumerates every simple path
    PlannerConfig cfg = sc.config;
    cfg.k_paths = 128;
    cfg.max_candidates = 8192;
    cfg.oracle.hop_bound = 8;
    cfg.oracle.max_strings = 200000;

    ResidualLedger lo(sc.graph);
    OracleResult best = oracle_optimal(req, sc.graph, &lo, cfg);
    if (best.refused) continue;
    oracle_ran++;
    if (!best.outcome.accepted) continue;
    CHECK(best.outcome.report.ok());

    ResidualLedger lp(sc.graph);
    PlanOutcome planned = plan(req, sc.graph, &lp, cfg);
    if (planned.accepted) {
      both_accepted++;
      CHECK(planned.deployment.cost.total() >=
            best.outcome.deployment.cost.total() - 1e-9);
      PlannerConfig fine = cfg;
      fine.gamma = 240;
      ResidualLedger lf(sc.graph);
      PlanOutcome refined = plan(req, sc.graph, &lf, fine);
      REQUIRE(refined.accepted);
      CHECK(refined.deployment.cost.total() >=
            best.outcome.deployment.cost.total() - 1e-9);
      if (refined.deployment.cost.total() <=
          best.outcome.deployment.cost.total() * (1.0 + 1e-9))
        equal_at_high_gamma++;
    }
  }
  MESSAGE("oracle_ran=", oracle_ran, " both=", both_accepted,
          " equal_at_high_gamma=", equal_at_high_gamma);
  CHECK(oracle_ran >= 20);
  CHECK(both_accepted >= 10);
  // with matching route universes, a fine enough resolution recovers the
  // optimum on most instances (quantization can still exclude a few)
  CHECK(equal_at_high_gamma * 10 >= both_accepted * 7);
}

TEST_CASE("oracle deployments pass the shared checker") {
  for (uint64_t seed = 500; seed < 540; ++seed) {
    Scenario sc = random_scenario(seed);
    const ServiceRequest& req = sc.services[0];
    if (req.endpoints.size() != 1) continue;
    if (req.chains.size() != 1 || req.chains[0].vnfs.size() > 2) continue;
    if (sc.graph.node_count() > 5) continue;
    ResidualLedger ledger(sc.graph);
    OracleResult res = oracle_optimal(req, sc.graph, &ledger, sc.config);
    if (res.refused || !res.outcome.accepted) continue;
    CHECK(res.outcome.report.ok());
  }
}
