#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "okpi/log.hpp"
#include "okpi/oracle.hpp"
#include "okpi/planner.hpp"
#include "okpi/results.hpp"
#include "okpi/scenario.hpp"
#include "okpi/scenario_gen.hpp"

namespace {

using namespace okpi;

int write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return 1;
  }
  out << content;
  return 0;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) values.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return values;
}

struct CommonOpts {
  std::string scenario_path;
  std::string out_path;
  int gamma = 0;  // 0: use scenario config
  bool timings = false;
  std::string dump_decision_graph;
  bool dump_expansion = false;
};

Scenario load_with_overrides(const CommonOpts& opts) {
  Scenario sc = load_scenario(opts.scenario_path);
  if (opts.gamma > 0) sc.config.gamma = opts.gamma;
  return sc;
}

void maybe_dump(const Scenario& sc, const CommonOpts& opts) {
  if (!opts.dump_decision_graph.empty()) {
    const ServiceRequest& req = sc.services.at(0);
    ResidualLedger ledger(sc.graph);
    int n = static_cast<int>(req.chains.at(0).vnfs.size());
    DecisionGraph dg = build_decision_graph(sc.graph, ledger, req, n,
                                            req.chains.at(0).downlink, sc.config);
    std::vector<int> uncovered;
    dg = prune_availability(dg, sc.graph, req, &uncovered);
    assign_weights(&dg, req.max_delay_ms, req.min_reliability,
                   req.endpoints.at(0).lifetime);
    ExpandedGraph xg = expand(dg, sc.config.gamma, 0.0, req.delay_bound(),
                              req.reliability_bound(), sc.config.quant_epsilon);
    std::ofstream out(opts.dump_decision_graph);
    out << decision_graph_dot(xg.dg, sc.graph);
    std::cerr << "decision graph written to " << opts.dump_decision_graph << "\n";
    if (opts.dump_expansion) {
      std::cerr << "expanded graph: " << xg.vertex_count() << " vertices (gamma="
                << xg.gamma << ", dims=" << (xg.dim_delay ? 1 : 0) + (xg.dim_rel ? 1 : 0)
                << ")\n";
      CandidateQuery q;
      q.endpoint = 0;
      const EndpointSpec& ep = req.endpoints.at(0);
      FlowInfo flows = chain_flows(req, decompose(req).at(0), ep.load_mbps);
      for (size_t k = 0; k < flows.layer_vnf.size(); ++k) {
        LayerSpec spec;
        spec.vnf = flows.layer_vnf[k];
        spec.demand = flows.flow_demand[static_cast<size_t>(flows.layer_flow[k])];
        spec.lambda = flows.layer_lambda[k];
        spec.weight = spec.lambda > 0 ? 1.0 : 0.0;
        q.layers.push_back(spec);
      }
      q.max_delay_ms = req.max_delay_ms;
      q.min_reliability = req.min_reliability;
      q.lifetime = ep.lifetime;
      q.max_candidates = sc.config.max_candidates;
      q.ledger = &ledger;
      SearchStats stats;
      find_candidates(xg, sc.graph, q, &stats);
      std::cerr << "search pops=" << stats.pops << " reachable states per layer:";
      for (long r : stats.reachable_per_layer) std::cerr << " " << r;
      std::cerr << "\n";
    }
  }
}

int cmd_plan(const CommonOpts& opts) {
  Scenario sc = load_with_overrides(opts);
  maybe_dump(sc, opts);
  ResidualLedger ledger(sc.graph);
  auto t0 = std::chrono::steady_clock::now();
  std::vector<PlanOutcome> outcomes;
  for (const auto& service : sc.services)
    outcomes.push_back(plan(service, sc.graph, &ledger, sc.config));
  auto t1 = std::chrono::steady_clock::now();
  double wall = std::chrono::duration<double, std::milli>(t1 - t0).count();
  ResultRow row = make_row(sc, "-", 0.0, sc.config.gamma, outcomes, wall);
  std::string content = csv_header(opts.timings) + csv_line(row, opts.timings);
  if (write_output(opts.out_path, content) != 0) return 1;
  for (const auto& o : outcomes)
    if (!o.accepted) {
      std::cerr << "rejected: " << o.diagnostics << "\n";
      return 2;
    }
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis, const std::string& values) {
  Scenario sc = load_with_overrides(opts);
  std::vector<double> vals = parse_values(values);
  if (vals.empty()) {
    std::cerr << "no sweep values\n";
    return 1;
  }
  auto points = sweep(sc, axis, vals);
  std::string content = csv_header(opts.timings);
  for (const auto& p : points) {
    int gamma = axis == "gamma" ? static_cast<int>(p.value) : sc.config.gamma;
    content += csv_line(make_row(sc, axis, p.value, gamma, p.outcomes, p.wall_ms),
                        opts.timings);
  }
  return write_output(opts.out_path, content);
}

int cmd_compare(const CommonOpts& opts, const std::string& gamma_list) {
  Scenario sc = load_with_overrides(opts);
  std::vector<double> gammas = parse_values(gamma_list);
  if (gammas.empty()) {
    std::cerr << "no gamma values\n";
    return 1;
  }
  auto points = sweep(sc, "gamma", gammas);
  std::string content = csv_header(opts.timings);
  for (const auto& p : points)
    content += csv_line(
        make_row(sc, "gamma", p.value, static_cast<int>(p.value), p.outcomes, p.wall_ms),
        opts.timings);
  return write_output(opts.out_path, content);
}

int cmd_oracle(const CommonOpts& opts) {
  Scenario sc = load_with_overrides(opts);
  ResidualLedger ledger(sc.graph);
  auto t0 = std::chrono::steady_clock::now();
  std::vector<PlanOutcome> outcomes;
  for (const auto& service : sc.services) {
    OracleResult res = oracle_optimal(service, sc.graph, &ledger, sc.config);
    if (res.refused) {
      std::cerr << "oracle refused: " << res.refusal << "\n";
      return 1;
    }
    outcomes.push_back(res.outcome);
  }
  auto t1 = std::chrono::steady_clock::now();
  double wall = std::chrono::duration<double, std::milli>(t1 - t0).count();
  ResultRow row = make_row(sc, "oracle", 0.0, 0, outcomes, wall);
  std::string content = csv_header(opts.timings) + csv_line(row, opts.timings);
  if (write_output(opts.out_path, content) != 0) return 1;
  for (const auto& o : outcomes)
    if (!o.accepted) return 2;
  return 0;
}

int cmd_validate(const CommonOpts& opts) {
  Scenario sc = load_scenario(opts.scenario_path);
  std::cerr << "scenario '" << sc.name << "': " << sc.graph.nodes.size() << " nodes, "
            << sc.graph.links.size() << " directed links, " << sc.graph.vnfs.size()
            << " vnfs, " << sc.services.size() << " services\n";
  return 0;
}

int cmd_gen(uint64_t seed, const std::string& out_path) {
  Scenario sc = random_scenario(seed);
  std::string summary = "generated scenario '" + sc.name + "' with " +
                        std::to_string(sc.graph.nodes.size()) + " nodes\n";
  std::cerr << summary;
  // emit a plan of the generated scenario so seeds can be triaged quickly
  ResidualLedger ledger(sc.graph);
  std::vector<PlanOutcome> outcomes;
  for (const auto& service : sc.services)
    outcomes.push_back(plan(service, sc.graph, &ledger, sc.config));
  ResultRow row = make_row(sc, "seed", static_cast<double>(seed), sc.config.gamma,
                           outcomes, 0.0);
  return write_output(out_path, csv_header(false) + csv_line(row, false));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"okpi: multi-KPI network slice placement"};
  app.require_subcommand(1);

  CommonOpts opts;
  uint64_t seed = 1;
  std::string axis = "delay", values, gamma_list = "3,10";

  auto add_common = [&](CLI::App* cmd, bool needs_scenario = true) {
    if (needs_scenario)
      cmd->add_option("scenario", opts.scenario_path, "scenario file")->required();
    cmd->add_option("--gamma", opts.gamma, "override resolution (>= 1)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", opts.out_path, "output file (default: stdout)");
    cmd->add_flag("--timings", opts.timings, "include wall-clock columns");
    cmd->add_option("--dump-decision-graph", opts.dump_decision_graph,
                    "write the decision graph (graphviz) to this file");
    cmd->add_flag("--dump-expansion", opts.dump_expansion,
                  "print expanded-graph size and per-layer reachability");
  };

  auto* plan_cmd = app.add_subcommand("plan", "plan all services of a scenario");
  add_common(plan_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one axis, fresh ledger per point");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--axis", axis, "delay | load | reliability | gamma")
      ->check(CLI::IsMember({"delay", "load", "reliability", "gamma"}));
  sweep_cmd->add_option("--values", values, "comma-separated axis values")->required();
  auto* compare_cmd = app.add_subcommand("compare", "compare costs across gamma values");
  add_common(compare_cmd);
  compare_cmd->add_option("--gamma-list", gamma_list, "comma-separated gammas");
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force optimum (small instances)");
  add_common(oracle_cmd);
  auto* validate_cmd = app.add_subcommand("validate", "load and validate a scenario file");
  validate_cmd->add_option("scenario", opts.scenario_path, "scenario file")->required();
  auto* gen_cmd = app.add_subcommand("gen", "generate and plan a random test scenario");
  gen_cmd->add_option("--seed", seed, "random seed");
  gen_cmd->add_option("--out", opts.out_path, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (plan_cmd->parsed()) return cmd_plan(opts);
    if (sweep_cmd->parsed()) return cmd_sweep(opts, axis, values);
    if (compare_cmd->parsed()) return cmd_compare(opts, gamma_list);
    if (oracle_cmd->parsed()) return cmd_oracle(opts);
    if (validate_cmd->parsed()) return cmd_validate(opts);
    if (gen_cmd->parsed()) return cmd_gen(seed, opts.out_path);
  } catch (const okpi::ScenarioError& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
