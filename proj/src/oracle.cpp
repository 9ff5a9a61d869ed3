#include "okpi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "okpi/cpu_assign.hpp"
#include "okpi/graph_paths.hpp"
#include "okpi/kpi_check.hpp"
#include "okpi/log.hpp"

namespace okpi {
namespace {

struct FlowPlan {
  int chain = -1;
  int flow = -1;  // traffic-order index
  double demand = 0.0;
  std::vector<PhysicalPath> strings;  // candidate routes, sorted by transport cost
  double min_transport = 0.0;
  double min_delay = 0.0;
};

struct Enumeration {
  const ServiceRequest& req;
  const PhysicalGraph& g;
  const PlannerConfig& cfg;
  const ResidualLedger& ledger;
  std::vector<PlannedChain> chains;
  std::vector<FlowInfo> flows;
  std::vector<int> vnf_list;                    // distinct vnfs, first-use order
  std::vector<std::vector<int>> vnf_hosts;      // admissible nodes per vnf
  const std::vector<DeploymentSignature>* banned;

  double best_cost = kInfinity;
  Deployment best_dep;
  DeploymentSignature best_sig;
  bool best_found = false;
  bool any_combo = false;
  int reject_delay = 0, reject_capacity = 0, reject_additive = 0;
};

double string_transport_cost(const PhysicalGraph& g, const PlannerConfig& cfg,
                             const PhysicalPath& p, double demand) {
  double c = 0.0;
  for (int l : p.links)
    c += cfg.traffic_cost(g.links[static_cast<size_t>(l)].cost_per_gbit, demand);
  return c;
}

double string_log_rel_at(const PhysicalGraph& g, const PhysicalPath& p, int t) {
  double log_rel = 0.0;
  for (int l : p.links) {
    const auto& link = g.links[static_cast<size_t>(l)];
    log_rel += std::log(link.reliability.at(t));
    if (g.is_node_vertex(link.to))
      log_rel += std::log(g.nodes[static_cast<size_t>(link.to)].reliability.at(t));
  }
  return log_rel;
}

// Builds the deployment for one complete choice and evaluates it exactly.
void evaluate_leaf(Enumeration& en, const std::vector<int>& host_of_vnf,
                   const std::vector<std::vector<int>>& string_choice) {
  en.any_combo = true;
  const EndpointSpec& ep = en.req.endpoints[0];

  auto host = [&](int vnf) {
    for (size_t i = 0; i < en.vnf_list.size(); ++i)
      if (en.vnf_list[i] == vnf) return host_of_vnf[i];
    return -1;
  };

  Deployment dep;
  auto instance_of = [&](int chain, int pos, int vnf) {
    int node = host(vnf);
    for (size_t i = 0; i < dep.instances.size(); ++i)
      if (dep.instances[i].vnf == vnf && dep.instances[i].node == node)
        return static_cast<int>(i);
    PlacedInstance inst;
    inst.chain = chain;
    inst.position = pos;
    inst.vnf = vnf;
    inst.node = node;
    inst.reused = !en.req.isolated && en.ledger.has_instance(node, vnf);
    dep.instances.push_back(inst);
    return static_cast<int>(dep.instances.size() - 1);
  };

  DeploymentSignature sig;
  sig.hosts.resize(en.chains.size());
  sig.routes.resize(en.chains.size());
  for (size_t c = 0; c < en.chains.size(); ++c) {
    const auto& ch = en.chains[c];
    for (size_t pos = 0; pos < ch.vnfs.size(); ++pos)
      sig.hosts[c].push_back(host(ch.vnfs[pos]));
    sig.routes[c].resize(ch.vnfs.size());
  }

  // route hops
  int global_flow = 0;
  for (size_t c = 0; c < en.chains.size(); ++c) {
    const auto& ch = en.chains[c];
    const auto& fi = en.flows[c];
    for (int f = 0; f < fi.flow_count(); ++f, ++global_flow) {
      RouteHop hop;
      hop.endpoint = 0;
      hop.chain = static_cast<int>(c);
      hop.hop = f;
      hop.fraction = 1.0;
      hop.demand_mbps = fi.flow_demand[static_cast<size_t>(f)];
      hop.links = string_choice[static_cast<size_t>(global_flow)];
      sig.routes[c][static_cast<size_t>(f)] = hop.links;
      int proc_pos;
      if (!ch.downlink)
        proc_pos = f;
      else
        proc_pos = f + 1 < static_cast<int>(ch.vnfs.size()) ? f + 1 : -1;
      if (proc_pos >= 0)
        hop.instance = instance_of(static_cast<int>(c), proc_pos,
                                   ch.vnfs[static_cast<size_t>(proc_pos)]);
      dep.routes.push_back(std::move(hop));
    }
  }
  // anchor-only instances (e.g. downlink sources never processing here)
  for (size_t c = 0; c < en.chains.size(); ++c)
    for (size_t pos = 0; pos < en.chains[c].vnfs.size(); ++pos)
      instance_of(static_cast<int>(c), static_cast<int>(pos),
                  en.chains[c].vnfs[pos]);

  if (en.banned != nullptr)
    for (const auto& b : *en.banned)
      if (sig == b) return;

  // non-CPU sizing + CPU assignment
  std::map<int, double> lambda, weight;
  for (const auto& hop : dep.routes)
    if (hop.instance >= 0) {
      lambda[hop.instance] += hop.demand_mbps;
      weight[hop.instance] += hop.fraction;
    }
  for (size_t i = 0; i < dep.instances.size(); ++i) {
    auto& inst = dep.instances[i];
    const auto& vnf = en.g.vnfs[static_cast<size_t>(inst.vnf)];
    double lam = lambda.count(static_cast<int>(i)) ? lambda[static_cast<int>(i)] : 0.0;
    for (int k = 1; k < en.g.kind_count(); ++k) {
      double need = vnf.per_unit[static_cast<size_t>(k)] * lam;
      if (need > 0.0) inst.other_by_endpoint[{0, k}] = need;
    }
  }
  double d_net = 0.0;
  for (const auto& hop : dep.routes)
    for (int l : hop.links)
      d_net += hop.fraction * en.g.links[static_cast<size_t>(l)].delay_ms;

  CpuProblem problem;
  std::map<int, int> group_of_node;
  std::vector<int> problem_instance;
  for (size_t i = 0; i < dep.instances.size(); ++i) {
    if (!weight.count(static_cast<int>(i)) || weight[static_cast<int>(i)] <= 0.0) continue;
    const auto& inst = dep.instances[i];
    const auto& vnf = en.g.vnfs[static_cast<size_t>(inst.vnf)];
    CpuInstance ci;
    ci.unit_cost =
        std::max(en.g.nodes[static_cast<size_t>(inst.node)].resource_cost[kCpu], 1e-9);
    ci.base_load = vnf.per_unit[kCpu] * lambda[static_cast<int>(i)];
    ci.weight = weight[static_cast<int>(i)];
    auto git = group_of_node.find(inst.node);
    if (git == group_of_node.end()) {
      git = group_of_node.emplace(inst.node, static_cast<int>(problem.group_cap.size())).first;
      problem.group_cap.push_back(en.ledger.node_residual(inst.node, kCpu));
    }
    ci.group = git->second;
    problem.instances.push_back(ci);
    problem_instance.push_back(static_cast<int>(i));
  }
  problem.budget_ms = en.req.delay_bound() ? en.req.max_delay_ms - d_net : kInfinity;
  CpuSolution cpu = solve_cpu(problem);
  if (!cpu.feasible) {
    if (cpu.reason == CpuInfeasibility::kDelay)
      en.reject_delay++;
    else
      en.reject_capacity++;
    return;
  }
  for (size_t pi = 0; pi < problem.instances.size(); ++pi)
    dep.instances[static_cast<size_t>(problem_instance[pi])].cpu_by_endpoint[0] =
        cpu.assigned[pi];

  ServiceRequest sub = en.req;
  sub.endpoints = {ep};
  KpiReport report = evaluate_deployment(dep, sub, en.g, en.ledger);
  if (!report.ok()) {
    if (!report.capacity_ok)
      en.reject_capacity++;
    else if (!report.endpoints[0].delay_ok)
      en.reject_delay++;
    else
      en.reject_additive++;
    return;
  }
  dep.cost = cost_deployment(dep, en.g, en.cfg);
  if (dep.cost.total() < en.best_cost - 1e-12) {
    en.best_cost = dep.cost.total();
    en.best_dep = dep;
    en.best_sig = sig;
    en.best_found = true;
  }
}

// Depth-first choice of one string per flow with cost and feasibility
// pruning (strings are sorted by transport cost; remaining flows contribute
// at least their minima and at most reliability 1).
void choose_strings(Enumeration& en, const std::vector<FlowPlan>& plans, size_t idx,
                    const std::vector<int>& host_of_vnf,
                    std::vector<std::vector<int>>& choice, std::map<int, double>& link_draw,
                    std::vector<double>& acc_log_rel, double acc_transport,
                    double acc_delay, double fixed_cost, double remaining_min_transport,
                    double remaining_min_delay) {
  if (idx == plans.size()) {
    evaluate_leaf(en, host_of_vnf, choice);
    return;
  }
  const FlowPlan& plan = plans[idx];
  const double rest_transport = remaining_min_transport - plan.min_transport;
  const double rest_delay = remaining_min_delay - plan.min_delay;
  const auto& lifetime = en.req.endpoints[0].lifetime;
  const double log_target =
      en.req.reliability_bound() ? std::log(en.req.min_reliability) : -kInfinity;

  for (const auto& s : plan.strings) {
    double transport = string_transport_cost(en.g, en.cfg, s, plan.demand);
    if (fixed_cost + acc_transport + transport + rest_transport >= en.best_cost) break;
    if (en.req.delay_bound() &&
        acc_delay + s.delay_ms + rest_delay > en.req.max_delay_ms + 1e-9)
      continue;
    std::vector<double> log_next(lifetime.size(), 0.0);
    bool rel_ok = true;
    for (size_t t = 0; t < lifetime.size(); ++t) {
      log_next[t] = acc_log_rel[t] + string_log_rel_at(en.g, s, lifetime[t]);
      if (log_next[t] < log_target - 1e-9) rel_ok = false;
    }
    if (en.req.reliability_bound() && !rel_ok) continue;
    bool fits = true;
    for (int l : s.links) {
      link_draw[l] += plan.demand;
      if (link_draw[l] > en.ledger.link_residual(l) + 1e-9) fits = false;
    }
    if (fits) {
      choice[idx] = s.links;
      choose_strings(en, plans, idx + 1, host_of_vnf, choice, link_draw, log_next,
                     acc_transport + transport, acc_delay + s.delay_ms, fixed_cost,
                     rest_transport, rest_delay);
      choice[idx].clear();
    }
    for (int l : s.links) link_draw[l] -= plan.demand;
  }
}

}  // namespace

OracleResult oracle_optimal(const ServiceRequest& req, const PhysicalGraph& g,
                            ResidualLedger* ledger, const PlannerConfig& cfg,
                            const std::vector<DeploymentSignature>& banned) {
  OracleResult result;
  result.outcome.gamma = 0;
  const OracleLimits& lim = cfg.oracle;
  if (g.node_count() > lim.max_nodes) {
    result.refused = true;
    result.refusal = "instance exceeds oracle limits: " + std::to_string(g.node_count()) +
                     " nodes > max_nodes=" + std::to_string(lim.max_nodes);
    return result;
  }
  for (const auto& ch : req.chains)
    if (static_cast<int>(ch.vnfs.size()) > lim.max_chain_len) {
      result.refused = true;
      result.refusal = "instance exceeds oracle limits: chain length " +
                       std::to_string(ch.vnfs.size()) +
                       " > max_chain_len=" + std::to_string(lim.max_chain_len);
      return result;
    }
  if (req.endpoints.size() != 1) {
    result.refused = true;
    result.refusal = "oracle handles single-endpoint requests only (got " +
                     std::to_string(req.endpoints.size()) + ")";
    return result;
  }

  Enumeration en{req, g, cfg, *ledger, decompose(req), {}, {}, {}, &banned};
  for (const auto& ch : en.chains) {
    en.flows.push_back(chain_flows(req, ch, req.endpoints[0].load_mbps));
    for (int v : ch.vnfs) {
      bool seen = false;
      for (int u : en.vnf_list)
        if (u == v) seen = true;
      if (!seen) en.vnf_list.push_back(v);
    }
  }

  // admissible hosts per vnf (interfaces; compute-capable)
  for (int v : en.vnf_list) {
    std::vector<int> hosts;
    const Vnf& vnf = g.vnfs[static_cast<size_t>(v)];
    for (int n = 0; n < g.node_count(); ++n) {
      const PhysicalNode& node = g.nodes[static_cast<size_t>(n)];
      if (!node.is_compute()) continue;
      bool ok = true;
      for (int itf : vnf.required_interfaces)
        if (!node.has_interface(itf)) ok = false;
      if (ok) hosts.push_back(n);
    }
    if (hosts.empty()) {
      result.outcome.reason = RejectReason::kCapacity;
      result.outcome.diagnostics = "no admissible host for vnf " + vnf.id;
      return result;
    }
    en.vnf_hosts.push_back(hosts);
  }

  long combos = 1;
  for (const auto& hosts : en.vnf_hosts) {
    combos *= static_cast<long>(hosts.size());
    if (combos > 1000000) {
      result.refused = true;
      result.refusal = "instance exceeds oracle limits: more than 1e6 placements";
      return result;
    }
  }

  const int loc_vertex = g.location_vertex(req.endpoints[0].location);
  std::vector<int> host_of_vnf(en.vnf_list.size(), 0);
  std::vector<size_t> cursor(en.vnf_list.size(), 0);

  // iterate the cartesian product of assignments
  bool done = false;
  while (!done) {
    for (size_t i = 0; i < en.vnf_list.size(); ++i)
      host_of_vnf[i] = en.vnf_hosts[i][cursor[i]];

    // build flow plans with string enumeration for this assignment
    auto host = [&](int vnf) {
      for (size_t i = 0; i < en.vnf_list.size(); ++i)
        if (en.vnf_list[i] == vnf) return host_of_vnf[i];
      return -1;
    };
    std::vector<FlowPlan> plans;
    bool assignment_ok = true;
    for (size_t c = 0; c < en.chains.size() && assignment_ok; ++c) {
      const auto& ch = en.chains[c];
      const auto& fi = en.flows[c];
      const int n = static_cast<int>(ch.vnfs.size());
      for (int f = 0; f < fi.flow_count(); ++f) {
        FlowPlan plan;
        plan.chain = static_cast<int>(c);
        plan.flow = f;
        plan.demand = fi.flow_demand[static_cast<size_t>(f)];
        int src_vertex, dst_vertex;
        if (!ch.downlink) {
          src_vertex = f == 0 ? loc_vertex : host(ch.vnfs[static_cast<size_t>(f - 1)]);
          dst_vertex = host(ch.vnfs[static_cast<size_t>(f)]);
        } else {
          src_vertex = host(ch.vnfs[static_cast<size_t>(f)]);
          dst_vertex = f + 1 < n ? host(ch.vnfs[static_cast<size_t>(f + 1)]) : loc_vertex;
        }
        if (src_vertex == dst_vertex) {
          plan.strings.push_back(PhysicalPath{});  // co-located: empty string
        } else {
          std::vector<PhysicalPath> paths;
          if (!all_simple_paths(g, src_vertex, dst_vertex, lim.hop_bound, lim.max_strings,
                                false, &paths)) {
            result.refused = true;
            result.refusal = "instance exceeds oracle limits: more than " +
                             std::to_string(lim.max_strings) + " strings for one flow";
            return result;
          }
          plan.strings = std::move(paths);
        }
        if (plan.strings.empty()) {
          assignment_ok = false;
          break;
        }
        std::sort(plan.strings.begin(), plan.strings.end(),
                  [&](const PhysicalPath& a, const PhysicalPath& b) {
                    double ca = string_transport_cost(g, cfg, a, plan.demand);
                    double cb = string_transport_cost(g, cfg, b, plan.demand);
                    if (ca != cb) return ca < cb;
                    if (a.delay_ms != b.delay_ms) return a.delay_ms < b.delay_ms;
                    return a.links < b.links;
                  });
        plan.min_transport = string_transport_cost(g, cfg, plan.strings[0], plan.demand);
        plan.min_delay = kInfinity;
        for (const auto& s : plan.strings)
          plan.min_delay = std::min(plan.min_delay, s.delay_ms);
        plans.push_back(std::move(plan));
      }
    }

    if (assignment_ok) {
      // fixed cost of this assignment: instantiation + base CPU + other kinds
      std::set<std::pair<int, int>> distinct;
      double fixed = 0.0;
      for (size_t c = 0; c < en.chains.size(); ++c)
        for (int v : en.chains[c].vnfs) distinct.insert({host(v), v});
      for (const auto& [node, vnf] : distinct)
        if (req.isolated || !ledger->has_instance(node, vnf))
          fixed += g.nodes[static_cast<size_t>(node)].instantiation_cost(vnf);

      double remaining_transport = 0.0, remaining_delay = 0.0;
      for (const auto& plan : plans) {
        remaining_transport += plan.min_transport;
        remaining_delay += plan.min_delay;
      }
      if (fixed + remaining_transport < en.best_cost) {
        std::vector<std::vector<int>> choice(plans.size());
        std::map<int, double> link_draw;
        std::vector<double> acc_log_rel(req.endpoints[0].lifetime.size(), 0.0);
        choose_strings(en, plans, 0, host_of_vnf, choice, link_draw, acc_log_rel, 0.0,
                       0.0, fixed, remaining_transport, remaining_delay);
      }
    }

    // advance cartesian cursor
    size_t i = 0;
    while (i < cursor.size()) {
      if (++cursor[i] < en.vnf_hosts[i].size()) break;
      cursor[i] = 0;
      ++i;
    }
    if (i == cursor.size()) done = true;
  }

  if (!en.best_found) {
    if (en.reject_capacity >= en.reject_delay && en.reject_capacity >= en.reject_additive &&
        en.reject_capacity > 0)
      result.outcome.reason = RejectReason::kCapacity;
    else if (en.reject_delay >= en.reject_additive && en.reject_delay > 0)
      result.outcome.reason = RejectReason::kDelay;
    else
      result.outcome.reason = RejectReason::kAdditiveKpi;
    result.outcome.diagnostics = "exhaustive search found no feasible deployment";
    return result;
  }
  en.best_dep.cost = cost_deployment(en.best_dep, g, cfg);
  result.outcome.accepted = true;
  result.outcome.deployment = en.best_dep;
  result.outcome.report = evaluate_deployment(en.best_dep, req, g, *ledger);
  result.selected = en.best_sig;
  ledger->commit(en.best_dep, !req.isolated);
  return result;
}

}  // namespace okpi
