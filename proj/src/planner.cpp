#include "okpi/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "okpi/cpu_assign.hpp"
#include "okpi/log.hpp"

namespace okpi {

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::kNone: return "none";
    case RejectReason::kAvailability: return "availability";
    case RejectReason::kAdditiveKpi: return "additive-kpi";
    case RejectReason::kDelay: return "delay";
    case RejectReason::kCapacity: return "capacity";
  }
  return "unknown";
}

std::vector<PlannedChain> decompose(const ServiceRequest& req) {
  std::vector<PlannedChain> out;
  for (size_t c = 0; c < req.chains.size(); ++c) {
    PlannedChain pc;
    pc.chain = static_cast<int>(c);
    pc.downlink = req.chains[c].downlink;
    pc.vnfs = req.chains[c].vnfs;
    pc.instance_count = req.chains[c].instance_count;
    if (pc.instance_count.size() != pc.vnfs.size())
      pc.instance_count.assign(pc.vnfs.size(), 1);
    out.push_back(std::move(pc));
  }
  return out;
}

FlowInfo chain_flows(const ServiceRequest& req, const PlannedChain& ch, double load) {
  FlowInfo f;
  const int n = static_cast<int>(ch.vnfs.size());
  const double initial = load * req.chains[static_cast<size_t>(ch.chain)].load_factor;
  f.flow_demand.assign(static_cast<size_t>(n), 0.0);
  if (!ch.downlink) {
    // flow j: (prev -> v_j), processed at v_j
    double cur = initial;
    for (int j = 0; j < n; ++j) {
      f.flow_demand[static_cast<size_t>(j)] = cur;
      if (j + 1 < n) {
        int prev = j == 0 ? -1 : ch.vnfs[static_cast<size_t>(j - 1)];
        cur *= req.chi_value(prev, ch.vnfs[static_cast<size_t>(j)],
                             ch.vnfs[static_cast<size_t>(j + 1)]);
      }
    }
    for (int k = 0; k < n; ++k) {
      f.layer_vnf.push_back(ch.vnfs[static_cast<size_t>(k)]);
      f.layer_pos.push_back(k);
      f.layer_flow.push_back(k);
      f.layer_lambda.push_back(f.flow_demand[static_cast<size_t>(k)]);
    }
  } else {
    // flow j: (v_j -> v_{j+1} | endpoint), processed at v_{j+1}
    double cur = initial;
    for (int j = 0; j < n; ++j) {
      if (j >= 1) {
        int prev = j == 1 ? -1 : ch.vnfs[static_cast<size_t>(j - 2)];
        int next = j < n - 1 ? ch.vnfs[static_cast<size_t>(j)] : -1;
        cur *= req.chi_value(prev, ch.vnfs[static_cast<size_t>(j - 1)], next);
      }
      f.flow_demand[static_cast<size_t>(j)] = cur;
    }
    // search layers run from the endpoint inwards: layer k places v_{n-1-k}
    for (int k = 0; k < n; ++k) {
      int pos = n - 1 - k;
      f.layer_vnf.push_back(ch.vnfs[static_cast<size_t>(pos)]);
      f.layer_pos.push_back(pos);
      f.layer_flow.push_back(n - 1 - k);
      f.layer_lambda.push_back(pos >= 1 ? f.flow_demand[static_cast<size_t>(pos - 1)]
                                        : 0.0);
    }
  }
  return f;
}

CostBreakdown cost_deployment(const Deployment& dep, const PhysicalGraph& g,
                              const PlannerConfig& cfg) {
  CostBreakdown cost;
  for (const auto& inst : dep.instances) {
    const auto& node = g.nodes[static_cast<size_t>(inst.node)];
    if (!inst.reused) cost.instantiation += node.instantiation_cost(inst.vnf);
    for (const auto& [ep, a] : inst.cpu_by_endpoint)
      cost.resource += a * node.resource_cost[kCpu];
    for (const auto& [key, units] : inst.other_by_endpoint)
      cost.resource += units * node.resource_cost[static_cast<size_t>(key.second)];
  }
  for (const auto& hop : dep.routes)
    for (int l : hop.links)
      cost.transport +=
          cfg.traffic_cost(g.links[static_cast<size_t>(l)].cost_per_gbit, hop.demand_mbps);
  return cost;
}

namespace {

int flow_split(const PlannedChain& ch, const FlowInfo& f, int flow) {
  // instance count of source and target position of the flow
  int n = static_cast<int>(ch.vnfs.size());
  int src_pos, tgt_pos;
  if (!ch.downlink) {
    src_pos = flow - 1;  // -1: endpoint
    tgt_pos = flow;
  } else {
    src_pos = flow;
    tgt_pos = flow + 1 < n ? flow + 1 : -1;
  }
  int m_src = src_pos >= 0 ? ch.instance_count[static_cast<size_t>(src_pos)] : 1;
  int m_tgt = tgt_pos >= 0 ? ch.instance_count[static_cast<size_t>(tgt_pos)] : 1;
  (void)f;
  return std::max(m_src, m_tgt);
}

struct EndpointFailure {
  int capacity = 0;
  int delay = 0;
  int additive = 0;
  bool availability = false;
  // bottleneck tracking for instance replication
  double worst_time = -1.0;
  int worst_chain = -1;
  int worst_pos = -1;
};

struct PlanContext {
  const ServiceRequest& req;
  const PhysicalGraph& g;
  const PlannerConfig& cfg;
  ResidualLedger scratch;  // residuals after earlier endpoints of this plan
  std::set<std::pair<int, int>> plan_instances;  // (node, vnf) placed so far
};

// All searched threads of one chain for one combo: the main candidate plus
// one candidate per extra instance of each replicated position.
struct ChainThreads {
  Candidate main;
  std::map<int, std::vector<Candidate>> extra;  // position -> candidates 1..m-1
};

// Planner for one endpoint: builds decision graphs per chain, searches
// candidates, evaluates chain combinations jointly and returns the cheapest
// feasible sub-deployment (endpoint index 0 inside).
class EndpointPlanner {
 public:
  EndpointPlanner(PlanContext* ctx, int endpoint, const std::vector<PlannedChain>& chains)
      : ctx_(*ctx), endpoint_(endpoint), chains_(chains) {
    const EndpointSpec& ep = ctx_.req.endpoints[static_cast<size_t>(endpoint)];
    for (const auto& ch : chains_) flows_.push_back(chain_flows(ctx_.req, ch, ep.load_mbps));
  }

  // returns true and fills `best_dep` on success; otherwise `failure` explains.
  bool run(Deployment* best_dep, EndpointFailure* failure) {
    failure_ = EndpointFailure{};
    best_cost_ = kInfinity;
    best_dep_.instances.clear();
    best_dep_.routes.clear();

    // Pipeline stages per chain (decision graph is chain-specific: replica
    // count equals the number of instances to place).
    xgs_.clear();
    const EndpointSpec& ep = ctx_.req.endpoints[static_cast<size_t>(endpoint_)];
    for (size_t c = 0; c < chains_.size(); ++c) {
      int n_layers = static_cast<int>(flows_[c].layer_vnf.size());
      DecisionGraph dg = build_decision_graph(ctx_.g, ctx_.scratch, ctx_.req, n_layers,
                                              chains_[c].downlink, ctx_.cfg);
      std::vector<int> uncovered;
      dg = prune_availability(dg, ctx_.g, ctx_.req, &uncovered);
      for (int u : uncovered)
        if (u == endpoint_) {
          failure_.availability = true;
          *failure = failure_;
          return false;
        }
      assign_weights(&dg, ctx_.req.max_delay_ms, ctx_.req.min_reliability, ep.lifetime);
      double min_demand = kInfinity;
      for (double q : flows_[c].flow_demand) min_demand = std::min(min_demand, q);
      xgs_.push_back(expand(dg, ctx_.cfg.gamma, min_demand, ctx_.req.delay_bound(),
                            ctx_.req.reliability_bound(), ctx_.cfg.quant_epsilon));
    }

    memo_.clear();
    std::vector<Candidate> chosen;
    recurse(0, {}, 0.0, &chosen);

    if (best_cost_ == kInfinity) {
      *failure = failure_;
      return false;
    }
    *best_dep = best_dep_;
    return true;
  }

 private:
  using AnchorMap = std::map<int, int>;  // vnf -> node

  std::vector<Candidate> search_chain(size_t c, const AnchorMap& anchors,
                                      bool ignore_capacity = false) {
    std::vector<std::pair<int, int>> key(anchors.begin(), anchors.end());
    auto memo_key = std::make_tuple(c, key, ignore_capacity);
    auto it = memo_.find(memo_key);
    if (it != memo_.end()) return it->second;

    const FlowInfo& f = flows_[c];
    CandidateQuery q;
    q.endpoint = endpoint_;
    q.max_delay_ms = ctx_.req.max_delay_ms;
    q.min_reliability = ctx_.req.min_reliability;
    q.lifetime = ctx_.req.endpoints[static_cast<size_t>(endpoint_)].lifetime;
    q.max_candidates = ctx_.cfg.max_candidates;
    q.ignore_capacity = ignore_capacity;
    q.ledger = &ctx_.scratch;
    q.instantiation_cost = [this, &anchors](int node, int vnf) {
      auto a = anchors.find(vnf);
      if (a != anchors.end() && a->second == node) return 0.0;
      return instantiation_cost(node, vnf);
    };
    for (size_t k = 0; k < f.layer_vnf.size(); ++k) {
      LayerSpec spec;
      spec.vnf = f.layer_vnf[k];
      int m = chains_[c].instance_count[static_cast<size_t>(f.layer_pos[k])];
      int split = flow_split(chains_[c], f, f.layer_flow[k]);
      spec.demand = f.flow_demand[static_cast<size_t>(f.layer_flow[k])] / split;
      spec.lambda = f.layer_lambda[k] / m;
      spec.weight = f.layer_lambda[k] > 0.0 ? 1.0 / m : 0.0;
      auto a = anchors.find(spec.vnf);
      spec.anchor = a == anchors.end() ? -1 : a->second;
      q.layers.push_back(spec);
    }
    auto res = find_candidates(xgs_[c], ctx_.g, q);
    memo_.emplace(memo_key, res);
    return res;
  }

  double instantiation_cost(int node, int vnf) const {
    if (!ctx_.req.isolated &&
        (ctx_.scratch.has_instance(node, vnf) || ctx_.plan_instances.count({node, vnf}) > 0))
      return 0.0;
    return ctx_.g.nodes[static_cast<size_t>(node)].instantiation_cost(vnf);
  }

  void classify_empty(size_t c, const AnchorMap& anchors) {
    // Distinguish capacity-induced emptiness from genuine additive-KPI
    // infeasibility by re-searching with capacity filters disabled.
    auto relaxed = search_chain(c, anchors, true);
    if (!relaxed.empty())
      failure_.capacity++;
    else
      failure_.additive++;
  }

  void recurse(size_t c, AnchorMap anchors, double prov_acc, std::vector<Candidate>* chosen) {
    if (c == chains_.size()) {
      evaluate_combo(*chosen);
      return;
    }
    auto cands = search_chain(c, anchors);
    if (cands.empty()) {
      classify_empty(c, anchors);
      return;
    }
    for (const auto& cand : cands) {
      if (prov_acc + cand.provisional_cost >= best_cost_) break;
      AnchorMap next = anchors;
      for (size_t k = 0; k < cand.hosts.size(); ++k)
        next.emplace(flows_[c].layer_vnf[k], cand.hosts[k]);
      chosen->push_back(cand);
      recurse(c + 1, std::move(next), prov_acc + cand.provisional_cost, chosen);
      chosen->pop_back();
    }
  }

  // Searches the branch thread for extra instance `inst` (1-based) of the
  // replicated position `pos` of chain c, anchored to the main candidate.
  bool search_extra(size_t c, const Candidate& main, int pos, std::vector<Candidate>* out) {
    const FlowInfo& f = flows_[c];
    const PlannedChain& ch = chains_[c];
    int m = ch.instance_count[static_cast<size_t>(pos)];
    CandidateQuery q;
    q.endpoint = endpoint_;
    q.max_delay_ms = ctx_.req.max_delay_ms;
    q.min_reliability = ctx_.req.min_reliability;
    q.lifetime = ctx_.req.endpoints[static_cast<size_t>(endpoint_)].lifetime;
    q.max_candidates = 1;
    q.ledger = &ctx_.scratch;
    q.instantiation_cost = [this](int node, int vnf) { return instantiation_cost(node, vnf); };
    for (size_t k = 0; k < f.layer_vnf.size(); ++k) {
      LayerSpec spec;
      spec.vnf = f.layer_vnf[k];
      bool is_target = f.layer_pos[k] == pos;
      bool is_out_hop = !ch.downlink && f.layer_pos[k] == pos + 1;
      if (is_target) {
        spec.anchor = -1;
        spec.demand = f.flow_demand[static_cast<size_t>(f.layer_flow[k])] / m;
        spec.lambda = f.layer_lambda[k] / m;
        spec.weight = 1.0 / m;
      } else {
        spec.anchor = main.hosts[k];
        spec.demand = is_out_hop
                          ? f.flow_demand[static_cast<size_t>(f.layer_flow[k])] / m
                          : 0.0;
        spec.lambda = 0.0;
        spec.weight = 0.0;
      }
      q.layers.push_back(spec);
    }
    auto res = find_candidates(xgs_[c], ctx_.g, q);
    if (res.empty()) return false;
    out->push_back(res.front());
    return true;
  }

  void evaluate_combo(const std::vector<Candidate>& combo) {
    // Extra instance threads for replicated positions.
    std::vector<ChainThreads> threads(chains_.size());
    for (size_t c = 0; c < chains_.size(); ++c) {
      threads[c].main = combo[c];
      for (size_t pos = 0; pos < chains_[c].instance_count.size(); ++pos) {
        int m = chains_[c].instance_count[pos];
        if (m <= 1) continue;
        std::vector<Candidate> extras;
        for (int i = 1; i < m; ++i)
          if (!search_extra(c, combo[c], static_cast<int>(pos), &extras)) {
            failure_.capacity++;
            return;
          }
        threads[c].extra[static_cast<int>(pos)] = std::move(extras);
      }
    }

    Deployment dep;
    if (!assemble(threads, &dep)) return;

    // Non-CPU sizing at coupling equality, then the convex CPU assignment.
    std::map<std::pair<int, int>, double> lambda;  // (instance, endpoint=0)
    std::map<int, double> weight;
    for (const auto& hop : dep.routes)
      if (hop.instance >= 0) {
        lambda[{hop.instance, 0}] += hop.demand_mbps;
        weight[hop.instance] += hop.fraction;
      }
    for (size_t i = 0; i < dep.instances.size(); ++i) {
      auto& inst = dep.instances[i];
      const auto& vnf = ctx_.g.vnfs[static_cast<size_t>(inst.vnf)];
      auto lit = lambda.find({static_cast<int>(i), 0});
      double lam = lit == lambda.end() ? 0.0 : lit->second;
      for (int k = 1; k < ctx_.g.kind_count(); ++k) {
        double need = vnf.per_unit[static_cast<size_t>(k)] * lam;
        if (need > 0.0) inst.other_by_endpoint[{0, k}] = need;
      }
    }

    double d_net = 0.0;
    for (const auto& hop : dep.routes) {
      double string_delay = 0.0;
      for (int l : hop.links) string_delay += ctx_.g.links[static_cast<size_t>(l)].delay_ms;
      d_net += hop.fraction * string_delay;
    }

    CpuProblem problem;
    std::map<int, int> group_of_node;
    std::vector<std::pair<int, int>> problem_chain_pos;  // per problem instance
    std::vector<int> problem_instance;                   // deployment instance index
    for (size_t i = 0; i < dep.instances.size(); ++i) {
      auto wit = weight.find(static_cast<int>(i));
      if (wit == weight.end() || wit->second <= 0.0) continue;
      const auto& inst = dep.instances[i];
      const auto& vnf = ctx_.g.vnfs[static_cast<size_t>(inst.vnf)];
      CpuInstance ci;
      ci.unit_cost = std::max(ctx_.g.nodes[static_cast<size_t>(inst.node)].resource_cost[kCpu],
                              1e-9);
      ci.base_load = vnf.per_unit[kCpu] * lambda[{static_cast<int>(i), 0}];
      ci.weight = wit->second;
      auto git = group_of_node.find(inst.node);
      if (git == group_of_node.end()) {
        git = group_of_node.emplace(inst.node, static_cast<int>(problem.group_cap.size())).first;
        problem.group_cap.push_back(ctx_.scratch.node_residual(inst.node, kCpu));
      }
      ci.group = git->second;
      problem.instances.push_back(ci);
      problem_chain_pos.push_back({inst.chain, inst.position});
      problem_instance.push_back(static_cast<int>(i));
    }
    problem.budget_ms = ctx_.req.delay_bound() ? ctx_.req.max_delay_ms - d_net : kInfinity;

    CpuSolution cpu = solve_cpu(problem);
    if (!cpu.feasible) {
      if (cpu.reason == CpuInfeasibility::kDelay) {
        failure_.delay++;
      } else {
        failure_.capacity++;
        int b = bottleneck_instance(problem);
        if (b >= 0 && b < static_cast<int>(problem.instances.size())) {
          const auto& inst = problem.instances[static_cast<size_t>(b)];
          double slack = problem.group_cap[static_cast<size_t>(inst.group)];
          for (const auto& other : problem.instances)
            if (other.group == inst.group) slack -= other.base_load;
          double t = slack > 0 ? inst.weight / slack : kInfinity;
          if (t > failure_.worst_time) {
            failure_.worst_time = t;
            failure_.worst_chain = problem_chain_pos[static_cast<size_t>(b)].first;
            failure_.worst_pos = problem_chain_pos[static_cast<size_t>(b)].second;
          }
        }
      }
      return;
    }
    for (size_t pi = 0; pi < problem.instances.size(); ++pi)
      dep.instances[static_cast<size_t>(problem_instance[pi])].cpu_by_endpoint[0] =
          cpu.assigned[pi];

    // Exact joint verdict through the shared checker (single-endpoint view).
    ServiceRequest sub = ctx_.req;
    sub.endpoints = {ctx_.req.endpoints[static_cast<size_t>(endpoint_)]};
    KpiReport report = evaluate_deployment(dep, sub, ctx_.g, ctx_.scratch);
    if (!report.ok()) {
      const auto& e = report.endpoints[0];
      if (!report.capacity_ok)
        failure_.capacity++;
      else if (!e.delay_ok)
        failure_.delay++;
      else
        failure_.additive++;
      return;
    }

    dep.cost = cost_deployment(dep, ctx_.g, ctx_.cfg);
    if (dep.cost.total() < best_cost_ - 1e-12) {
      best_cost_ = dep.cost.total();
      best_dep_ = dep;
    }
  }

  // Turns the searched threads into placed instances and route hops
  // (endpoint index 0; remapped by the caller).
  bool assemble(const std::vector<ChainThreads>& threads, Deployment* dep) {
    auto instance_of = [&](int chain, int pos, int vnf, int node) {
      for (size_t i = 0; i < dep->instances.size(); ++i)
        if (dep->instances[i].vnf == vnf && dep->instances[i].node == node)
          return static_cast<int>(i);
      PlacedInstance inst;
      inst.chain = chain;
      inst.position = pos;
      inst.vnf = vnf;
      inst.node = node;
      inst.reused = instantiation_cost(node, vnf) == 0.0;
      dep->instances.push_back(inst);
      return static_cast<int>(dep->instances.size() - 1);
    };

    for (size_t c = 0; c < chains_.size(); ++c) {
      const FlowInfo& f = flows_[c];
      const PlannedChain& ch = chains_[c];
      const ChainThreads& th = threads[c];
      const int n = static_cast<int>(ch.vnfs.size());

      // layer index of each chain position in the search ordering
      std::vector<int> layer_of_pos(static_cast<size_t>(n), -1);
      for (size_t k = 0; k < f.layer_pos.size(); ++k)
        layer_of_pos[static_cast<size_t>(f.layer_pos[k])] = static_cast<int>(k);

      // place instances: thread 0 plus extras
      std::vector<std::vector<int>> inst_ids(static_cast<size_t>(n));
      for (int pos = 0; pos < n; ++pos) {
        int layer = layer_of_pos[static_cast<size_t>(pos)];
        int vnf = ch.vnfs[static_cast<size_t>(pos)];
        inst_ids[static_cast<size_t>(pos)].push_back(instance_of(
            static_cast<int>(c), pos, vnf, th.main.hosts[static_cast<size_t>(layer)]));
        auto xit = th.extra.find(pos);
        if (xit != th.extra.end())
          for (const auto& cand : xit->second)
            inst_ids[static_cast<size_t>(pos)].push_back(instance_of(
                static_cast<int>(c), pos, vnf, cand.hosts[static_cast<size_t>(layer)]));
      }

      // hops per flow, branch by branch
      for (int flow = 0; flow < f.flow_count(); ++flow) {
        int split = flow_split(ch, f, flow);
        // which position is replicated on this flow (at most one side)
        int repl_pos = -1;
        if (!ch.downlink) {
          if (ch.instance_count[static_cast<size_t>(flow)] > 1) repl_pos = flow;
          else if (flow >= 1 && ch.instance_count[static_cast<size_t>(flow - 1)] > 1)
            repl_pos = flow - 1;
        } else {
          if (ch.instance_count[static_cast<size_t>(flow)] > 1) repl_pos = flow;
          else if (flow + 1 < n && ch.instance_count[static_cast<size_t>(flow + 1)] > 1)
            repl_pos = flow + 1;
        }
        // processing instance position of this flow
        int proc_pos;
        if (!ch.downlink) proc_pos = flow;
        else proc_pos = flow + 1 < n ? flow + 1 : -1;

        int layer = -1;  // search layer whose edge realizes this flow
        for (size_t k = 0; k < f.layer_flow.size(); ++k)
          if (f.layer_flow[k] == flow) layer = static_cast<int>(k);

        for (int b = 0; b < split; ++b) {
          const Candidate* thread = &th.main;
          if (b > 0) {
            auto xit = th.extra.find(repl_pos);
            if (xit == th.extra.end() || b - 1 >= static_cast<int>(xit->second.size()))
              return false;
            thread = &xit->second[static_cast<size_t>(b - 1)];
          }
          const DecisionEdge& edge =
              xgs_[c].dg.edges[static_cast<size_t>(thread->edge_ids[static_cast<size_t>(layer)])];
          RouteHop hop;
          hop.endpoint = 0;
          hop.chain = static_cast<int>(c);
          hop.hop = flow;
          hop.fraction = 1.0 / split;
          hop.demand_mbps = f.flow_demand[static_cast<size_t>(flow)] / split;
          hop.links = edge.links;
          if (proc_pos >= 0) {
            int branch_of_proc =
                ch.instance_count[static_cast<size_t>(proc_pos)] > 1 ? b : 0;
            hop.instance = inst_ids[static_cast<size_t>(proc_pos)]
                                   [static_cast<size_t>(branch_of_proc)];
          }
          dep->routes.push_back(std::move(hop));
        }
      }
    }
    return true;
  }

  PlanContext& ctx_;
  int endpoint_;
  std::vector<PlannedChain> chains_;
  std::vector<FlowInfo> flows_;
  std::vector<ExpandedGraph> xgs_;
  std::map<std::tuple<size_t, std::vector<std::pair<int, int>>, bool>, std::vector<Candidate>>
      memo_;
  EndpointFailure failure_;
  double best_cost_ = kInfinity;
  Deployment best_dep_;
};

// Merges an endpoint sub-deployment (endpoint index 0) into the request-wide
// deployment, sharing instances by (vnf, node).
void merge_deployment(const Deployment& sub, int endpoint, Deployment* total) {
  std::map<int, int> remap;  // sub instance -> total instance
  for (size_t i = 0; i < sub.instances.size(); ++i) {
    const auto& inst = sub.instances[i];
    int found = -1;
    for (size_t j = 0; j < total->instances.size(); ++j)
      if (total->instances[j].vnf == inst.vnf && total->instances[j].node == inst.node)
        found = static_cast<int>(j);
    if (found < 0) {
      PlacedInstance copy = inst;
      copy.cpu_by_endpoint.clear();
      copy.other_by_endpoint.clear();
      total->instances.push_back(copy);
      found = static_cast<int>(total->instances.size() - 1);
    }
    auto& target = total->instances[static_cast<size_t>(found)];
    for (const auto& [ep, a] : inst.cpu_by_endpoint) target.cpu_by_endpoint[endpoint] = a;
    for (const auto& [key, units] : inst.other_by_endpoint)
      target.other_by_endpoint[{endpoint, key.second}] = units;
    remap[static_cast<int>(i)] = found;
  }
  for (const auto& hop : sub.routes) {
    RouteHop copy = hop;
    copy.endpoint = endpoint;
    if (copy.instance >= 0) copy.instance = remap[copy.instance];
    total->routes.push_back(copy);
  }
}

}  // namespace

PlanOutcome plan(const ServiceRequest& req, const PhysicalGraph& g,
                 ResidualLedger* ledger, const PlannerConfig& cfg) {
  PlanOutcome outcome;
  outcome.gamma = cfg.gamma;

  PlanContext ctx{req, g, cfg, *ledger, {}};
  std::vector<PlannedChain> base_chains = decompose(req);
  Deployment total;

  for (size_t e = 0; e < req.endpoints.size(); ++e) {
    std::vector<PlannedChain> chains = base_chains;  // replication is per endpoint
    EndpointFailure failure;
    Deployment sub;
    bool planned = false;
    for (int attempt = 0; attempt <= cfg.max_instance_replication * 4; ++attempt) {
      EndpointPlanner planner(&ctx, static_cast<int>(e), chains);
      if (planner.run(&sub, &failure)) {
        planned = true;
        break;
      }
      if (failure.availability) break;
      // Bottleneck-VNF replication when CPU capacity is what defeats the
      // delay target. Only uplink chains; adjacent positions must stay
      // un-replicated so the equal split keeps a valid branch structure.
      if (failure.capacity == 0 || failure.worst_chain < 0) break;
      const int c = failure.worst_chain;
      const int pos = failure.worst_pos;
      auto& chain = chains[static_cast<size_t>(c)];
      bool can_grow =
          !chain.downlink &&
          chain.instance_count[static_cast<size_t>(pos)] < cfg.max_instance_replication &&
          (pos == 0 || chain.instance_count[static_cast<size_t>(pos - 1)] == 1) &&
          (pos + 1 >= static_cast<int>(chain.instance_count.size()) ||
           chain.instance_count[static_cast<size_t>(pos + 1)] == 1);
      if (!can_grow) break;
      chain.instance_count[static_cast<size_t>(pos)]++;
      logf(LogLevel::kInfo, "endpoint %zu: replicating chain %d vnf position %d (now %d)",
           e, c, pos, chain.instance_count[static_cast<size_t>(pos)]);
    }
    if (!planned) {
      if (failure.availability)
        outcome.reason = RejectReason::kAvailability;
      else if (failure.capacity >= failure.delay && failure.capacity >= failure.additive &&
               failure.capacity > 0)
        outcome.reason = RejectReason::kCapacity;
      else if (failure.delay >= failure.additive && failure.delay > 0)
        outcome.reason = RejectReason::kDelay;
      else
        outcome.reason = RejectReason::kAdditiveKpi;
      outcome.diagnostics = "endpoint " + std::to_string(e) + " infeasible (" +
                            reject_reason_name(outcome.reason) + ") at gamma=" +
                            std::to_string(cfg.gamma);
      return outcome;
    }

    // Make the endpoint's consumption visible to its siblings.
    Deployment committed = sub;  // endpoint-0 indexed; capacities identical
    if (!ctx.scratch.commit(committed, !req.isolated)) {
      outcome.reason = RejectReason::kCapacity;
      outcome.diagnostics = "endpoint " + std::to_string(e) + " commit failed";
      return outcome;
    }
    for (const auto& inst : sub.instances) ctx.plan_instances.insert({inst.node, inst.vnf});
    merge_deployment(sub, static_cast<int>(e), &total);
  }

  total.cost = cost_deployment(total, g, cfg);
  outcome.report = evaluate_deployment(total, req, g, *ledger);
  if (!outcome.report.ok()) {
    logf(LogLevel::kError, "accepted deployment failed the KPI checker: %s",
         outcome.report.violations.empty() ? "?" : outcome.report.violations[0].c_str());
  }
  if (!ledger->commit(total, !req.isolated)) {
    outcome.reason = RejectReason::kCapacity;
    outcome.diagnostics = "final commit failed";
    return outcome;
  }
  outcome.accepted = true;
  outcome.deployment = total;
  return outcome;
}

ServiceRequest apply_axis(const ServiceRequest& req, const std::string& axis, double value) {
  ServiceRequest out = req;
  if (axis == "delay") {
    out.max_delay_ms = value;
  } else if (axis == "load") {
    for (auto& ep : out.endpoints) ep.load_mbps *= value;
  } else if (axis == "reliability") {
    out.min_reliability = value;
  }
  return out;
}

std::vector<SweepPoint> sweep(const Scenario& sc, const std::string& axis,
                              const std::vector<double>& values) {
  std::vector<SweepPoint> points;
  for (double v : values) {
    SweepPoint point;
    point.axis = axis;
    point.value = v;
    PlannerConfig cfg = sc.config;
    if (axis == "gamma") cfg.gamma = static_cast<int>(v);
    ResidualLedger ledger(sc.graph);
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& service : sc.services) {
      ServiceRequest req = axis == "gamma" ? service : apply_axis(service, axis, v);
      point.outcomes.push_back(plan(req, sc.graph, &ledger, cfg));
    }
    auto t1 = std::chrono::steady_clock::now();
    point.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace okpi
