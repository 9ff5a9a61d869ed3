#include "okpi/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace okpi {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where, what);
}

void expect_keys(const json& obj, const std::string& where,
                 const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (allowed.count(it.key()) == 0) fail(where + "/" + it.key(), "unknown field");
  }
}

double get_number(const json& obj, const std::string& where,
                  const std::string& key, bool required, double def = 0.0) {
  if (!obj.contains(key)) {
    if (required) fail(where + "/" + key, "missing field");
    return def;
  }
  if (!obj[key].is_number()) fail(where + "/" + key, "expected a number");
  return obj[key].get<double>();
}

std::string get_string(const json& obj, const std::string& where,
                       const std::string& key) {
  if (!obj.contains(key)) fail(where + "/" + key, "missing field");
  if (!obj[key].is_string()) fail(where + "/" + key, "expected a string");
  return obj[key].get<std::string>();
}

// Index resolver over a declared name list.
struct NameTable {
  std::map<std::string, int> index;
  int resolve(const std::string& name, const std::string& where) const {
    auto it = index.find(name);
    if (it == index.end()) fail(where, "unknown id '" + name + "'");
    return it->second;
  }
  bool contains(const std::string& name) const { return index.count(name) > 0; }
  int add(const std::string& name, const std::string& where) {
    if (index.count(name) > 0) fail(where, "duplicate id '" + name + "'");
    int idx = static_cast<int>(index.size());
    index.emplace(name, idx);
    return idx;
  }
};

ReliabilityProfile parse_reliability(const json& v, const std::string& where,
                                     const NameTable& steps, int n_steps) {
  ReliabilityProfile p;
  if (v.is_number()) {
    p.constant = v.get<double>();
    if (!(p.constant > 0.0 && p.constant <= 1.0))
      fail(where, "reliability must be in (0, 1]");
    return p;
  }
  if (v.is_object()) {
    expect_keys(v, where, {"steps"});
    if (!v.contains("steps") || !v["steps"].is_object())
      fail(where, "step reliability needs a 'steps' object");
    p.per_step.assign(static_cast<size_t>(n_steps), -1.0);
    for (auto it = v["steps"].begin(); it != v["steps"].end(); ++it) {
      int t = steps.resolve(it.key(), where + "/steps");
      if (!it.value().is_number()) fail(where + "/steps/" + it.key(), "expected a number");
      double val = it.value().get<double>();
      if (!(val > 0.0 && val <= 1.0))
        fail(where + "/steps/" + it.key(), "reliability must be in (0, 1]");
      p.per_step[static_cast<size_t>(t)] = val;
    }
    for (int t = 0; t < n_steps; ++t)
      if (p.per_step[static_cast<size_t>(t)] < 0.0)
        fail(where, "reliability profile missing time step index " + std::to_string(t));
    return p;
  }
  fail(where, "expected a number or a {steps: {...}} object");
}

std::vector<std::string> parse_string_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of strings");
  std::vector<std::string> out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) fail(where + "/" + std::to_string(i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("not valid JSON: ") + e.what());
  }
  expect_keys(doc, origin,
              {"name", "description", "time_steps", "resource_kinds", "interfaces",
               "locations", "nodes", "links", "vnfs", "services", "costs", "config"});

  Scenario sc;
  sc.name = doc.contains("name") ? get_string(doc, origin, "name") : origin;
  PhysicalGraph& g = sc.graph;

  // --- declarations ---------------------------------------------------------
  g.time_steps = doc.contains("time_steps")
                     ? parse_string_list(doc["time_steps"], origin + "/time_steps")
                     : std::vector<std::string>{"t0"};
  if (g.time_steps.empty()) fail(origin + "/time_steps", "at least one time step required");
  NameTable steps;
  for (const auto& t : g.time_steps) steps.add(t, origin + "/time_steps");

  g.resource_kinds = {"cpu"};
  if (doc.contains("resource_kinds")) {
    for (const auto& k :
         parse_string_list(doc["resource_kinds"], origin + "/resource_kinds"))
      if (k != "cpu") g.resource_kinds.push_back(k);
  }
  NameTable kinds;
  for (const auto& k : g.resource_kinds) kinds.add(k, origin + "/resource_kinds");

  NameTable itfs;
  if (doc.contains("interfaces"))
    for (const auto& i : parse_string_list(doc["interfaces"], origin + "/interfaces")) {
      itfs.add(i, origin + "/interfaces");
      g.interfaces.push_back(i);
    }

  NameTable locs;
  if (doc.contains("locations"))
    for (const auto& l : parse_string_list(doc["locations"], origin + "/locations")) {
      locs.add(l, origin + "/locations");
      g.locations.push_back(l);
    }

  // --- vnfs (before nodes: per-node vnf costs reference them) ---------------
  NameTable vnfs;
  if (doc.contains("vnfs")) {
    if (!doc["vnfs"].is_array()) fail(origin + "/vnfs", "expected an array");
    for (size_t i = 0; i < doc["vnfs"].size(); ++i) {
      const std::string where = origin + "/vnfs/" + std::to_string(i);
      const json& jv = doc["vnfs"][i];
      expect_keys(jv, where, {"id", "cpu_per_mbps", "resources_per_mbps", "interfaces"});
      Vnf v;
      v.id = get_string(jv, where, "id");
      vnfs.add(v.id, where);
      v.per_unit.assign(g.resource_kinds.size(), 0.0);
      v.per_unit[kCpu] = get_number(jv, where, "cpu_per_mbps", true);
      if (v.per_unit[kCpu] < 0) fail(where + "/cpu_per_mbps", "must be >= 0");
      if (jv.contains("resources_per_mbps")) {
        if (!jv["resources_per_mbps"].is_object())
          fail(where + "/resources_per_mbps", "expected an object");
        for (auto it = jv["resources_per_mbps"].begin();
             it != jv["resources_per_mbps"].end(); ++it) {
          int k = kinds.resolve(it.key(), where + "/resources_per_mbps");
          if (!it.value().is_number() || it.value().get<double>() < 0)
            fail(where + "/resources_per_mbps/" + it.key(), "expected a number >= 0");
          v.per_unit[static_cast<size_t>(k)] = it.value().get<double>();
        }
      }
      if (jv.contains("interfaces"))
        for (const auto& name :
             parse_string_list(jv["interfaces"], where + "/interfaces"))
          v.required_interfaces.push_back(itfs.resolve(name, where + "/interfaces"));
      std::sort(v.required_interfaces.begin(), v.required_interfaces.end());
      g.vnfs.push_back(std::move(v));
    }
  }

  // --- nodes -----------------------------------------------------------------
  if (!doc.contains("nodes") || !doc["nodes"].is_array() || doc["nodes"].empty())
    fail(origin + "/nodes", "at least one node required");
  NameTable node_names;
  for (size_t i = 0; i < doc["nodes"].size(); ++i) {
    const std::string where = origin + "/nodes/" + std::to_string(i);
    const json& jn = doc["nodes"][i];
    expect_keys(jn, where,
                {"id", "tier", "resources", "resource_costs", "interfaces", "coverage",
                 "reliability", "vnf_costs", "vnf_cost_default"});
    PhysicalNode n;
    n.id = get_string(jn, where, "id");
    node_names.add(n.id, where);
    n.tier = jn.contains("tier") ? get_string(jn, where, "tier") : "node";
    n.capacity.assign(g.resource_kinds.size(), 0.0);
    n.resource_cost.assign(g.resource_kinds.size(), 0.0);
    if (jn.contains("resources")) {
      if (!jn["resources"].is_object()) fail(where + "/resources", "expected an object");
      for (auto it = jn["resources"].begin(); it != jn["resources"].end(); ++it) {
        int k = kinds.resolve(it.key(), where + "/resources");
        if (!it.value().is_number()) fail(where + "/resources/" + it.key(), "expected a number");
        double cap = it.value().get<double>();
        if (cap < 0) fail(where + "/resources/" + it.key(), "capacity must be >= 0");
        n.capacity[static_cast<size_t>(k)] = cap;
      }
    }
    if (jn.contains("resource_costs")) {
      if (!jn["resource_costs"].is_object())
        fail(where + "/resource_costs", "expected an object");
      for (auto it = jn["resource_costs"].begin(); it != jn["resource_costs"].end(); ++it) {
        int k = kinds.resolve(it.key(), where + "/resource_costs");
        if (!it.value().is_number() || it.value().get<double>() < 0)
          fail(where + "/resource_costs/" + it.key(), "expected a number >= 0");
        n.resource_cost[static_cast<size_t>(k)] = it.value().get<double>();
      }
    }
    if (jn.contains("interfaces"))
      for (const auto& name : parse_string_list(jn["interfaces"], where + "/interfaces"))
        n.interfaces.push_back(itfs.resolve(name, where + "/interfaces"));
    std::sort(n.interfaces.begin(), n.interfaces.end());
    if (jn.contains("coverage"))
      for (const auto& name : parse_string_list(jn["coverage"], where + "/coverage"))
        n.coverage.push_back(locs.resolve(name, where + "/coverage"));
    std::sort(n.coverage.begin(), n.coverage.end());
    if (!n.coverage.empty() && n.interfaces.empty())
      fail(where, "a node with coverage must declare at least one radio interface");
    n.reliability =
        jn.contains("reliability")
            ? parse_reliability(jn["reliability"], where + "/reliability", steps,
                                g.step_count())
            : ReliabilityProfile{};
    n.vnf_cost_default = get_number(jn, where, "vnf_cost_default", false, 0.0);
    if (jn.contains("vnf_costs")) {
      if (!jn["vnf_costs"].is_object()) fail(where + "/vnf_costs", "expected an object");
      for (auto it = jn["vnf_costs"].begin(); it != jn["vnf_costs"].end(); ++it) {
        int v = vnfs.resolve(it.key(), where + "/vnf_costs");
        if (!it.value().is_number() || it.value().get<double>() < 0)
          fail(where + "/vnf_costs/" + it.key(), "expected a number >= 0");
        n.vnf_cost[v] = it.value().get<double>();
      }
    }
    g.nodes.push_back(std::move(n));
  }

  // --- links -----------------------------------------------------------------
  auto resolve_vertex = [&](const std::string& name, const std::string& where) {
    if (node_names.contains(name)) return node_names.resolve(name, where);
    if (locs.contains(name)) return g.location_vertex(locs.resolve(name, where));
    fail(where, "unknown node or location '" + name + "'");
  };
  if (doc.contains("links")) {
    if (!doc["links"].is_array()) fail(origin + "/links", "expected an array");
    std::set<std::string> link_ids;
    for (size_t i = 0; i < doc["links"].size(); ++i) {
      const std::string where = origin + "/links/" + std::to_string(i);
      const json& jl = doc["links"][i];
      expect_keys(jl, where,
                  {"id", "from", "to", "delay_ms", "capacity_mbps", "cost_per_gbit",
                   "reliability", "bidirectional"});
      PhysicalLink l;
      l.id = jl.contains("id") ? get_string(jl, where, "id")
                               : "link" + std::to_string(i);
      if (!link_ids.insert(l.id).second) fail(where, "duplicate link id '" + l.id + "'");
      l.from = resolve_vertex(get_string(jl, where, "from"), where + "/from");
      l.to = resolve_vertex(get_string(jl, where, "to"), where + "/to");
      if (l.from == l.to) fail(where, "self-loop link");
      l.delay_ms = get_number(jl, where, "delay_ms", true);
      if (l.delay_ms < 0) fail(where + "/delay_ms", "delay must be >= 0");
      l.capacity_mbps = get_number(jl, where, "capacity_mbps", true);
      if (!(l.capacity_mbps > 0)) fail(where + "/capacity_mbps", "capacity must be > 0");
      l.cost_per_gbit = get_number(jl, where, "cost_per_gbit", false, 0.0);
      if (l.cost_per_gbit < 0) fail(where + "/cost_per_gbit", "cost must be >= 0");
      l.reliability =
          jl.contains("reliability")
              ? parse_reliability(jl["reliability"], where + "/reliability", steps,
                                  g.step_count())
              : ReliabilityProfile{};
      bool bidir = true;
      if (jl.contains("bidirectional")) {
        if (!jl["bidirectional"].is_boolean()) fail(where + "/bidirectional", "expected a bool");
        bidir = jl["bidirectional"].get<bool>();
      }
      PhysicalLink rev = l;
      g.links.push_back(std::move(l));
      if (bidir) {
        std::swap(rev.from, rev.to);
        rev.id += "~rev";
        g.links.push_back(std::move(rev));
      }
    }
  }

  // --- services ---------------------------------------------------------------
  if (doc.contains("services")) {
    if (!doc["services"].is_array()) fail(origin + "/services", "expected an array");
    std::set<std::string> service_ids;
    for (size_t i = 0; i < doc["services"].size(); ++i) {
      const std::string where = origin + "/services/" + std::to_string(i);
      const json& js = doc["services"][i];
      expect_keys(js, where,
                  {"id", "chains", "chi", "endpoints", "max_delay_ms",
                   "min_reliability", "isolated"});
      ServiceRequest s;
      s.id = get_string(js, where, "id");
      if (!service_ids.insert(s.id).second) fail(where, "duplicate service id");
      if (!js.contains("chains") || !js["chains"].is_array() || js["chains"].empty())
        fail(where + "/chains", "at least one chain required");
      for (size_t c = 0; c < js["chains"].size(); ++c) {
        const std::string cw = where + "/chains/" + std::to_string(c);
        const json& jc = js["chains"][c];
        expect_keys(jc, cw, {"vnfs", "direction", "load_factor"});
        ChainSpec chain;
        if (!jc.contains("vnfs")) fail(cw + "/vnfs", "missing field");
        for (const auto& name : parse_string_list(jc["vnfs"], cw + "/vnfs"))
          chain.vnfs.push_back(vnfs.resolve(name, cw + "/vnfs"));
        if (chain.vnfs.empty()) fail(cw + "/vnfs", "chain must contain at least one vnf");
        if (jc.contains("direction")) {
          std::string d = get_string(jc, cw, "direction");
          if (d == "downlink") chain.downlink = true;
          else if (d != "uplink") fail(cw + "/direction", "expected 'uplink' or 'downlink'");
        }
        chain.load_factor = get_number(jc, cw, "load_factor", false, 1.0);
        if (!(chain.load_factor > 0)) fail(cw + "/load_factor", "must be > 0");
        chain.instance_count.assign(chain.vnfs.size(), 1);
        s.chains.push_back(std::move(chain));
      }
      if (js.contains("chi")) {
        if (!js["chi"].is_array()) fail(where + "/chi", "expected an array");
        for (size_t c = 0; c < js["chi"].size(); ++c) {
          const std::string cw = where + "/chi/" + std::to_string(c);
          const json& jx = js["chi"][c];
          expect_keys(jx, cw, {"prev", "cur", "next", "value"});
          std::string prev = get_string(jx, cw, "prev");
          int p = prev == "@endpoint" ? -1 : vnfs.resolve(prev, cw + "/prev");
          int cur = vnfs.resolve(get_string(jx, cw, "cur"), cw + "/cur");
          int next = vnfs.resolve(get_string(jx, cw, "next"), cw + "/next");
          double val = get_number(jx, cw, "value", true);
          if (val < 0) fail(cw + "/value", "chi must be >= 0");
          s.chi[{p, cur, next}] = val;
        }
      }
      if (!js.contains("endpoints") || !js["endpoints"].is_array() ||
          js["endpoints"].empty())
        fail(where + "/endpoints", "at least one endpoint required");
      for (size_t c = 0; c < js["endpoints"].size(); ++c) {
        const std::string cw = where + "/endpoints/" + std::to_string(c);
        const json& je = js["endpoints"][c];
        expect_keys(je, cw, {"location", "load_mbps", "lifetime"});
        EndpointSpec e;
        e.location = locs.resolve(get_string(je, cw, "location"), cw + "/location");
        e.load_mbps = get_number(je, cw, "load_mbps", true);
        if (!(e.load_mbps > 0)) fail(cw + "/load_mbps", "load must be > 0");
        if (je.contains("lifetime")) {
          for (const auto& name : parse_string_list(je["lifetime"], cw + "/lifetime"))
            e.lifetime.push_back(steps.resolve(name, cw + "/lifetime"));
          std::sort(e.lifetime.begin(), e.lifetime.end());
          e.lifetime.erase(std::unique(e.lifetime.begin(), e.lifetime.end()),
                           e.lifetime.end());
        } else {
          for (int t = 0; t < g.step_count(); ++t) e.lifetime.push_back(t);
        }
        if (e.lifetime.empty()) fail(cw + "/lifetime", "lifetime must not be empty");
        s.endpoints.push_back(std::move(e));
      }
      if (js.contains("max_delay_ms")) {
        s.max_delay_ms = get_number(js, where, "max_delay_ms", true);
        if (!(s.max_delay_ms > 0)) fail(where + "/max_delay_ms", "must be > 0");
      }
      if (js.contains("min_reliability")) {
        s.min_reliability = get_number(js, where, "min_reliability", true);
        if (!(s.min_reliability >= 0 && s.min_reliability < 1))
          fail(where + "/min_reliability", "must be in [0, 1)");
      }
      if (js.contains("isolated")) {
        if (!js["isolated"].is_boolean()) fail(where + "/isolated", "expected a bool");
        s.isolated = js["isolated"].get<bool>();
      }

      // Cycle check on the implied service graph: edges ordered away from the
      // endpoint (downlink chains reversed), so a consistent processing depth
      // must exist across chains.
      {
        std::map<int, std::set<int>> succ;
        for (const auto& chain : s.chains)
          for (size_t k = 0; k + 1 < chain.vnfs.size(); ++k) {
            if (chain.downlink)
              succ[chain.vnfs[k + 1]].insert(chain.vnfs[k]);
            else
              succ[chain.vnfs[k]].insert(chain.vnfs[k + 1]);
          }
        std::map<int, int> state;  // 0 new, 1 open, 2 done
        std::vector<int> stack;
        for (const auto& [v, _] : succ) stack.push_back(v);
        std::function<bool(int)> has_cycle = [&](int v) {
          if (state[v] == 1) return true;
          if (state[v] == 2) return false;
          state[v] = 1;
          for (int n : succ[v])
            if (has_cycle(n)) return true;
          state[v] = 2;
          return false;
        };
        for (int v : stack)
          if (has_cycle(v)) fail(where, "cyclic service graph");
      }
      sc.services.push_back(std::move(s));
    }
  }

  // --- costs / config ----------------------------------------------------------
  if (doc.contains("costs")) {
    const std::string where = origin + "/costs";
    expect_keys(doc["costs"], where, {"cost_period_s"});
    sc.config.cost_period_s = get_number(doc["costs"], where, "cost_period_s", false, 1000.0);
    if (!(sc.config.cost_period_s > 0)) fail(where + "/cost_period_s", "must be > 0");
  }
  if (doc.contains("config")) {
    const std::string where = origin + "/config";
    const json& jc = doc["config"];
    expect_keys(jc, where,
                {"gamma", "k_paths", "max_candidates", "max_instance_replication",
                 "quant_epsilon", "oracle"});
    sc.config.gamma = static_cast<int>(get_number(jc, where, "gamma", false, 10));
    if (sc.config.gamma < 1) fail(where + "/gamma", "gamma must be >= 1");
    sc.config.k_paths = static_cast<int>(get_number(jc, where, "k_paths", false, 4));
    if (sc.config.k_paths < 1) fail(where + "/k_paths", "k_paths must be >= 1");
    sc.config.max_candidates =
        static_cast<int>(get_number(jc, where, "max_candidates", false, 64));
    if (sc.config.max_candidates < 1) fail(where + "/max_candidates", "must be >= 1");
    sc.config.max_instance_replication = static_cast<int>(
        get_number(jc, where, "max_instance_replication", false, 3));
    sc.config.quant_epsilon = get_number(jc, where, "quant_epsilon", false, 1e-9);
    if (jc.contains("oracle")) {
      const std::string ow = where + "/oracle";
      expect_keys(jc["oracle"], ow, {"max_nodes", "max_chain_len", "max_strings", "hop_bound"});
      sc.config.oracle.max_nodes =
          static_cast<int>(get_number(jc["oracle"], ow, "max_nodes", false, 8));
      sc.config.oracle.max_chain_len =
          static_cast<int>(get_number(jc["oracle"], ow, "max_chain_len", false, 4));
      sc.config.oracle.max_strings =
          static_cast<long>(get_number(jc["oracle"], ow, "max_strings", false, 100000));
      sc.config.oracle.hop_bound =
          static_cast<int>(get_number(jc["oracle"], ow, "hop_bound", false, 6));
    }
  }

  g.build_adjacency();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace okpi
