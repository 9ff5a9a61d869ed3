#pragma once

#include <map>
#include <utility>
#include <vector>

#include "okpi/model.hpp"

namespace okpi {

// Bookkeeping of what previously accepted services left behind: residual link
// and node capacities plus the registry of deployed VNF instances available
// for reuse. Commit/rollback are transactional; rollback restores the exact
// pre-commit state (LIFO order).
class ResidualLedger {
 public:
  ResidualLedger() = default;
  explicit ResidualLedger(const PhysicalGraph& g) {
    link_residual_.reserve(g.links.size());
    for (const auto& l : g.links) link_residual_.push_back(l.capacity_mbps);
    node_residual_.reserve(g.nodes.size());
    for (const auto& n : g.nodes) node_residual_.push_back(n.capacity);
  }

  double link_residual(int link) const {
    return link_residual_.at(static_cast<size_t>(link));
  }
  double node_residual(int node, int kind) const {
    return node_residual_.at(static_cast<size_t>(node)).at(static_cast<size_t>(kind));
  }
  bool has_instance(int node, int vnf) const {
    auto it = instance_refs_.find({node, vnf});
    return it != instance_refs_.end() && it->second > 0;
  }

  // Aggregated capacity draw of a deployment.
  struct Draw {
    std::map<int, double> per_link;                  // link -> Mb/s
    std::map<std::pair<int, int>, double> per_node;  // (node, kind) -> units
  };
  static Draw draw_of(const Deployment& dep) {
    Draw d;
    for (const auto& hop : dep.routes)
      for (int l : hop.links) d.per_link[l] += hop.demand_mbps;
    for (const auto& inst : dep.instances) {
      for (const auto& [ep, a] : inst.cpu_by_endpoint)
        d.per_node[{inst.node, kCpu}] += a;
      for (const auto& [key, units] : inst.other_by_endpoint)
        d.per_node[{inst.node, key.second}] += units;
    }
    return d;
  }

  bool fits(const Deployment& dep, double eps = 1e-9) const {
    Draw d = draw_of(dep);
    for (const auto& [l, mbps] : d.per_link)
      if (mbps > link_residual(l) + eps) return false;
    for (const auto& [nk, units] : d.per_node)
      if (units > node_residual(nk.first, nk.second) + eps) return false;
    return true;
  }

  // Returns false and leaves the ledger untouched if residuals are insufficient.
  bool commit(const Deployment& dep, bool register_instances) {
    if (!fits(dep)) return false;
    journal_.push_back({link_residual_, node_residual_, instance_refs_});
    Draw d = draw_of(dep);
    for (const auto& [l, mbps] : d.per_link)
      link_residual_[static_cast<size_t>(l)] -= mbps;
    for (const auto& [nk, units] : d.per_node)
      node_residual_[static_cast<size_t>(nk.first)][static_cast<size_t>(nk.second)] -=
          units;
    if (register_instances)
      for (const auto& inst : dep.instances) instance_refs_[{inst.node, inst.vnf}]++;
    return true;
  }

  // Restores the state saved by the matching (most recent) commit.
  void rollback(const Deployment& dep) {
    (void)dep;
    if (journal_.empty()) return;
    link_residual_ = journal_.back().links;
    node_residual_ = journal_.back().nodes;
    instance_refs_ = journal_.back().instances;
    journal_.pop_back();
  }

  bool same_state(const ResidualLedger& o) const {
    return link_residual_ == o.link_residual_ && node_residual_ == o.node_residual_ &&
           instance_refs_ == o.instance_refs_;
  }

 private:
  struct Snapshot {
    std::vector<double> links;
    std::vector<std::vector<double>> nodes;
    std::map<std::pair<int, int>, int> instances;
  };
  std::vector<double> link_residual_;
  std::vector<std::vector<double>> node_residual_;
  std::map<std::pair<int, int>, int> instance_refs_;  // (node, vnf) -> refcount
  std::vector<Snapshot> journal_;
};

}  // namespace okpi
