#include "okpi/graph_paths.hpp"

#include <algorithm>
#include <set>

namespace okpi {
namespace {

struct Label {
  double delay = kInfinity;
  std::vector<int> links;
  bool operator<(const Label& o) const {
    if (delay != o.delay) return delay < o.delay;
    if (links.size() != o.links.size()) return links.size() < o.links.size();
    return links < o.links;
  }
};

// Deterministic single-source shortest path by (delay, link count, link
// sequence) with per-call banned links/vertices. Label-correcting sweep; the
// graphs here are tiny.
bool shortest_path(const PhysicalGraph& g, int src, int dst, bool reversed,
                   const std::set<int>& banned_links, const std::set<int>& banned_vertices,
                   PhysicalPath* out) {
  const int n = g.vertex_count();
  std::vector<Label> label(static_cast<size_t>(n));
  label[static_cast<size_t>(src)] = Label{0.0, {}};
  bool changed = true;
  for (int round = 0; round < n && changed; ++round) {
    changed = false;
    for (size_t li = 0; li < g.links.size(); ++li) {
      if (banned_links.count(static_cast<int>(li)) > 0) continue;
      const auto& link = g.links[li];
      int from = reversed ? link.to : link.from;
      int to = reversed ? link.from : link.to;
      if (banned_vertices.count(to) > 0) continue;
      // locations are terminals, never transit
      if (from != src && !g.is_node_vertex(from)) continue;
      if (to != dst && !g.is_node_vertex(to)) continue;
      const Label& cur = label[static_cast<size_t>(from)];
      if (!std::isfinite(cur.delay)) continue;
      Label cand{cur.delay + link.delay_ms, cur.links};
      cand.links.push_back(static_cast<int>(li));
      if (cand < label[static_cast<size_t>(to)]) {
        label[static_cast<size_t>(to)] = std::move(cand);
        changed = true;
      }
    }
  }
  const Label& res = label[static_cast<size_t>(dst)];
  if (!std::isfinite(res.delay)) return false;
  out->delay_ms = res.delay;
  out->links = res.links;
  if (reversed) std::reverse(out->links.begin(), out->links.end());
  return true;
}

std::vector<int> path_vertices(const PhysicalGraph& g, int src, const PhysicalPath& p,
                               bool reversed) {
  std::vector<int> vs{src};
  // traversal order: for reversed paths, links are stored in traffic order,
  // so walk them from the back.
  if (!reversed) {
    for (int l : p.links) vs.push_back(g.links[static_cast<size_t>(l)].to);
  } else {
    for (auto it = p.links.rbegin(); it != p.links.rend(); ++it)
      vs.push_back(g.links[static_cast<size_t>(*it)].from);
  }
  return vs;
}

}  // namespace

std::vector<PhysicalPath> k_shortest_paths(const PhysicalGraph& g, int src, int dst,
                                           int k, bool reversed) {
  std::vector<PhysicalPath> found;
  if (src == dst || k <= 0) return found;
  PhysicalPath first;
  if (!shortest_path(g, src, dst, reversed, {}, {}, &first)) return found;
  found.push_back(first);

  auto cmp = [](const PhysicalPath& a, const PhysicalPath& b) {
    if (a.delay_ms != b.delay_ms) return a.delay_ms < b.delay_ms;
    if (a.links.size() != b.links.size()) return a.links.size() < b.links.size();
    return a.links < b.links;
  };
  std::vector<PhysicalPath> frontier;  // Yen candidate pool, kept sorted

  while (static_cast<int>(found.size()) < k) {
    const PhysicalPath& last = found.back();
    std::vector<int> last_vs = path_vertices(g, src, last, reversed);
    // traversal-order link list of `last`
    std::vector<int> last_links = last.links;
    if (reversed) std::reverse(last_links.begin(), last_links.end());

    for (size_t spur = 0; spur + 1 < last_vs.size(); ++spur) {
      std::set<int> banned_links;
      std::set<int> banned_vertices;
      // Ban the next link of every accepted path sharing this root.
      for (const auto& p : found) {
        std::vector<int> p_links = p.links;
        if (reversed) std::reverse(p_links.begin(), p_links.end());
        if (p_links.size() <= spur) continue;
        bool same_root = true;
        for (size_t i = 0; i < spur; ++i)
          if (p_links[i] != last_links[i]) {
            same_root = false;
            break;
          }
        if (same_root) banned_links.insert(p_links[spur]);
      }
      for (size_t i = 0; i < spur; ++i) banned_vertices.insert(last_vs[i]);

      PhysicalPath tail;
      if (!shortest_path(g, last_vs[spur], dst, reversed, banned_links, banned_vertices,
                         &tail))
        continue;
      PhysicalPath cand;
      std::vector<int> cand_links(last_links.begin(),
                                  last_links.begin() + static_cast<long>(spur));
      std::vector<int> tail_links = tail.links;
      if (reversed) std::reverse(tail_links.begin(), tail_links.end());
      cand_links.insert(cand_links.end(), tail_links.begin(), tail_links.end());
      cand.delay_ms = 0.0;
      for (int l : cand_links) cand.delay_ms += g.links[static_cast<size_t>(l)].delay_ms;
      if (reversed) std::reverse(cand_links.begin(), cand_links.end());
      cand.links = std::move(cand_links);

      bool dup = false;
      for (const auto& p : found)
        if (p.links == cand.links) dup = true;
      for (const auto& p : frontier)
        if (p.links == cand.links) dup = true;
      if (!dup) frontier.push_back(std::move(cand));
    }
    if (frontier.empty()) break;
    std::sort(frontier.begin(), frontier.end(), cmp);
    found.push_back(frontier.front());
    frontier.erase(frontier.begin());
  }
  return found;
}

namespace {

void dfs_paths(const PhysicalGraph& g, int cur, int dst, int max_links, long cap,
               bool reversed, std::vector<int>* stack_links,
               std::vector<bool>* visited, std::vector<PhysicalPath>* out, bool* overflow) {
  if (*overflow) return;
  if (cur == dst) {
    if (static_cast<long>(out->size()) >= cap) {
      *overflow = true;
      return;
    }
    PhysicalPath p;
    p.links = *stack_links;
    for (int l : p.links) p.delay_ms += g.links[static_cast<size_t>(l)].delay_ms;
    if (reversed) std::reverse(p.links.begin(), p.links.end());
    out->push_back(std::move(p));
    return;
  }
  if (static_cast<int>(stack_links->size()) >= max_links) return;
  if (!stack_links->empty() && !g.is_node_vertex(cur)) return;  // locations: no transit
  const auto& adjacency = reversed ? g.in_links : g.out_links;
  for (int li : adjacency[static_cast<size_t>(cur)]) {
    const auto& link = g.links[static_cast<size_t>(li)];
    int next = reversed ? link.from : link.to;
    if ((*visited)[static_cast<size_t>(next)]) continue;
    (*visited)[static_cast<size_t>(next)] = true;
    stack_links->push_back(li);
    dfs_paths(g, next, dst, max_links, cap, reversed, stack_links, visited, out, overflow);
    stack_links->pop_back();
    (*visited)[static_cast<size_t>(next)] = false;
  }
}

}  // namespace

bool all_simple_paths(const PhysicalGraph& g, int src, int dst, int max_links,
                      long cap, bool reversed, std::vector<PhysicalPath>* out) {
  out->clear();
  if (src == dst) return true;
  std::vector<bool> visited(static_cast<size_t>(g.vertex_count()), false);
  visited[static_cast<size_t>(src)] = true;
  std::vector<int> stack_links;
  bool overflow = false;
  dfs_paths(g, src, dst, max_links, cap, reversed, &stack_links, &visited, out, &overflow);
  return !overflow;
}

}  // namespace okpi
