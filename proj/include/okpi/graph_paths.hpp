#pragma once

#include <vector>

#include "okpi/model.hpp"

namespace okpi {

struct PhysicalPath {
  std::vector<int> links;  // physical link indices in traversal order
  double delay_ms = 0.0;
};

// K minimum-delay simple paths between two physical vertices. Location
// vertices are terminals only, never transit. With `reversed`, traversal runs
// against link direction (the realization then lists the actual directed
// links in traffic order, i.e. reversed traversal order). Deterministic:
// ties break on the lexicographic link-index sequence.
std::vector<PhysicalPath> k_shortest_paths(const PhysicalGraph& g, int src, int dst,
                                           int k, bool reversed = false);

// All simple paths with at most `max_links` links, DFS order by link index.
// Returns false if more than `cap` paths exist (output is then unusable).
bool all_simple_paths(const PhysicalGraph& g, int src, int dst, int max_links,
                      long cap, bool reversed, std::vector<PhysicalPath>* out);

}  // namespace okpi
