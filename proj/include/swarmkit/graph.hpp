#pragma once

#include <functional>
#include <vector>

namespace swarmkit::graph {

// Strongly connected components of an explicit digraph (iterative Tarjan).
// Component ids are assigned in reverse topological order: every edge u->v
// satisfies comp[u] >= comp[v].
struct Sccs {
  std::vector<int> comp;
  int count = 0;
};

Sccs strongly_connected(const std::vector<std::vector<int>>& adj);

// Nodes reachable from the sources.
std::vector<bool> reachable(const std::vector<std::vector<int>>& adj, const std::vector<int>& sources);

// A directed cycle (node sequence, first node repeated implicitly) or empty.
std::vector<int> find_cycle(const std::vector<std::vector<int>>& adj);

}  // namespace swarmkit::graph
