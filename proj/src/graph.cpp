#include "swarmkit/graph.hpp"

#include <algorithm>

namespace swarmkit::graph {

Sccs strongly_connected(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  Sccs out;
  out.comp.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  std::vector<std::pair<int, std::size_t>> call;
  int next = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i == 0) {
        index[v] = low[v] = next++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (i < adj[v].size()) {
        int w = adj[v][i++];
        if (index[w] < 0) {
          call.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.comp[w] = out.count;
        } while (w != v);
        ++out.count;
      }
      int done = v;
      call.pop_back();
      if (!call.empty()) {
        int parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return out;
}

std::vector<bool> reachable(const std::vector<std::vector<int>>& adj, const std::vector<int>& sources) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<int> work;
  for (int s : sources) {
    if (!seen[s]) {
      seen[s] = true;
      work.push_back(s);
    }
  }
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        work.push_back(w);
      }
    }
  }
  return seen;
}

std::vector<int> find_cycle(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> color(n, 0), parent(n, -1);
  std::vector<std::pair<int, std::size_t>> call;
  for (int root = 0; root < n; ++root) {
    if (color[root] != 0) continue;
    call.emplace_back(root, 0);
    color[root] = 1;
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i < adj[v].size()) {
        int w = adj[v][i++];
        if (color[w] == 0) {
          color[w] = 1;
          parent[w] = v;
          call.emplace_back(w, 0);
        } else if (color[w] == 1) {
          std::vector<int> cyc;
          for (int x = v; x != w; x = parent[x]) cyc.push_back(x);
          cyc.push_back(w);
          std::reverse(cyc.begin(), cyc.end());
          return cyc;
        }
      } else {
        color[v] = 2;
        call.pop_back();
      }
    }
  }
  return {};
}

}  // namespace swarmkit::graph
