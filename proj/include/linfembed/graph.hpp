#pragma once

#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "linfembed/errors.hpp"
#include "linfembed/metric_space.hpp"

namespace linfembed {

template <class S>
struct WeightedGraph {
  std::vector<std::string> nodes;
  struct Edge {
    int u, v;
    S w;
  };
  std::vector<Edge> edges;
  int basepoint = 0;
};

// Dijkstra from every source. Weights must be positive; the graph must be
// connected, otherwise the first unreachable node is named.
template <class S>
MetricSpace<S> shortest_path_metric(const WeightedGraph<S>& g) {
  const int n = static_cast<int>(g.nodes.size());
  if (n == 0) throw InputError("graph has no nodes");
  if (g.basepoint < 0 || g.basepoint >= n) throw InputError("graph basepoint out of range");

  std::vector<std::vector<std::pair<int, S>>> adj(n);
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw InputError("edge endpoint out of range");
    if (e.u == e.v) continue;  // self loops carry no metric information
    if (!(e.w > S{0}))
      throw InputError("edge (" + g.nodes[e.u] + "," + g.nodes[e.v] +
                       ") has nonpositive weight " + to_string_scalar(e.w));
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }

  std::vector<S> table(static_cast<size_t>(n) * n, S{0});
  std::vector<std::optional<S>> dist(n);
  for (int src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), std::nullopt);
    dist[src] = S{0};
    using Item = std::pair<S, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    heap.push({S{0}, src});
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (!dist[u] || du > *dist[u]) continue;
      for (const auto& [v, w] : adj[u]) {
        S cand = du + w;
        if (!dist[v] || cand < *dist[v]) {
          dist[v] = cand;
          heap.push({cand, v});
        }
      }
    }
    for (int v = 0; v < n; ++v) {
      if (!dist[v])
        throw InputError("graph is not connected: node '" + g.nodes[v] +
                         "' is unreachable from '" + g.nodes[src] + "'");
      table[static_cast<size_t>(src) * n + v] = *dist[v];
    }
  }
  return make_space<S>(g.nodes, std::move(table), g.basepoint);
}

}  // namespace linfembed
