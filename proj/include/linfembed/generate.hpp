#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "linfembed/errors.hpp"
#include "linfembed/graph.hpp"
#include "linfembed/metric_space.hpp"
#include "linfembed/rng.hpp"

namespace linfembed {

// Lattice points of the closed l1 ball of the given radius in Z^dim, unit
// edges; the induced path metric is the l1 distance. Basepoint: origin.
struct GridFamily {
  int dim = 1;
  int radius = 1;
};

// G(n, p) with seeded integer weights in {1,2,3}. If sampling leaves the
// graph disconnected, bridge edges are drawn deterministically from the
// same stream and the repair is flagged in metadata.
struct RandomGraphFamily {
  int n = 2;
  double p = 0.2;
  uint64_t seed = 0;
};

// Random attachment tree: node i hangs off a uniform earlier node.
struct RandomTreeFamily {
  int n = 2;
  uint64_t seed = 0;
};

// n distinct points with dyadic coordinates k/1024 in [0,1]^dim under the
// sup metric. Basepoint: point 0.
struct UniformPointsFamily {
  int n = 2;
  int dim = 2;
  uint64_t seed = 0;
};

using Family = std::variant<GridFamily, RandomGraphFamily, RandomTreeFamily, UniformPointsFamily>;

namespace detail {

inline void enumerate_l1_ball(int dim, int radius, std::vector<int>& current,
                              std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == dim) {
    out.push_back(current);
    return;
  }
  int used = 0;
  for (int c : current) used += c < 0 ? -c : c;
  for (int x = -(radius - used); x <= radius - used; ++x) {
    current.push_back(x);
    enumerate_l1_ball(dim, radius, current, out);
    current.pop_back();
  }
}

inline std::string coord_name(const std::vector<int>& c) {
  std::ostringstream os;
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) os << ",";
    os << c[i];
  }
  return os.str();
}

}  // namespace detail

template <class S>
MetricSpace<S> generate(const GridFamily& f) {
  if (f.dim < 1 || f.dim > 4) throw InputError("grid dim must be in 1..4");
  if (f.radius < 1 || f.radius > 64) throw InputError("grid radius must be in 1..64");
  std::vector<std::vector<int>> pts;
  std::vector<int> current;
  detail::enumerate_l1_ball(f.dim, f.radius, current, pts);
  const int n = static_cast<int>(pts.size());
  std::vector<std::string> names(n);
  int origin = -1;
  for (int i = 0; i < n; ++i) {
    names[i] = detail::coord_name(pts[i]);
    bool zero = true;
    for (int c : pts[i]) zero = zero && c == 0;
    if (zero) origin = i;
  }
  std::vector<S> table(static_cast<size_t>(n) * n, S{0});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      long long l1 = 0;
      for (int k = 0; k < f.dim; ++k) l1 += std::abs(pts[i][k] - pts[j][k]);
      table[static_cast<size_t>(i) * n + j] = S(l1);
    }
  }
  MetricSpace<S> m = make_space<S>(std::move(names), std::move(table), origin);
  m.metadata["family"] = "grid";
  m.metadata["dim"] = std::to_string(f.dim);
  m.metadata["radius"] = std::to_string(f.radius);
  return m;
}

template <class S>
MetricSpace<S> generate(const RandomGraphFamily& f) {
  if (f.n < 2 || f.n > 4096) throw InputError("random_graph n must be in 2..4096");
  if (!(f.p >= 0.0 && f.p <= 1.0)) throw InputError("random_graph p must be in [0,1]");
  SplitMix64 rng(mix_seed(f.seed, 0x67726170ULL));
  const uint64_t threshold =
      f.p >= 1.0 ? ~0ULL : static_cast<uint64_t>(f.p * 18446744073709551616.0);
  WeightedGraph<S> g;
  g.nodes.resize(f.n);
  for (int i = 0; i < f.n; ++i) g.nodes[i] = std::to_string(i);
  for (int i = 0; i < f.n; ++i) {
    for (int j = i + 1; j < f.n; ++j) {
      uint64_t draw = rng.next();
      if (draw < threshold) {
        S w = S(static_cast<long long>(1 + rng.below(3)));
        g.edges.push_back({i, j, w});
      }
    }
  }
  // connectivity repair: bridge every extra component to the first one
  std::vector<int> comp(f.n, -1);
  std::vector<std::vector<int>> adj(f.n);
  for (const auto& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<std::vector<int>> components;
  for (int i = 0; i < f.n; ++i) {
    if (comp[i] >= 0) continue;
    int id = static_cast<int>(components.size());
    components.push_back({});
    std::vector<int> stack{i};
    comp[i] = id;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      components[id].push_back(u);
      for (int v : adj[u])
        if (comp[v] < 0) {
          comp[v] = id;
          stack.push_back(v);
        }
    }
  }
  int repaired = 0;
  for (size_t c = 1; c < components.size(); ++c) {
    int u = components[0][rng.below(components[0].size())];
    int v = components[c][rng.below(components[c].size())];
    g.edges.push_back({u, v, S{1}});
    ++repaired;
  }
  MetricSpace<S> m = shortest_path_metric(g);
  m.metadata["family"] = "random_graph";
  m.metadata["n"] = std::to_string(f.n);
  m.metadata["seed"] = std::to_string(f.seed);
  if (repaired > 0) m.metadata["connectivity_repair_edges"] = std::to_string(repaired);
  return m;
}

template <class S>
MetricSpace<S> generate(const RandomTreeFamily& f) {
  if (f.n < 2 || f.n > 4096) throw InputError("random_tree n must be in 2..4096");
  SplitMix64 rng(mix_seed(f.seed, 0x74726565ULL));
  WeightedGraph<S> g;
  g.nodes.resize(f.n);
  for (int i = 0; i < f.n; ++i) g.nodes[i] = std::to_string(i);
  for (int i = 1; i < f.n; ++i) {
    int parent = static_cast<int>(rng.below(static_cast<uint64_t>(i)));
    S w = S(static_cast<long long>(1 + rng.below(3)));
    g.edges.push_back({parent, i, w});
  }
  MetricSpace<S> m = shortest_path_metric(g);
  m.metadata["family"] = "random_tree";
  m.metadata["n"] = std::to_string(f.n);
  m.metadata["seed"] = std::to_string(f.seed);
  return m;
}

template <class S>
MetricSpace<S> generate(const UniformPointsFamily& f) {
  if (f.n < 2 || f.n > 4096) throw InputError("uniform_points n must be in 2..4096");
  if (f.dim < 1 || f.dim > 16) throw InputError("uniform_points dim must be in 1..16");
  SplitMix64 rng(mix_seed(f.seed, 0x756e6966ULL));
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> coords;
  int attempts = 0;
  while (static_cast<int>(coords.size()) < f.n) {
    if (++attempts > 64 * f.n)
      throw InputError("uniform_points could not draw distinct coordinates");
    std::vector<int> c(f.dim);
    for (int k = 0; k < f.dim; ++k) c[k] = static_cast<int>(rng.below(1025));
    if (seen.insert(c).second) coords.push_back(std::move(c));
  }
  const int n = f.n;
  std::vector<std::string> names(n);
  for (int i = 0; i < n; ++i) names[i] = std::to_string(i);
  std::vector<S> table(static_cast<size_t>(n) * n, S{0});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      long long best = 0;
      for (int k = 0; k < f.dim; ++k)
        best = std::max(best, static_cast<long long>(std::abs(coords[i][k] - coords[j][k])));
      table[static_cast<size_t>(i) * n + j] = from_ratio<S>(best, 1024);
    }
  }
  MetricSpace<S> m = make_space<S>(std::move(names), std::move(table), 0);
  m.metadata["family"] = "uniform_points";
  m.metadata["n"] = std::to_string(f.n);
  m.metadata["dim"] = std::to_string(f.dim);
  m.metadata["seed"] = std::to_string(f.seed);
  return m;
}

template <class S>
MetricSpace<S> generate(const Family& f) {
  return std::visit([](const auto& fam) { return generate<S>(fam); }, f);
}

}  // namespace linfembed
