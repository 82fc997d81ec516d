#pragma once

#include <functional>
#include <vector>

#include "linfembed/errors.hpp"
#include "linfembed/generate.hpp"
#include "linfembed/metric_space.hpp"

namespace linfembed {

// C(r) samples: the largest cardinality of a closed radius-r ball.
template <class S>
struct GeometryProfile {
  std::vector<S> radii;
  std::vector<int> counts;
};

// Access pattern for spaces that are only locally materialized: the oracle
// returns the closed ball of the requested radius around the basepoint, as
// a consistent finite space containing the basepoint.
template <class S>
struct GrowableSpace {
  std::function<MetricSpace<S>(const S&)> ball_oracle;
};

// Z^dim with the l1 metric, materialized around the origin.
template <class S>
GrowableSpace<S> lattice_growable(int dim) {
  GrowableSpace<S> g;
  g.ball_oracle = [dim](const S& radius) {
    if (!(radius >= S{0})) throw InputError("ball radius must be nonnegative");
    int r = 0;
    while (S(r + 1) <= radius) ++r;  // floor for the integer lattice
    if (r == 0) {
      // the closed ball holds the origin alone
      std::string origin = "0";
      for (int k = 1; k < dim; ++k) origin += ",0";
      return make_space<S>({origin}, {S{0}}, 0);
    }
    return generate<S>(GridFamily{dim, r});
  };
  return g;
}

namespace detail {

template <class S>
void require_increasing_radii(const std::vector<S>& radii) {
  for (size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > S{0})) throw InputError("radii must be positive");
    if (k > 0 && !(radii[k] > radii[k - 1])) throw InputError("radii must be increasing");
  }
}

}  // namespace detail

template <class S>
GeometryProfile<S> geometry_profile(const MetricSpace<S>& m, const std::vector<S>& radii) {
  detail::require_increasing_radii(radii);
  GeometryProfile<S> prof;
  prof.radii = radii;
  for (const S& r : radii) {
    int best = 0;
    for (int center = 0; center < m.size(); ++center) {
      int count = 0;
      for (int other = 0; other < m.size(); ++other)
        if (m.d(center, other) <= r) ++count;
      best = std::max(best, count);
    }
    prof.counts.push_back(best);
  }
  return prof;
}

// Centers range over the materialized ball only.
template <class S>
GeometryProfile<S> geometry_profile(const GrowableSpace<S>& g, const std::vector<S>& radii) {
  detail::require_increasing_radii(radii);
  GeometryProfile<S> prof;
  prof.radii = radii;
  for (const S& r : radii) {
    MetricSpace<S> m = g.ball_oracle(r);
    GeometryProfile<S> one = geometry_profile(m, std::vector<S>{r});
    prof.counts.push_back(one.counts[0]);
  }
  return prof;
}

}  // namespace linfembed
