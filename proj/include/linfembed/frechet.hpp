#pragma once

#include <memory>
#include <vector>

#include "linfembed/errors.hpp"
#include "linfembed/metric_space.hpp"

namespace linfembed {

// Element of l_inf(B) for a finite ball B: values aligned with a shared,
// canonically ordered support of point indices.
template <class S>
struct CoordVector {
  std::shared_ptr<const std::vector<int>> support;
  std::vector<S> values;

  S sup_norm() const {
    S best{0};
    for (const S& v : values) {
      S a = abs_of(v);
      if (a > best) best = a;
    }
    return best;
  }

  // position of a point index inside the support, -1 if absent
  int find(int point) const {
    for (size_t k = 0; k < support->size(); ++k)
      if ((*support)[k] == point) return static_cast<int>(k);
    return -1;
  }
};

template <class S>
bool same_support(const CoordVector<S>& a, const CoordVector<S>& b) {
  if (a.support == b.support) return true;
  return a.support && b.support && *a.support == *b.support;
}

using Support = std::shared_ptr<const std::vector<int>>;

template <class S>
Support make_ball_support(const MetricSpace<S>& m, int n) {
  return std::make_shared<const std::vector<int>>(ball(m, n));
}

// The coordinate map t -> (d(s,t) - |s|)_{s in B}: an isometric embedding
// of the ball into l_inf(B). Each coordinate is 1-Lipschitz in t by the
// triangle inequality, and the coordinate s = t attains d(s,t).
template <class S>
CoordVector<S> phi(const MetricSpace<S>& m, const Support& support, int t) {
  bool member = false;
  for (int s : *support)
    if (s == t) {
      member = true;
      break;
    }
  if (!member)
    throw DomainError("phi: point '" + m.name(t) + "' lies outside the requested ball");
  CoordVector<S> out;
  out.support = support;
  out.values.reserve(support->size());
  for (int s : *support) out.values.push_back(S(m.d(s, t) - m.base_norm(s)));
  return out;
}

template <class S>
CoordVector<S> phi(const MetricSpace<S>& m, int n, int t) {
  return phi(m, make_ball_support(m, n), t);
}

// Whole-space coordinate map, one coordinate per point of M. Isometric on
// every valid space; used as the dense baseline against the two-block
// images the shell construction produces.
template <class S>
std::vector<CoordVector<S>> kuratowski(const MetricSpace<S>& m) {
  auto support = std::make_shared<const std::vector<int>>(canonical_order(m));
  std::vector<CoordVector<S>> out;
  out.reserve(m.size());
  for (int t = 0; t < m.size(); ++t) out.push_back(phi(m, support, t));
  return out;
}

// max over pairs in the support of | ||phi(s)-phi(t)||_inf - d(s,t) |.
template <class S>
S phi_isometry_defect(const MetricSpace<S>& m, const Support& support) {
  S worst{0};
  const auto& pts = *support;
  std::vector<CoordVector<S>> images;
  images.reserve(pts.size());
  for (int t : pts) images.push_back(phi(m, support, t));
  for (size_t a = 0; a < pts.size(); ++a) {
    for (size_t b = a + 1; b < pts.size(); ++b) {
      S diff{0};
      for (size_t k = 0; k < pts.size(); ++k) {
        S gap = abs_of(S(images[a].values[k] - images[b].values[k]));
        if (gap > diff) diff = gap;
      }
      S defect = abs_of(S(diff - m.d(pts[a], pts[b])));
      if (defect > worst) worst = defect;
    }
  }
  return worst;
}

}  // namespace linfembed
