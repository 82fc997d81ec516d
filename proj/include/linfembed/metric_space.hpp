#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "linfembed/errors.hpp"
#include "linfembed/scalar.hpp"

namespace linfembed {

// Finite pointed metric space: named points, dense symmetric distance
// table, distinguished basepoint. |t| denotes the distance to the
// basepoint throughout.
template <class S>
struct MetricSpace {
  std::vector<std::string> points;
  std::vector<S> dist;  // row-major, size() == points.size()^2 when well-formed
  int basepoint = 0;
  std::map<std::string, std::string> metadata;

  int size() const { return static_cast<int>(points.size()); }

  bool table_is_square() const {
    return dist.size() == points.size() * points.size();
  }

  const S& d(int i, int j) const { return dist[static_cast<size_t>(i) * points.size() + j]; }
  S& d(int i, int j) { return dist[static_cast<size_t>(i) * points.size() + j]; }

  // |t| = d(t, basepoint)
  const S& base_norm(int i) const { return d(i, basepoint); }

  int index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (points[i] == name) return i;
    return -1;
  }

  const std::string& name(int i) const { return points[i]; }
};

template <class S>
MetricSpace<S> make_space(std::vector<std::string> points, std::vector<S> dist,
                          int basepoint) {
  if (points.empty()) throw InputError("metric space needs at least one point");
  if (basepoint < 0 || basepoint >= static_cast<int>(points.size()))
    throw InputError("basepoint index out of range");
  std::set<std::string> seen;
  for (const auto& p : points)
    if (!seen.insert(p).second) throw InputError("duplicate point name '" + p + "'");
  MetricSpace<S> m;
  m.points = std::move(points);
  m.dist = std::move(dist);
  m.basepoint = basepoint;
  if (!m.table_is_square())
    throw InputError("distance table is not square: " + std::to_string(m.dist.size()) +
                     " entries for " + std::to_string(m.points.size()) + " points");
  return m;
}

enum class ViolationKind {
  table_shape,  // structural, reported apart from metric violations
  diagonal_nonzero,
  asymmetric,
  nonpositive,  // d(x,y) <= 0 for x != y, including duplicate points at distance 0
  triangle,
};

template <class S>
struct Violation {
  ViolationKind kind;
  int i = -1, j = -1, k = -1;
  S defect{};
};

template <class S>
struct ValidationReport {
  bool structural_ok = true;
  std::vector<Violation<S>> violations;

  bool ok() const { return structural_ok && violations.empty(); }
};

template <class S>
std::string describe(const Violation<S>& v, const MetricSpace<S>& m) {
  std::ostringstream os;
  auto nm = [&](int i) { return i >= 0 && i < m.size() ? m.points[i] : std::string("?"); };
  switch (v.kind) {
    case ViolationKind::table_shape:
      os << "table shape mismatch (structural)";
      break;
    case ViolationKind::diagonal_nonzero:
      os << "d(" << nm(v.i) << "," << nm(v.i) << ") = " << to_string_scalar(v.defect)
         << " != 0";
      break;
    case ViolationKind::asymmetric:
      os << "d(" << nm(v.i) << "," << nm(v.j) << ") != d(" << nm(v.j) << "," << nm(v.i)
         << "), gap " << to_string_scalar(v.defect);
      break;
    case ViolationKind::nonpositive:
      os << "d(" << nm(v.i) << "," << nm(v.j) << ") = " << to_string_scalar(v.defect)
         << " <= 0 for distinct points";
      break;
    case ViolationKind::triangle:
      os << "triangle violation at (" << nm(v.i) << "," << nm(v.j) << "," << nm(v.k)
         << "), defect " << to_string_scalar(v.defect);
      break;
  }
  return os.str();
}

// Checks every metric axiom by exhaustive scan. Structural problems (non
// square table) short-circuit; they are not metric violations.
template <class S>
ValidationReport<S> validate(const MetricSpace<S>& m) {
  using P = check_policy<S>;
  ValidationReport<S> report;
  if (!m.table_is_square() || m.basepoint < 0 || m.basepoint >= m.size()) {
    report.structural_ok = false;
    report.violations.push_back({ViolationKind::table_shape, -1, -1, -1, S{}});
    return report;
  }
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    if (!P::eq(m.d(i, i), S{0}))
      report.violations.push_back({ViolationKind::diagonal_nonzero, i, i, -1, m.d(i, i)});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!P::eq(m.d(i, j), m.d(j, i))) {
        report.violations.push_back(
            {ViolationKind::asymmetric, i, j, -1, abs_of(S(m.d(i, j) - m.d(j, i)))});
        continue;
      }
      if (!(m.d(i, j) > S{0}))
        report.violations.push_back({ViolationKind::nonpositive, i, j, -1, m.d(i, j)});
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        // all three sides of the unordered triple
        const S& dij = m.d(i, j);
        const S& dik = m.d(i, k);
        const S& djk = m.d(j, k);
        if (!P::le(dij, S(dik + djk)))
          report.violations.push_back({ViolationKind::triangle, i, k, j, S(dij - dik - djk)});
        if (!P::le(dik, S(dij + djk)))
          report.violations.push_back({ViolationKind::triangle, i, j, k, S(dik - dij - djk)});
        if (!P::le(djk, S(dij + dik)))
          report.violations.push_back({ViolationKind::triangle, j, i, k, S(djk - dij - dik)});
      }
    }
  }
  return report;
}

// Point indices ordered by (|t|, input index); every ball is a prefix.
template <class S>
std::vector<int> canonical_order(const MetricSpace<S>& m) {
  std::vector<int> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return m.base_norm(a) < m.base_norm(b);
  });
  return order;
}

// Closed ball B_n = { s : |s| <= 2^{n+1} } in canonical order.
template <class S>
std::vector<int> ball(const MetricSpace<S>& m, int n) {
  const S radius = pow2<S>(n + 1);
  std::vector<int> order = canonical_order(m);
  std::vector<int> result;
  for (int idx : order) {
    if (m.base_norm(idx) <= radius) result.push_back(idx);
  }
  return result;
}

template <class S>
struct RescaleResult {
  MetricSpace<S> space;
  S scale;
};

// Dilates the metric so the smallest nonzero |t| becomes exactly 2; the
// closed unit ball around the basepoint then holds only the basepoint,
// with margin. Dilations do not change the distortion of any embedding.
template <class S>
RescaleResult<S> rescale_to_unit_gap(const MetricSpace<S>& m) {
  if (m.size() < 2)
    throw DomainError("rescale needs at least 2 points; a single point embeds as 0");
  bool found = false;
  S min_norm{};
  for (int i = 0; i < m.size(); ++i) {
    if (i == m.basepoint) continue;
    const S& v = m.base_norm(i);
    if (!found || v < min_norm) {
      min_norm = v;
      found = true;
    }
  }
  if (!(min_norm > S{0}))
    throw DomainError("cannot rescale: a point other than the basepoint sits at distance 0");
  S scale = S{2} / min_norm;
  RescaleResult<S> out{m, scale};
  for (auto& v : out.space.dist) v *= scale;
  return out;
}

}  // namespace linfembed
