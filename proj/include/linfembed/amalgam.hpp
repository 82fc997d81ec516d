#pragma once

#include <string>
#include <vector>

#include "linfembed/errors.hpp"
#include "linfembed/metric_space.hpp"

namespace linfembed {

// Disjoint union of pointed spaces glued by
//   d((p,x),(q,y)) = max{ p, q, d_p(x0^p, x), d_q(x0^q, y) }   for p != q,
// with parts indexed from 1. Cross-part distances are then >= 2, so any
// finite-radius ball meets finitely many parts.
template <class S>
struct AmalgamSpace {
  MetricSpace<S> composite;
  struct PartInfo {
    int index;   // 1-based
    int offset;  // first composite index of this part
    int size;
    int basepoint_local;
  };
  std::vector<PartInfo> parts;

  int part_of(int composite_index) const {
    for (const auto& p : parts)
      if (composite_index >= p.offset && composite_index < p.offset + p.size) return p.index;
    return -1;
  }
};

// The amalgam's basepoint is the basepoint of part 1.
template <class S>
AmalgamSpace<S> amalgamate(const std::vector<MetricSpace<S>>& input) {
  if (input.empty()) throw InputError("amalgamate needs at least one part");
  AmalgamSpace<S> out;
  int total = 0;
  for (size_t p = 0; p < input.size(); ++p) {
    out.parts.push_back({static_cast<int>(p) + 1, total, input[p].size(), input[p].basepoint});
    total += input[p].size();
  }
  std::vector<std::string> names;
  names.reserve(total);
  for (size_t p = 0; p < input.size(); ++p) {
    for (const auto& nm : input[p].points)
      names.push_back("p" + std::to_string(p + 1) + ":" + nm);
  }
  std::vector<S> table(static_cast<size_t>(total) * total, S{0});
  auto at = [&](int i, int j) -> S& { return table[static_cast<size_t>(i) * total + j]; };
  for (size_t p = 0; p < input.size(); ++p) {
    for (size_t q = p; q < input.size(); ++q) {
      const auto& mp = input[p];
      const auto& mq = input[q];
      const int op = out.parts[p].offset;
      const int oq = out.parts[q].offset;
      for (int x = 0; x < mp.size(); ++x) {
        for (int y = 0; y < mq.size(); ++y) {
          S v;
          if (p == q) {
            v = mp.d(x, y);
          } else {
            v = max_of(max_of(S(static_cast<long long>(p + 1)), S(static_cast<long long>(q + 1))),
                       max_of(mp.base_norm(x), mq.base_norm(y)));
          }
          at(op + x, oq + y) = v;
          at(oq + y, op + x) = v;
        }
      }
    }
  }
  out.composite = make_space<S>(std::move(names), std::move(table), out.parts[0].basepoint_local);
  out.composite.metadata["kind"] = "amalgam";
  out.composite.metadata["parts"] = std::to_string(input.size());
  return out;
}

// Largest deviation between a part's own table and the composite restricted
// to it; the inclusion is an isometry exactly when this is 0.
template <class S>
S part_isometry_defect(const AmalgamSpace<S>& a, const MetricSpace<S>& part, int part_index) {
  const auto& info = a.parts.at(static_cast<size_t>(part_index) - 1);
  S worst{0};
  for (int x = 0; x < info.size; ++x)
    for (int y = 0; y < info.size; ++y) {
      S dev = abs_of(S(a.composite.d(info.offset + x, info.offset + y) - part.d(x, y)));
      if (dev > worst) worst = dev;
    }
  return worst;
}

}  // namespace linfembed
