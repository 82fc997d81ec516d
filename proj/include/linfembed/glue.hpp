#pragma once

#include <optional>
#include <string>
#include <vector>

#include "linfembed/block_space.hpp"
#include "linfembed/errors.hpp"
#include "linfembed/frechet.hpp"
#include "linfembed/metric_space.hpp"

namespace linfembed {

// Every non-basepoint point t gets the unique shell n with
// 2^n <= |t| < 2^{n+1} and the interpolation weight
// lambda = (2^{n+1} - |t|) / 2^n, which lies in (0, 1] and equals 1
// exactly on the lower shell boundary.
template <class S>
struct ShellInfo {
  int shell = 0;
  S lambda{};
};

template <class S>
struct ShellAssignment {
  std::vector<std::optional<ShellInfo<S>>> entries;  // empty at the basepoint
  int max_shell = -1;
};

template <class S>
ShellAssignment<S> assign_shells(const MetricSpace<S>& m) {
  ShellAssignment<S> out;
  out.entries.resize(m.size());
  for (int i = 0; i < m.size(); ++i) {
    if (i == m.basepoint) continue;
    const S& norm = m.base_norm(i);
    if (norm < S{1})
      throw DomainError("rescaling contract violated: |" + m.name(i) + "| = " +
                        to_string_scalar(norm) + " < 1");
    int n = shell_of(norm);
    S lambda = (pow2<S>(n + 1) - norm) / pow2<S>(n);
    out.entries[i] = ShellInfo<S>{n, lambda};
    out.max_shell = std::max(out.max_shell, n);
  }
  return out;
}

namespace detail {

// Image of one point under the two-block formula
//   f(t) = lambda * T_n(phi_n(t)) + (1 - lambda) * T_{n+1}(phi_{n+1}(t)),
// with zero-coefficient blocks omitted.
template <class S>
BlockVector<S> image_for(const MetricSpace<S>& m,
                         const std::vector<const BlockOperator<S>*>& by_shell, int t, int n,
                         const S& lambda) {
  auto op_at = [&](int k) -> const BlockOperator<S>& {
    if (k < 0 || k >= static_cast<int>(by_shell.size()) || by_shell[k] == nullptr)
      throw DomainError("no block operator for shell " + std::to_string(k));
    return *by_shell[k];
  };
  BlockVector<S> z;
  if (lambda != S{0}) {
    const auto& op = op_at(n);
    CoordVector<S> fu = op.apply(phi(m, op.support, t));
    for (auto& v : fu.values) v *= lambda;
    z.blocks.emplace(n, std::move(fu));
  }
  if (lambda != S{1}) {
    const auto& op = op_at(n + 1);
    const S weight = S{1} - lambda;
    CoordVector<S> fv = op.apply(phi(m, op.support, t));
    for (auto& v : fv.values) v *= weight;
    z.blocks.emplace(n + 1, std::move(fv));
  }
  return z;
}

template <class S>
std::vector<const BlockOperator<S>*> index_by_shell(const std::vector<BlockOperator<S>>& ops) {
  int top = -1;
  for (const auto& op : ops) top = std::max(top, op.shell);
  std::vector<const BlockOperator<S>*> by_shell(static_cast<size_t>(top + 1), nullptr);
  for (const auto& op : ops) by_shell[op.shell] = &op;
  return by_shell;
}

}  // namespace detail

template <class S>
struct Embedding {
  MetricSpace<S> space;  // rescaled
  S scale{1};            // dilation applied to the original input
  std::vector<BlockOperator<S>> operators;
  ShellAssignment<S> shells;
  std::vector<BlockVector<S>> image;

  const BlockVector<S>& image_of(int i) const { return image.at(static_cast<size_t>(i)); }
};

// Builds the embedding; the basepoint maps to 0 and every other point
// occupies blocks n(t) and n(t)+1 only.
template <class S>
Embedding<S> embed(const MetricSpace<S>& m, std::vector<BlockOperator<S>> operators,
                   const S& scale = S{1}) {
  Embedding<S> e;
  e.space = m;
  e.scale = scale;
  e.operators = std::move(operators);
  e.shells = assign_shells(m);
  auto by_shell = detail::index_by_shell(e.operators);
  e.image.resize(m.size());
  for (int t = 0; t < m.size(); ++t) {
    if (t == m.basepoint) continue;  // f(t0) = 0, the empty block vector
    const auto& info = *e.shells.entries[t];
    e.image[t] = detail::image_for(m, by_shell, t, info.shell, info.lambda);
  }
  return e;
}

template <class S>
const BlockVector<S>& evaluate(const Embedding<S>& e, const std::string& point) {
  int idx = e.space.index_of(point);
  if (idx < 0) throw InputError("unknown point '" + point + "'");
  return e.image_of(idx);
}

template <class S>
S pairwise_image_distance(const Embedding<S>& e, int i, int j) {
  return diff_norm(e.image_of(i), e.image_of(j));
}

template <class S>
S pairwise_image_distance(const Embedding<S>& e, const std::string& a, const std::string& b) {
  int i = e.space.index_of(a);
  int j = e.space.index_of(b);
  if (i < 0 || j < 0) throw InputError("unknown point in pair (" + a + "," + b + ")");
  return pairwise_image_distance(e, i, j);
}

template <class S>
struct BoundaryCheckReport {
  bool ok = true;
  int checked = 0;
  S max_deviation{0};
  struct Row {
    int point;
    int upper_shell;  // |t| = 2^{upper_shell}
    S deviation;
  };
  std::vector<Row> rows;
};

// Points with |t| on a shell boundary 2^k admit two readings: shell k with
// weight 1 and shell k-1 with weight 0. Both must produce the same block
// vector; the half-open shell intervals make the glued map well defined.
template <class S>
BoundaryCheckReport<S> boundary_consistency_check(const MetricSpace<S>& m,
                                                  const std::vector<BlockOperator<S>>& ops) {
  ShellAssignment<S> shells = assign_shells(m);
  auto by_shell = detail::index_by_shell(ops);
  BoundaryCheckReport<S> report;
  for (int t = 0; t < m.size(); ++t) {
    if (t == m.basepoint) continue;
    const auto& info = *shells.entries[t];
    const int k = info.shell;
    if (k < 1) continue;  // no lower shell to compare against
    if (m.base_norm(t) != pow2<S>(k)) continue;
    BlockVector<S> upper = detail::image_for(m, by_shell, t, k, S{1});
    BlockVector<S> lower = detail::image_for(m, by_shell, t, k - 1, S{0});
    S dev = diff_norm(upper, lower);
    report.rows.push_back({t, k, dev});
    ++report.checked;
    if (dev > report.max_deviation) report.max_deviation = dev;
    if (!(dev == S{0})) report.ok = false;
  }
  return report;
}

}  // namespace linfembed
