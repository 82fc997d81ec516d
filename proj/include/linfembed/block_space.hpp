#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "linfembed/errors.hpp"
#include "linfembed/frechet.hpp"
#include "linfembed/metric_space.hpp"
#include "linfembed/rng.hpp"

namespace linfembed {

template <class S>
struct Matrix {
  int n = 0;
  std::vector<S> a;  // row-major

  static Matrix identity(int n) {
    Matrix m;
    m.n = n;
    m.a.assign(static_cast<size_t>(n) * n, S{0});
    for (int i = 0; i < n; ++i) m.at(i, i) = S{1};
    return m;
  }

  S& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const S& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  // l_inf -> l_inf operator norm: max absolute row sum, exact.
  S inf_norm() const {
    S best{0};
    for (int i = 0; i < n; ++i) {
      S row{0};
      for (int j = 0; j < n; ++j) row += abs_of(at(i, j));
      if (row > best) best = row;
    }
    return best;
  }

  std::vector<S> apply(const std::vector<S>& x) const {
    std::vector<S> y(static_cast<size_t>(n), S{0});
    for (int i = 0; i < n; ++i) {
      S acc{0};
      for (int j = 0; j < n; ++j) acc += at(i, j) * x[j];
      y[i] = acc;
    }
    return y;
  }

  void scale_all(const S& factor) {
    for (auto& v : a) v *= factor;
  }

  // Gauss-Jordan with largest-pivot selection; works for exact and float
  // scalars alike. Returns nothing if singular.
  std::optional<Matrix> inverse() const {
    Matrix work = *this;
    Matrix inv = identity(n);
    for (int col = 0; col < n; ++col) {
      int pivot = -1;
      S best{0};
      for (int r = col; r < n; ++r) {
        S cand = abs_of(work.at(r, col));
        if (cand > best) {
          best = cand;
          pivot = r;
        }
      }
      if (pivot < 0) return std::nullopt;
      if (pivot != col) {
        for (int j = 0; j < n; ++j) {
          std::swap(work.at(pivot, j), work.at(col, j));
          std::swap(inv.at(pivot, j), inv.at(col, j));
        }
      }
      S p = work.at(col, col);
      for (int j = 0; j < n; ++j) {
        work.at(col, j) /= p;
        inv.at(col, j) /= p;
      }
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        S factor = work.at(r, col);
        if (factor == S{0}) continue;
        for (int j = 0; j < n; ++j) {
          work.at(r, j) -= factor * work.at(col, j);
          inv.at(r, j) -= factor * inv.at(col, j);
        }
      }
    }
    return inv;
  }
};

enum class OperatorMode { identity, half, random };

inline const char* to_string(OperatorMode m) {
  switch (m) {
    case OperatorMode::identity: return "identity";
    case OperatorMode::half: return "half";
    case OperatorMode::random: return "random";
  }
  return "?";
}

inline std::optional<OperatorMode> operator_mode_from(const std::string& s) {
  if (s == "identity") return OperatorMode::identity;
  if (s == "half") return OperatorMode::half;
  if (s == "random") return OperatorMode::random;
  return std::nullopt;
}

// Invertible map on l_inf(B_n) with certified two-sided bounds:
//   conorm_bound * ||u|| <= ||T u|| <= norm_bound * ||u||,
// where 1/2 <= conorm_bound <= norm_bound <= 1. Identity and half modes
// need no stored matrix.
template <class S>
struct BlockOperator {
  int shell = 0;
  Support support;
  OperatorMode mode = OperatorMode::identity;
  uint64_t seed = 0;
  std::optional<Matrix<S>> matrix;  // engaged for random mode
  S norm_bound{1};
  S conorm_bound{1};

  CoordVector<S> apply(const CoordVector<S>& u) const {
    if (!(u.support == support || (u.support && support && *u.support == *support)))
      throw DomainError("operator applied across mismatched ball indexing");
    CoordVector<S> out;
    out.support = support;
    switch (mode) {
      case OperatorMode::identity:
        out.values = u.values;
        break;
      case OperatorMode::half: {
        out.values = u.values;
        const S half = from_ratio<S>(1, 2);
        for (auto& v : out.values) v *= half;
        break;
      }
      case OperatorMode::random:
        out.values = matrix->apply(u.values);
        break;
    }
    return out;
  }
};

struct OperatorOptions {
  int max_attempts = 32;
  // entries of the perturbation are numerator/(64*dim) with |numerator| <= 16,
  // keeping the row sums of E at most 1/4
  long long max_numerator = 16;
  long long denominator_factor = 64;
  long long perturbation_scale = 1;  // >1 deliberately breaks certification
};

namespace detail {

template <class S>
BlockOperator<S> sample_random_operator(int shell, const Support& support, uint64_t seed,
                                        const OperatorOptions& opts) {
  const int msize = static_cast<int>(support->size());
  std::vector<double> attempted_conditions;
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    SplitMix64 rng(mix_seed(mix_seed(seed, static_cast<uint64_t>(shell)),
                            static_cast<uint64_t>(attempt)));
    Matrix<S> mat = Matrix<S>::identity(msize);
    const long long den = opts.denominator_factor * msize;
    for (int i = 0; i < msize; ++i) {
      for (int j = 0; j < msize; ++j) {
        long long num = static_cast<long long>(rng.below(2 * opts.max_numerator + 1)) -
                        opts.max_numerator;
        mat.at(i, j) += from_ratio<S>(num * opts.perturbation_scale, den);
      }
    }
    S nrm = mat.inf_norm();
    if (!(nrm > S{0})) continue;
    if constexpr (!scalar_traits<S>::exact) {
      nrm *= 1.0 + 1e-12;  // keeps the scaled row sums at most 1 under rounding
    }
    mat.scale_all(S{1} / nrm);
    auto inv = mat.inverse();
    if (!inv) {
      attempted_conditions.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    S norm_bound = mat.inf_norm();
    S inv_norm = inv->inf_norm();
    S conorm_bound = S{1} / inv_norm;
    const S half = from_ratio<S>(1, 2);
    if (conorm_bound >= half && conorm_bound <= norm_bound && norm_bound <= S{1}) {
      BlockOperator<S> op;
      op.shell = shell;
      op.support = support;
      op.mode = OperatorMode::random;
      op.seed = seed;
      op.matrix = std::move(mat);
      op.norm_bound = norm_bound;
      op.conorm_bound = conorm_bound;
      return op;
    }
    attempted_conditions.push_back(to_double(norm_bound) * to_double(inv_norm));
  }
  std::ostringstream os;
  os << "random operator for shell " << shell << " failed certification after "
     << opts.max_attempts << " attempts; condition numbers:";
  for (double c : attempted_conditions) os << " " << c;
  throw CertificationError(os.str());
}

}  // namespace detail

// One operator per shell 0 .. n_max+1, where n_max is the largest shell any
// point occupies. Requires |t| >= 1 for every non-basepoint t.
template <class S>
std::vector<BlockOperator<S>> make_operators(const MetricSpace<S>& m, OperatorMode mode,
                                             uint64_t seed = 0,
                                             const OperatorOptions& opts = {}) {
  int top = -1;
  for (int i = 0; i < m.size(); ++i) {
    if (i == m.basepoint) continue;
    if (m.base_norm(i) < S{1})
      throw DomainError("make_operators: point '" + m.name(i) +
                        "' has |t| < 1; rescale the space first");
    top = std::max(top, shell_of(m.base_norm(i)));
  }
  const int last = top + 1;  // interpolation reaches one shell past the top
  std::vector<BlockOperator<S>> ops;
  for (int k = 0; k <= std::max(last, 0); ++k) {
    Support support = make_ball_support(m, k);
    if (mode == OperatorMode::random) {
      ops.push_back(detail::sample_random_operator<S>(k, support, seed, opts));
    } else {
      BlockOperator<S> op;
      op.shell = k;
      op.support = support;
      op.mode = mode;
      op.seed = seed;
      if (mode == OperatorMode::half) {
        op.norm_bound = from_ratio<S>(1, 2);
        op.conorm_bound = from_ratio<S>(1, 2);
      }
      ops.push_back(std::move(op));
    }
  }
  return ops;
}

// Element of the sup-sum over blocks: an absent block is the zero block,
// and the norm is the largest block sup-norm. With this choice every block
// restriction has norm 1, within the allowances the construction assumes.
template <class S>
struct BlockVector {
  std::map<int, CoordVector<S>> blocks;

  S norm() const {
    S best{0};
    for (const auto& [n, v] : blocks) {
      S b = v.sup_norm();
      if (b > best) best = b;
    }
    return best;
  }
};

namespace detail {

template <class S>
void require_same_support(const CoordVector<S>& a, const CoordVector<S>& b, int block) {
  if (!same_support(a, b))
    throw DomainError("mismatched ball indexing at block " + std::to_string(block));
}

}  // namespace detail

// Pi_n: restriction to block n alone. Pi_n Pi_m = 0 for n != m and, in this
// model, ||Pi_n z|| <= ||z||.
template <class S>
BlockVector<S> project(const BlockVector<S>& z, int n) {
  BlockVector<S> out;
  auto it = z.blocks.find(n);
  if (it != z.blocks.end()) out.blocks.insert(*it);
  return out;
}

// P_n: restriction to blocks 0..n; ||P_n z|| <= ||z|| here.
template <class S>
BlockVector<S> partial_sum(const BlockVector<S>& z, int n) {
  if (n < 0) throw DomainError("partial_sum: smallest allowed index is 0");
  BlockVector<S> out;
  for (const auto& [k, v] : z.blocks) {
    if (k <= n) out.blocks.emplace(k, v);
  }
  return out;
}

template <class S>
BlockVector<S> add(const BlockVector<S>& a, const BlockVector<S>& b) {
  BlockVector<S> out = a;
  for (const auto& [n, v] : b.blocks) {
    auto it = out.blocks.find(n);
    if (it == out.blocks.end()) {
      out.blocks.emplace(n, v);
    } else {
      detail::require_same_support(it->second, v, n);
      for (size_t k = 0; k < v.values.size(); ++k) it->second.values[k] += v.values[k];
    }
  }
  return out;
}

template <class S>
BlockVector<S> scale(const BlockVector<S>& z, const S& factor) {
  BlockVector<S> out = z;
  for (auto& [n, v] : out.blocks)
    for (auto& x : v.values) x *= factor;
  return out;
}

template <class S>
BlockVector<S> subtract(const BlockVector<S>& a, const BlockVector<S>& b) {
  return add(a, scale(b, S{-1}));
}

// ||a - b|| without materializing the difference.
template <class S>
S diff_norm(const BlockVector<S>& a, const BlockVector<S>& b) {
  S best{0};
  auto ia = a.blocks.begin();
  auto ib = b.blocks.begin();
  auto bump = [&best](const S& v) {
    if (v > best) best = v;
  };
  while (ia != a.blocks.end() || ib != b.blocks.end()) {
    if (ib == b.blocks.end() || (ia != a.blocks.end() && ia->first < ib->first)) {
      bump(ia->second.sup_norm());
      ++ia;
    } else if (ia == a.blocks.end() || ib->first < ia->first) {
      bump(ib->second.sup_norm());
      ++ib;
    } else {
      detail::require_same_support(ia->second, ib->second, ia->first);
      const auto& va = ia->second.values;
      const auto& vb = ib->second.values;
      for (size_t k = 0; k < va.size(); ++k) bump(abs_of(S(va[k] - vb[k])));
      ++ia;
      ++ib;
    }
  }
  return best;
}

}  // namespace linfembed
