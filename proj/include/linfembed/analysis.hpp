#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <thread>
#include <vector>

#include "linfembed/glue.hpp"

namespace linfembed {

namespace detail {

// Contiguous row ranges with roughly equal pair mass; workers own disjoint
// ranges and results merge in range order, so parallel runs reproduce the
// serial result bit for bit.
inline std::vector<std::pair<int, int>> row_ranges(int n, int threads) {
  std::vector<std::pair<int, int>> ranges;
  if (threads <= 1 || n < 2) {
    ranges.push_back({0, n});
    return ranges;
  }
  const double total = 0.5 * n * (n - 1);
  double mass = 0;
  int start = 0;
  for (int i = 0; i < n; ++i) {
    mass += n - 1 - i;
    if (mass >= total / threads && start < i + 1) {
      ranges.push_back({start, i + 1});
      start = i + 1;
      mass = 0;
    }
  }
  if (start < n) ranges.push_back({start, n});
  return ranges;
}

inline int resolve_threads(int requested, int n) {
  if (requested > 0) return requested;
  if (n < 64) return 1;
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
}

// Applies per_range to every row range (possibly in parallel), then folds
// the partial results left to right.
template <class R, class PerRange>
std::vector<R> map_row_ranges(int n, int threads, PerRange per_range) {
  auto ranges = row_ranges(n, resolve_threads(threads, n));
  std::vector<R> partials(ranges.size());
  if (ranges.size() == 1) {
    partials[0] = per_range(ranges[0].first, ranges[0].second);
    return partials;
  }
  std::vector<std::thread> pool;
  pool.reserve(ranges.size());
  for (size_t k = 0; k < ranges.size(); ++k) {
    pool.emplace_back([&, k] { partials[k] = per_range(ranges[k].first, ranges[k].second); });
  }
  for (auto& t : pool) t.join();
  return partials;
}

template <class S>
S block_diff_norm(const BlockVector<S>& a, const BlockVector<S>& b, int k) {
  auto ia = a.blocks.find(k);
  auto ib = b.blocks.find(k);
  if (ia == a.blocks.end() && ib == b.blocks.end()) return S{0};
  if (ib == b.blocks.end()) return ia->second.sup_norm();
  if (ia == a.blocks.end()) return ib->second.sup_norm();
  require_same_support(ia->second, ib->second, k);
  S best{0};
  for (size_t idx = 0; idx < ia->second.values.size(); ++idx) {
    S gap = abs_of(S(ia->second.values[idx] - ib->second.values[idx]));
    if (gap > best) best = gap;
  }
  return best;
}

}  // namespace detail

// dist(f) = ||f||_Lip * ||f^-1||_Lip over all pairs, with witnesses. The
// bounds 9, 24 and 216 must hold for any operators inside the certified
// sandwich; a violation is a defect, not a tolerance issue.
template <class S>
struct DistortionReport {
  size_t pair_count = 0;
  bool injective = true;
  int collision_i = -1, collision_j = -1;
  S lip{0};
  int lip_i = -1, lip_j = -1;
  S colip{0};
  int colip_i = -1, colip_j = -1;
  S dist{0};
  bool lip_bound_ok = false;    // lip <= 9
  bool colip_bound_ok = false;  // colip <= 24
  bool dist_bound_ok = false;   // dist <= 216

  bool pass() const { return injective && lip_bound_ok && colip_bound_ok && dist_bound_ok; }
};

// Reporter shared by the block embedding and any baseline map: image_dist
// must return the target-space distance for a pair of point indices.
template <class S, class F>
DistortionReport<S> distortion_over(const MetricSpace<S>& m, F&& image_dist, int threads = 0) {
  if (m.size() < 2) throw DomainError("distortion needs at least 2 points");
  struct Local {
    size_t pairs = 0;
    bool injective = true;
    int ci = -1, cj = -1;
    S lip{0};
    int li = -1, lj = -1;
    S colip{0};
    int ki = -1, kj = -1;
  };
  const int n = m.size();
  auto partials = detail::map_row_ranges<Local>(n, threads, [&](int lo, int hi) {
    Local acc;
    for (int i = lo; i < hi; ++i) {
      for (int j = i + 1; j < n; ++j) {
        ++acc.pairs;
        const S& d = m.d(i, j);
        if (!(d > S{0}))
          throw DomainError("distortion needs a valid metric: d(" + m.name(i) + "," +
                            m.name(j) + ") is not positive");
        S id = image_dist(i, j);
        if (!(id > S{0})) {
          if (acc.injective) {
            acc.injective = false;
            acc.ci = i;
            acc.cj = j;
          }
          continue;
        }
        S ratio_lip = id / d;
        if (acc.li < 0 || ratio_lip > acc.lip) {
          acc.lip = ratio_lip;
          acc.li = i;
          acc.lj = j;
        }
        S ratio_colip = d / id;
        if (acc.ki < 0 || ratio_colip > acc.colip) {
          acc.colip = ratio_colip;
          acc.ki = i;
          acc.kj = j;
        }
      }
    }
    return acc;
  });
  Local merged;
  for (auto& part : partials) {
    merged.pairs += part.pairs;
    if (!part.injective && merged.injective) {
      merged.injective = false;
      merged.ci = part.ci;
      merged.cj = part.cj;
    }
    if (part.li >= 0 && (merged.li < 0 || part.lip > merged.lip)) {
      merged.lip = part.lip;
      merged.li = part.li;
      merged.lj = part.lj;
    }
    if (part.ki >= 0 && (merged.ki < 0 || part.colip > merged.colip)) {
      merged.colip = part.colip;
      merged.ki = part.ki;
      merged.kj = part.kj;
    }
  }
  DistortionReport<S> report;
  report.pair_count = merged.pairs;
  report.injective = merged.injective;
  report.collision_i = merged.ci;
  report.collision_j = merged.cj;
  report.lip = merged.lip;
  report.lip_i = merged.li;
  report.lip_j = merged.lj;
  report.colip = merged.colip;
  report.colip_i = merged.ki;
  report.colip_j = merged.kj;
  report.dist = S(merged.lip * merged.colip);
  using P = check_policy<S>;
  report.lip_bound_ok = P::le(report.lip, S{9});
  report.colip_bound_ok = merged.injective && P::le(report.colip, S{24});
  report.dist_bound_ok = merged.injective && P::le(report.dist, S{216});
  return report;
}

template <class S>
DistortionReport<S> distortion(const Embedding<S>& e, int threads = 0) {
  return distortion_over(
      e.space, [&](int i, int j) { return pairwise_image_distance(e, i, j); }, threads);
}

// ---------------------------------------------------------------------------
// Case certification

// Which Lipschitz estimate applies to an ordered pair |t| <= |t'|:
//   basepoint      t = t0
//   radial_gap     |t| <= |t'|/2
//   same_shell     n(t) = n(t')
//   adjacent_shell n(t') = n(t)+1 and |t| > |t'|/2
enum class LipCase { basepoint, radial_gap, same_shell, adjacent_shell };

// Which inverse estimate applies:
//   basepoint, same_shell, adjacent_shell, split_shell (shells >= 2 apart)
enum class InvCase { basepoint, same_shell, adjacent_shell, split_shell };

inline const char* to_label(LipCase c) {
  switch (c) {
    case LipCase::basepoint: return "basepoint";
    case LipCase::radial_gap: return "radial_gap";
    case LipCase::same_shell: return "same_shell";
    case LipCase::adjacent_shell: return "adjacent_shell";
  }
  return "?";
}

inline const char* to_label(InvCase c) {
  switch (c) {
    case InvCase::basepoint: return "basepoint";
    case InvCase::same_shell: return "same_shell";
    case InvCase::adjacent_shell: return "adjacent_shell";
    case InvCase::split_shell: return "split_shell";
  }
  return "?";
}

template <class S>
struct Check {
  const char* label;
  char rel;  // 'L': lhs <= rhs, 'G': lhs >= rhs, 'E': lhs == rhs
  S lhs, rhs;
  bool pass;
};

template <class S>
struct PairCertificate {
  int i = -1, j = -1;  // ordered so |t_i| <= |t_j|
  S d{}, image_dist{};
  LipCase lip_case = LipCase::basepoint;
  InvCase inv_case = InvCase::basepoint;
  std::vector<Check<S>> checks;   // Lipschitz-side checks first
  size_t lip_check_count = 0;
  bool pass = true;

  bool lip_pass() const {
    for (size_t k = 0; k < lip_check_count; ++k)
      if (!checks[k].pass) return false;
    return true;
  }
  bool inv_pass() const {
    for (size_t k = lip_check_count; k < checks.size(); ++k)
      if (!checks[k].pass) return false;
    return true;
  }
};

template <class S>
struct CaseLedger {
  size_t pair_count = 0;
  bool all_pass = true;
  std::array<size_t, 4> lip_counts{};  // indexed by LipCase
  std::array<size_t, 4> inv_counts{};  // indexed by InvCase
  std::vector<PairCertificate<S>> failures;  // first few failing pairs
  std::vector<PairCertificate<S>> entries;   // full ledger on request
  static constexpr size_t max_failures = 16;
};

namespace detail {

template <class S>
struct CertifyPointData {
  S norm{};
  int shell = -1;
  S lambda{};
  CoordVector<S> phi_low, phi_high;  // phi_{n}(t), phi_{n+1}(t)
  S phi_low_norm{}, phi_high_norm{};
  CoordVector<S> f_low, f_high;  // T_n phi_n(t), T_{n+1} phi_{n+1}(t), unscaled
  S f_low_norm{}, f_high_norm{};
  S image_norm{};
};

// Unscaled per-shell factors, reconstructed from the stored image so that a
// tampered file disagrees with the checks instead of being recomputed away.
template <class S>
std::vector<CertifyPointData<S>> certify_point_data(const Embedding<S>& e) {
  const auto& m = e.space;
  auto by_shell = index_by_shell(e.operators);
  std::vector<CertifyPointData<S>> data(m.size());
  for (int t = 0; t < m.size(); ++t) {
    auto& pd = data[t];
    pd.image_norm = e.image_of(t).norm();
    if (t == m.basepoint) continue;
    const auto& info = *e.shells.entries[t];
    pd.norm = m.base_norm(t);
    pd.shell = info.shell;
    pd.lambda = info.lambda;
    const int n = info.shell;
    if (n + 1 >= static_cast<int>(by_shell.size()) || by_shell[n] == nullptr ||
        by_shell[n + 1] == nullptr)
      throw DomainError("certify: missing block operator for shell " + std::to_string(n + 1));
    pd.phi_low = phi(m, by_shell[n]->support, t);
    pd.phi_high = phi(m, by_shell[n + 1]->support, t);
    pd.phi_low_norm = pd.phi_low.sup_norm();
    pd.phi_high_norm = pd.phi_high.sup_norm();
    const auto& blocks = e.image_of(t).blocks;
    auto low_it = blocks.find(n);
    if (low_it == blocks.end())
      throw DomainError("certify: image of '" + m.name(t) + "' lacks block " +
                        std::to_string(n));
    pd.f_low = low_it->second;
    for (auto& v : pd.f_low.values) v /= info.lambda;
    auto high_it = blocks.find(n + 1);
    if (high_it != blocks.end() && info.lambda != S{1}) {
      pd.f_high = high_it->second;
      const S w = S{1} - info.lambda;
      for (auto& v : pd.f_high.values) v /= w;
    } else {
      // lambda = 1 stores no upper block; recompute the factor directly
      pd.f_high = by_shell[n + 1]->apply(pd.phi_high);
    }
    pd.f_low_norm = pd.f_low.sup_norm();
    pd.f_high_norm = pd.f_high.sup_norm();
  }
  return data;
}

}  // namespace detail

// Evaluates both sides of every estimate in the applicable Lipschitz and
// inverse cases, for every pair, with exact comparisons in rational mode.
template <class S>
CaseLedger<S> certify_cases(const Embedding<S>& e, bool keep_entries = false, int threads = 0) {
  using P = check_policy<S>;
  const auto& m = e.space;
  if (m.size() < 2) throw DomainError("certify_cases needs at least 2 points");
  const auto data = detail::certify_point_data(e);
  const int n_points = m.size();

  auto conorm_at = [&](int shell) -> const S& {
    for (const auto& op : e.operators)
      if (op.shell == shell) return op.conorm_bound;
    throw DomainError("certify: missing block operator for shell " + std::to_string(shell));
  };

  auto per_range = [&](int lo, int hi) {
    CaseLedger<S> led;
    for (int a = lo; a < hi; ++a) {
      for (int b = a + 1; b < n_points; ++b) {
        // order the pair radially: |t| <= |t'|
        int i = a, j = b;
        if (m.base_norm(j) < m.base_norm(i)) std::swap(i, j);
        if (j == m.basepoint) std::swap(i, j);

        PairCertificate<S> cert;
        cert.i = i;
        cert.j = j;
        cert.d = m.d(i, j);
        cert.image_dist = pairwise_image_distance(e, i, j);
        const S& D = cert.d;
        const S& ID = cert.image_dist;

        auto push = [&](const char* label, char rel, S lhs, S rhs) {
          bool ok = rel == 'L'   ? P::le(lhs, rhs)
                    : rel == 'G' ? P::ge(lhs, rhs)
                                 : P::eq(lhs, rhs);
          cert.checks.push_back({label, rel, std::move(lhs), std::move(rhs), ok});
          if (!ok) cert.pass = false;
        };

        if (i == m.basepoint) {
          const auto& pu = data[j];
          cert.lip_case = LipCase::basepoint;
          cert.inv_case = InvCase::basepoint;
          push("image_dist_eq_image_norm", 'E', ID, pu.image_norm);
          push("d_eq_radial", 'E', D, pu.norm);
          push("upper_envelope", 'L', pu.image_norm, pu.norm);
          push("lip_final", 'L', ID, S(S{9} * D));
          cert.lip_check_count = cert.checks.size();
          push("lower_envelope", 'G', pu.image_norm, S(pu.norm / S{16}));
          push("inv_16", 'G', S(S{16} * ID), D);
          push("inv_final", 'G', S(S{24} * ID), D);
        } else {
          const auto& pt = data[i];
          const auto& pu = data[j];
          const S& Nt = pt.norm;
          const S& Nu = pu.norm;
          const S& lt = pt.lambda;
          const S& lu = pu.lambda;
          const int nt = pt.shell;
          const int nu = pu.shell;

          // --- Lipschitz side ---
          if (S(Nt + Nt) <= Nu) {
            cert.lip_case = LipCase::radial_gap;
            push("norm_diff_le_norm_sum", 'L', ID, S(pt.image_norm + pu.image_norm));
            push("norm_sum_le_radial_sum", 'L', S(pt.image_norm + pu.image_norm), S(Nt + Nu));
            push("radial_sum_le_3half_far", 'L', S(Nt + Nu), S(from_ratio<S>(3, 2) * Nu));
            push("3half_far_le_3_gap", 'L', S(from_ratio<S>(3, 2) * Nu), S(S{3} * (Nu - Nt)));
            push("gap_le_d", 'L', S(Nu - Nt), D);
            push("lip_final", 'L', ID, S(S{3} * D));
          } else if (nt == nu) {
            cert.lip_case = LipCase::same_shell;
            const S gap = S(lt - lu);  // |t| <= |t'| makes lambda >= lambda'
            const S p2n = pow2<S>(nt);
            push("lambda_gap_identity", 'E', gap, S((Nu - Nt) / p2n));
            push("lambda_gap_le_d_scaled", 'L', gap, S(D / p2n));
            S A = S{0}, B = S{0};
            {
              S best{0};
              for (size_t k = 0; k < pt.f_low.values.size(); ++k) {
                S g = abs_of(S(pt.f_low.values[k] - pu.f_low.values[k]));
                if (g > best) best = g;
              }
              A = best;
            }
            {
              S best{0};
              for (size_t k = 0; k < pt.f_high.values.size(); ++k) {
                S g = abs_of(S(pt.f_high.values[k] - pu.f_high.values[k]));
                if (g > best) best = g;
              }
              B = best;
            }
            push("f_low_diff_le_d", 'L', A, D);
            push("f_high_diff_le_d", 'L', B, D);
            S assembled = S(lt * A + (S{1} - lt) * B + S{2} * gap * Nu);
            push("decomp_bound", 'L', ID, assembled);
            S tail = S(D + pow2<S>(nt + 2) * gap);
            push("collect_le_d_plus", 'L', assembled, tail);
            push("tail_le_5d", 'L', tail, S(S{5} * D));
            push("lip_final", 'L', ID, S(S{5} * D));
          } else {
            cert.lip_case = LipCase::adjacent_shell;
            push("shell_adjacent", 'E', S(static_cast<long long>(nu)),
                 S(static_cast<long long>(nt + 1)));
            const S p2n = pow2<S>(nt);
            const S p2n1 = pow2<S>(nt + 1);
            push("lambda_le_d_scaled", 'L', lt, S(D / p2n));
            push("lambda_radial_le_2d", 'L', S(lt * Nt), S(S{2} * D));
            push("one_minus_lu_identity", 'E', S(S{1} - lu), S((Nu - p2n1) / p2n1));
            push("one_minus_lu_le_d_scaled", 'L', S(S{1} - lu), S(D / p2n1));
            push("one_minus_lu_radial_le_2d", 'L', S((S{1} - lu) * Nu), S(S{2} * D));
            S mid{0};
            for (size_t k = 0; k < pt.f_high.values.size(); ++k) {
              S g = abs_of(S(pt.f_high.values[k] - pu.f_low.values[k]));
              if (g > mid) mid = g;
            }
            push("f_mid_diff_le_d", 'L', mid, D);
            S assembled = S(lt * (pt.f_low_norm + pt.f_high_norm) +
                            (S{1} - lu) * (pu.f_low_norm + pu.f_high_norm) + mid);
            push("decomp_bound", 'L', ID, assembled);
            S tail = S(D + S{2} * lt * Nt + S{2} * (S{1} - lu) * Nu);
            push("collect_le_d_plus", 'L', assembled, tail);
            push("tail_le_9d", 'L', tail, S(S{9} * D));
            push("lip_final", 'L', ID, S(S{9} * D));
          }
          cert.lip_check_count = cert.checks.size();

          // --- inverse side ---
          if (nt == nu) {
            cert.inv_case = InvCase::same_shell;
            const int n = nt;
            const S a_low = detail::block_diff_norm(e.image_of(i), e.image_of(j), n);
            const S a_high = detail::block_diff_norm(e.image_of(i), e.image_of(j), n + 1);
            const S c_low = S(lt * D + (lu - lt) * Nu);
            const S c_high = S((S{1} - lt) * D + (lt - lu) * Nu);
            // u = lambda*phi_n(t) - lambda'*phi_n(t'), coordinate at s = t'
            S u_sup{0};
            {
              S coord{};
              int pos = -1;
              for (size_t k = 0; k < pt.phi_low.values.size(); ++k) {
                S v = S(lt * pt.phi_low.values[k] - lu * pu.phi_low.values[k]);
                S av = abs_of(v);
                if (av > u_sup) u_sup = av;
                if ((*pt.phi_low.support)[k] == j) {
                  coord = v;
                  pos = static_cast<int>(k);
                }
              }
              push("coord_low_identity", 'E', pos >= 0 ? coord : S{0}, c_low);
            }
            push("sup_ge_coord_low", 'G', u_sup, c_low);
            push("conorm_low", 'G', a_low, S(conorm_at(n) * u_sup));
            push("pi_low_ge_half_coord", 'G', S(S{2} * a_low), c_low);
            S v_sup{0};
            {
              S coord{};
              int pos = -1;
              for (size_t k = 0; k < pt.phi_high.values.size(); ++k) {
                S v = S((S{1} - lt) * pt.phi_high.values[k] -
                        (S{1} - lu) * pu.phi_high.values[k]);
                S av = abs_of(v);
                if (av > v_sup) v_sup = av;
                if ((*pt.phi_high.support)[k] == j) {
                  coord = v;
                  pos = static_cast<int>(k);
                }
              }
              push("coord_high_identity", 'E', pos >= 0 ? coord : S{0}, c_high);
            }
            push("sup_ge_coord_high", 'G', v_sup, c_high);
            push("conorm_high", 'G', a_high, S(conorm_at(n + 1) * v_sup));
            push("pi_high_ge_half_coord", 'G', S(S{2} * a_high), c_high);
            push("coord_sum_eq_d", 'E', S(c_low + c_high), D);
            push("pi_low_le_4norm", 'L', a_low, S(S{4} * ID));
            push("pi_high_le_4norm", 'L', a_high, S(S{4} * ID));
            push("inv_final", 'G', S(S{16} * ID), D);
          } else if (nu == nt + 1) {
            cert.inv_case = InvCase::adjacent_shell;
            const int n = nt;
            const S a_low = detail::block_diff_norm(e.image_of(i), e.image_of(j), n);
            const S a_mid = detail::block_diff_norm(e.image_of(i), e.image_of(j), n + 1);
            const S a_high = detail::block_diff_norm(e.image_of(i), e.image_of(j), n + 2);
            push("phi_low_norm_eq_radial", 'E', pt.phi_low_norm, Nt);
            push("pi_outer_low_conorm", 'G', a_low, S(conorm_at(n) * lt * Nt));
            push("pi_outer_low", 'G', S(S{2} * a_low), S(lt * Nt));
            push("phi_high_norm_eq_radial", 'E', pu.phi_high_norm, Nu);
            push("pi_outer_high_conorm", 'G', a_high,
                 S(conorm_at(n + 2) * (S{1} - lu) * Nu));
            push("pi_outer_high", 'G', S(S{2} * a_high), S((S{1} - lu) * Nu));
            // w = (1-lambda)*phi_{n+1}(t) - lambda'*phi_{n+1}(t'); coordinate at s = t
            const S c_mid = S(lu * D - lu * Nt + (S{1} - lt) * Nt);
            S w_sup{0};
            {
              S coord{};
              int pos = -1;
              for (size_t k = 0; k < pt.phi_high.values.size(); ++k) {
                S v = S((S{1} - lt) * pt.phi_high.values[k] - lu * pu.phi_low.values[k]);
                S av = abs_of(v);
                if (av > w_sup) w_sup = av;
                if ((*pt.phi_high.support)[k] == i) {
                  coord = v;
                  pos = static_cast<int>(k);
                }
              }
              push("coord_mid_identity", 'E', pos >= 0 ? S(-coord) : S{0}, c_mid);
            }
            push("sup_ge_coord_mid", 'G', w_sup, c_mid);
            push("conorm_mid", 'G', a_mid, S(conorm_at(n + 1) * w_sup));
            push("pi_mid_ge_half_coord", 'G', S(S{2} * a_mid), c_mid);
            const S combined = S(lu * D + (S{1} - lu) * (Nt + Nu));
            push("combine_identity", 'E', S(lt * Nt + c_mid + (S{1} - lu) * Nu), combined);
            push("triangle_radial", 'L', D, S(Nt + Nu));
            push("combined_ge_d", 'G', combined, D);
            push("pi_low_le_4norm", 'L', a_low, S(S{4} * ID));
            push("pi_mid_le_4norm", 'L', a_mid, S(S{4} * ID));
            push("pi_high_le_4norm", 'L', a_high, S(S{4} * ID));
            push("inv_24_ge_combined", 'G', S(S{24} * ID), combined);
            push("inv_final", 'G', S(S{24} * ID), D);
          } else {
            cert.inv_case = InvCase::split_shell;
            const int p = nu;
            const S a_low = detail::block_diff_norm(e.image_of(i), e.image_of(j), p);
            const S a_high = detail::block_diff_norm(e.image_of(i), e.image_of(j), p + 1);
            push("half_gap", 'L', Nt, S(Nu / S{2}));
            push("phi_low_norm_eq_radial_far", 'E', pu.phi_low_norm, Nu);
            push("pi_far_low_conorm", 'G', a_low, S(conorm_at(p) * lu * Nu));
            push("pi_far_low", 'G', S(S{2} * a_low), S(lu * Nu));
            push("phi_high_norm_eq_radial_far", 'E', pu.phi_high_norm, Nu);
            push("pi_far_high_conorm", 'G', a_high, S(conorm_at(p + 1) * (S{1} - lu) * Nu));
            push("pi_far_high", 'G', S(S{2} * a_high), S((S{1} - lu) * Nu));
            push("pi_sum_ge_radial", 'G', S(S{2} * (a_low + a_high)), Nu);
            push("pi_far_low_le_4norm", 'L', a_low, S(S{4} * ID));
            push("pi_far_high_le_4norm", 'L', a_high, S(S{4} * ID));
            push("sixteen_ge_radial", 'G', S(S{16} * ID), Nu);
            push("radial_far_ge_both", 'G', S(from_ratio<S>(3, 2) * Nu), S(Nt + Nu));
            push("triangle_radial", 'L', D, S(Nt + Nu));
            push("inv_24_ge_3half", 'G', S(S{24} * ID), S(from_ratio<S>(3, 2) * Nu));
            push("inv_final", 'G', S(S{24} * ID), D);
          }
        }

        ++led.pair_count;
        ++led.lip_counts[static_cast<size_t>(cert.lip_case)];
        ++led.inv_counts[static_cast<size_t>(cert.inv_case)];
        if (!cert.pass) {
          led.all_pass = false;
          if (led.failures.size() < CaseLedger<S>::max_failures) led.failures.push_back(cert);
        }
        if (keep_entries) led.entries.push_back(std::move(cert));
      }
    }
    return led;
  };

  auto partials = detail::map_row_ranges<CaseLedger<S>>(n_points, threads, per_range);
  CaseLedger<S> merged;
  for (auto& part : partials) {
    merged.pair_count += part.pair_count;
    merged.all_pass = merged.all_pass && part.all_pass;
    for (size_t k = 0; k < 4; ++k) {
      merged.lip_counts[k] += part.lip_counts[k];
      merged.inv_counts[k] += part.inv_counts[k];
    }
    for (auto& f : part.failures)
      if (merged.failures.size() < CaseLedger<S>::max_failures)
        merged.failures.push_back(std::move(f));
    if (keep_entries)
      for (auto& entry : part.entries) merged.entries.push_back(std::move(entry));
  }
  return merged;
}

// ---------------------------------------------------------------------------
// Norm envelope: |t|/16 <= ||f(t)|| <= |t| for every non-basepoint point.

template <class S>
struct EnvelopeReport {
  bool ok = true;
  bool has_points = false;
  S min_ratio{}, max_ratio{};
  int min_i = -1, max_i = -1;
  std::vector<int> violations;
};

template <class S>
EnvelopeReport<S> envelope_check(const Embedding<S>& e) {
  using P = check_policy<S>;
  EnvelopeReport<S> report;
  const auto& m = e.space;
  for (int t = 0; t < m.size(); ++t) {
    if (t == m.basepoint) continue;  // 0/0 is excluded by construction
    const S& norm = m.base_norm(t);
    S img = e.image_of(t).norm();
    bool lower = P::ge(img, S(norm / S{16}));
    bool upper = P::le(img, norm);
    if (!lower || !upper) {
      report.ok = false;
      report.violations.push_back(t);
    }
    S ratio = S(img / norm);
    if (!report.has_points || ratio < report.min_ratio) {
      report.min_ratio = ratio;
      report.min_i = t;
    }
    if (!report.has_points || ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.max_i = t;
    }
    report.has_points = true;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Compression/expansion moduli over sampled thresholds.

template <class S>
struct ModuliEntry {
  S threshold{};
  bool rho_finite = false;  // inf over an empty pair set is reported as infinite
  S rho{};                  // inf { ||f(x)-f(y)|| : d(x,y) >= threshold }
  S omega{};                // sup { ||f(x)-f(y)|| : d(x,y) <= threshold }, 0 on empty
  bool has_equal_pair = false;
  bool omega_bound_ok = true;  // omega <= 9 t
  bool rho_bound_ok = true;    // rho >= t/24 where the pair set is nonempty
  bool order_ok = true;        // rho <= omega, active when some pair has d == t
};

template <class S>
struct ModuliProfile {
  std::vector<ModuliEntry<S>> entries;
  bool monotone = true;

  bool pass() const {
    if (!monotone) return false;
    for (const auto& entry : entries)
      if (!entry.omega_bound_ok || !entry.rho_bound_ok || !entry.order_ok) return false;
    return true;
  }
};

template <class S>
std::vector<S> default_thresholds(const Embedding<S>& e, int count = 20) {
  const auto& m = e.space;
  if (m.size() < 2) throw DomainError("moduli need at least 2 points");
  bool first = true;
  S lo{}, hi{};
  for (int i = 0; i < m.size(); ++i)
    for (int j = i + 1; j < m.size(); ++j) {
      const S& d = m.d(i, j);
      if (first || d < lo) lo = d;
      if (first || d > hi) hi = d;
      first = false;
    }
  std::vector<S> out;
  if (!(hi > lo) || count < 2) {
    out.push_back(lo);
    return out;
  }
  for (int k = 0; k < count; ++k) {
    out.push_back(S(lo + (hi - lo) * S(static_cast<long long>(k)) /
                             S(static_cast<long long>(count - 1))));
  }
  return out;
}

template <class S>
ModuliProfile<S> moduli(const Embedding<S>& e, const std::vector<S>& thresholds,
                        int threads = 0) {
  using P = check_policy<S>;
  const auto& m = e.space;
  if (m.size() < 2) throw DomainError("moduli need at least 2 points");
  for (size_t k = 0; k < thresholds.size(); ++k) {
    if (!(thresholds[k] > S{0})) throw InputError("moduli thresholds must be positive");
    if (k > 0 && !(thresholds[k] > thresholds[k - 1]))
      throw InputError("moduli thresholds must be increasing");
  }

  struct PairRow {
    S d, id;
  };
  const int n = m.size();
  auto partials = detail::map_row_ranges<std::vector<PairRow>>(n, threads, [&](int lo, int hi) {
    std::vector<PairRow> rows;
    for (int i = lo; i < hi; ++i)
      for (int j = i + 1; j < n; ++j) rows.push_back({m.d(i, j), pairwise_image_distance(e, i, j)});
    return rows;
  });
  std::vector<PairRow> rows;
  for (auto& part : partials)
    for (auto& r : part) rows.push_back(std::move(r));
  std::sort(rows.begin(), rows.end(), [](const PairRow& a, const PairRow& b) { return a.d < b.d; });

  // prefix maxima of image distances (for omega), suffix minima (for rho)
  std::vector<S> prefix_max(rows.size());
  std::vector<S> suffix_min(rows.size());
  for (size_t k = 0; k < rows.size(); ++k)
    prefix_max[k] = k == 0 ? rows[k].id : max_of(prefix_max[k - 1], rows[k].id);
  for (size_t k = rows.size(); k-- > 0;)
    suffix_min[k] = k + 1 == rows.size() ? rows[k].id : min_of(suffix_min[k + 1], rows[k].id);

  ModuliProfile<S> prof;
  for (const S& t : thresholds) {
    ModuliEntry<S> entry;
    entry.threshold = t;
    // last index with d <= t
    size_t hi = 0;
    while (hi < rows.size() && rows[hi].d <= t) ++hi;
    size_t lo = 0;
    while (lo < rows.size() && rows[lo].d < t) ++lo;
    entry.omega = hi > 0 ? prefix_max[hi - 1] : S{0};
    entry.rho_finite = lo < rows.size();
    if (entry.rho_finite) entry.rho = suffix_min[lo];
    entry.has_equal_pair = lo < hi;
    entry.omega_bound_ok = P::le(entry.omega, S(S{9} * t));
    entry.rho_bound_ok = !entry.rho_finite || P::ge(entry.rho, S(t / S{24}));
    entry.order_ok = !entry.has_equal_pair || !entry.rho_finite || P::le(entry.rho, entry.omega);
    prof.entries.push_back(std::move(entry));
  }
  for (size_t k = 1; k < prof.entries.size(); ++k) {
    const auto& prev = prof.entries[k - 1];
    const auto& cur = prof.entries[k];
    if (!P::le(prev.omega, cur.omega)) prof.monotone = false;
    if (prev.rho_finite && cur.rho_finite && !P::le(prev.rho, cur.rho)) prof.monotone = false;
    if (!prev.rho_finite && cur.rho_finite) prof.monotone = false;  // inf can only appear later
  }
  return prof;
}

}  // namespace linfembed
