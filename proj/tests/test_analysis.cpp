#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "linfembed/analysis.hpp"
#include "linfembed/generate.hpp"
#include "test_util.hpp"

using namespace linfembed;
using testutil::pair_space;
using testutil::space_from_rows;

namespace {

template <class S>
Embedding<S> quick_embed(const MetricSpace<S>& raw, OperatorMode mode = OperatorMode::identity,
                         uint64_t seed = 0) {
  auto scaled = rescale_to_unit_gap(raw);
  return embed(scaled.space, make_operators(scaled.space, mode, seed), scaled.scale);
}

// already-rescaled spaces hitting each case pair
MetricSpace<Rat> same_shell_space() {
  // norms 2 and 3, d(a,b) = 1: both in shell 1
  return space_from_rows<Rat>(
      {{Rat(0), Rat(2), Rat(3)}, {Rat(2), Rat(0), Rat(1)}, {Rat(3), Rat(1), Rat(0)}});
}

MetricSpace<Rat> adjacent_shell_space() {
  // norms 3 and 5, d(a,b) = 2: shells 1 and 2, 3 > 5/2
  return space_from_rows<Rat>(
      {{Rat(0), Rat(3), Rat(5)}, {Rat(3), Rat(0), Rat(2)}, {Rat(5), Rat(2), Rat(0)}});
}

MetricSpace<Rat> split_shell_space() {
  // norms 2 and 8: shells 1 and 3, and 2 <= 8/2 puts the pair in the radial gap case
  return space_from_rows<Rat>(
      {{Rat(0), Rat(2), Rat(8)}, {Rat(2), Rat(0), Rat(6)}, {Rat(8), Rat(6), Rat(0)}});
}

}  // namespace

TEST_CASE("two points at separation 3 with identity operators: lip 1/2, colip 2, dist 1") {
  // separation 3 already satisfies the unit-gap contract; no rescale, so the
  // pair interpolates with weight 1/2 and both blocks carry (3,-3)/2
  auto m = pair_space(Rat(3));
  auto e = embed(m, make_operators(m, OperatorMode::identity));
  auto r = distortion(e);
  CHECK(r.pair_count == 1);
  CHECK(r.lip == Rat(1) / 2);
  CHECK(r.colip == Rat(2));
  CHECK(r.dist == Rat(1));
  CHECK(r.pass());
  CHECK(r.lip_i == 0);
  CHECK(r.lip_j == 1);
}

TEST_CASE("distortion matches the independent oracle exactly") {
  std::vector<MetricSpace<Rat>> spaces = {
      generate<Rat>(GridFamily{2, 2}),
      generate<Rat>(RandomGraphFamily{16, 0.25, 201}),
      generate<Rat>(RandomTreeFamily{18, 202}),
      generate<Rat>(UniformPointsFamily{14, 2, 203}),
  };
  for (const auto& raw : spaces) {
    for (auto mode : {OperatorMode::identity, OperatorMode::half, OperatorMode::random}) {
      auto e = quick_embed(raw, mode, 11);
      auto report = distortion(e);
      auto oracle = testutil::oracle_distortion(e);
      CHECK(oracle.injective);
      CHECK(report.lip == oracle.lip);
      CHECK(report.colip == oracle.colip);
      CHECK(report.dist == oracle.dist);
      CHECK(report.dist >= Rat(1));
      CHECK(report.pass());
      // witnesses realize the reported suprema
      CHECK(pairwise_image_distance(e, report.lip_i, report.lip_j) /
                e.space.d(report.lip_i, report.lip_j) ==
            report.lip);
      CHECK(e.space.d(report.colip_i, report.colip_j) /
                pairwise_image_distance(e, report.colip_i, report.colip_j) ==
            report.colip);
    }
  }
}

TEST_CASE("a collision is reported as an injectivity failure with its witness") {
  auto e = quick_embed(generate<Rat>(RandomTreeFamily{10, 7}));
  // overwrite one image with another point's blocks
  int a = -1, b = -1;
  for (int i = 0; i < e.space.size() && b < 0; ++i) {
    if (i == e.space.basepoint) continue;
    if (a < 0) {
      a = i;
    } else {
      b = i;
    }
  }
  e.image[b] = e.image[a];
  auto r = distortion(e);
  CHECK_FALSE(r.injective);
  CHECK_FALSE(r.pass());
  CHECK(r.collision_i == std::min(a, b));
  CHECK(r.collision_j == std::max(a, b));
}

TEST_CASE("case partition: every pair lands in exactly one case, re-derived independently") {
  auto raw = generate<Rat>(RandomGraphFamily{26, 0.2, 301});
  auto e = quick_embed(raw, OperatorMode::random, 17);
  auto ledger = certify_cases(e, /*keep_entries=*/true);
  const auto& m = e.space;
  CHECK(ledger.pair_count == static_cast<size_t>(m.size() * (m.size() - 1) / 2));
  CHECK(ledger.entries.size() == ledger.pair_count);
  CHECK(ledger.all_pass);

  size_t lip_sum = 0, inv_sum = 0;
  for (size_t k = 0; k < 4; ++k) {
    lip_sum += ledger.lip_counts[k];
    inv_sum += ledger.inv_counts[k];
  }
  CHECK(lip_sum == ledger.pair_count);
  CHECK(inv_sum == ledger.pair_count);

  std::set<std::pair<int, int>> seen;
  for (const auto& entry : ledger.entries) {
    seen.insert({std::min(entry.i, entry.j), std::max(entry.i, entry.j)});
    CHECK(m.base_norm(entry.i) <= m.base_norm(entry.j));
    // independent re-derivation of the case predicates from |t|, |t'|
    if (entry.i == m.basepoint) {
      CHECK(entry.lip_case == LipCase::basepoint);
      CHECK(entry.inv_case == InvCase::basepoint);
      continue;
    }
    const Rat& nt = m.base_norm(entry.i);
    const Rat& nu = m.base_norm(entry.j);
    int st = shell_of(nt);
    int su = shell_of(nu);
    if (Rat(2) * nt <= nu) {
      CHECK(entry.lip_case == LipCase::radial_gap);
    } else if (st == su) {
      CHECK(entry.lip_case == LipCase::same_shell);
    } else {
      CHECK(su == st + 1);  // the remaining pairs must sit in adjacent shells
      CHECK(entry.lip_case == LipCase::adjacent_shell);
    }
    if (st == su) {
      CHECK(entry.inv_case == InvCase::same_shell);
    } else if (su == st + 1) {
      CHECK(entry.inv_case == InvCase::adjacent_shell);
    } else {
      CHECK(entry.inv_case == InvCase::split_shell);
    }
  }
  CHECK(seen.size() == ledger.pair_count);
}

TEST_CASE("hand-built spaces drive each case chain end to end") {
  SUBCASE("same shell") {
    auto m = same_shell_space();
    REQUIRE(validate(m).ok());
    auto e = embed(m, make_operators(m, OperatorMode::half));
    auto ledger = certify_cases(e, true);
    CHECK(ledger.all_pass);
    CHECK(ledger.lip_counts[static_cast<size_t>(LipCase::same_shell)] == 1);
    CHECK(ledger.inv_counts[static_cast<size_t>(InvCase::same_shell)] == 1);
    bool found = false;
    for (const auto& entry : ledger.entries) {
      if (entry.lip_case != LipCase::same_shell) continue;
      found = true;
      CHECK(entry.lip_pass());
      CHECK(entry.inv_pass());
      bool saw_final = false;
      for (const auto& chk : entry.checks) {
        if (std::string(chk.label) == "lip_final") {
          CHECK(chk.rhs == Rat(5) * entry.d);  // the 5d estimate
          saw_final = true;
        }
        if (std::string(chk.label) == "coord_sum_eq_d") CHECK(chk.lhs == entry.d);
      }
      CHECK(saw_final);
    }
    CHECK(found);
  }
  SUBCASE("adjacent shells") {
    auto m = adjacent_shell_space();
    REQUIRE(validate(m).ok());
    auto e = embed(m, make_operators(m, OperatorMode::random, 3));
    auto ledger = certify_cases(e, true);
    CHECK(ledger.all_pass);
    CHECK(ledger.lip_counts[static_cast<size_t>(LipCase::adjacent_shell)] == 1);
    CHECK(ledger.inv_counts[static_cast<size_t>(InvCase::adjacent_shell)] == 1);
    for (const auto& entry : ledger.entries) {
      if (entry.lip_case != LipCase::adjacent_shell) continue;
      for (const auto& chk : entry.checks)
        if (std::string(chk.label) == "lip_final") CHECK(chk.rhs == Rat(9) * entry.d);
    }
  }
  SUBCASE("radial gap with split shells") {
    auto m = split_shell_space();
    REQUIRE(validate(m).ok());
    auto e = embed(m, make_operators(m, OperatorMode::identity));
    auto ledger = certify_cases(e, true);
    CHECK(ledger.all_pass);
    CHECK(ledger.lip_counts[static_cast<size_t>(LipCase::radial_gap)] == 1);
    CHECK(ledger.inv_counts[static_cast<size_t>(InvCase::split_shell)] == 1);
    for (const auto& entry : ledger.entries) {
      if (entry.inv_case != InvCase::split_shell) continue;
      CHECK(entry.lip_case == LipCase::radial_gap);
      for (const auto& chk : entry.checks) {
        if (std::string(chk.label) == "lip_final") CHECK(chk.rhs == Rat(3) * entry.d);
        if (std::string(chk.label) == "inv_24_ge_3half")
          CHECK(chk.rhs == Rat(3) / 2 * e.space.base_norm(entry.j));
      }
    }
  }
}

TEST_CASE("certification catches a grossly tampered coordinate") {
  auto e = quick_embed(generate<Rat>(RandomGraphFamily{14, 0.3, 401}), OperatorMode::random, 9);
  int victim = e.space.basepoint == 0 ? 1 : 0;
  auto& blocks = e.image[victim].blocks;
  REQUIRE_FALSE(blocks.empty());
  blocks.begin()->second.values[0] *= Rat(100);
  auto ledger = certify_cases(e);
  CHECK_FALSE(ledger.all_pass);
  REQUIRE_FALSE(ledger.failures.empty());
  bool involves_victim = false;
  for (const auto& f : ledger.failures)
    involves_victim = involves_victim || f.i == victim || f.j == victim;
  CHECK(involves_victim);
  auto env = envelope_check(e);
  CHECK_FALSE(env.ok);
}

TEST_CASE("envelope: worked ratios and bounds across modes") {
  auto m3 = pair_space(Rat(3));
  auto e = embed(m3, make_operators(m3, OperatorMode::identity));
  auto env = envelope_check(e);
  CHECK(env.ok);
  CHECK(env.min_ratio == Rat(1) / 2);  // the worked example ratio
  CHECK(env.max_ratio == Rat(1) / 2);
  CHECK(env.min_i == 1);

  auto half = quick_embed(generate<Rat>(RandomGraphFamily{20, 0.25, 501}), OperatorMode::half);
  auto env_half = envelope_check(half);
  CHECK(env_half.ok);
  CHECK(env_half.min_ratio >= Rat(1) / 16);
  CHECK(env_half.max_ratio <= Rat(1));

  auto ident = quick_embed(generate<Rat>(RandomGraphFamily{20, 0.25, 501}));
  auto env_id = envelope_check(ident);
  CHECK(env_id.ok);
  // half-mode operators shrink every image norm but never below |t|/16
  CHECK(env_half.min_ratio <= env_id.min_ratio);
}

TEST_CASE("moduli: bounds, monotonicity, empty-set conventions") {
  auto e = quick_embed(generate<Rat>(RandomGraphFamily{18, 0.25, 601}), OperatorMode::random, 2);
  auto ts = default_thresholds(e);
  CHECK(ts.size() == 20);
  for (size_t k = 1; k < ts.size(); ++k) CHECK(ts[k] > ts[k - 1]);
  auto prof = moduli(e, ts);
  CHECK(prof.pass());
  CHECK(prof.monotone);
  REQUIRE(prof.entries.size() == 20);
  // extreme thresholds touch realized distances, so the order check is active
  CHECK(prof.entries.front().has_equal_pair);
  CHECK(prof.entries.back().has_equal_pair);
  for (const auto& entry : prof.entries) {
    CHECK(entry.omega_bound_ok);
    CHECK(entry.rho_bound_ok);
    CHECK(entry.order_ok);
  }

  // a threshold below every pairwise distance: omega empty -> 0, rho total
  Rat dmin = prof.entries.front().threshold;
  auto low = moduli(e, {dmin / 2});
  CHECK(low.entries[0].omega == Rat(0));
  CHECK(low.entries[0].rho_finite);
  // beyond the diameter: rho empty -> infinite sentinel
  Rat dmax = prof.entries.back().threshold;
  auto high = moduli(e, {dmax * 2});
  CHECK_FALSE(high.entries[0].rho_finite);
  CHECK(high.entries[0].omega > Rat(0));

  CHECK_THROWS_AS(moduli(e, {Rat(2), Rat(1)}), InputError);
  CHECK_THROWS_AS(moduli(e, {Rat(0)}), InputError);
}

TEST_CASE("parallel pair scans reproduce the serial results bit for bit") {
  auto e = quick_embed(generate<Rat>(RandomGraphFamily{30, 0.2, 701}), OperatorMode::random, 5);
  auto serial = distortion(e, 1);
  auto parallel = distortion(e, 4);
  CHECK(serial.lip == parallel.lip);
  CHECK(serial.colip == parallel.colip);
  CHECK(serial.lip_i == parallel.lip_i);
  CHECK(serial.lip_j == parallel.lip_j);
  CHECK(serial.colip_i == parallel.colip_i);
  CHECK(serial.colip_j == parallel.colip_j);

  auto led1 = certify_cases(e, true, 1);
  auto led4 = certify_cases(e, true, 4);
  CHECK(led1.pair_count == led4.pair_count);
  CHECK(led1.lip_counts == led4.lip_counts);
  CHECK(led1.inv_counts == led4.inv_counts);
  REQUIRE(led1.entries.size() == led4.entries.size());
  for (size_t k = 0; k < led1.entries.size(); ++k) {
    CHECK(led1.entries[k].i == led4.entries[k].i);
    CHECK(led1.entries[k].j == led4.entries[k].j);
  }

  auto p1 = moduli(e, default_thresholds(e), 1);
  auto p4 = moduli(e, default_thresholds(e), 4);
  for (size_t k = 0; k < p1.entries.size(); ++k) {
    CHECK(p1.entries[k].omega == p4.entries[k].omega);
    CHECK(p1.entries[k].rho == p4.entries[k].rho);
  }
}

TEST_CASE("float mode certifies the same spaces within slack") {
  auto raw = generate<double>(RandomGraphFamily{40, 0.15, 801});
  auto scaled = rescale_to_unit_gap(raw);
  auto e = embed(scaled.space, make_operators(scaled.space, OperatorMode::random, 7),
                 scaled.scale);
  auto report = distortion(e);
  CHECK(report.pass());
  auto ledger = certify_cases(e);
  CHECK(ledger.all_pass);
  CHECK(envelope_check(e).ok);
  CHECK(moduli(e, default_thresholds(e)).pass());
}
