#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "linfembed/amalgam.hpp"
#include "linfembed/generate.hpp"
#include "linfembed/geometry.hpp"
#include "linfembed/graph.hpp"
#include "linfembed/metric_space.hpp"
#include "test_util.hpp"

using namespace linfembed;
using testutil::space_from_rows;

TEST_CASE("validate accepts the smallest nondegenerate space") {
  auto m = space_from_rows<Rat>({{Rat(0), Rat(3)}, {Rat(3), Rat(0)}});
  CHECK(validate(m).ok());
}

TEST_CASE("validate reports a triangle violation with witnesses and defect") {
  auto m = space_from_rows<Rat>({{Rat(0), Rat(1), Rat(10)},
                                 {Rat(1), Rat(0), Rat(1)},
                                 {Rat(10), Rat(1), Rat(0)}});
  auto report = validate(m);
  REQUIRE_FALSE(report.ok());
  REQUIRE(report.violations.size() == 1);
  const auto& v = report.violations[0];
  CHECK(v.kind == ViolationKind::triangle);
  CHECK(v.i == 0);  // endpoints a, c through midpoint b
  CHECK(v.j == 1);
  CHECK(v.k == 2);
  CHECK(v.defect == Rat(8));
  CHECK(describe(v, m).find("(a,b,c)") != std::string::npos);
}

TEST_CASE("validate rejects duplicate points, asymmetry, nonzero diagonal") {
  auto dup = space_from_rows<Rat>({{Rat(0), Rat(0)}, {Rat(0), Rat(0)}});
  auto r1 = validate(dup);
  REQUIRE(r1.violations.size() == 1);
  CHECK(r1.violations[0].kind == ViolationKind::nonpositive);

  auto asym = space_from_rows<Rat>({{Rat(0), Rat(1)}, {Rat(2), Rat(0)}});
  auto r2 = validate(asym);
  REQUIRE(r2.violations.size() == 1);
  CHECK(r2.violations[0].kind == ViolationKind::asymmetric);

  auto diag = space_from_rows<Rat>({{Rat(1), Rat(1)}, {Rat(1), Rat(0)}});
  bool found = false;
  for (const auto& v : validate(diag).violations)
    found = found || v.kind == ViolationKind::diagonal_nonzero;
  CHECK(found);
}

TEST_CASE("validate flags a non-square table as structural, not metric") {
  MetricSpace<Rat> m;
  m.points = {"a", "b"};
  m.dist = {Rat(0), Rat(1), Rat(1)};  // one entry short
  m.basepoint = 0;
  auto report = validate(m);
  CHECK_FALSE(report.structural_ok);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == ViolationKind::table_shape);
}

TEST_CASE("shortest-path tables validate and match the Floyd-Warshall oracle") {
  for (uint64_t seed : {1u, 2u, 3u, 4u}) {
    auto m = generate<Rat>(RandomGraphFamily{18, 0.25, seed});
    CHECK(validate(m).ok());
    CHECK(testutil::oracle_triangle_ok(m));
  }
}

TEST_CASE("from_graph: path, single edge, grid section") {
  WeightedGraph<Rat> path;
  path.nodes = {"a", "b", "c"};
  path.edges = {{0, 1, Rat(1)}, {1, 2, Rat(1)}};
  auto m = shortest_path_metric(path);
  CHECK(m.d(0, 2) == Rat(2));

  WeightedGraph<Rat> single;
  single.nodes = {"a", "b"};
  single.edges = {{0, 1, Rat(7)}};
  CHECK(shortest_path_metric(single).d(0, 1) == Rat(7));

  // 5x5 section of the integer lattice: path metric equals l1
  WeightedGraph<Rat> grid;
  auto id = [](int x, int y) { return 5 * x + y; };
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y)
      grid.nodes.push_back(std::to_string(x) + "," + std::to_string(y));
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y) {
      if (x + 1 < 5) grid.edges.push_back({id(x, y), id(x + 1, y), Rat(1)});
      if (y + 1 < 5) grid.edges.push_back({id(x, y), id(x, y + 1), Rat(1)});
    }
  auto gm = shortest_path_metric(grid);
  for (int i = 0; i < gm.size(); ++i)
    for (int j = 0; j < gm.size(); ++j)
      CHECK(gm.d(i, j) == Rat(testutil::oracle_grid_l1(gm.points[i], gm.points[j])));
}

TEST_CASE("from_graph agrees with the Floyd-Warshall closure on weighted graphs") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 12;
    WeightedGraph<Rat> g;
    for (int i = 0; i < n; ++i) g.nodes.push_back(std::to_string(i));
    std::vector<std::tuple<int, int, Rat>> edges;
    for (int i = 1; i < n; ++i) {
      int j = static_cast<int>(rng.below(i));
      Rat w(static_cast<long long>(1 + rng.below(5)));
      g.edges.push_back({j, i, w});
      edges.push_back({j, i, w});
    }
    for (int extra = 0; extra < n; ++extra) {
      int i = static_cast<int>(rng.below(n));
      int j = static_cast<int>(rng.below(n));
      if (i == j) continue;
      Rat w(static_cast<long long>(1 + rng.below(5)));
      g.edges.push_back({i, j, w});
      edges.push_back({i, j, w});
    }
    auto m = shortest_path_metric(g);
    auto oracle = testutil::oracle_floyd_warshall(n, edges);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(m.d(i, j) == oracle[i][j]);
  }
}

TEST_CASE("from_graph errors: disconnected names the unreachable node, bad weight rejected") {
  WeightedGraph<Rat> g;
  g.nodes = {"a", "b", "c"};
  g.edges = {{0, 1, Rat(1)}};
  CHECK_THROWS_WITH_AS(shortest_path_metric(g), doctest::Contains("'c'"), InputError);

  WeightedGraph<Rat> bad;
  bad.nodes = {"a", "b"};
  bad.edges = {{0, 1, Rat(0)}};
  CHECK_THROWS_AS(shortest_path_metric(bad), InputError);
}

TEST_CASE("rescale_to_unit_gap pins the smallest radial distance at 2") {
  SUBCASE("half-unit gap scales by 4") {
    auto m = testutil::pair_space(Rat(1) / 2);
    auto out = rescale_to_unit_gap(m);
    CHECK(out.scale == Rat(4));
    CHECK(out.space.base_norm(1) == Rat(2));
  }
  SUBCASE("gap already 2 is a fixed point") {
    auto m = testutil::pair_space(Rat(2));
    auto out = rescale_to_unit_gap(m);
    CHECK(out.scale == Rat(1));
    CHECK(out.space.dist == m.dist);
  }
  SUBCASE("norms 1 and 10 become 2 and 20") {
    auto m = space_from_rows<Rat>({{Rat(0), Rat(1), Rat(10)},
                                   {Rat(1), Rat(0), Rat(10)},
                                   {Rat(10), Rat(10), Rat(0)}});
    REQUIRE(validate(m).ok());
    auto out = rescale_to_unit_gap(m);
    CHECK(out.scale == Rat(2));
    CHECK(out.space.base_norm(1) == Rat(2));
    CHECK(out.space.base_norm(2) == Rat(20));
  }
  SUBCASE("single point cannot be rescaled") {
    MetricSpace<Rat> one;
    one.points = {"a"};
    one.dist = {Rat(0)};
    CHECK_THROWS_AS(rescale_to_unit_gap(one), DomainError);
  }
}

TEST_CASE("balls are nested prefixes that exhaust the space") {
  // norms 0, 2, 3, 5
  auto m = space_from_rows<Rat>({{Rat(0), Rat(2), Rat(3), Rat(5)},
                                 {Rat(2), Rat(0), Rat(2), Rat(4)},
                                 {Rat(3), Rat(2), Rat(0), Rat(2)},
                                 {Rat(5), Rat(4), Rat(2), Rat(0)}});
  REQUIRE(validate(m).ok());
  auto b1 = ball(m, 1);  // radius 4
  CHECK(b1 == std::vector<int>{0, 1, 2});
  auto b2 = ball(m, 2);  // radius 8 exhausts
  CHECK(b2.size() == 4);
  // nested chain
  for (int n = 0; n + 1 < 4; ++n) {
    auto lo = ball(m, n);
    auto hi = ball(m, n + 1);
    CHECK(std::equal(lo.begin(), lo.end(), hi.begin()));
  }
  // a space whose smallest radial distance exceeds 2 keeps B_0 trivial
  auto wide = testutil::pair_space(Rat(3));
  CHECK(ball(wide, 0) == std::vector<int>{0});
}

TEST_CASE("after rescaling, the ball chain exhausts at ceil(log2(max radial)) - 1") {
  for (uint64_t seed : {11u, 12u, 13u}) {
    auto m = rescale_to_unit_gap(generate<Rat>(RandomGraphFamily{20, 0.25, seed})).space;
    Rat max_norm{0};
    for (int i = 0; i < m.size(); ++i)
      if (m.base_norm(i) > max_norm) max_norm = m.base_norm(i);
    int k = 0;
    Rat pow{1};
    while (pow < max_norm) {
      pow += pow;
      ++k;
    }
    REQUIRE(k >= 1);
    CHECK(static_cast<int>(ball(m, k - 1).size()) == m.size());
  }
}

TEST_CASE("ball order is radial with input order breaking ties") {
  auto m = space_from_rows<Rat>({{Rat(0), Rat(3), Rat(2), Rat(3)},
                                 {Rat(3), Rat(0), Rat(2), Rat(2)},
                                 {Rat(2), Rat(2), Rat(0), Rat(2)},
                                 {Rat(3), Rat(2), Rat(2), Rat(0)}});
  REQUIRE(validate(m).ok());
  CHECK(canonical_order(m) == std::vector<int>{0, 2, 1, 3});  // norms 0,2,3,3
}

TEST_CASE("amalgam distances follow the max formula") {
  // part 1: point x at distance 5 from its basepoint; part 2: y at 1
  auto p1 = testutil::pair_space(Rat(5));
  auto p2 = testutil::pair_space(Rat(1));
  auto a = amalgamate<Rat>({p1, p2});
  int x = a.composite.index_of("p1:b");
  int y = a.composite.index_of("p2:b");
  REQUIRE(x >= 0);
  REQUIRE(y >= 0);
  CHECK(a.composite.d(x, y) == Rat(5));  // max{1, 2, 5, 1}

  // basepoint-to-basepoint across parts 3 and 7
  std::vector<MetricSpace<Rat>> parts;
  for (int k = 0; k < 7; ++k) parts.push_back(testutil::pair_space(Rat(1)));
  auto seven = amalgamate(parts);
  int b3 = seven.composite.index_of("p3:a");
  int b7 = seven.composite.index_of("p7:a");
  CHECK(seven.composite.d(b3, b7) == Rat(7));  // max{3, 7, 0, 0}
}

TEST_CASE("amalgam validates, restricts isometrically, matches the formula oracle") {
  std::vector<MetricSpace<Rat>> parts = {
      generate<Rat>(GridFamily{1, 2}),
      generate<Rat>(RandomTreeFamily{6, 11}),
      generate<Rat>(UniformPointsFamily{5, 2, 12}),
  };
  auto a = amalgamate(parts);
  CHECK(validate(a.composite).ok());
  CHECK(testutil::oracle_triangle_ok(a.composite));
  for (size_t p = 1; p <= parts.size(); ++p)
    CHECK(part_isometry_defect(a, parts[p - 1], static_cast<int>(p)) == Rat(0));
  for (size_t p = 1; p <= parts.size(); ++p)
    for (size_t q = 1; q <= parts.size(); ++q)
      for (int x = 0; x < parts[p - 1].size(); ++x)
        for (int y = 0; y < parts[q - 1].size(); ++y) {
          int ci = a.parts[p - 1].offset + x;
          int cj = a.parts[q - 1].offset + y;
          CHECK(a.composite.d(ci, cj) ==
                testutil::oracle_amalgam_distance(parts, static_cast<int>(p), x,
                                                  static_cast<int>(q), y));
        }
  CHECK_THROWS_AS(amalgamate<Rat>({}), InputError);
}

TEST_CASE("amalgam balls of radius r meet at most floor(r) parts (r >= 1)") {
  std::vector<MetricSpace<Rat>> parts;
  for (int k = 0; k < 5; ++k) parts.push_back(generate<Rat>(GridFamily{1, 1}));
  auto a = amalgamate(parts);
  for (int r = 1; r <= 5; ++r) {
    for (int center = 0; center < a.composite.size(); ++center) {
      std::set<int> met;
      for (int other = 0; other < a.composite.size(); ++other)
        if (a.composite.d(center, other) <= Rat(r)) met.insert(a.part_of(other));
      CHECK(static_cast<int>(met.size()) <= r);
    }
  }
}

TEST_CASE("geometry profile counts closed balls") {
  auto seg = generate<Rat>(GridFamily{1, 4});
  auto prof = geometry_profile(seg, {Rat(1) / 2, Rat(3) / 2, Rat(2), Rat(5) / 2, Rat(3)});
  CHECK(prof.counts == std::vector<int>{1, 3, 5, 5, 7});  // 2*floor(r)+1 inside the segment
  for (size_t k = 1; k < prof.counts.size(); ++k) CHECK(prof.counts[k] >= prof.counts[k - 1]);
  CHECK_THROWS_AS(geometry_profile(seg, {Rat(2), Rat(1)}), InputError);
  CHECK_THROWS_AS(geometry_profile(seg, {Rat(0)}), InputError);
}

TEST_CASE("growable lattice materializes consistent monotone balls") {
  auto g = lattice_growable<Rat>(2);
  auto small = g.ball_oracle(Rat(3) / 2);
  auto large = g.ball_oracle(Rat(7) / 2);
  CHECK(small.size() < large.size());
  for (int i = 0; i < small.size(); ++i) {
    int gi = large.index_of(small.points[i]);
    REQUIRE(gi >= 0);
    for (int j = 0; j < small.size(); ++j) {
      int gj = large.index_of(small.points[j]);
      CHECK(small.d(i, j) == large.d(gi, gj));
    }
  }
  auto prof = geometry_profile(g, {Rat(3) / 2});
  CHECK(prof.counts[0] == 5);  // center of the l1 ball: {(0,0),(±1,0),(0,±1)}
  // below the lattice spacing the closed ball is the origin alone
  auto tiny = g.ball_oracle(Rat(1) / 2);
  CHECK(tiny.size() == 1);
  CHECK(tiny.points[0] == "0,0");
}

TEST_CASE("generators: counts, determinism, repair") {
  auto grid = generate<Rat>(GridFamily{2, 2});
  CHECK(grid.size() == 13);
  CHECK(grid.points[grid.basepoint] == "0,0");
  CHECK(validate(grid).ok());

  auto t1 = generate<Rat>(RandomTreeFamily{20, 5});
  auto t2 = generate<Rat>(RandomTreeFamily{20, 5});
  CHECK(t1.dist == t2.dist);
  CHECK(validate(t1).ok());
  auto t3 = generate<Rat>(RandomTreeFamily{20, 6});
  CHECK(t1.dist != t3.dist);

  // tree metrics satisfy the four point condition, checked exactly
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    int x = static_cast<int>(rng.below(t1.size()));
    int y = static_cast<int>(rng.below(t1.size()));
    int z = static_cast<int>(rng.below(t1.size()));
    int w = static_cast<int>(rng.below(t1.size()));
    Rat s1 = t1.d(x, y) + t1.d(z, w);
    Rat s2 = t1.d(x, z) + t1.d(y, w);
    Rat s3 = t1.d(x, w) + t1.d(y, z);
    CHECK(s1 <= linfembed::max_of(s2, s3));
  }

  auto g1 = generate<Rat>(RandomGraphFamily{30, 0.15, 9});
  auto g2 = generate<Rat>(RandomGraphFamily{30, 0.15, 9});
  CHECK(g1.dist == g2.dist);
  CHECK(validate(g1).ok());

  // p = 0 leaves singletons; the deterministic repair must bridge them all
  auto repaired = generate<Rat>(RandomGraphFamily{6, 0.0, 4});
  CHECK(validate(repaired).ok());
  CHECK(repaired.metadata.count("connectivity_repair_edges") == 1);
  CHECK(repaired.metadata.at("connectivity_repair_edges") == "5");

  auto u1 = generate<Rat>(UniformPointsFamily{25, 3, 2});
  CHECK(validate(u1).ok());
  CHECK(u1.size() == 25);
}

TEST_CASE("generated spaces stay valid across seeds and families") {
  for (uint64_t seed : {21u, 22u, 23u}) {
    CHECK(validate(generate<Rat>(RandomGraphFamily{24, 0.2, seed})).ok());
    CHECK(validate(generate<Rat>(RandomTreeFamily{24, seed})).ok());
    CHECK(validate(generate<Rat>(UniformPointsFamily{24, 2, seed})).ok());
  }
}
