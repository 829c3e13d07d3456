#include <algorithm>
#include <random>

#include "doctest.h"
#include "piet/baseline.hpp"
#include "piet/engine.hpp"
#include "piet/gen.hpp"

using namespace piet;

namespace {

std::vector<RTreeEntry> random_points(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::uniform_real_distribution<double> val(0.0, 100.0);
  std::vector<RTreeEntry> out;
  for (std::size_t i = 0; i < n; ++i) {
    Point2 p{u(rng), u(rng)};
    out.push_back({Mbr::of_point(p), static_cast<std::int64_t>(i), val(rng)});
  }
  return out;
}

}  // namespace

TEST_CASE("bulk build invariants") {
  std::mt19937_64 rng(21);

  RTree single = RTree::bulk_load(random_points(rng, 1), 8);
  CHECK(single.height() == 0);
  CHECK(single.size() == 1);

  auto entries = random_points(rng, 1000);
  RTree tree = RTree::bulk_load(entries, 16);
  CHECK(tree.size() == 1000);
  CHECK(tree.height() >= 1);
  CHECK(tree.height() <= 3);
  auto rep = tree.check_invariants(true);
  CHECK(rep.balanced);
  CHECK(rep.mbrs_tight);
  CHECK(rep.fill_ok);

  // odd sizes keep nodes at least half full
  for (std::size_t n : {17UL, 33UL, 65UL, 257UL}) {
    RTree t = RTree::bulk_load(random_points(rng, n), 16);
    auto r = t.check_invariants(true);
    CHECK(r.balanced);
    CHECK(r.mbrs_tight);
    CHECK(r.fill_ok);
  }
}

TEST_CASE("insert path keeps the tree sound") {
  std::mt19937_64 rng(4);
  RTree tree(8);
  auto entries = random_points(rng, 300);
  for (const RTreeEntry& e : entries) tree.insert(e);
  CHECK(tree.size() == 300);
  auto rep = tree.check_invariants(true);
  CHECK(rep.balanced);
  CHECK(rep.mbrs_tight);
  CHECK(rep.fill_ok);

  Mbr all{-1, -1, 1001, 1001};
  CHECK(tree.range_query(all).size() == 300);
}

TEST_CASE("range queries equal the naive filter") {
  std::mt19937_64 rng(77);
  auto entries = random_points(rng, 500);
  RTree tree = RTree::bulk_load(entries, 16);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < 50; ++i) {
    double x1 = u(rng), x2 = u(rng), y1 = u(rng), y2 = u(rng);
    Mbr rect{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
    std::vector<std::int64_t> expect;
    for (const RTreeEntry& e : entries)
      if (e.box.intersects(rect)) expect.push_back(e.id);
    std::sort(expect.begin(), expect.end());
    CHECK(tree.range_query(rect) == expect);
  }
  CHECK(tree.range_query({2000, 2000, 2001, 2001}).empty());
}

TEST_CASE("spatial join with exact containment matches the engine") {
  GenSpec spec;
  spec.seed = 31;
  spec.states = 6;
  spec.rivers = 0;
  spec.points = 25;
  auto layers = generate_map(spec);
  const Layer& states = layers[0];
  const Layer& volcanoes = layers[3];

  std::vector<RTreeEntry> se, ve;
  for (const Polygon& pg : states.polygons)
    se.push_back({Mbr::of_points(pg.ring), pg.gid, 0.0});
  for (const PointFeature& f : volcanoes.points)
    ve.push_back({Mbr::of_point(f.p), f.gid, 0.0});
  RTree st = RTree::bulk_load(se, 8);
  RTree vt = RTree::bulk_load(ve, 8);

  BBox box = bbox_of_layers({states, volcanoes}, 0.1);
  EpsilonConfig eps = EpsilonConfig::for_box(box);
  auto exact = [&](std::int64_t s, std::int64_t v) {
    std::size_t si = 0, vi = 0;
    for (std::size_t i = 0; i < states.polygons.size(); ++i)
      if (states.polygons[i].gid == s) si = i;
    for (std::size_t i = 0; i < volcanoes.points.size(); ++i)
      if (volcanoes.points[i].gid == v) vi = i;
    return exact_contains(states, GeomKind::Polygon, si, volcanoes, GeomKind::Point,
                          vi, eps);
  };
  auto joined = RTree::spatial_join(st, vt, exact);
  auto naive = naive_contains(states, volcanoes, CellKind::SubNode, eps);
  CHECK(joined == naive);
}

TEST_CASE("aR-tree aggregates match brute force and prune contained subtrees") {
  std::mt19937_64 rng(99);
  auto entries = random_points(rng, 1000);
  RTree tree = RTree::bulk_load(entries, 16);

  // a region covering the root answers in one visit
  Mbr everything{-10, -10, 1010, 1010};
  CHECK(tree.ar_aggregate(everything, ArAggKind::Count) == doctest::Approx(1000));
  CHECK(tree.visits() == 1);

  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < 50; ++i) {
    double x1 = u(rng), x2 = u(rng), y1 = u(rng), y2 = u(rng);
    Mbr rect{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};

    double bf_count = 0, bf_sum = 0, bf_max = -1e300;
    for (const RTreeEntry& e : entries) {
      if (!rect.contains(e.box)) continue;
      bf_count += 1;
      bf_sum += e.value;
      bf_max = std::max(bf_max, e.value);
    }
    CHECK(tree.ar_aggregate(rect, ArAggKind::Count) == doctest::Approx(bf_count));
    CHECK(tree.ar_aggregate(rect, ArAggKind::Sum) == doctest::Approx(bf_sum));
    if (bf_count > 0)
      CHECK(tree.ar_aggregate(rect, ArAggKind::Max) == doctest::Approx(bf_max));

    // pruning: subtrees of fully-contained nodes are never visited
    (void)tree.ar_aggregate(rect, ArAggKind::Count);
    std::vector<int> trace = tree.visit_trace();
    std::set<int> visited(trace.begin(), trace.end());
    for (int node : tree.nodes_inside(rect)) {
      if (!visited.count(node)) continue;
      for (int below : tree.descendants(node)) CHECK(!visited.count(below));
    }
    if (!tree.nodes_inside(rect).empty()) {
      bool some_contained_visited = false;
      for (int node : tree.nodes_inside(rect))
        if (visited.count(node)) some_contained_visited = true;
      if (some_contained_visited) CHECK(tree.visits() < 1000);
    }
  }
}
