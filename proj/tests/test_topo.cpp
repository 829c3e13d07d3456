#include <random>

#include "doctest.h"
#include "piet/carrier.hpp"
#include "piet/topo.hpp"

using namespace piet;

namespace {

// city pentagon crossed by a straight river entering edge A-B and leaving
// edge B-C; labels follow the topological-information figure convention
struct TopoFixture {
  std::vector<Layer> layers;
  BBox box;
  EpsilonConfig eps;
  Arrangement arr;
  Overlay overlay;
  TopologicalInvariant inv;
};

TopoFixture build_city_river() {
  TopoFixture f;
  Layer city;
  city.name = "city";
  city.polygons.push_back({1, {{0, 0}, {8, 0}, {10, 6}, {5, 10}, {0, 6}}});
  Layer river;
  river.name = "river";
  river.polylines.push_back({1, {{4, -4}, {12, 8}}});
  f.layers = {city, river};
  f.box = bbox_of_layers(f.layers, 0.25);
  f.eps = EpsilonConfig::for_box(f.box);
  f.arr = csp(f.layers, f.box, f.eps);
  f.overlay = grid_csp(f.layers, f.box, {1, 1}, f.eps);
  associate(f.overlay, f.layers);
  f.inv = build_invariant(f.arr, regions_of(f.overlay));
  return f;
}

std::int64_t node_at(const Arrangement& arr, Point2 p) {
  for (const Cell& c : arr.cells)
    if (c.kind() == CellKind::SubNode && is_similar_point(c.node(), p, 1e-6))
      return c.cell_id;
  return -1;
}

std::int64_t edge_with_midpoint(const Arrangement& arr, Point2 mid) {
  for (const Cell& c : arr.cells)
    if (c.kind() == CellKind::SubLine &&
        is_similar_point(c.segment().midpoint(), mid, 1e-6))
      return c.cell_id;
  return -1;
}

std::int64_t face_containing(const Arrangement& arr, Point2 p) {
  for (const Cell& c : arr.cells)
    if (c.kind() == CellKind::SubPolygon &&
        point_in_polygon(p, c.polygon(), 1e-9) == PointLocation::Inside)
      return c.cell_id;
  return -1;
}

Point2 apply_shear(Point2 p) { return {p.x + 0.35 * p.y, 0.9 * p.y + 0.05 * p.x}; }

Layer shear_layer(const Layer& in) {
  Layer out = in;
  for (PointFeature& f : out.points) f.p = apply_shear(f.p);
  for (Polyline& pl : out.polylines)
    for (Point2& p : pl.vertices) p = apply_shear(p);
  for (Polygon& pg : out.polygons)
    for (Point2& p : pg.ring) p = apply_shear(p);
  return out;
}

// box containing every carrier intersection, so clipping cannot change the
// combinatorial structure between the original and the sheared instance
BBox intersection_closed_box(const std::vector<Layer>& layers, const EpsilonConfig& eps) {
  CarrierSet cs = carriers_of_layers(layers, eps);
  std::vector<Point2> pts;
  for (const Layer& l : layers) {
    for (const Polygon& pg : l.polygons)
      for (Point2 p : pg.ring) pts.push_back(p);
    for (const Polyline& pl : l.polylines)
      for (Point2 p : pl.vertices) pts.push_back(p);
    for (const PointFeature& f : l.points) pts.push_back(f.p);
  }
  for (std::size_t i = 0; i < cs.lines.size(); ++i)
    for (std::size_t j = i + 1; j < cs.lines.size(); ++j) {
      auto p = line_intersection(cs.lines[i], cs.lines[j]);
      if (p) pts.push_back(*p);
    }
  BBox b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (Point2 p : pts) {
    b.xmin = std::min(b.xmin, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.xmax = std::max(b.xmax, p.x);
    b.ymax = std::max(b.ymax, p.y);
  }
  double pad = 0.1 * std::max(b.width(), b.height()) + 1.0;
  return {b.xmin - pad, b.ymin - pad, b.xmax + pad, b.ymax + pad};
}

TopologicalInvariant invariant_of(const std::vector<Layer>& layers) {
  BBox box = intersection_closed_box(layers, EpsilonConfig{1e-9, 1e-12, 1e-9});
  EpsilonConfig eps = EpsilonConfig::for_box(box);
  Arrangement arr = csp(layers, box, eps);
  Overlay ov = grid_csp(layers, box, {1, 1}, eps);
  associate(ov, layers);
  return build_invariant(arr, regions_of(ov));
}

}  // namespace

TEST_CASE("city-river invariant reproduces the figure tuples") {
  TopoFixture f = build_city_river();

  // river crosses edge A-B at b=(20/3,0) and edge B-C at (28/3,4)
  std::int64_t b = node_at(f.arr, {20.0 / 3.0, 0});
  std::int64_t c = node_at(f.arr, {8, 0});  // the pentagon corner B
  REQUIRE(b >= 0);
  REQUIRE(c >= 0);

  std::int64_t e1 = edge_with_midpoint(f.arr, {10.0 / 3.0, 0});      // A..b
  std::int64_t e2 = edge_with_midpoint(f.arr, {(20.0 / 3.0 + 8) / 2, 0});  // b..B
  std::int64_t e4 = edge_with_midpoint(f.arr, {8, 2});               // river inside
  std::int64_t e5 = edge_with_midpoint(f.arr, {16.0 / 3.0, -2});     // river below b
  REQUIRE(e1 >= 0);
  REQUIRE(e2 >= 0);
  REQUIRE(e4 >= 0);
  REQUIRE(e5 >= 0);

  std::int64_t face_I = face_containing(f.arr, {8, 1.2});  // wedge b, B, f
  REQUIRE(face_I >= 0);

  CHECK(f.inv.face_edge.count({face_I, e2}));
  CHECK(f.inv.face_edge.count({face_I, e4}));
  CHECK(f.inv.face_vertex.count({face_I, b}));
  CHECK(f.inv.face_vertex.count({face_I, c}));
  CHECK(f.inv.between.count({Orientation::Ccw, e1, e5, e2}));
  CHECK(f.inv.between.count({Orientation::Ccw, e5, e2, e4}));
  CHECK(f.inv.between.count({Orientation::Cw, e2, e5, e1}));

  // regions carry the original geometries' cells
  CHECK(f.inv.regions.count("city.1"));
  CHECK(f.inv.regions.count("river.1"));

  CHECK(f.inv.euler_characteristic() == 2);
}

TEST_CASE("edge-adjacency of regions") {
  // 2x2 state tiles: corner states touch two neighbors by edges, the
  // diagonal one only at a vertex
  Layer states;
  states.name = "states";
  states.polygons.push_back({1, {{0, 0}, {5, 0}, {5, 5}, {0, 5}}});
  states.polygons.push_back({2, {{5, 0}, {10, 0}, {10, 5}, {5, 5}}});
  states.polygons.push_back({3, {{0, 5}, {5, 5}, {5, 10}, {0, 10}}});
  states.polygons.push_back({4, {{5, 5}, {10, 5}, {10, 10}, {5, 10}}});
  std::vector<Layer> layers{states};
  BBox box = bbox_of_layers(layers, 0.2);
  EpsilonConfig eps = EpsilonConfig::for_box(box);
  Arrangement arr = csp(layers, box, eps);
  Overlay ov = grid_csp(layers, box, {1, 1}, eps);
  associate(ov, layers);
  TopologicalInvariant inv = build_invariant(arr, regions_of(ov));

  CHECK(adjacent_regions(inv, "states.1") ==
        std::set<std::string>{"states.2", "states.3"});
  CHECK(adjacent_region_count(inv, "states.4") == 2);
  CHECK_THROWS_AS(adjacent_regions(inv, "states.9"), unknown_region_error);
  CHECK(inv.euler_characteristic() == 2);

  // pinwheel contact: two squares sharing one corner are not adjacent
  Layer pin;
  pin.name = "pin";
  pin.polygons.push_back({1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
  pin.polygons.push_back({2, {{1, 1}, {2, 1}, {2, 2}, {1, 2}}});
  TopologicalInvariant pinv = invariant_of({pin});
  CHECK(adjacent_regions(pinv, "pin.1").empty());

  // isolated island
  Layer iso;
  iso.name = "iso";
  iso.polygons.push_back({1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
  iso.polygons.push_back({2, {{5, 5}, {6, 5}, {6, 6}, {5, 6}}});
  TopologicalInvariant iinv = invariant_of({iso});
  CHECK(adjacent_regions(iinv, "iso.1").empty());
}

TEST_CASE("invariant equals itself and differs after edits") {
  TopoFixture f = build_city_river();
  CHECK(invariant_equal_up_to_relabel(f.inv, f.inv));

  TopologicalInvariant mutated = f.inv;
  mutated.edge.insert(999999);
  mutated.endpoints.insert({999999, *mutated.vertex.begin(), *mutated.vertex.rbegin()});
  CHECK(!invariant_equal_up_to_relabel(f.inv, mutated));
}

TEST_CASE("orientation-preserving affine rebuild is relabel-isomorphic") {
  // polygon-only fixtures: polygon carriers are affine-equivariant
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  for (int iter = 0; iter < 4; ++iter) {
    Layer a;
    a.name = "a";
    Layer b;
    b.name = "b";
    for (int i = 1; i <= 2; ++i) {
      double cx = u(rng), cy = u(rng), w = 4 + u(rng) * 0.2, h = 3 + u(rng) * 0.2;
      a.polygons.push_back(
          {i, {{cx, cy}, {cx + w, cy}, {cx + w, cy + h}, {cx, cy + h}}});
      double dx = u(rng), dy = u(rng);
      b.polygons.push_back(
          {i, {{dx, dy}, {dx + 5, dy}, {dx + 7, dy + 4}, {dx + 1, dy + 6}}});
    }
    std::vector<Layer> layers{a, b};
    std::vector<Layer> sheared{shear_layer(a), shear_layer(b)};

    TopologicalInvariant inv1 = invariant_of(layers);
    TopologicalInvariant inv2 = invariant_of(sheared);

    CHECK(inv1.euler_characteristic() == 2);
    CHECK(inv2.euler_characteristic() == 2);
    CHECK(invariant_equal_up_to_relabel(inv1, inv2));
    for (const auto& [name, cells] : inv1.regions) {
      CHECK(adjacent_region_count(inv1, name) == adjacent_region_count(inv2, name));
    }
  }
}
