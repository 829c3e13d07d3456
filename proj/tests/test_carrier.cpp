#include <random>

#include "doctest.h"
#include "piet/carrier.hpp"

using namespace piet;

namespace {
EpsilonConfig eps_default() {
  EpsilonConfig e;
  e.point_eps = 1e-9;
  e.line_eps = 1e-9;
  e.area_eps = 1e-12;
  return e;
}
}  // namespace

TEST_CASE("carriers of a point are its horizontal and vertical lines") {
  auto ls = carriers_of_point({378, 145});
  REQUIRE(ls.size() == 2);
  CHECK(std::fabs(ls[0].eval({378, 145})) < 1e-9);
  CHECK(std::fabs(ls[1].eval({378, 145})) < 1e-9);
  CHECK(similar_lines(ls[0], horizontal_through({0, 145}), 1e-9));
  CHECK(similar_lines(ls[1], vertical_through({378, 0}), 1e-9));

  CHECK(carriers_of_point({0, 0}).size() == 2);
}

TEST_CASE("carriers of polylines") {
  EpsilonConfig eps = eps_default();
  Polyline simple{1, {{0, 0}, {1, 0}}};
  CHECK(carriers_of_polyline(simple, eps).size() == 3);  // y=0, x=0, x=1

  Polyline collinear{2, {{0, 0}, {1, 0}, {2, 0}}};
  CHECK(carriers_of_polyline(collinear, eps).size() == 3);

  Polyline river{3, {{191, 300}, {280, 319}, {350, 272}, {367, 300}}};
  CHECK(carriers_of_polyline(river, eps).size() == 5);

  Polyline closed{4, {{0, 0}, {1, 0}, {1, 1}, {0, 0}}};
  CHECK(carriers_of_polyline(closed, eps).size() == 3);  // no end perpendiculars
}

TEST_CASE("carriers of polygons") {
  EpsilonConfig eps = eps_default();
  Polygon square{1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  CHECK(carriers_of_polygon(square, eps).size() == 4);

  Polygon tri{2, {{0, 0}, {1, 0}, {0, 1}}};
  CHECK(carriers_of_polygon(tri, eps).size() == 3);

  // one side split into two collinear edges still yields 4 lines
  Polygon split{3, {{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}}};
  CHECK(carriers_of_polygon(split, eps).size() == 4);
}

TEST_CASE("cross-layer dedup merges coincident carriers with provenance") {
  EpsilonConfig eps = eps_default();
  Layer states;
  states.name = "states";
  states.polygons.push_back({1, {{0, 0}, {4, 0}, {4, 4}, {0, 4}}});
  Layer rivers;
  rivers.name = "rivers";
  // river running along the southern state boundary
  rivers.polylines.push_back({7, {{1, 0}, {3, 0}}});

  CarrierSet cs = carriers_of_layers({states, rivers}, eps);
  Line south = horizontal_through({0, 0});
  int hits = 0;
  for (std::size_t i = 0; i < cs.lines.size(); ++i) {
    if (similar_lines(cs.lines[i], south, eps.line_eps)) {
      ++hits;
      CHECK(cs.provenance[i].count({"states", 1}) == 1);
      CHECK(cs.provenance[i].count({"rivers", 7}) == 1);
    }
  }
  CHECK(hits == 1);
}

TEST_CASE("carrier count bound and layer-order independence") {
  EpsilonConfig eps = eps_default();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  Layer a, b, c;
  a.name = "a";
  b.name = "b";
  c.name = "c";
  for (int i = 0; i < 8; ++i) a.points.push_back({i, {u(rng), u(rng)}});
  for (int i = 0; i < 4; ++i) {
    Polyline pl{i, {}};
    for (int k = 0; k < 4; ++k) pl.vertices.push_back({u(rng), u(rng)});
    b.polylines.push_back(pl);
  }
  for (int i = 0; i < 3; ++i) {
    double cx = u(rng), cy = u(rng);
    c.polygons.push_back({i, {{cx, cy}, {cx + 5, cy}, {cx + 5, cy + 5}, {cx, cy + 5}}});
  }

  std::vector<Layer> fwd{a, b, c};
  std::vector<Layer> rev{c, b, a};
  CarrierSet s1 = carriers_of_layers(fwd, eps);
  CarrierSet s2 = carriers_of_layers(rev, eps);
  CHECK(s1.size() <= carrier_count_bound(fwd));
  REQUIRE(s1.size() == s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1.lines[i] == s2.lines[i]);

  // every original segment lies on exactly one carrier of the set
  for (const Polyline& pl : b.polylines) {
    for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i) {
      int on = 0;
      for (const Line& l : s1.lines)
        if (std::fabs(l.eval(pl.vertices[i])) < 1e-6 &&
            std::fabs(l.eval(pl.vertices[i + 1])) < 1e-6)
          ++on;
      CHECK(on == 1);
    }
  }

  CHECK(carriers_of_layers({Layer{"empty", {}, {}, {}, {}}}, eps).size() == 0);
}
