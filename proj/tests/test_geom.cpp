#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "piet/geom.hpp"

using namespace piet;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("line_through axis and diagonal lines") {
  Line h = line_through({0, 0}, {1, 0});
  CHECK(h.a == doctest::Approx(0.0));
  CHECK(h.b == doctest::Approx(1.0));
  CHECK(h.c == doctest::Approx(0.0));

  Line v = line_through({0, 0}, {0, 1});
  CHECK(v.a == doctest::Approx(1.0));
  CHECK(v.b == doctest::Approx(0.0));
  CHECK(v.c == doctest::Approx(0.0));

  // y = x, canonical sign a > 0
  Line d = line_through({0, 0}, {1, 1});
  CHECK(d.a == doctest::Approx(kInvSqrt2));
  CHECK(d.b == doctest::Approx(-kInvSqrt2));
  CHECK(d.c == doctest::Approx(0.0));
  CHECK(std::fabs(d.eval({0, 0})) < 1e-12);
  CHECK(std::fabs(d.eval({1, 1})) < 1e-12);
}

TEST_CASE("line_through rejects degenerate pairs") {
  CHECK_THROWS_AS(line_through({1, 2}, {1, 2}), degenerate_pair_error);
}

TEST_CASE("line_through is direction independent, bit-exact") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    Point2 p{u(rng), u(rng)};
    Point2 q{u(rng), u(rng)};
    if (dist(p, q) < 1e-6) continue;
    Line l1 = line_through(p, q);
    Line l2 = line_through(q, p);
    CHECK(l1 == l2);
  }
}

TEST_CASE("canonicalization is idempotent") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    double a = u(rng), b = u(rng), c = u(rng);
    if (a == 0.0 && b == 0.0) continue;
    Line once = make_line(a, b, c);
    Line twice = canonicalize(once);
    CHECK(once == twice);
  }
}

TEST_CASE("perpendicular_at") {
  Line y0 = line_through({0, 0}, {1, 0});
  Line p1 = perpendicular_at(y0, {1, 0});  // x = 1
  CHECK(p1.a == doctest::Approx(1.0));
  CHECK(p1.b == doctest::Approx(0.0));
  CHECK(p1.c == doctest::Approx(-1.0));

  Line x0 = line_through({0, 0}, {0, 1});
  Line p2 = perpendicular_at(x0, {0, 5});  // y = 5
  CHECK(p2.a == doctest::Approx(0.0));
  CHECK(p2.b == doctest::Approx(1.0));
  CHECK(p2.c == doctest::Approx(-5.0));

  Line diag = make_line(1, 1, 0);  // x + y = 0
  Line p3 = perpendicular_at(diag, {1, 1});
  CHECK(std::fabs(p3.eval({1, 1})) < 1e-12);
  CHECK(std::fabs(p3.a * diag.a + p3.b * diag.b) < 1e-9);
}

TEST_CASE("line_intersection") {
  Line x0 = make_line(1, 0, 0);
  Line y0 = make_line(0, 1, 0);
  auto p = line_intersection(x0, y0);
  REQUIRE(p.has_value());
  CHECK(p->x == doctest::Approx(0.0));
  CHECK(p->y == doctest::Approx(0.0));

  CHECK(!line_intersection(make_line(0, 1, 0), make_line(0, 1, -1)).has_value());

  auto q = line_intersection(make_line(1, 1, -1), make_line(1, -1, 0));
  REQUIRE(q.has_value());
  CHECK(q->x == doctest::Approx(0.5));
  CHECK(q->y == doctest::Approx(0.5));
}

TEST_CASE("random non-parallel intersections satisfy both equations") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  int found = 0;
  while (found < 100) {
    Line l1 = line_through({u(rng), u(rng)}, {u(rng), u(rng)});
    Line l2 = line_through({u(rng), u(rng)}, {u(rng), u(rng)});
    auto p = line_intersection(l1, l2);
    if (!p) continue;
    if (std::fabs(p->x) > 1e6 || std::fabs(p->y) > 1e6) continue;
    CHECK(std::fabs(l1.eval(*p)) < 1e-9);
    CHECK(std::fabs(l2.eval(*p)) < 1e-9);
    ++found;
  }
}

TEST_CASE("is_similar_point uses the strict box test") {
  CHECK(is_similar_point({378, 145}, {378, 145}, 1e-9));
  CHECK(is_similar_point({378, 145}, {378.0000001, 145}, 1e-6));
  CHECK(!is_similar_point({0, 0}, {0, 1e-6}, 1e-6));  // strict inequality

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Point2 p{u(rng), u(rng)};
    Point2 q{p.x + u(rng) * 1e-6, p.y + u(rng) * 1e-6};
    CHECK(is_similar_point(p, p, 1e-9));
    CHECK(is_similar_point(p, q, 1e-5) == is_similar_point(q, p, 1e-5));
  }
}

TEST_CASE("point_in_polygon on the unit square") {
  Polygon sq{1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  CHECK(point_in_polygon({0.5, 0.5}, sq, 1e-9) == PointLocation::Inside);
  CHECK(point_in_polygon({0, 0.5}, sq, 1e-9) == PointLocation::OnBoundary);
  CHECK(point_in_polygon({2, 2}, sq, 1e-9) == PointLocation::Outside);
}

TEST_CASE("areas and lengths") {
  Polygon sq{1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  CHECK(polygon_area(sq) == doctest::Approx(1.0));

  Polyline pl{1, {{0, 0}, {3, 4}}};
  CHECK(polyline_length(pl) == doctest::Approx(5.0));

  std::vector<Point2> pent{{0, 0}, {2, 0}, {3, 1}, {1, 2}, {-1, 1}};
  Polygon pg{2, pent};
  CHECK(polygon_area(pg) == doctest::Approx(oracle::shoelace(pent)));
}

TEST_CASE("triangle area equals half the cross product") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (std::fabs(cross) < 1e-9) continue;
    std::vector<Point2> ring = cross > 0 ? std::vector<Point2>{a, b, c}
                                         : std::vector<Point2>{a, c, b};
    CHECK(polygon_area({0, ring}) == doctest::Approx(0.5 * std::fabs(cross)).epsilon(1e-12));
  }
}

TEST_CASE("clip_line_to_box") {
  BBox unit{0, 0, 1, 1};
  auto s1 = clip_line_to_box(make_line(0, 1, -0.5), unit);  // y = 0.5
  REQUIRE(s1.has_value());
  CHECK(s1->length() == doctest::Approx(1.0));
  CHECK(std::min(s1->a.x, s1->b.x) == doctest::Approx(0.0));
  CHECK(std::max(s1->a.x, s1->b.x) == doctest::Approx(1.0));
  CHECK(s1->a.y == doctest::Approx(0.5));

  CHECK(!clip_line_to_box(make_line(0, 1, -2), unit).has_value());  // y = 2

  auto s2 = clip_line_to_box(make_line(1, 1, -1), unit);  // x + y = 1
  REQUIRE(s2.has_value());
  CHECK(s2->length() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("intersection_area on squares") {
  Polygon a{1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  Polygon b{2, {{1, 0}, {2, 0}, {2, 1}, {1, 1}}};      // shares an edge
  Polygon c{3, {{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}}};  // 0.5 x 1 overlap
  CHECK(intersection_area(a, b, 1e-9) == doctest::Approx(0.0));
  CHECK(intersection_area(a, a, 1e-9) == doctest::Approx(1.0));
  CHECK(intersection_area(a, c, 1e-9) == doctest::Approx(0.5));
  CHECK(intersection_area(c, a, 1e-9) == doctest::Approx(0.5));
}

TEST_CASE("clipped segment length") {
  Polygon sq{1, {{0, 0}, {2, 0}, {2, 2}, {0, 2}}};
  CHECK(clipped_segment_length({-1, 1}, {3, 1}, sq, 1e-9) == doctest::Approx(2.0));
  CHECK(clipped_segment_length({0.5, 0.5}, {1.5, 0.5}, sq, 1e-9) == doctest::Approx(1.0));
  CHECK(clipped_segment_length({-2, -1}, {-1, -1}, sq, 1e-9) == doctest::Approx(0.0));
}

TEST_CASE("predicate counter moves on exact predicates only") {
  Polygon sq{1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  reset_predicate_evals();
  CHECK(predicate_evals() == 0);
  (void)intersection_area(sq, sq, 1e-9);
  (void)clipped_segment_length({0, 0}, {1, 1}, sq, 1e-9);
  CHECK(predicate_evals() == 2);
  reset_predicate_evals();
  CHECK(predicate_evals() == 0);
}
