// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "piet/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace piet {

namespace {
thread_local std::uint64_t g_predicate_evals = 0;
}

std::uint64_t predicate_evals() { return g_predicate_evals; }
void reset_predicate_evals() { g_predicate_evals = 0; }
void note_predicate_eval() { ++g_predicate_evals; }

double Segment::length() const { return dist(a, b); }

double BBox::diagonal() const { return std::sqrt(width() * width() + height() * height()); }

Line canonicalize(const Line& l) {
  double norm = std::sqrt(l.a * l.a + l.b * l.b);
  if (norm == 0.0) throw std::invalid_argument("null line normal");
  if (std::fabs(norm - 1.0) < 1e-12) norm = 1.0;  // keeps canonicalization idempotent
  Line r{l.a / norm, l.b / norm, l.c / norm};
  if (r.a < 0.0 || (r.a == 0.0 && r.b < 0.0)) {
    r.a = -r.a;
    r.b = -r.b;
    r.c = -r.c;
  }
  if (r.a == 0.0) r.a = 0.0;  // normalize -0.0
  if (r.b == 0.0) r.b = 0.0;
  if (r.c == 0.0) r.c = 0.0;
  return r;
}

Line make_line(double a, double b, double c) { return canonicalize({a, b, c}); }

Line line_through(Point2 p, Point2 q) {
  double dx = q.x - p.x;
  double dy = q.y - p.y;
  double len = std::sqrt(dx * dx + dy * dy);
  if (len == 0.0) throw degenerate_pair_error("line_through: coincident points");
  // Normal (dy, -dx)/len; c from the midpoint so that swapping p and q
  // produces bit-identical coefficients after canonicalization.
  double a = dy / len;
  double b = -dx / len;
  double mx = 0.5 * (p.x + q.x);
  double my = 0.5 * (p.y + q.y);
  double c = -(a * mx + b * my);
  return canonicalize({a, b, c});
}

Line perpendicular_at(const Line& l, Point2 p) {
  double a = -l.b;
  double b = l.a;
  double c = -(a * p.x + b * p.y);
  return canonicalize({a, b, c});
}

Line horizontal_through(Point2 p) { return canonicalize({0.0, 1.0, -p.y}); }
Line vertical_through(Point2 p) { return canonicalize({1.0, 0.0, -p.x}); }

std::optional<Point2> line_intersection(const Line& l1, const Line& l2) {
  double det = l1.a * l2.b - l2.a * l1.b;
  if (std::fabs(det) < 1e-12) return std::nullopt;
  double x = (l1.b * l2.c - l2.b * l1.c) / det;
  double y = (l2.a * l1.c - l1.a * l2.c) / det;
  return Point2{x, y};
}

bool similar_lines(const Line& l1, const Line& l2, double line_eps) {
  return std::fabs(l1.a - l2.a) < line_eps && std::fabs(l1.b - l2.b) < line_eps &&
         std::fabs(l1.c - l2.c) < line_eps;
}

bool is_similar_point(Point2 p1, Point2 p2, double eps) {
  double dx = p1.x - p2.x;
  double dy = p1.y - p2.y;
  return -eps < dx && dx < eps && -eps < dy && dy < eps;
}

double dist(Point2 p, Point2 q) {
  double dx = p.x - q.x;
  double dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

double dist_point_segment(Point2 p, Point2 a, Point2 b) {
  double dx = b.x - a.x;
  double dy = b.y - a.y;
  double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return dist(p, a);
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, {a.x + t * dx, a.y + t * dy});
}

double dist_point_polyline(Point2 p, const Polyline& pl) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i)
    best = std::min(best, dist_point_segment(p, pl.vertices[i], pl.vertices[i + 1]));
  return best;
}

double dist_point_ring(Point2 p, const std::vector<Point2>& ring) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, dist_point_segment(p, ring[i], ring[(i + 1) % n]));
  return best;
}

PointLocation point_in_polygon(Point2 p, const Polygon& pg, double eps) {
  if (dist_point_ring(p, pg.ring) < eps) return PointLocation::OnBoundary;
  bool inside = false;
  std::size_t n = pg.ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& vi = pg.ring[i];
    const Point2& vj = pg.ring[j];
    if ((vi.y > p.y) != (vj.y > p.y)) {
      double xcross = vj.x + (p.y - vj.y) / (vi.y - vj.y) * (vi.x - vj.x);
      if (p.x < xcross) inside = !inside;
    }
  }
  return inside ? PointLocation::Inside : PointLocation::Outside;
}

double ring_area(const std::vector<Point2>& ring) {
  double s = 0.0;
  std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = ring[i];
    const Point2& q = ring[(i + 1) % n];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * s;
}

double polygon_area(const Polygon& pg) { return ring_area(pg.ring); }

double polyline_length(const Polyline& pl) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i)
    s += dist(pl.vertices[i], pl.vertices[i + 1]);
  return s;
}

bool ring_is_convex(const std::vector<Point2>& ring, double eps) {
  std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = ring[i];
    const Point2& b = ring[(i + 1) % n];
    const Point2& c = ring[(i + 2) % n];
    double cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
    if (cross < -eps) return false;  // ring is CCW; allow collinear
  }
  return true;
}

bool ring_is_simple(const std::vector<Point2>& ring) {
  std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // skip adjacent edges (share a vertex)
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

Point2 ring_centroid_of_vertices(const std::vector<Point2>& ring) {
  Point2 c{0.0, 0.0};
  for (const Point2& p : ring) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(ring.size());
  c.y /= static_cast<double>(ring.size());
  return c;
}

std::optional<Segment> clip_line_to_box(const Line& l, const BBox& box) {
  Point2 base = l.base_point();
  Point2 d = l.direction();
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  // track which box side limits each end so endpoints can be snapped exactly
  int side0 = -1, side1 = -1;
  struct Constraint {
    double q, r;
    int side;  // 0 xmin, 1 xmax, 2 ymin, 3 ymax
  };
  // each entry encodes t*q <= r
  const Constraint cs[4] = {
      {-d.x, base.x - box.xmin, 0},
      {d.x, box.xmax - base.x, 1},
      {-d.y, base.y - box.ymin, 2},
      {d.y, box.ymax - base.y, 3},
  };
  for (const Constraint& c : cs) {
    if (c.q == 0.0) {
      if (c.r < 0.0) return std::nullopt;
      continue;
    }
    double t = c.r / c.q;
    if (c.q > 0.0) {
      if (t < t1) { t1 = t; side1 = c.side; }
    } else {
      if (t > t0) { t0 = t; side0 = c.side; }
    }
  }
  if (!(t0 < t1)) return std::nullopt;
  if (!std::isfinite(t0) || !std::isfinite(t1)) return std::nullopt;
  auto at = [&](double t, int side) {
    Point2 p{base.x + t * d.x, base.y + t * d.y};
    if (side == 0) p.x = box.xmin;
    if (side == 1) p.x = box.xmax;
    if (side == 2) p.y = box.ymin;
    if (side == 3) p.y = box.ymax;
    p.x = std::clamp(p.x, box.xmin, box.xmax);
    p.y = std::clamp(p.y, box.ymin, box.ymax);
    return p;
  };
  Segment s{at(t0, side0), at(t1, side1)};
  if (s.length() <= 0.0) return std::nullopt;
  return s;
}

namespace {
double cross3(Point2 a, Point2 b, Point2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool on_segment_collinear(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}
}  // namespace

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  double d1 = cross3(c, d, a);
  double d2 = cross3(c, d, b);
  double d3 = cross3(a, b, c);
  double d4 = cross3(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment_collinear(c, d, a)) return true;
  if (d2 == 0 && on_segment_collinear(c, d, b)) return true;
  if (d3 == 0 && on_segment_collinear(a, b, c)) return true;
  if (d4 == 0 && on_segment_collinear(a, b, d)) return true;
  return false;
}

std::optional<Point2> segment_intersection_point(Point2 a, Point2 b, Point2 c,
                                                 Point2 d) {
  double rx = b.x - a.x, ry = b.y - a.y;
  double sx = d.x - c.x, sy = d.y - c.y;
  double denom = rx * sy - ry * sx;
  if (denom == 0.0) return std::nullopt;
  double t = ((c.x - a.x) * sy - (c.y - a.y) * sx) / denom;
  double u = ((c.x - a.x) * ry - (c.y - a.y) * rx) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return Point2{a.x + t * rx, a.y + t * ry};
}

namespace {

// Cut parameters of [a,b] against the polygon boundary, then classify each
// piece by its midpoint: Inside counts 1, OnBoundary counts 1/2.
double weighted_inside_length(Point2 a, Point2 b, const Polygon& region,
                              double eps) {
  std::vector<double> ts{0.0, 1.0};
  double rx = b.x - a.x, ry = b.y - a.y;
  std::size_t n = region.ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point2 c = region.ring[i];
    Point2 d = region.ring[(i + 1) % n];
    double sx = d.x - c.x, sy = d.y - c.y;
    double denom = rx * sy - ry * sx;
    if (denom == 0.0) continue;
    double t = ((c.x - a.x) * sy - (c.y - a.y) * sx) / denom;
    double u = ((c.x - a.x) * ry - (c.y - a.y) * rx) / denom;
    if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  double seg_len = dist(a, b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    double tm = 0.5 * (ts[i] + ts[i + 1]);
    Point2 mid{a.x + tm * rx, a.y + tm * ry};
    PointLocation loc = point_in_polygon(mid, region, eps);
    double w = loc == PointLocation::Inside ? 1.0
               : loc == PointLocation::OnBoundary ? 0.5
                                                  : 0.0;
    total += w * (ts[i + 1] - ts[i]) * seg_len;
  }
  return total;
}

}  // namespace

double clipped_segment_length(Point2 a, Point2 b, const Polygon& region,
                              double eps) {
  note_predicate_eval();
  return weighted_inside_length(a, b, region, eps);
}

double clipped_polyline_length(const Polyline& pl, const Polygon& region,
                               double eps) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i)
    s += clipped_segment_length(pl.vertices[i], pl.vertices[i + 1], region, eps);
  return s;
}

namespace {

// Boundary integral of x dy - y dx over the pieces of ring(P) inside Q,
// OnBoundary pieces weighted half.
double half_boundary_integral(const Polygon& p, const Polygon& q, double eps) {
  double total = 0.0;
  std::size_t n = p.ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point2 a = p.ring[i];
    Point2 b = p.ring[(i + 1) % n];
    double rx = b.x - a.x, ry = b.y - a.y;
    std::vector<double> ts{0.0, 1.0};
    std::size_t m = q.ring.size();
    for (std::size_t j = 0; j < m; ++j) {
      Point2 c = q.ring[j];
      Point2 d = q.ring[(j + 1) % m];
      double sx = d.x - c.x, sy = d.y - c.y;
      double denom = rx * sy - ry * sx;
      if (denom == 0.0) continue;
      double t = ((c.x - a.x) * sy - (c.y - a.y) * sx) / denom;
      double u = ((c.x - a.x) * ry - (c.y - a.y) * rx) / denom;
      if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      double tm = 0.5 * (ts[k] + ts[k + 1]);
      Point2 mid{a.x + tm * rx, a.y + tm * ry};
      PointLocation loc = point_in_polygon(mid, q, eps);
      double w = loc == PointLocation::Inside ? 1.0
                 : loc == PointLocation::OnBoundary ? 0.5
                                                    : 0.0;
      if (w == 0.0) continue;
      Point2 s{a.x + ts[k] * rx, a.y + ts[k] * ry};
      Point2 e{a.x + ts[k + 1] * rx, a.y + ts[k + 1] * ry};
      total += w * (s.x * e.y - e.x * s.y);
    }
  }
  return total;
}

}  // namespace

double intersection_area(const Polygon& p, const Polygon& q, double eps) {
  note_predicate_eval();
  double integral = half_boundary_integral(p, q, eps) + half_boundary_integral(q, p, eps);
  double area = 0.5 * integral;
  return area < 0.0 ? 0.0 : area;
}

double collinear_overlap_length(Point2 a, Point2 b, const Polyline& pl,
                                double eps) {
  Line lab = line_through(a, b);
  Point2 d = lab.direction();
  double lo = std::min(a.x * d.x + a.y * d.y, b.x * d.x + b.y * d.y);
  double hi = std::max(a.x * d.x + a.y * d.y, b.x * d.x + b.y * d.y);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i) {
    Point2 c = pl.vertices[i];
    Point2 e = pl.vertices[i + 1];
    if (std::fabs(lab.eval(c)) > eps || std::fabs(lab.eval(e)) > eps) continue;
    double s0 = c.x * d.x + c.y * d.y;
    double s1 = e.x * d.x + e.y * d.y;
    if (s0 > s1) std::swap(s0, s1);
    double ov = std::min(hi, s1) - std::max(lo, s0);
    if (ov > 0.0) total += ov;
  }
  return total;
}

bool segment_intersects_box(Point2 a, Point2 b, const BBox& box) {
  if (box.contains(a) || box.contains(b)) return true;
  Point2 bl{box.xmin, box.ymin}, br{box.xmax, box.ymin};
  Point2 tr{box.xmax, box.ymax}, tl{box.xmin, box.ymax};
  return segments_intersect(a, b, bl, br) || segments_intersect(a, b, br, tr) ||
         segments_intersect(a, b, tr, tl) || segments_intersect(a, b, tl, bl);
}

bool polyline_intersects_box(const Polyline& pl, const BBox& box) {
  for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i)
    if (segment_intersects_box(pl.vertices[i], pl.vertices[i + 1], box)) return true;
  return false;
}

bool polygon_intersects_box(const Polygon& pg, const BBox& box) {
  std::size_t n = pg.ring.size();
  for (std::size_t i = 0; i < n; ++i)
    if (segment_intersects_box(pg.ring[i], pg.ring[(i + 1) % n], box)) return true;
  // box fully inside polygon, or polygon fully inside box
  Point2 box_center{0.5 * (box.xmin + box.xmax), 0.5 * (box.ymin + box.ymax)};
  if (point_in_polygon(box_center, pg, 0.0) == PointLocation::Inside) return true;
  return box.contains(pg.ring[0]);
}

BBox bbox_of_layers(const std::vector<Layer>& layers, double pad_fraction) {
  double inf = std::numeric_limits<double>::infinity();
  BBox b{inf, inf, -inf, -inf};
  auto take = [&](Point2 p) {
    b.xmin = std::min(b.xmin, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.xmax = std::max(b.xmax, p.x);
    b.ymax = std::max(b.ymax, p.y);
  };
  for (const Layer& layer : layers) {
    for (const PointFeature& f : layer.points) take(f.p);
    for (const Polyline& pl : layer.polylines)
      for (Point2 p : pl.vertices) take(p);
    for (const Polygon& pg : layer.polygons)
      for (Point2 p : pg.ring) take(p);
  }
  if (!(b.xmin < b.xmax)) {
    b.xmin -= 0.5;
    b.xmax += 0.5;
  }
  if (!(b.ymin < b.ymax)) {
    b.ymin -= 0.5;
    b.ymax += 0.5;
  }
  double px = b.width() * pad_fraction;
  double py = b.height() * pad_fraction;
  return {b.xmin - px, b.ymin - py, b.xmax + px, b.ymax + py};
}

}  // namespace piet
