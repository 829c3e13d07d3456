// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#ifndef PIET_GEOM_HPP
#define PIET_GEOM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace piet {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2& a, const Point2& b) {
    return a.x == b.x && a.y == b.y;
  }
};

struct Segment {
  Point2 a;
  Point2 b;

  Point2 midpoint() const { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }
  double length() const;
};

/// Implicit line a*x + b*y + c = 0 with a^2 + b^2 = 1 and canonical sign
/// (a > 0, or a == 0 and b > 0), so equal lines have equal coefficients.
struct Line {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double eval(Point2 p) const { return a * p.x + b * p.y + c; }
  /// Unit direction vector of the line (normal rotated by 90 degrees).
  Point2 direction() const { return {-b, a}; }
  /// Foot of the perpendicular from the origin; a point on the line.
  Point2 base_point() const { return {-c * a, -c * b}; }

  friend bool operator==(const Line& l, const Line& r) {
    return l.a == r.a && l.b == r.b && l.c == r.c;
  }
  friend bool operator<(const Line& l, const Line& r) {
    if (l.a != r.a) return l.a < r.a;
    if (l.b != r.b) return l.b < r.b;
    return l.c < r.c;
  }
};

struct Polyline {
  std::int64_t gid = 0;
  std::vector<Point2> vertices;  // >= 2, consecutive vertices distinct
};

/// Simple polygon stored as an open ring in counter-clockwise order
/// (first vertex not repeated). Shoelace area is positive.
struct Polygon {
  std::int64_t gid = 0;
  std::vector<Point2> ring;
};

struct BBox {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diagonal() const;
  double area() const { return width() * height(); }
  bool contains(Point2 p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  bool strictly_inside(Point2 p, double eps) const {
    return p.x > xmin + eps && p.x < xmax - eps && p.y > ymin + eps &&
           p.y < ymax - eps;
  }
};

/// Error bounds for similarity tests. All user-overridable; defaults derive
/// from the bounding box of the data set being processed.
struct EpsilonConfig {
  double point_eps = 1e-9;
  double area_eps = 1e-12;
  double line_eps = 1e-9;

  static EpsilonConfig for_box(const BBox& box) {
    EpsilonConfig e;
    e.point_eps = 1e-9 * box.diagonal();
    e.area_eps = 1e-12 * box.area();
    e.line_eps = 1e-9;
    return e;
  }
};

enum class PointLocation { Inside, OnBoundary, Outside };

enum class GeomKind { Point, Polyline, Polygon };

using AttrMap = std::map<std::string, std::string>;

struct PointFeature {
  std::int64_t gid = 0;
  Point2 p;
};

/// A thematic layer: named geometry collection with per-geometry attributes.
struct Layer {
  std::string name;
  std::vector<PointFeature> points;
  std::vector<Polyline> polylines;
  std::vector<Polygon> polygons;
  std::map<std::int64_t, AttrMap> attributes;

  std::size_t size() const {
    return points.size() + polylines.size() + polygons.size();
  }
};

class degenerate_pair_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- line construction and intersection --------------------------------------

Line make_line(double a, double b, double c);  // normalizes + canonical sign
Line canonicalize(const Line& l);
Line line_through(Point2 p, Point2 q);  // throws degenerate_pair_error
Line perpendicular_at(const Line& l, Point2 p);
Line horizontal_through(Point2 p);
Line vertical_through(Point2 p);

/// Empty for (near-)parallel pairs; coincident lines also yield empty.
std::optional<Point2> line_intersection(const Line& l1, const Line& l2);

bool similar_lines(const Line& l1, const Line& l2, double line_eps);

// -- point predicates ---------------------------------------------------------

/// The box test: |dx| < eps and |dy| < eps with strict inequalities.
bool is_similar_point(Point2 p1, Point2 p2, double eps);

double dist(Point2 p, Point2 q);
double dist_point_segment(Point2 p, Point2 a, Point2 b);
double dist_point_polyline(Point2 p, const Polyline& pl);
double dist_point_ring(Point2 p, const std::vector<Point2>& ring);

/// Even-odd classification; OnBoundary decided by distance-to-edge < eps.
PointLocation point_in_polygon(Point2 p, const Polygon& pg, double eps);

// -- measures -----------------------------------------------------------------

double ring_area(const std::vector<Point2>& ring);  // signed
double polygon_area(const Polygon& pg);
double polyline_length(const Polyline& pl);

bool ring_is_convex(const std::vector<Point2>& ring, double eps);
bool ring_is_simple(const std::vector<Point2>& ring);
Point2 ring_centroid_of_vertices(const std::vector<Point2>& ring);

// -- clipping -----------------------------------------------------------------

/// The chord of l within b, endpoints snapped onto the box boundary.
/// Empty when the line misses the box or only grazes a corner.
std::optional<Segment> clip_line_to_box(const Line& l, const BBox& b);

/// True when the closed segments share at least one point.
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);
std::optional<Point2> segment_intersection_point(Point2 a, Point2 b, Point2 c,
                                                 Point2 d);

/// Length of the part of [a,b] inside the closed polygon. Portions running
/// along the boundary count half (they are shared with the outside).
double clipped_segment_length(Point2 a, Point2 b, const Polygon& region,
                              double eps);
double clipped_polyline_length(const Polyline& pl, const Polygon& region,
                               double eps);

/// Area of the intersection of two simple polygons, computed by summing the
/// boundary integral x dy - y dx over the pieces of each boundary inside the
/// other polygon. Shared boundary pieces are weighted half, which makes pure
/// edge contact contribute zero and self-intersection the full area.
double intersection_area(const Polygon& p, const Polygon& q, double eps);

/// Length of the collinear overlap between segment [a,b] and polyline pl.
double collinear_overlap_length(Point2 a, Point2 b, const Polyline& pl,
                                double eps);

// -- geometry vs rectangle ----------------------------------------------------

bool segment_intersects_box(Point2 a, Point2 b, const BBox& box);
bool polyline_intersects_box(const Polyline& pl, const BBox& box);
bool polygon_intersects_box(const Polygon& pg, const BBox& box);

BBox bbox_of_layers(const std::vector<Layer>& layers, double pad_fraction);

// -- instrumentation ----------------------------------------------------------

/// Counts exact geometric predicate evaluations (naive join predicates,
/// exact clipping of boundary-crossing cells, R-tree refinements). Queries
/// answered purely from association tables never move it.
std::uint64_t predicate_evals();
void reset_predicate_evals();
void note_predicate_eval();

}  // namespace piet

#endif  // PIET_GEOM_HPP
