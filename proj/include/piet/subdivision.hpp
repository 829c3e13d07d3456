// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#ifndef PIET_SUBDIVISION_HPP
#define PIET_SUBDIVISION_HPP

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "piet/carrier.hpp"
#include "piet/geom.hpp"

namespace piet {

enum class CellKind { SubNode, SubLine, SubPolygon };

std::string to_string(CellKind k);

/// One element of the common sub-polygonization: a sub-node, an open
/// sub-segment, or an open convex sub-polygon, tagged with its grid cell.
struct Cell {
  std::int64_t cell_id = 0;
  int grid_row = 0;
  int grid_col = 0;
  std::variant<Point2, Segment, Polygon> geometry;

  CellKind kind() const { return static_cast<CellKind>(geometry.index()); }
  const Point2& node() const { return std::get<Point2>(geometry); }
  const Segment& segment() const { return std::get<Segment>(geometry); }
  const Polygon& polygon() const { return std::get<Polygon>(geometry); }

  /// A point in the relative interior of the cell.
  Point2 representative() const;
  double extent() const;  // 0 for nodes, length for lines, area for polygons
};

struct GridSpec {
  int rows = 1;
  int cols = 1;
};

/// Planar graph of one arrangement, including the clip-rectangle frame.
/// Carrier-induced elements reference their Cell by id; frame vertices and
/// edges carry cell_id == -1.
struct ArrangementGraph {
  struct Vertex {
    Point2 p;
    bool on_boundary = false;
    std::int64_t cell_id = -1;
  };
  struct Edge {
    int v0 = 0;
    int v1 = 0;
    bool on_boundary = false;
    std::int64_t cell_id = -1;
  };
  struct Face {
    std::int64_t cell_id = -1;  // -1 for the exterior face
    bool exterior = false;
    std::vector<int> edges;     // indices into edges
    std::vector<int> vertices;  // ring order
  };
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Face> faces;
};

struct Arrangement {
  std::vector<Cell> cells;
  ArrangementGraph graph;
  std::size_t carrier_lines = 0;  // lines that produced a chord in the box
};

class line_cap_exceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered cut-point list keyed by distance to the origin; p is inserted only
/// if no member is already similar to it.
void add_cut_point(Point2 p, std::vector<Point2>& pts, double eps);

/// Planar subdivision induced by the lines, strictly inside the box.
/// Lines coincident with a box edge are dropped. Throws line_cap_exceeded
/// when more than max_lines lines survive clipping.
Arrangement arrange(const std::vector<Line>& lines, const BBox& box,
                    const EpsilonConfig& eps, std::size_t max_lines = 10000);

/// Common sub-polygonization of several layers over one box (no grid).
Arrangement csp(const std::vector<Layer>& layers, const BBox& box,
                const EpsilonConfig& eps, std::size_t max_lines = 10000);

/// True iff the intersection area strictly exceeds area_eps.
bool overlapping_polygons(const Polygon& p1, const Polygon& p2, double area_eps);

struct Association {
  std::int64_t cell_id = 0;
  std::string layer;
  std::int64_t gid = 0;
  CellKind sub_level = CellKind::SubNode;
  GeomKind parent_level = GeomKind::Point;
};

struct GridStats {
  int row = 0, col = 0;
  std::size_t carrier_lines = 0;  // participating carriers + 4 frame edges
  std::size_t points = 0;         // graph vertices (nodes + frame vertices)
  std::size_t segments = 0;       // graph edges (sub-lines + frame pieces)
  std::size_t polygons = 0;       // bounded faces
};

/// Full overlay of a layer combination built on a grid.
struct Overlay {
  std::vector<std::string> layer_names;  // sorted
  BBox box;
  GridSpec grid;
  EpsilonConfig eps;
  std::vector<Cell> cells;
  std::vector<Association> associations;
  std::vector<GridStats> stats;
  std::size_t orphan_cells = 0;

  std::string combo_id() const;
};

struct GridCspOptions {
  std::size_t max_lines_per_cell = 10000;
  int threads = 0;  // 0 = hardware concurrency
};

/// Per grid cell, only carriers of geometries intersecting that cell take
/// part. Cells are tagged (row, col); ids are sequential in row-major order.
Overlay grid_csp(const std::vector<Layer>& layers, const BBox& box,
                 GridSpec grid, const EpsilonConfig& eps,
                 const GridCspOptions& opts = {});

/// Associates every cell with the original geometries it belongs to,
/// filling overlay.associations. Boundary cells of a polygon associate to
/// the polygon.
void associate(Overlay& overlay, const std::vector<Layer>& layers);

enum class MeasureSplit {
  Copy,          // per-object values: elevation, ids
  Proportional,  // totals over extent: population, length, area
};

struct CellMeasure {
  std::int64_t cell_id = 0;
  std::string layer;
  std::int64_t gid = 0;
  std::string measure;
  double value = 0.0;
};

/// Facts per (layer, gid): measure name -> value.
using FactRows = std::map<std::pair<std::string, std::int64_t>,
                          std::map<std::string, double>>;

/// Pushes parent measures down to cells. Proportional measures scale by
/// cell extent / parent extent (zero on sub-nodes); Copy measures transfer
/// unchanged. Cells whose parent has no fact row get no entry.
std::vector<CellMeasure> propagate_measures(
    const Overlay& overlay, const std::vector<Layer>& layers,
    const FactRows& facts,
    const std::map<std::string, MeasureSplit>& semantics);

}  // namespace piet

#endif  // PIET_SUBDIVISION_HPP
