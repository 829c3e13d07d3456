// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "piet/subdivision.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

namespace piet {

std::string to_string(CellKind k) {
  switch (k) {
    case CellKind::SubNode: return "point";
    case CellKind::SubLine: return "linestring";
    case CellKind::SubPolygon: return "polygon";
  }
  return "?";
}

Point2 Cell::representative() const {
  switch (kind()) {
    case CellKind::SubNode: return node();
    case CellKind::SubLine: return segment().midpoint();
    case CellKind::SubPolygon: return ring_centroid_of_vertices(polygon().ring);
  }
  return {};
}

double Cell::extent() const {
  switch (kind()) {
    case CellKind::SubNode: return 0.0;
    case CellKind::SubLine: return segment().length();
    case CellKind::SubPolygon: return polygon_area(polygon());
  }
  return 0.0;
}

void add_cut_point(Point2 p, std::vector<Point2>& pts, double eps) {
  double dp = std::sqrt(p.x * p.x + p.y * p.y);
  double window = eps * 1.5;  // similar points differ by at most eps*sqrt(2)
  auto lo = std::lower_bound(pts.begin(), pts.end(), dp - window,
                             [](const Point2& q, double d) {
                               return std::sqrt(q.x * q.x + q.y * q.y) < d;
                             });
  for (auto it = lo; it != pts.end(); ++it) {
    double dq = std::sqrt(it->x * it->x + it->y * it->y);
    if (dq > dp + window) break;
    if (is_similar_point(p, *it, eps)) return;
  }
  auto pos = std::lower_bound(pts.begin(), pts.end(), dp,
                              [](const Point2& q, double d) {
                                return std::sqrt(q.x * q.x + q.y * q.y) < d;
                              });
  pts.insert(pos, p);
}

namespace {

// Similarity-deduplicating point registry over a hash grid.
class VertexRegistry {
 public:
  explicit VertexRegistry(double eps)
      : eps_(eps), bucket_(std::max(eps * 8.0, 1e-300)) {}

  int find_or_add(Point2 p, bool on_boundary) {
    long long bx = key_of(p.x);
    long long by = key_of(p.y);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = buckets_.find({bx + dx, by + dy});
        if (it == buckets_.end()) continue;
        for (int idx : it->second) {
          if (is_similar_point(points_[idx].p, p, eps_)) {
            points_[idx].on_boundary = points_[idx].on_boundary || on_boundary;
            return idx;
          }
        }
      }
    }
    int idx = static_cast<int>(points_.size());
    points_.push_back({p, on_boundary});
    buckets_[{bx, by}].push_back(idx);
    return idx;
  }

  struct Entry {
    Point2 p;
    bool on_boundary;
  };
  const std::vector<Entry>& entries() const { return points_; }

 private:
  long long key_of(double v) const {
    return static_cast<long long>(std::floor(v / bucket_));
  }
  struct KeyHash {
    std::size_t operator()(const std::pair<long long, long long>& k) const {
      return std::hash<long long>()(k.first * 1000003LL + k.second);
    }
  };
  double eps_;
  double bucket_;
  std::vector<Entry> points_;
  std::unordered_map<std::pair<long long, long long>, std::vector<int>, KeyHash>
      buckets_;
};

struct Chord {
  Line line;
  Segment seg;
  Point2 dir;
  Point2 base;
};

bool line_on_box_frame(const Line& l, const BBox& box, double line_eps) {
  const Line frame[4] = {
      horizontal_through({box.xmin, box.ymin}),
      horizontal_through({box.xmin, box.ymax}),
      vertical_through({box.xmin, box.ymin}),
      vertical_through({box.xmax, box.ymin}),
  };
  for (const Line& f : frame)
    if (similar_lines(l, f, line_eps)) return true;
  return false;
}

}  // namespace

Arrangement arrange(const std::vector<Line>& lines, const BBox& box,
                    const EpsilonConfig& eps, std::size_t max_lines) {
  std::vector<Chord> chords;
  for (const Line& l : lines) {
    if (line_on_box_frame(l, box, eps.line_eps)) continue;
    auto seg = clip_line_to_box(l, box);
    if (!seg) continue;
    if (seg->length() < 2.0 * eps.point_eps) continue;  // corner graze
    chords.push_back({l, *seg, l.direction(), l.base_point()});
  }
  if (chords.size() > max_lines)
    throw line_cap_exceeded("arrangement line cap exceeded: " +
                            std::to_string(chords.size()) + " lines");

  const std::size_t n = chords.size();

  // Pairwise intersections. Near-coincident intersection points collapse to
  // one representative before entering the per-line cut lists.
  VertexRegistry interior(eps.point_eps);
  std::vector<std::vector<Point2>> cuts(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto p = line_intersection(chords[i].line, chords[j].line);
      if (!p) continue;
      if (!box.strictly_inside(*p, eps.point_eps)) continue;
      int rep = interior.find_or_add(*p, false);
      Point2 rp = interior.entries()[rep].p;
      add_cut_point(rp, cuts[i], eps.point_eps);
      add_cut_point(rp, cuts[j], eps.point_eps);
    }
  }

  ArrangementGraph graph;
  VertexRegistry verts(eps.point_eps);
  auto vid = [&](Point2 p, bool boundary) { return verts.find_or_add(p, boundary); };

  const Point2 corners[4] = {{box.xmin, box.ymin},
                             {box.xmax, box.ymin},
                             {box.xmax, box.ymax},
                             {box.xmin, box.ymax}};
  for (Point2 c : corners) vid(c, true);

  struct RawEdge {
    int v0, v1;
    bool boundary;
  };
  std::vector<RawEdge> raw_edges;

  // carrier edges: split each chord at its interior cut points
  for (std::size_t i = 0; i < n; ++i) {
    const Chord& ch = chords[i];
    std::vector<int> ids;
    ids.push_back(vid(ch.seg.a, true));
    ids.push_back(vid(ch.seg.b, true));
    for (Point2 p : cuts[i]) ids.push_back(vid(p, false));
    auto param = [&](int v) {
      Point2 p = verts.entries()[v].p;
      return ch.dir.x * (p.x - ch.base.x) + ch.dir.y * (p.y - ch.base.y);
    };
    std::sort(ids.begin(), ids.end(),
              [&](int a, int b) { return param(a) < param(b); });
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (std::size_t k = 0; k + 1 < ids.size(); ++k)
      if (ids[k] != ids[k + 1]) raw_edges.push_back({ids[k], ids[k + 1], false});
  }

  // frame edges: consecutive boundary vertices along each side
  auto side_edges = [&](bool horizontal, double fixed) {
    std::vector<int> on_side;
    const auto& entries = verts.entries();
    for (std::size_t v = 0; v < entries.size(); ++v) {
      if (!entries[v].on_boundary) continue;
      double coord = horizontal ? entries[v].p.y : entries[v].p.x;
      if (std::fabs(coord - fixed) <= eps.point_eps) on_side.push_back(static_cast<int>(v));
    }
    std::sort(on_side.begin(), on_side.end(), [&](int a, int b) {
      double ca = horizontal ? entries[a].p.x : entries[a].p.y;
      double cb = horizontal ? entries[b].p.x : entries[b].p.y;
      return ca < cb;
    });
    for (std::size_t k = 0; k + 1 < on_side.size(); ++k)
      if (on_side[k] != on_side[k + 1])
        raw_edges.push_back({on_side[k], on_side[k + 1], true});
  };
  side_edges(true, box.ymin);
  side_edges(true, box.ymax);
  side_edges(false, box.xmin);
  side_edges(false, box.xmax);

  for (const auto& e : verts.entries())
    graph.vertices.push_back({e.p, e.on_boundary, -1});
  for (const RawEdge& e : raw_edges)
    graph.edges.push_back({e.v0, e.v1, e.boundary, -1});

  // half-edge face tracing by angular sweep around each vertex
  const std::size_t ne = graph.edges.size();
  struct Out {
    double angle;
    std::size_t half;  // 2*edge + dirbit
  };
  std::vector<std::vector<Out>> outgoing(graph.vertices.size());
  auto half_src = [&](std::size_t h) {
    const auto& e = graph.edges[h / 2];
    return (h & 1) ? e.v1 : e.v0;
  };
  auto half_dst = [&](std::size_t h) {
    const auto& e = graph.edges[h / 2];
    return (h & 1) ? e.v0 : e.v1;
  };
  for (std::size_t e = 0; e < ne; ++e) {
    for (int dir = 0; dir < 2; ++dir) {
      std::size_t h = 2 * e + dir;
      int u = half_src(h);
      int v = half_dst(h);
      Point2 pu = graph.vertices[u].p;
      Point2 pv = graph.vertices[v].p;
      outgoing[u].push_back({std::atan2(pv.y - pu.y, pv.x - pu.x), h});
    }
  }
  for (auto& list : outgoing)
    std::sort(list.begin(), list.end(),
              [](const Out& a, const Out& b) { return a.angle < b.angle; });

  std::vector<std::size_t> pos_of_half(2 * ne);
  for (std::size_t v = 0; v < outgoing.size(); ++v)
    for (std::size_t k = 0; k < outgoing[v].size(); ++k)
      pos_of_half[outgoing[v][k].half] = k;

  auto next_half = [&](std::size_t h) {
    std::size_t twin = h ^ 1;
    int v = half_src(twin);
    const auto& list = outgoing[v];
    std::size_t k = pos_of_half[twin];
    return list[(k + list.size() - 1) % list.size()].half;
  };

  std::vector<char> visited(2 * ne, 0);
  int exterior_count = 0;
  for (std::size_t h0 = 0; h0 < 2 * ne; ++h0) {
    if (visited[h0]) continue;
    ArrangementGraph::Face face;
    std::vector<Point2> ring;
    std::size_t h = h0;
    do {
      visited[h] = 1;
      face.edges.push_back(static_cast<int>(h / 2));
      face.vertices.push_back(half_src(h));
      ring.push_back(graph.vertices[half_src(h)].p);
      h = next_half(h);
    } while (h != h0);
    double area = ring_area(ring);
    face.exterior = area <= 0.0;
    if (face.exterior) ++exterior_count;
    graph.faces.push_back(std::move(face));
  }
  (void)exterior_count;  // exactly 1 for a well-formed arrangement

  // cells: interior vertices, carrier edges, bounded faces
  Arrangement result;
  result.carrier_lines = n;
  std::int64_t next_id = 0;
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    if (graph.vertices[v].on_boundary) continue;
    Cell cell;
    cell.cell_id = next_id++;
    cell.geometry = graph.vertices[v].p;
    graph.vertices[v].cell_id = cell.cell_id;
    result.cells.push_back(std::move(cell));
  }
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    if (graph.edges[e].on_boundary) continue;
    Cell cell;
    cell.cell_id = next_id++;
    cell.geometry = Segment{graph.vertices[graph.edges[e].v0].p,
                            graph.vertices[graph.edges[e].v1].p};
    graph.edges[e].cell_id = cell.cell_id;
    result.cells.push_back(std::move(cell));
  }
  for (auto& face : graph.faces) {
    if (face.exterior) continue;
    Polygon poly;
    poly.gid = 0;
    for (int v : face.vertices) poly.ring.push_back(graph.vertices[v].p);
    Cell cell;
    cell.cell_id = next_id++;
    cell.geometry = std::move(poly);
    face.cell_id = cell.cell_id;
    result.cells.push_back(std::move(cell));
  }
  result.graph = std::move(graph);
  return result;
}

Arrangement csp(const std::vector<Layer>& layers, const BBox& box,
                const EpsilonConfig& eps, std::size_t max_lines) {
  CarrierSet cs = carriers_of_layers(layers, eps);
  return arrange(cs.lines, box, eps, max_lines);
}

bool overlapping_polygons(const Polygon& p1, const Polygon& p2, double area_eps) {
  double span = 0.0;
  for (const Point2& p : p1.ring) span = std::max({span, std::fabs(p.x), std::fabs(p.y)});
  for (const Point2& p : p2.ring) span = std::max({span, std::fabs(p.x), std::fabs(p.y)});
  double point_eps = std::max(1e-12, 1e-9 * span);
  return intersection_area(p1, p2, point_eps) > area_eps;
}

std::string Overlay::combo_id() const {
  std::string id;
  for (const std::string& name : layer_names) {
    if (!id.empty()) id += "-";
    id += name;
  }
  return id;
}

namespace {

BBox grid_rect(const BBox& box, GridSpec grid, int row, int col) {
  double w = box.width() / grid.cols;
  double h = box.height() / grid.rows;
  BBox r;
  r.xmin = box.xmin + col * w;
  r.xmax = (col == grid.cols - 1) ? box.xmax : box.xmin + (col + 1) * w;
  r.ymin = box.ymin + row * h;
  r.ymax = (row == grid.rows - 1) ? box.ymax : box.ymin + (row + 1) * h;
  return r;
}

bool geometry_intersects_rect(const Layer& layer, GeomKind kind, std::size_t idx,
                              const BBox& rect) {
  switch (kind) {
    case GeomKind::Point: return rect.contains(layer.points[idx].p);
    case GeomKind::Polyline: return polyline_intersects_box(layer.polylines[idx], rect);
    case GeomKind::Polygon: return polygon_intersects_box(layer.polygons[idx], rect);
  }
  return false;
}

struct RectCandidates {
  // indices into layers / geometry vectors of everything touching the rect
  std::vector<std::tuple<std::size_t, GeomKind, std::size_t>> members;
};

// For each grid rect, which geometries intersect it.
std::vector<RectCandidates> rect_candidates(const std::vector<Layer>& layers,
                                            const BBox& box, GridSpec grid) {
  std::vector<RectCandidates> out(static_cast<std::size_t>(grid.rows) * grid.cols);
  auto scan = [&](std::size_t layer_idx, GeomKind kind, std::size_t geom_idx,
                  const BBox& gb) {
    double w = box.width() / grid.cols;
    double h = box.height() / grid.rows;
    int c0 = std::max(0, static_cast<int>(std::floor((gb.xmin - box.xmin) / w)));
    int c1 = std::min(grid.cols - 1, static_cast<int>(std::floor((gb.xmax - box.xmin) / w)));
    int r0 = std::max(0, static_cast<int>(std::floor((gb.ymin - box.ymin) / h)));
    int r1 = std::min(grid.rows - 1, static_cast<int>(std::floor((gb.ymax - box.ymin) / h)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        BBox rect = grid_rect(box, grid, r, c);
        if (geometry_intersects_rect(layers[layer_idx], kind, geom_idx, rect))
          out[static_cast<std::size_t>(r) * grid.cols + c].members.push_back(
              {layer_idx, kind, geom_idx});
      }
    }
  };
  auto bbox_of_points = [](const std::vector<Point2>& pts) {
    BBox b{std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};
    for (Point2 p : pts) {
      b.xmin = std::min(b.xmin, p.x);
      b.ymin = std::min(b.ymin, p.y);
      b.xmax = std::max(b.xmax, p.x);
      b.ymax = std::max(b.ymax, p.y);
    }
    return b;
  };
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const Layer& layer = layers[li];
    for (std::size_t i = 0; i < layer.points.size(); ++i) {
      Point2 p = layer.points[i].p;
      scan(li, GeomKind::Point, i, BBox{p.x, p.y, p.x, p.y});
    }
    for (std::size_t i = 0; i < layer.polylines.size(); ++i)
      scan(li, GeomKind::Polyline, i, bbox_of_points(layer.polylines[i].vertices));
    for (std::size_t i = 0; i < layer.polygons.size(); ++i)
      scan(li, GeomKind::Polygon, i, bbox_of_points(layer.polygons[i].ring));
  }
  return out;
}

std::int64_t gid_of(const Layer& layer, GeomKind kind, std::size_t idx) {
  switch (kind) {
    case GeomKind::Point: return layer.points[idx].gid;
    case GeomKind::Polyline: return layer.polylines[idx].gid;
    case GeomKind::Polygon: return layer.polygons[idx].gid;
  }
  return 0;
}

}  // namespace

Overlay grid_csp(const std::vector<Layer>& layers, const BBox& box,
                 GridSpec grid, const EpsilonConfig& eps,
                 const GridCspOptions& opts) {
  Overlay overlay;
  for (const Layer& l : layers) overlay.layer_names.push_back(l.name);
  std::sort(overlay.layer_names.begin(), overlay.layer_names.end());
  overlay.box = box;
  overlay.grid = grid;
  overlay.eps = eps;

  CarrierSet carriers = carriers_of_layers(layers, eps);
  std::vector<RectCandidates> cands = rect_candidates(layers, box, grid);

  // per rect: carrier lines whose generating geometries touch the rect
  std::map<std::string, std::size_t> layer_index;
  for (std::size_t i = 0; i < layers.size(); ++i) layer_index[layers[i].name] = i;

  std::size_t nrects = static_cast<std::size_t>(grid.rows) * grid.cols;
  std::vector<std::vector<Line>> rect_lines(nrects);
  {
    // (layer, gid) -> line indices
    std::map<std::pair<std::string, std::int64_t>, std::vector<std::size_t>> by_geom;
    for (std::size_t li = 0; li < carriers.lines.size(); ++li)
      for (const Provenance& pr : carriers.provenance[li])
        by_geom[{pr.layer, pr.gid}].push_back(li);
    for (std::size_t rc = 0; rc < nrects; ++rc) {
      std::vector<char> used(carriers.lines.size(), 0);
      for (const auto& [li, kind, gi] : cands[rc].members) {
        std::int64_t gid = gid_of(layers[li], kind, gi);
        auto it = by_geom.find({layers[li].name, gid});
        if (it == by_geom.end()) continue;
        for (std::size_t lineidx : it->second) used[lineidx] = 1;
      }
      for (std::size_t li = 0; li < carriers.lines.size(); ++li)
        if (used[li]) rect_lines[rc].push_back(carriers.lines[li]);
    }
  }

  std::vector<Arrangement> per_rect(nrects);
  std::vector<std::string> errors(nrects);
  std::atomic<std::size_t> cursor{0};
  unsigned nthreads = opts.threads > 0
                          ? static_cast<unsigned>(opts.threads)
                          : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(nrects));
  auto worker = [&]() {
    for (;;) {
      std::size_t rc = cursor.fetch_add(1);
      if (rc >= nrects) return;
      int row = static_cast<int>(rc) / grid.cols;
      int col = static_cast<int>(rc) % grid.cols;
      BBox rect = grid_rect(box, grid, row, col);
      try {
        per_rect[rc] = arrange(rect_lines[rc], rect, eps, opts.max_lines_per_cell);
      } catch (const line_cap_exceeded& e) {
        errors[rc] = std::string(e.what()) + " in grid cell (" +
                     std::to_string(row) + "," + std::to_string(col) + ")";
      }
    }
  };
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const std::string& err : errors)
    if (!err.empty()) throw line_cap_exceeded(err);

  // sequential id assignment in row-major order keeps builds reproducible
  std::int64_t next_id = 0;
  for (std::size_t rc = 0; rc < nrects; ++rc) {
    int row = static_cast<int>(rc) / grid.cols;
    int col = static_cast<int>(rc) % grid.cols;
    Arrangement& arr = per_rect[rc];
    for (Cell& cell : arr.cells) {
      cell.cell_id = next_id++;
      cell.grid_row = row;
      cell.grid_col = col;
      overlay.cells.push_back(std::move(cell));
    }
    GridStats st;
    st.row = row;
    st.col = col;
    st.carrier_lines = arr.carrier_lines + 4;  // plus the rect frame
    st.points = arr.graph.vertices.size();
    st.segments = arr.graph.edges.size();
    st.polygons = 0;
    for (const auto& f : arr.graph.faces)
      if (!f.exterior) ++st.polygons;
    overlay.stats.push_back(st);
  }
  return overlay;
}

void associate(Overlay& overlay, const std::vector<Layer>& layers) {
  std::vector<RectCandidates> cands =
      rect_candidates(layers, overlay.box, overlay.grid);
  const double peps = overlay.eps.point_eps;
  overlay.associations.clear();
  overlay.orphan_cells = 0;

  for (const Cell& cell : overlay.cells) {
    std::size_t rc = static_cast<std::size_t>(cell.grid_row) * overlay.grid.cols +
                     cell.grid_col;
    bool any = false;
    auto emit = [&](const Layer& layer, std::int64_t gid, GeomKind parent) {
      overlay.associations.push_back({cell.cell_id, layer.name, gid, cell.kind(), parent});
      any = true;
    };
    for (const auto& [li, kind, gi] : cands[rc].members) {
      const Layer& layer = layers[li];
      switch (cell.kind()) {
        case CellKind::SubNode: {
          Point2 v = cell.node();
          if (kind == GeomKind::Point) {
            if (is_similar_point(v, layer.points[gi].p, peps))
              emit(layer, layer.points[gi].gid, GeomKind::Point);
          } else if (kind == GeomKind::Polyline) {
            if (dist_point_polyline(v, layer.polylines[gi]) < peps)
              emit(layer, layer.polylines[gi].gid, GeomKind::Polyline);
          } else {
            if (point_in_polygon(v, layer.polygons[gi], peps) != PointLocation::Outside)
              emit(layer, layer.polygons[gi].gid, GeomKind::Polygon);
          }
          break;
        }
        case CellKind::SubLine: {
          Segment s = cell.segment();
          Point2 mid = s.midpoint();
          if (kind == GeomKind::Polyline) {
            const Polyline& pl = layer.polylines[gi];
            if (dist_point_polyline(mid, pl) < peps &&
                dist_point_polyline(s.a, pl) < peps &&
                dist_point_polyline(s.b, pl) < peps)
              emit(layer, pl.gid, GeomKind::Polyline);
          } else if (kind == GeomKind::Polygon) {
            if (point_in_polygon(mid, layer.polygons[gi], peps) != PointLocation::Outside)
              emit(layer, layer.polygons[gi].gid, GeomKind::Polygon);
          }
          break;
        }
        case CellKind::SubPolygon: {
          if (kind != GeomKind::Polygon) break;
          const Polygon& pg = layer.polygons[gi];
          Point2 rep = cell.representative();
          PointLocation loc = point_in_polygon(rep, pg, peps);
          bool in = loc == PointLocation::Inside;
          if (loc == PointLocation::OnBoundary)
            in = overlapping_polygons(cell.polygon(), pg, overlay.eps.area_eps);
          if (in) emit(layer, pg.gid, GeomKind::Polygon);
          break;
        }
      }
    }
    if (!any) ++overlay.orphan_cells;
  }
}

std::vector<CellMeasure> propagate_measures(
    const Overlay& overlay, const std::vector<Layer>& layers,
    const FactRows& facts,
    const std::map<std::string, MeasureSplit>& semantics) {
  std::map<std::pair<std::string, std::int64_t>, double> parent_extent;
  for (const Layer& layer : layers) {
    for (const Polyline& pl : layer.polylines)
      parent_extent[{layer.name, pl.gid}] = polyline_length(pl);
    for (const Polygon& pg : layer.polygons)
      parent_extent[{layer.name, pg.gid}] = polygon_area(pg);
  }
  std::map<std::int64_t, const Cell*> by_id;
  for (const Cell& c : overlay.cells) by_id[c.cell_id] = &c;

  std::vector<CellMeasure> out;
  for (const Association& a : overlay.associations) {
    auto fit = facts.find({a.layer, a.gid});
    if (fit == facts.end()) continue;
    const Cell& cell = *by_id.at(a.cell_id);
    for (const auto& [measure, value] : fit->second) {
      MeasureSplit split = MeasureSplit::Copy;
      auto sit = semantics.find(measure);
      if (sit != semantics.end()) split = sit->second;
      double v = value;
      if (split == MeasureSplit::Proportional) {
        bool line_pair = cell.kind() == CellKind::SubLine &&
                         a.parent_level == GeomKind::Polyline;
        bool poly_pair = cell.kind() == CellKind::SubPolygon &&
                         a.parent_level == GeomKind::Polygon;
        if (line_pair || poly_pair) {
          double pe = parent_extent[{a.layer, a.gid}];
          v = pe > 0.0 ? value * cell.extent() / pe : 0.0;
        } else {
          v = 0.0;  // zero-extent share of a total
        }
      }
      out.push_back({a.cell_id, a.layer, a.gid, measure, v});
    }
  }
  return out;
}

}  // namespace piet
