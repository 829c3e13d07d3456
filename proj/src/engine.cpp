// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "piet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace piet {

std::optional<AggKind> agg_kind_of(const std::string& name) {
  if (name == "count") return AggKind::Count;
  if (name == "sum") return AggKind::Sum;
  if (name == "avg") return AggKind::Avg;
  if (name == "min") return AggKind::Min;
  if (name == "max") return AggKind::Max;
  if (name == "length") return AggKind::Length;
  if (name == "area") return AggKind::Area;
  return std::nullopt;
}

namespace {
inline std::uint64_t pack_key(std::int64_t id, int layer, int kind) {
  return (static_cast<std::uint64_t>(id) << 10) |
         (static_cast<std::uint64_t>(layer) << 2) | static_cast<std::uint64_t>(kind);
}
const std::vector<std::int64_t> kNoIds;
}  // namespace

OverlayIndex::OverlayIndex(const Overlay& overlay, std::vector<CellMeasure> measures)
    : overlay_(&overlay), measures_(std::move(measures)) {
  for (const Cell& c : overlay.cells) cell_by_id_[c.cell_id] = &c;
  rect_cells_.resize(static_cast<std::size_t>(overlay.grid.rows) * overlay.grid.cols);
  for (const Cell& c : overlay.cells)
    rect_cells_[static_cast<std::size_t>(c.grid_row) * overlay.grid.cols + c.grid_col]
        .push_back(c.cell_id);
  for (const std::string& name : overlay.layer_names) {
    int id = static_cast<int>(layer_ids_.size());
    layer_ids_[name] = id;
  }
  assoc_cells_.resize(layer_ids_.size());
  layer_gids_.resize(layer_ids_.size());
  for (const Association& a : overlay.associations) {
    auto it = layer_ids_.find(a.layer);
    if (it == layer_ids_.end())
      it = layer_ids_.insert({a.layer, static_cast<int>(layer_ids_.size())}).first;
    if (static_cast<std::size_t>(it->second) >= assoc_cells_.size()) {
      assoc_cells_.resize(it->second + 1);
      layer_gids_.resize(it->second + 1);
    }
    int k = static_cast<int>(a.sub_level);
    int lid = it->second;
    by_cell_[pack_key(a.cell_id, lid, k)].push_back(a.gid);
    by_gid_[pack_key(a.gid, lid, k)].push_back(a.cell_id);
    assoc_cells_[lid][k].push_back(a.cell_id);
    layer_gids_[lid][k].push_back(a.gid);
    ext_[{a.layer, a.gid}].insert(a.cell_id);
  }
  auto dedup = [](std::vector<std::int64_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  for (auto& [key, ids] : by_cell_) dedup(ids);
  for (auto& [key, ids] : by_gid_) dedup(ids);
  for (auto& per_layer : assoc_cells_)
    for (auto& v : per_layer) dedup(v);
  for (auto& per_layer : layer_gids_)
    for (auto& v : per_layer) dedup(v);
  for (const CellMeasure& m : measures_)
    measure_[{m.cell_id, m.layer, m.gid, m.measure}] = m.value;
}

int OverlayIndex::layer_id(const std::string& layer) const {
  auto it = layer_ids_.find(layer);
  return it == layer_ids_.end() ? -1 : it->second;
}

const std::vector<std::int64_t>* OverlayIndex::gids_at(CellKind k, std::int64_t cell,
                                                       const std::string& layer) const {
  int lid = layer_id(layer);
  if (lid < 0) return nullptr;
  auto it = by_cell_.find(pack_key(cell, lid, static_cast<int>(k)));
  return it == by_cell_.end() ? nullptr : &it->second;
}

const std::vector<std::int64_t>* OverlayIndex::cells_of(CellKind k,
                                                        const std::string& layer,
                                                        std::int64_t gid) const {
  int lid = layer_id(layer);
  if (lid < 0) return nullptr;
  auto it = by_gid_.find(pack_key(gid, lid, static_cast<int>(k)));
  return it == by_gid_.end() ? nullptr : &it->second;
}

const std::vector<std::int64_t>& OverlayIndex::assoc_cells(
    CellKind k, const std::string& layer) const {
  int lid = layer_id(layer);
  if (lid < 0) return kNoIds;
  return assoc_cells_[lid][static_cast<int>(k)];
}

const std::set<std::int64_t>* OverlayIndex::ext(const std::string& layer,
                                                std::int64_t gid) const {
  auto it = ext_.find({layer, gid});
  return it == ext_.end() ? nullptr : &it->second;
}

const Cell* OverlayIndex::cell(std::int64_t id) const {
  auto it = cell_by_id_.find(id);
  return it == cell_by_id_.end() ? nullptr : it->second;
}

const std::vector<std::int64_t>& OverlayIndex::cells_in_rect(int row, int col) const {
  return rect_cells_[static_cast<std::size_t>(row) * overlay_->grid.cols + col];
}

double OverlayIndex::measure_of(std::int64_t cell, const std::string& layer,
                                std::int64_t gid, const std::string& measure,
                                bool* found) const {
  auto it = measure_.find({cell, layer, gid, measure});
  if (found) *found = it != measure_.end();
  return it == measure_.end() ? 0.0 : it->second;
}

std::vector<std::int64_t> OverlayIndex::layer_gids(const std::string& layer,
                                                   CellKind k) const {
  int lid = layer_id(layer);
  if (lid < 0) return {};
  return layer_gids_[lid][static_cast<int>(k)];
}

std::vector<IdPair> region_intersection(const OverlayIndex& index,
                                        const std::string& layer_a,
                                        const std::string& layer_b, CellKind level) {
  std::set<IdPair> pairs;
  for (std::int64_t cell : index.assoc_cells(level, layer_a)) {
    const auto* bs = index.gids_at(level, cell, layer_b);
    if (!bs) continue;
    const auto* as = index.gids_at(level, cell, layer_a);
    for (std::int64_t a : *as)
      for (std::int64_t b : *bs) {
        if (layer_a == layer_b && a == b) continue;
        pairs.insert({a, b});
      }
  }
  return {pairs.begin(), pairs.end()};
}

std::vector<IdPair> region_contains(const OverlayIndex& index,
                                    const std::string& layer_a,
                                    const std::string& layer_b, CellKind level) {
  std::set<IdPair> pairs;
  for (std::int64_t gid_b : index.layer_gids(layer_b, level)) {
    const auto* cells = index.cells_of(level, layer_b, gid_b);
    if (!cells || cells->empty()) continue;
    // candidates from the first cell, then filtered by the rest
    const auto* first = index.gids_at(level, (*cells)[0], layer_a);
    if (!first) continue;
    std::vector<std::int64_t> candidates = *first;
    for (std::size_t i = 1; i < cells->size() && !candidates.empty(); ++i) {
      const auto* as = index.gids_at(level, (*cells)[i], layer_a);
      std::vector<std::int64_t> keep;
      if (as)
        std::set_intersection(candidates.begin(), candidates.end(), as->begin(),
                              as->end(), std::back_inserter(keep));
      candidates = std::move(keep);
    }
    for (std::int64_t a : candidates) {
      if (layer_a == layer_b && a == gid_b) continue;
      pairs.insert({a, gid_b});
    }
  }
  return {pairs.begin(), pairs.end()};
}

namespace {

double extent_of(const Layer* layer, std::int64_t gid, AggKind kind) {
  if (!layer) return 0.0;
  if (kind == AggKind::Length) {
    for (const Polyline& pl : layer->polylines)
      if (pl.gid == gid) return polyline_length(pl);
  } else if (kind == AggKind::Area) {
    for (const Polygon& pg : layer->polygons)
      if (pg.gid == gid) return polygon_area(pg);
  }
  return 0.0;
}

}  // namespace

std::vector<GroupedValue> eval_summable(
    const RegionIds& region, const Aggregator& agg, const FactRows& facts,
    const std::vector<Layer>& layers,
    const std::map<std::int64_t, std::int64_t>* group_by) {
  const Layer* layer = nullptr;
  for (const Layer& l : layers)
    if (l.name == region.layer) layer = &l;

  struct Acc {
    double sum = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    std::size_t missing = 0;
  };
  std::map<std::int64_t, Acc> groups;

  for (std::int64_t gid : region.ids) {
    std::int64_t g = kAllGid;
    if (group_by) {
      auto it = group_by->find(gid);
      if (it == group_by->end()) continue;
      g = it->second;
    }
    Acc& acc = groups[g];
    double v = 0.0;
    switch (agg.kind) {
      case AggKind::Count:
        v = 1.0;
        break;
      case AggKind::Length:
      case AggKind::Area:
        v = extent_of(layer, gid, agg.kind);
        break;
      default: {
        auto it = facts.find({region.layer, gid});
        if (it == facts.end() || !it->second.count(agg.measure)) {
          ++acc.missing;
          continue;
        }
        v = it->second.at(agg.measure);
      }
    }
    acc.sum += v;
    acc.mn = std::min(acc.mn, v);
    acc.mx = std::max(acc.mx, v);
    ++acc.n;
  }

  std::vector<GroupedValue> out;
  for (const auto& [g, acc] : groups) {
    if (acc.n == 0) continue;  // avg over an empty group yields no row
    GroupedValue row;
    row.group = g;
    row.count = acc.n;
    row.missing = acc.missing;
    switch (agg.kind) {
      case AggKind::Count: row.value = static_cast<double>(acc.n); break;
      case AggKind::Sum:
      case AggKind::Length:
      case AggKind::Area: row.value = acc.sum; break;
      case AggKind::Avg: row.value = acc.sum / acc.n; break;
      case AggKind::Min: row.value = acc.mn; break;
      case AggKind::Max: row.value = acc.mx; break;
    }
    out.push_back(row);
  }
  return out;
}

bool decide_summability(const std::set<std::int64_t>& region_cells,
                        const OverlayIndex& index) {
  std::set<std::int64_t> covered;
  for (const std::string& layer : index.overlay().layer_names) {
    std::set<std::int64_t> gids;
    for (const Association& a : index.overlay().associations)
      if (a.layer == layer) gids.insert(a.gid);
    for (std::int64_t gid : gids) {
      const std::set<std::int64_t>* ext = index.ext(layer, gid);
      if (!ext || ext->empty()) continue;
      bool inside = std::includes(region_cells.begin(), region_cells.end(),
                                  ext->begin(), ext->end());
      if (inside) covered.insert(ext->begin(), ext->end());
    }
  }
  return covered == region_cells;
}

namespace {

thread_local std::uint64_t g_counter_base = 0;

enum class CellVsRegion { Inside, Outside, Crossing };

PointLocation locate_in_region(Point2 p, const QueryRegion& qr, double eps) {
  PointLocation best = PointLocation::Outside;
  for (const Polygon& pg : qr.polygons) {
    PointLocation loc = point_in_polygon(p, pg, eps);
    if (loc == PointLocation::Inside) return loc;
    if (loc == PointLocation::OnBoundary) best = loc;
  }
  return best;
}

bool segment_crosses_region_boundary(Point2 a, Point2 b, const QueryRegion& qr) {
  for (const Polygon& pg : qr.polygons) {
    std::size_t n = pg.ring.size();
    for (std::size_t i = 0; i < n; ++i)
      if (segments_intersect(a, b, pg.ring[i], pg.ring[(i + 1) % n])) return true;
  }
  return false;
}

CellVsRegion classify_cell(const Cell& cell, const QueryRegion& qr, double eps) {
  switch (cell.kind()) {
    case CellKind::SubNode:
      return locate_in_region(cell.node(), qr, eps) == PointLocation::Outside
                 ? CellVsRegion::Outside
                 : CellVsRegion::Inside;
    case CellKind::SubLine: {
      Segment s = cell.segment();
      bool crossing = segment_crosses_region_boundary(s.a, s.b, qr);
      if (!crossing)
        return locate_in_region(s.midpoint(), qr, eps) == PointLocation::Outside
                   ? CellVsRegion::Outside
                   : CellVsRegion::Inside;
      return CellVsRegion::Crossing;
    }
    case CellKind::SubPolygon: {
      const auto& ring = cell.polygon().ring;
      bool crossing = false;
      for (std::size_t i = 0; i < ring.size() && !crossing; ++i)
        crossing = segment_crosses_region_boundary(ring[i], ring[(i + 1) % ring.size()], qr);
      // a region polygon fully inside the cell also splits it
      if (!crossing)
        for (const Polygon& pg : qr.polygons)
          if (point_in_polygon(pg.ring[0], cell.polygon(), eps) == PointLocation::Inside)
            crossing = true;
      if (crossing) return CellVsRegion::Crossing;
      Point2 rep = ring_centroid_of_vertices(ring);
      return locate_in_region(rep, qr, eps) == PointLocation::Outside
                 ? CellVsRegion::Outside
                 : CellVsRegion::Inside;
    }
  }
  return CellVsRegion::Outside;
}

double clipped_cell_extent(const Cell& cell, const QueryRegion& qr, double eps) {
  double total = 0.0;
  for (const Polygon& pg : qr.polygons) {
    if (cell.kind() == CellKind::SubLine) {
      Segment s = cell.segment();
      total += clipped_segment_length(s.a, s.b, pg, eps);
    } else if (cell.kind() == CellKind::SubPolygon) {
      total += intersection_area(cell.polygon(), pg, eps);
    }
  }
  return total;
}

}  // namespace

std::vector<RegionRow> eval_in_query_region(const OverlayIndex& index,
                                            const QueryRegion& qr,
                                            const std::string& target_layer,
                                            const Aggregator& agg,
                                            const FactRows& facts, RegionMode mode,
                                            RegionEvalStats* stats) {
  const Overlay& ov = index.overlay();
  const double eps = ov.eps.point_eps;

  struct Acc {
    double value = 0.0;
    bool exact = true;
    bool any = false;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    std::size_t n = 0;
  };
  std::map<std::int64_t, Acc> per_gid;

  std::size_t visited = 0;
  const double w = ov.box.width() / ov.grid.cols;
  const double h = ov.box.height() / ov.grid.rows;
  for (int row = 0; row < ov.grid.rows; ++row) {
    for (int col = 0; col < ov.grid.cols; ++col) {
      BBox rect{ov.box.xmin + col * w, ov.box.ymin + row * h,
                ov.box.xmin + (col + 1) * w, ov.box.ymin + (row + 1) * h};
      bool touches = false;
      for (const Polygon& pg : qr.polygons)
        if (polygon_intersects_box(pg, rect)) touches = true;
      if (!touches) continue;  // grid pruning
      ++visited;

      for (std::int64_t cid : index.cells_in_rect(row, col)) {
        const Cell& cell = *index.cell(cid);
        const auto* gids = index.gids_at(cell.kind(), cid, target_layer);
        if (!gids) continue;
        CellVsRegion cls = classify_cell(cell, qr, eps);
        if (cls == CellVsRegion::Outside) continue;
        for (std::int64_t gid : *gids) {
          Acc& acc = per_gid[gid];
          double contribution = 0.0;
          bool counts = true;
          switch (agg.kind) {
            case AggKind::Length:
            case AggKind::Area: {
              double full = cell.extent();
              if (cls == CellVsRegion::Inside) {
                contribution = full;
              } else if (mode == RegionMode::Fast) {
                contribution = full;
                acc.exact = false;
              } else {
                contribution = clipped_cell_extent(cell, qr, eps);
              }
              break;
            }
            case AggKind::Count:
              contribution = 0.0;  // handled via per-gid presence
              if (cls == CellVsRegion::Crossing && mode == RegionMode::Fast)
                acc.exact = false;
              break;
            default: {
              // per-object measures count once per geometry
              if (cls == CellVsRegion::Crossing && mode == RegionMode::Fast)
                acc.exact = false;
              counts = false;
              auto it = facts.find({target_layer, gid});
              if (it != facts.end() && it->second.count(agg.measure) && !acc.any) {
                double v = it->second.at(agg.measure);
                acc.mn = std::min(acc.mn, v);
                acc.mx = std::max(acc.mx, v);
                acc.value = v;
                ++acc.n;
              }
              break;
            }
          }
          if (counts) acc.value += contribution;
          acc.any = true;
        }
      }
    }
  }
  if (stats) {
    stats->grid_cells_visited = visited;
    stats->grid_cells_total = static_cast<std::size_t>(ov.grid.rows) * ov.grid.cols;
  }

  std::vector<RegionRow> rows;
  for (const auto& [gid, acc] : per_gid) {
    if (!acc.any) continue;
    RegionRow r;
    r.gid = gid;
    r.exact = acc.exact;
    switch (agg.kind) {
      case AggKind::Count: r.value = 1.0; break;
      case AggKind::Min: r.value = acc.mn; break;
      case AggKind::Max: r.value = acc.mx; break;
      default: r.value = acc.value; break;
    }
    rows.push_back(r);
  }
  return rows;
}

std::uint64_t predicate_eval_counter() { return predicate_evals() - g_counter_base; }
void reset_predicate_eval_counter() { g_counter_base = predicate_evals(); }

// -- naive evaluation -------------------------------------------------------------

namespace {

struct GeomRef {
  GeomKind kind;
  std::size_t idx;
  std::int64_t gid;
};

std::vector<GeomRef> refs_of(const Layer& layer) {
  std::vector<GeomRef> out;
  for (std::size_t i = 0; i < layer.points.size(); ++i)
    out.push_back({GeomKind::Point, i, layer.points[i].gid});
  for (std::size_t i = 0; i < layer.polylines.size(); ++i)
    out.push_back({GeomKind::Polyline, i, layer.polylines[i].gid});
  for (std::size_t i = 0; i < layer.polygons.size(); ++i)
    out.push_back({GeomKind::Polygon, i, layer.polygons[i].gid});
  return out;
}

bool ring_edges_intersect(const std::vector<Point2>& r1, const std::vector<Point2>& r2) {
  for (std::size_t i = 0; i < r1.size(); ++i)
    for (std::size_t j = 0; j < r2.size(); ++j)
      if (segments_intersect(r1[i], r1[(i + 1) % r1.size()], r2[j],
                             r2[(j + 1) % r2.size()]))
        return true;
  return false;
}

bool polyline_touches_polygon(const Polyline& pl, const Polygon& pg, double eps) {
  for (const Point2& v : pl.vertices)
    if (point_in_polygon(v, pg, eps) != PointLocation::Outside) return true;
  for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i)
    for (std::size_t j = 0; j < pg.ring.size(); ++j)
      if (segments_intersect(pl.vertices[i], pl.vertices[i + 1], pg.ring[j],
                             pg.ring[(j + 1) % pg.ring.size()]))
        return true;
  return false;
}

bool polylines_touch(const Polyline& a, const Polyline& b, double eps) {
  for (std::size_t i = 0; i + 1 < a.vertices.size(); ++i)
    for (std::size_t j = 0; j + 1 < b.vertices.size(); ++j)
      if (segments_intersect(a.vertices[i], a.vertices[i + 1], b.vertices[j],
                             b.vertices[j + 1]))
        return true;
  for (const Point2& v : a.vertices)
    if (dist_point_polyline(v, b) < eps) return true;
  for (const Point2& v : b.vertices)
    if (dist_point_polyline(v, a) < eps) return true;
  return false;
}

double rings_collinear_overlap(const Polygon& a, const Polygon& b, double eps) {
  double total = 0.0;
  std::size_t n = a.ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point2 p = a.ring[i];
    Point2 q = a.ring[(i + 1) % n];
    Polyline bring{0, b.ring};
    bring.vertices.push_back(b.ring[0]);
    total += collinear_overlap_length(p, q, bring, eps);
  }
  return total;
}

}  // namespace

bool exact_intersects(const Layer& a, GeomKind ka, std::size_t ia, const Layer& b,
                      GeomKind kb, std::size_t ib, CellKind level,
                      const EpsilonConfig& eps) {
  note_predicate_eval();
  if (level == CellKind::SubNode) {
    // closed extents share at least one point
    if (ka == GeomKind::Point && kb == GeomKind::Point)
      return is_similar_point(a.points[ia].p, b.points[ib].p, eps.point_eps);
    if (ka == GeomKind::Point && kb == GeomKind::Polyline)
      return dist_point_polyline(a.points[ia].p, b.polylines[ib]) < eps.point_eps;
    if (ka == GeomKind::Polyline && kb == GeomKind::Point)
      return dist_point_polyline(b.points[ib].p, a.polylines[ia]) < eps.point_eps;
    if (ka == GeomKind::Point && kb == GeomKind::Polygon)
      return point_in_polygon(a.points[ia].p, b.polygons[ib], eps.point_eps) !=
             PointLocation::Outside;
    if (ka == GeomKind::Polygon && kb == GeomKind::Point)
      return point_in_polygon(b.points[ib].p, a.polygons[ia], eps.point_eps) !=
             PointLocation::Outside;
    if (ka == GeomKind::Polyline && kb == GeomKind::Polyline)
      return polylines_touch(a.polylines[ia], b.polylines[ib], eps.point_eps);
    if (ka == GeomKind::Polyline && kb == GeomKind::Polygon)
      return polyline_touches_polygon(a.polylines[ia], b.polygons[ib], eps.point_eps);
    if (ka == GeomKind::Polygon && kb == GeomKind::Polyline)
      return polyline_touches_polygon(b.polylines[ib], a.polygons[ia], eps.point_eps);
    if (ka == GeomKind::Polygon && kb == GeomKind::Polygon) {
      const Polygon& pa = a.polygons[ia];
      const Polygon& pb = b.polygons[ib];
      if (ring_edges_intersect(pa.ring, pb.ring)) return true;
      if (point_in_polygon(pa.ring[0], pb, eps.point_eps) != PointLocation::Outside)
        return true;
      return point_in_polygon(pb.ring[0], pa, eps.point_eps) != PointLocation::Outside;
    }
    return false;
  }
  if (level == CellKind::SubLine) {
    // a shared 1-dimensional piece
    if (ka == GeomKind::Polyline && kb == GeomKind::Polyline) {
      const Polyline& pa = a.polylines[ia];
      const Polyline& pb = b.polylines[ib];
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < pa.vertices.size(); ++i)
        total += collinear_overlap_length(pa.vertices[i], pa.vertices[i + 1], pb,
                                          eps.point_eps);
      return total > eps.point_eps;
    }
    if (ka == GeomKind::Polyline && kb == GeomKind::Polygon)
      return clipped_polyline_length(a.polylines[ia], b.polygons[ib], eps.point_eps) >
             eps.point_eps;
    if (ka == GeomKind::Polygon && kb == GeomKind::Polyline)
      return clipped_polyline_length(b.polylines[ib], a.polygons[ia], eps.point_eps) >
             eps.point_eps;
    if (ka == GeomKind::Polygon && kb == GeomKind::Polygon) {
      const Polygon& pa = a.polygons[ia];
      const Polygon& pb = b.polygons[ib];
      if (intersection_area(pa, pb, eps.point_eps) > eps.area_eps) return true;
      return rings_collinear_overlap(pa, pb, eps.point_eps) > eps.point_eps;
    }
    return false;
  }
  // Polygon level: shared positive area
  if (ka == GeomKind::Polygon && kb == GeomKind::Polygon)
    return intersection_area(a.polygons[ia], b.polygons[ib], eps.point_eps) >
           eps.area_eps;
  return false;
}

bool exact_contains(const Layer& a, GeomKind ka, std::size_t ia, const Layer& b,
                    GeomKind kb, std::size_t ib, const EpsilonConfig& eps) {
  note_predicate_eval();
  if (ka == GeomKind::Polygon) {
    const Polygon& pg = a.polygons[ia];
    if (kb == GeomKind::Point)
      return point_in_polygon(b.points[ib].p, pg, eps.point_eps) !=
             PointLocation::Outside;
    auto contained_ring = [&](const std::vector<Point2>& pts, bool closed) {
      std::size_t n = pts.size();
      std::size_t limit = closed ? n : n - 1;
      for (const Point2& v : pts)
        if (point_in_polygon(v, pg, eps.point_eps) == PointLocation::Outside)
          return false;
      for (std::size_t i = 0; i < limit; ++i) {
        Point2 s = pts[i];
        Point2 t = pts[(i + 1) % n];
        // proper crossings with the boundary push part of the segment outside
        for (std::size_t j = 0; j < pg.ring.size(); ++j) {
          Point2 c = pg.ring[j];
          Point2 d = pg.ring[(j + 1) % pg.ring.size()];
          auto cross = [](Point2 o, Point2 u, Point2 v) {
            return (u.x - o.x) * (v.y - o.y) - (u.y - o.y) * (v.x - o.x);
          };
          double d1 = cross(c, d, s), d2 = cross(c, d, t);
          double d3 = cross(s, t, c), d4 = cross(s, t, d);
          if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
              ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
            return false;
        }
      }
      return true;
    };
    if (kb == GeomKind::Polyline)
      return contained_ring(b.polylines[ib].vertices, false);
    return contained_ring(b.polygons[ib].ring, true);
  }
  if (ka == GeomKind::Polyline) {
    const Polyline& pl = a.polylines[ia];
    if (kb == GeomKind::Point)
      return dist_point_polyline(b.points[ib].p, pl) < eps.point_eps;
    if (kb == GeomKind::Polyline) {
      const Polyline& other = b.polylines[ib];
      double len = polyline_length(other);
      double cover = 0.0;
      for (std::size_t i = 0; i + 1 < other.vertices.size(); ++i)
        cover += collinear_overlap_length(other.vertices[i], other.vertices[i + 1], pl,
                                          eps.point_eps);
      return cover >= len - eps.point_eps;
    }
    return false;
  }
  if (ka == GeomKind::Point && kb == GeomKind::Point)
    return is_similar_point(a.points[ia].p, b.points[ib].p, eps.point_eps);
  return false;
}

std::vector<IdPair> naive_intersection(const Layer& a, const Layer& b, CellKind level,
                                       const EpsilonConfig& eps) {
  std::set<IdPair> pairs;
  for (const GeomRef& ra : refs_of(a)) {
    for (const GeomRef& rb : refs_of(b)) {
      if (a.name == b.name && ra.gid == rb.gid) continue;
      if (exact_intersects(a, ra.kind, ra.idx, b, rb.kind, rb.idx, level, eps))
        pairs.insert({ra.gid, rb.gid});
    }
  }
  return {pairs.begin(), pairs.end()};
}

std::vector<IdPair> naive_contains(const Layer& a, const Layer& b, CellKind level,
                                   const EpsilonConfig& eps) {
  std::set<IdPair> pairs;
  for (const GeomRef& ra : refs_of(a)) {
    for (const GeomRef& rb : refs_of(b)) {
      if (a.name == b.name && ra.gid == rb.gid) continue;
      // restrict to B geometries owning cells of the requested kind
      if (level == CellKind::SubLine && rb.kind == GeomKind::Point) continue;
      if (level == CellKind::SubPolygon && rb.kind != GeomKind::Polygon) continue;
      if (exact_contains(a, ra.kind, ra.idx, b, rb.kind, rb.idx, eps))
        pairs.insert({ra.gid, rb.gid});
    }
  }
  return {pairs.begin(), pairs.end()};
}

}  // namespace piet
