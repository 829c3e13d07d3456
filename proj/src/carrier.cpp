// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "piet/carrier.hpp"

#include <algorithm>
#include <map>

namespace piet {

std::vector<Line> carriers_of_point(Point2 p) {
  return {horizontal_through(p), vertical_through(p)};
}

namespace {

void push_dedup(std::vector<Line>& out, const Line& l, double line_eps) {
  for (const Line& e : out)
    if (similar_lines(e, l, line_eps)) return;
  out.push_back(l);
}

}  // namespace

std::vector<Line> carriers_of_polyline(const Polyline& pl, const EpsilonConfig& eps) {
  std::vector<Line> out;
  for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i)
    push_dedup(out, line_through(pl.vertices[i], pl.vertices[i + 1]), eps.line_eps);
  const Point2& first = pl.vertices.front();
  const Point2& last = pl.vertices.back();
  if (!is_similar_point(first, last, eps.point_eps)) {
    Line first_seg = line_through(pl.vertices[0], pl.vertices[1]);
    Line last_seg = line_through(pl.vertices[pl.vertices.size() - 2], last);
    push_dedup(out, perpendicular_at(first_seg, first), eps.line_eps);
    push_dedup(out, perpendicular_at(last_seg, last), eps.line_eps);
  }
  return out;
}

std::vector<Line> carriers_of_polygon(const Polygon& pg, const EpsilonConfig& eps) {
  std::vector<Line> out;
  std::size_t n = pg.ring.size();
  for (std::size_t i = 0; i < n; ++i)
    push_dedup(out, line_through(pg.ring[i], pg.ring[(i + 1) % n]), eps.line_eps);
  return out;
}

CarrierSet carriers_of_layers(const std::vector<Layer>& layers,
                              const EpsilonConfig& eps) {
  struct Tagged {
    Line line;
    Provenance prov;
  };
  std::vector<Tagged> all;
  for (const Layer& layer : layers) {
    for (const PointFeature& f : layer.points)
      for (const Line& l : carriers_of_point(f.p))
        all.push_back({l, {layer.name, f.gid}});
    for (const Polyline& pl : layer.polylines)
      for (const Line& l : carriers_of_polyline(pl, eps))
        all.push_back({l, {layer.name, pl.gid}});
    for (const Polygon& pg : layer.polygons)
      for (const Line& l : carriers_of_polygon(pg, eps))
        all.push_back({l, {layer.name, pg.gid}});
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    if (a.line == b.line) return a.prov < b.prov;
    return a.line < b.line;
  });

  CarrierSet cs;
  for (const Tagged& t : all) {
    if (!cs.lines.empty() && similar_lines(cs.lines.back(), t.line, eps.line_eps)) {
      cs.provenance.back().insert(t.prov);
    } else {
      cs.lines.push_back(t.line);
      cs.provenance.push_back({t.prov});
    }
  }
  return cs;
}

void add_box_carriers(CarrierSet& cs, const BBox& box, const EpsilonConfig& eps) {
  const Line edges[4] = {
      horizontal_through({box.xmin, box.ymin}),
      horizontal_through({box.xmin, box.ymax}),
      vertical_through({box.xmin, box.ymin}),
      vertical_through({box.xmax, box.ymin}),
  };
  for (const Line& l : edges) {
    bool merged = false;
    for (std::size_t i = 0; i < cs.lines.size(); ++i) {
      if (similar_lines(cs.lines[i], l, eps.line_eps)) {
        cs.provenance[i].insert({"__box__", 0});
        merged = true;
        break;
      }
    }
    if (!merged) {
      cs.lines.push_back(l);
      cs.provenance.push_back({Provenance{"__box__", 0}});
    }
  }
}

std::size_t carrier_count_bound(const std::vector<Layer>& layers) {
  std::size_t points = 0, bound = 0;
  for (const Layer& layer : layers) {
    points += layer.points.size();
    for (const Polyline& pl : layer.polylines)
      bound += (pl.vertices.size() - 1) + 2;
    for (const Polygon& pg : layer.polygons) bound += pg.ring.size();
  }
  return 2 * points + bound;
}

}  // namespace piet
