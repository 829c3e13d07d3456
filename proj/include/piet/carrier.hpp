// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#ifndef PIET_CARRIER_HPP
#define PIET_CARRIER_HPP

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "piet/geom.hpp"

namespace piet {

/// One geometry that generated a carrier line.
struct Provenance {
  std::string layer;
  std::int64_t gid;

  friend bool operator<(const Provenance& a, const Provenance& b) {
    return a.layer != b.layer ? a.layer < b.layer : a.gid < b.gid;
  }
  friend bool operator==(const Provenance& a, const Provenance& b) {
    return a.layer == b.layer && a.gid == b.gid;
  }
};

/// The deduplicated carrier lines of a set of layers. Lines are canonical
/// and sorted; no two members are equal within line_eps.
struct CarrierSet {
  std::vector<Line> lines;
  std::vector<std::set<Provenance>> provenance;  // parallel to lines

  std::size_t size() const { return lines.size(); }
};

/// The horizontal and vertical lines through p.
std::vector<Line> carriers_of_point(Point2 p);

/// Supporting line of every segment (collinear runs merge) plus the two end
/// perpendiculars. Perpendiculars are emitted only when the polyline is open
/// (first vertex differs from last under point_eps).
std::vector<Line> carriers_of_polyline(const Polyline& pl, const EpsilonConfig& eps);

/// Supporting line of each boundary edge, deduplicated.
std::vector<Line> carriers_of_polygon(const Polygon& pg, const EpsilonConfig& eps);

/// Union of the per-geometry carrier sets across layers, deduplicated within
/// line_eps by a sorted-key pass; provenance merged per line.
CarrierSet carriers_of_layers(const std::vector<Layer>& layers,
                              const EpsilonConfig& eps);

/// The four edge lines of the bounding box, appended as an implicit layer
/// named "__box__". Used by the CLI inspect dump; arrangement building drops
/// lines coincident with the clip rectangle anyway.
void add_box_carriers(CarrierSet& cs, const BBox& box, const EpsilonConfig& eps);

/// Upper bound N = 2|P| + |L|(n_L + 2) + |R| n_R on the carrier count.
std::size_t carrier_count_bound(const std::vector<Layer>& layers);

}  // namespace piet

#endif  // PIET_CARRIER_HPP
