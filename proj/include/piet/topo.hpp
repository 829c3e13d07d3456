// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#ifndef PIET_TOPO_HPP
#define PIET_TOPO_HPP

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "piet/subdivision.hpp"

namespace piet {

enum class Orientation { Ccw, Cw };

/// Coordinate-free relational encoding of one arrangement. Ids of carrier
/// cells are their cell ids; frame vertices/edges and the exterior face get
/// synthetic ids above them.
///
/// Between convention: for every vertex with at least three incident edges,
/// each counter-clockwise-consecutive triple (a, m, b) of incident edge ids
/// yields (Ccw, a, m, b), plus the mirrored (Cw, b, m, a).
struct TopologicalInvariant {
  std::set<std::int64_t> vertex;
  std::set<std::int64_t> edge;
  std::set<std::int64_t> face;  // bounded faces
  std::int64_t exterior_face = -1;
  std::map<std::string, std::set<std::int64_t>> regions;
  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> endpoints;
  std::set<std::pair<std::int64_t, std::int64_t>> face_edge;
  std::set<std::pair<std::int64_t, std::int64_t>> face_vertex;
  std::set<std::tuple<Orientation, std::int64_t, std::int64_t, std::int64_t>> between;

  long long euler_characteristic() const {
    return static_cast<long long>(vertex.size()) -
           static_cast<long long>(edge.size()) +
           static_cast<long long>(face.size()) + 1;  // + exterior face
  }
};

/// Region name -> cell ids (typically layer-qualified original geometries).
using RegionCells = std::map<std::string, std::set<std::int64_t>>;

RegionCells regions_of(const Overlay& overlay);
RegionCells regions_of_associations(const std::vector<Association>& assocs);

TopologicalInvariant build_invariant(const Arrangement& arr, const RegionCells& regions);

class unknown_region_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Regions sharing at least one edge with the given region's faces; vertex
/// contact alone does not count.
std::set<std::string> adjacent_regions(const TopologicalInvariant& inv,
                                       const std::string& region);
std::size_t adjacent_region_count(const TopologicalInvariant& inv,
                                  const std::string& region);

/// True iff a bijection of ids maps every relation of a onto b (including
/// region contents, per region name). Canonical colors come from iterative
/// neighborhood refinement; tiny backtracking resolves remaining ties.
bool invariant_equal_up_to_relabel(const TopologicalInvariant& a,
                                   const TopologicalInvariant& b);

}  // namespace piet

#endif  // PIET_TOPO_HPP
