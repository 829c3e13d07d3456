// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#ifndef PIET_ENGINE_HPP
#define PIET_ENGINE_HPP

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "piet/dims.hpp"
#include "piet/subdivision.hpp"

namespace piet {

using IdPair = std::pair<std::int64_t, std::int64_t>;

enum class AggKind { Count, Sum, Avg, Min, Max, Length, Area };

struct Aggregator {
  AggKind kind = AggKind::Count;
  std::string measure;  // required for Sum/Avg/Min/Max
};

std::optional<AggKind> agg_kind_of(const std::string& name);

/// A set of original geometry ids at one level, with the association tables
/// that produced it.
struct RegionIds {
  std::string layer;
  CellKind level = CellKind::SubNode;
  std::vector<std::int64_t> ids;
  std::vector<std::string> provenance;
};

struct QueryRegion {
  std::vector<Polygon> polygons;
};

/// Immutable association index over one loaded overlay; shared by queries.
class OverlayIndex {
 public:
  OverlayIndex(const Overlay& overlay, std::vector<CellMeasure> measures);

  const Overlay& overlay() const { return *overlay_; }

  /// cell -> gids of one layer at one kind
  const std::vector<std::int64_t>* gids_at(CellKind k, std::int64_t cell,
                                           const std::string& layer) const;
  /// (layer, gid) -> cells of one kind
  const std::vector<std::int64_t>* cells_of(CellKind k, const std::string& layer,
                                            std::int64_t gid) const;
  /// (layer, gid) -> every cell of any kind
  const std::set<std::int64_t>* ext(const std::string& layer, std::int64_t gid) const;

  const Cell* cell(std::int64_t id) const;
  const std::vector<std::int64_t>& cells_in_rect(int row, int col) const;
  double measure_of(std::int64_t cell, const std::string& layer, std::int64_t gid,
                    const std::string& measure, bool* found) const;
  std::vector<std::int64_t> layer_gids(const std::string& layer, CellKind k) const;

  /// Cells of one kind carrying associations of the layer, sorted.
  const std::vector<std::int64_t>& assoc_cells(CellKind k,
                                               const std::string& layer) const;

 private:
  int layer_id(const std::string& layer) const;  // -1 when unknown

  const Overlay* overlay_;
  std::vector<CellMeasure> measures_;
  std::map<std::string, int> layer_ids_;
  // key: (id << 10) | (layer << 2) | kind, id being a cell id or gid
  std::unordered_map<std::uint64_t, std::vector<std::int64_t>> by_cell_;
  std::unordered_map<std::uint64_t, std::vector<std::int64_t>> by_gid_;
  std::vector<std::array<std::vector<std::int64_t>, 3>> assoc_cells_;  // per layer
  std::vector<std::array<std::vector<std::int64_t>, 3>> layer_gids_;
  std::map<std::pair<std::string, std::int64_t>, std::set<std::int64_t>> ext_;
  std::map<std::int64_t, const Cell*> cell_by_id_;
  std::vector<std::vector<std::int64_t>> rect_cells_;
  std::map<std::tuple<std::int64_t, std::string, std::int64_t, std::string>, double>
      measure_;
};

class missing_combination_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All (gidA, gidB) pairs sharing at least one overlay cell of the given
/// kind. Pure association-table scan; no geometric predicate runs.
std::vector<IdPair> region_intersection(const OverlayIndex& index,
                                        const std::string& layer_a,
                                        const std::string& layer_b, CellKind level);

/// (gidA, gidB) where every cell of B's geometry at the given kind is also
/// associated with A's geometry.
std::vector<IdPair> region_contains(const OverlayIndex& index,
                                    const std::string& layer_a,
                                    const std::string& layer_b, CellKind level);

struct GroupedValue {
  std::int64_t group = 0;  // kAllGid when ungrouped
  double value = 0.0;
  std::size_t count = 0;
  std::size_t missing = 0;  // ids skipped for missing measures
};

/// Exact aggregation over a region id set; optional grouping by a
/// gid -> group-gid map (built from rollups or association pairs).
std::vector<GroupedValue> eval_summable(
    const RegionIds& region, const Aggregator& agg, const FactRows& facts,
    const std::vector<Layer>& layers,
    const std::map<std::int64_t, std::int64_t>* group_by = nullptr);

/// Algorithm: collect the geometries whose whole cell set lies inside the
/// region and test whether their union reproduces it exactly.
bool decide_summability(const std::set<std::int64_t>& region_cells,
                        const OverlayIndex& index);

enum class RegionMode { Fast, Exact };

struct RegionRow {
  std::int64_t gid = 0;
  double value = 0.0;
  bool exact = true;
};

struct RegionEvalStats {
  std::size_t grid_cells_visited = 0;
  std::size_t grid_cells_total = 0;
};

/// Aggregates the target layer inside a query region. Only grid cells whose
/// rectangle intersects the region are examined. Fully-inside cells
/// contribute their stored value; boundary-crossing cells contribute their
/// full value flagged inexact (Fast) or their geometrically clipped value
/// (Exact).
std::vector<RegionRow> eval_in_query_region(const OverlayIndex& index,
                                            const QueryRegion& qr,
                                            const std::string& target_layer,
                                            const Aggregator& agg,
                                            const FactRows& facts, RegionMode mode,
                                            RegionEvalStats* stats = nullptr);

/// Exact geometric predicate evaluations since the last reset (thread-local).
std::uint64_t predicate_eval_counter();
void reset_predicate_eval_counter();

// -- naive evaluation (independent of the overlay; also the CLI naive mode) ------

/// Sub-level-faithful geometric intersection over original geometries:
/// Point = closed sets share a point, LineString = a shared 1-dimensional
/// piece, Polygon = shared positive area. One predicate evaluation per pair.
std::vector<IdPair> naive_intersection(const Layer& a, const Layer& b, CellKind level,
                                       const EpsilonConfig& eps);

/// Closed containment of B's geometries in A's, restricted to B geometries
/// that own cells of the given kind.
std::vector<IdPair> naive_contains(const Layer& a, const Layer& b, CellKind level,
                                   const EpsilonConfig& eps);

/// Exact per-pair predicates (also used by the R-tree refinement step).
bool exact_intersects(const Layer& a, GeomKind ka, std::size_t ia, const Layer& b,
                      GeomKind kb, std::size_t ib, CellKind level,
                      const EpsilonConfig& eps);
bool exact_contains(const Layer& a, GeomKind ka, std::size_t ia, const Layer& b,
                    GeomKind kb, std::size_t ib, const EpsilonConfig& eps);

}  // namespace piet

#endif  // PIET_ENGINE_HPP
