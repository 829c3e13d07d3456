// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#ifndef PIET_BASELINE_HPP
#define PIET_BASELINE_HPP

#include <functional>
#include <string>
#include <vector>

#include "piet/geom.hpp"

namespace piet {

struct Mbr {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

  static Mbr of_point(Point2 p) { return {p.x, p.y, p.x, p.y}; }
  static Mbr of_points(const std::vector<Point2>& pts);

  bool intersects(const Mbr& o) const {
    return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
  }
  bool contains(const Mbr& o) const {
    return xmin <= o.xmin && o.xmax <= xmax && ymin <= o.ymin && o.ymax <= ymax;
  }
  void expand(const Mbr& o);
  double area() const { return (xmax - xmin) * (ymax - ymin); }
  double enlargement(const Mbr& o) const;
};

struct RTreeEntry {
  Mbr box;
  std::int64_t id = 0;
  double value = 0.0;  // aggregate payload (aR-tree)
};

enum class ArAggKind { Count, Sum, Max };

/// R-tree with sort-tile-recursive bulk loading and quadratic-split inserts.
/// Nodes carry precomputed count/sum/max over their subtree, which makes the
/// same structure usable as an aggregation R-tree.
class RTree {
 public:
  explicit RTree(int fanout = 16);

  static RTree bulk_load(std::vector<RTreeEntry> entries, int fanout = 16);
  void insert(const RTreeEntry& entry);

  std::size_t size() const { return count_; }
  int height() const;  // leaf = 0

  /// ids whose MBR intersects the rectangle (filter step only)
  std::vector<std::int64_t> range_query(const Mbr& rect) const;

  /// MBR filter + exact predicate refinement
  std::vector<std::int64_t> range_query_exact(
      const Mbr& rect, const std::function<bool(std::int64_t)>& exact) const;

  /// Dual-tree join: MBR pruning, then the exact predicate per candidate.
  static std::vector<std::pair<std::int64_t, std::int64_t>> spatial_join(
      const RTree& a, const RTree& b,
      const std::function<bool(std::int64_t, std::int64_t)>& exact);

  /// Aggregate over entries inside the rectangle. A node whose MBR lies
  /// fully inside contributes its precomputed value without being descended.
  double ar_aggregate(const Mbr& rect, ArAggKind kind) const;

  /// Node visits of the last ar_aggregate call (root counts as 1).
  std::size_t visits() const { return visits_; }
  /// Node ids visited by the last ar_aggregate, for pruning assertions.
  const std::vector<int>& visit_trace() const { return trace_; }
  /// All descendants (node ids) of a node, for pruning assertions.
  std::vector<int> descendants(int node) const;
  /// Nodes whose MBR is fully inside the rectangle.
  std::vector<int> nodes_inside(const Mbr& rect) const;

  struct InvariantReport {
    bool balanced = true;
    bool mbrs_tight = true;
    bool fill_ok = true;
    std::string detail;
  };
  InvariantReport check_invariants(bool check_fill) const;

 private:
  struct Node {
    Mbr box;
    bool leaf = true;
    std::vector<int> children;        // node ids
    std::vector<RTreeEntry> entries;  // leaf payload
    double agg_count = 0.0;
    double agg_sum = 0.0;
    double agg_max = 0.0;
  };

  int build_level(std::vector<int> nodes);
  int build_leaves(std::vector<RTreeEntry>& entries);
  void recompute(int node);
  void recompute_upwards(std::vector<int>& path);
  int choose_leaf(int node, const Mbr& box, std::vector<int>& path);
  void split_node(int node, std::vector<int>& path);
  double aggregate_node(int node, const Mbr& rect, ArAggKind kind) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  int fanout_ = 16;
  std::size_t count_ = 0;
  mutable std::size_t visits_ = 0;
  mutable std::vector<int> trace_;
};

}  // namespace piet

#endif  // PIET_BASELINE_HPP
