// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#ifndef PIET_DIMS_HPP
#define PIET_DIMS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "piet/subdivision.hpp"

namespace piet {

// -- GIS dimension schema -----------------------------------------------------

struct GeometryGraph {
  std::string layer;
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;  // (finer, coarser)
};

/// Att(attribute, dimension) = (geometry level, layer)
struct AttMapping {
  std::string attribute;
  std::string dimension;
  std::string level;
  std::string layer;
};

struct GisDimensionSchema {
  std::vector<GeometryGraph> graphs;
  std::vector<AttMapping> att;
  std::vector<std::string> olap_dimensions;
};

/// Constraint violations, empty when the schema is well formed: per graph one
/// "point" node without incoming edges, an "All" node without outgoing edges,
/// acyclicity, edges over declared nodes, att targets resolvable.
std::vector<std::string> validate(const GisDimensionSchema& schema);

// -- GIS dimension instance ---------------------------------------------------

inline constexpr std::int64_t kAllGid = -1;

using RollupKey = std::tuple<std::string, std::string, std::string>;  // layer, from, to

class unknown_gid_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class unmapped_member_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GisDimensionInstance {
  GisDimensionSchema schema;
  /// rollup relations/functions: (child gid -> parent gids)
  std::map<RollupKey, std::multimap<std::int64_t, std::int64_t>> rollups;
  /// alpha functions: (layer, dimension) -> member name -> gid
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::int64_t>>
      alpha_maps;
};

/// All parents of gid at the target level; post-overlay sub-level rollups are
/// functions, so the result is a single gid there. Rolling up to "All" yields
/// {kAllGid}. Throws unknown_gid_error when the relation exists but gid is
/// absent from it.
std::vector<std::int64_t> rollup(const GisDimensionInstance& inst,
                                 const std::string& layer, const std::string& from,
                                 const std::string& to, std::int64_t gid);

std::int64_t alpha(const GisDimensionInstance& inst, const std::string& layer,
                   const std::string& dimension, const std::string& member);

/// True when every child in the relation has at most one parent.
bool rollup_is_functional(const GisDimensionInstance& inst, const RollupKey& key);

// -- GIS fact tables ----------------------------------------------------------

struct GisFactTable {
  std::string level;
  std::string layer;
  std::vector<std::string> measures;
  std::map<std::int64_t, std::vector<double>> rows;
};

std::optional<std::vector<double>> ft(const GisFactTable& table, std::int64_t gid);

FactRows fact_rows_of(const std::vector<GisFactTable>& tables);

// -- overlay update -----------------------------------------------------------

/// Schema transformation after overlay precomputation: one merged hierarchy
/// with bottom point, new levels Node / OPolyline / OPolygon, and Polyline
/// inserted between OPolyline and Polygon. Instance rollups gain the
/// sub-level functions f[L, OPl->polyline], f[L, OPg->polygon],
/// f[L, Node->node|polyline|polygon] populated from the associations.
GisDimensionInstance apply_overlay_update(const GisDimensionInstance& inst,
                                          const Overlay& overlay);

inline const char* sub_level_name(CellKind k) {
  switch (k) {
    case CellKind::SubNode: return "Node";
    case CellKind::SubLine: return "OPolyline";
    case CellKind::SubPolygon: return "OPolygon";
  }
  return "?";
}

inline const char* geom_level_name(GeomKind k) {
  switch (k) {
    case GeomKind::Point: return "node";
    case GeomKind::Polyline: return "polyline";
    case GeomKind::Polygon: return "polygon";
  }
  return "?";
}

// -- OLAP star schema ---------------------------------------------------------

struct OlapMember {
  std::string name;
  int level = 0;    // 0 = All
  int parent = -1;  // index into members, -1 for the root
  std::vector<int> children;
};

struct OlapDimension {
  std::string name;                 // e.g. "Store"
  std::vector<std::string> levels;  // root level first, e.g. "All Stores", ...
  std::vector<OlapMember> members;  // members[0] is the All root

  int child_named(int parent, const std::string& name) const;
  /// Resolve a bracket path below the dimension name, e.g.
  /// {"All Stores","USA","CA"}; returns -1 when unknown.
  int resolve(const std::vector<std::string>& path) const;
  std::string full_path(int member) const;  // "[Store].[All Stores].[USA].[CA]"
  bool is_descendant_or_self(int member, int ancestor) const;
  /// Depth-first pre-order index used by Hierarchize.
  std::vector<int> dfs_order() const;
};

struct StarFactRow {
  std::map<std::string, int> leaf;  // dimension name -> leaf member index
  std::map<std::string, double> measures;
};

struct StarSchema {
  std::string cube;
  std::vector<OlapDimension> dimensions;
  std::vector<std::string> measures;
  std::vector<StarFactRow> facts;

  const OlapDimension* dimension(const std::string& name) const;
};

/// gis_olap mapping rows: (gis id, olap id, description)
struct GisOlapRow {
  std::int64_t gisid = 0;
  std::string olapid;
  std::string description;
};

// -- Piet-Schema metadata -----------------------------------------------------

struct SubPLevelDesc {
  std::string name;  // Polygon | Linestring | Point
  std::string table;
  std::string primaryKey;
  std::string uniqueIdColumn;
  std::string originalGeometryColumn;
};

struct PropertyDesc {
  std::string name;
  std::string column;
  std::string type;
};

struct OlapTableDesc {
  std::string name;
  std::string id;
  std::string hierarchyNameField;
  std::string hierarchyAll;  // "[Store].[All Stores]"
};

struct OlapRelationDesc {
  bool present = false;
  std::string table;  // gis_olap_<layer>
  std::string gisId;
  std::string olapId;
  std::string olapDimensionName;
  std::string olapLevelName;
  OlapTableDesc olap_table;
};

struct MeasureDesc {
  std::string name;
  std::string layer;
  std::string aggregator;          // count | sum | avg | min | max | length | area
  std::string property;            // measured column, empty for count
  std::string split = "copy";      // copy | proportional
};

struct LayerDesc {
  std::string name;
  bool hasAll = true;
  std::string table;
  std::string primaryKey;
  std::string geometry;
  std::string descriptionField;
  std::vector<PropertyDesc> properties;
  std::vector<std::string> subp_levels;
  OlapRelationDesc olap_relation;
};

struct PietSchema {
  std::vector<SubPLevelDesc> subpolygonization;
  std::vector<LayerDesc> layers;
  std::vector<MeasureDesc> measures;

  const LayerDesc* layer(const std::string& name) const;
  const MeasureDesc* measure(const std::string& name) const;
};

std::vector<std::string> validate_piet_schema(const PietSchema& schema);

}  // namespace piet

#endif  // PIET_DIMS_HPP
