// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#ifndef PIET_STORE_HPP
#define PIET_STORE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "piet/dims.hpp"
#include "piet/subdivision.hpp"

namespace piet::store {

class store_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- layer ingest ---------------------------------------------------------------

/// Parses one TSV layer file: gid <TAB> WKT <TAB> key=value ...
/// Accepted WKT forms: POINT(x y), LINESTRING(x y, ...), POLYGON((x y, ...))
/// and the single-paren POLYGON(x y, ...) variant. Polygon rings must repeat
/// their first point; clockwise rings are reversed, non-simple ones rejected.
/// Parse errors report the 1-based line number.
Layer ingest_layer(const std::filesystem::path& file, const std::string& name = "");

std::vector<Layer> load_layers_dir(const std::filesystem::path& dir);

void write_layer(const Layer& layer, const std::filesystem::path& file);

std::string to_wkt(const Point2& p);
std::string to_wkt(const Polyline& pl);
std::string to_wkt(const Polygon& pg);

// -- overlay persistence ----------------------------------------------------------

/// Writes overlay/<combo>/ with a manifest plus the cell tables
/// gis_subp_{point,linestring,polygon}_<combo>.csv, association tables
/// gis_pre_{point,linestring,polygon}_<combo>.csv, cell_measures and
/// per-grid-cell stats. Geometry serialization is bit-exact.
void save_overlay(const Overlay& overlay, const std::vector<CellMeasure>& measures,
                  const std::filesystem::path& overlay_root);

struct LoadedOverlay {
  Overlay overlay;
  std::vector<CellMeasure> measures;
};

/// Loads a combination store; refuses when the manifest epsilons or format
/// version disagree with what the caller expects.
LoadedOverlay load_overlay(const std::filesystem::path& overlay_root,
                           const std::string& combo,
                           const EpsilonConfig* expect_eps = nullptr);

std::vector<std::string> list_combos(const std::filesystem::path& overlay_root);

// -- stats (Table-3-shaped report) -------------------------------------------------

struct StatsRow {
  std::string what;
  std::size_t max = 0;
  std::size_t min = 0;
  double avg = 0.0;
};

std::vector<StatsRow> stats(const Overlay& overlay);

// -- metadata and warehouse ---------------------------------------------------------

PietSchema load_piet_schema(const std::filesystem::path& json_file);
void save_piet_schema(const PietSchema& schema, const std::filesystem::path& json_file);

std::vector<GisOlapRow> load_gis_olap(const std::filesystem::path& csv);
void save_gis_olap(const std::vector<GisOlapRow>& rows,
                   const std::filesystem::path& csv);

/// Reads warehouse/dim_*.csv and warehouse/fact_*.csv into a star schema.
StarSchema load_star_schema(const std::filesystem::path& warehouse_dir);
void save_star_schema(const StarSchema& star, const std::filesystem::path& warehouse_dir);

/// GIS fact tables derived from a layer's numeric attributes.
GisFactTable facts_from_attributes(const Layer& layer, const std::string& level);

}  // namespace piet::store

#endif  // PIET_STORE_HPP
