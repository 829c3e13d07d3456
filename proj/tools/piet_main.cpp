// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).
//
// piet: build overlay stores, run GISOLAP-QL and aggregation queries in
// piet / rtree / naive modes, benchmark them, generate synthetic maps and
// inspect stored combinations.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>

#include "CLI11.hpp"
#include "piet/baseline.hpp"
#include "piet/engine.hpp"
#include "piet/gen.hpp"
#include "piet/gisolapql.hpp"
#include "piet/store.hpp"

namespace fs = std::filesystem;
using namespace piet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCap = 3;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Workspace {
  fs::path root;
  PietSchema schema;
  std::vector<Layer> layers;
  FactRows facts;

  fs::path layers_dir() const { return root / "layers"; }
  fs::path overlay_dir() const { return root / "overlay"; }
  fs::path mapping_dir() const { return root / "mapping"; }
  fs::path warehouse_dir() const { return root / "warehouse"; }

  const Layer* layer(const std::string& name) const {
    for (const Layer& l : layers)
      if (l.name == name) return &l;
    return nullptr;
  }
};

Workspace open_workspace(const fs::path& schema_path, fs::path data_dir) {
  Workspace ws;
  ws.root = data_dir.empty() ? schema_path.parent_path() : data_dir;
  ws.schema = store::load_piet_schema(schema_path);
  for (const LayerDesc& desc : ws.schema.layers) {
    fs::path file = ws.layers_dir() / (desc.table + ".tsv");
    ws.layers.push_back(store::ingest_layer(file, desc.name));
  }
  std::vector<GisFactTable> tables;
  for (const Layer& l : ws.layers) tables.push_back(store::facts_from_attributes(l, ""));
  ws.facts = fact_rows_of(tables);
  return ws;
}

std::string combo_of(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  std::string id;
  for (const std::string& n : names) {
    if (!id.empty()) id += "-";
    id += n;
  }
  return id;
}

std::vector<std::string> split_combo(const std::string& combo) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : combo) {
    if (c == '-') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void write_csv(const fs::path& path, const ResultTable& table) {
  std::ofstream out(path);
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void print_table(const ResultTable& table, std::ostream& os) {
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

// ---------------------------------------------------------------- gen ------

int cmd_gen(const fs::path& out_dir, GenSpec spec) {
  fs::create_directories(out_dir / "layers");
  std::vector<Layer> layers = generate_map(spec);
  for (const Layer& l : layers)
    store::write_layer(l, out_dir / "layers" / (l.name + ".tsv"));

  PietSchema schema;
  schema.subpolygonization = {
      {"Polygon", "gis_subp_polygon", "id", "uniqueid", "originalgeometryid"},
      {"Linestring", "gis_subp_linestring", "id", "uniqueid", "originalgeometryid"},
      {"Point", "gis_subp_point", "id", "uniqueid", "originalgeometryid"}};
  for (const Layer& l : layers) {
    LayerDesc d;
    d.name = l.name;
    d.table = l.name;
    d.subp_levels = {"Polygon", "Linestring", "Point"};
    if (!l.attributes.empty())
      for (const auto& [k, v] : l.attributes.begin()->second)
        d.properties.push_back({k, k, "Double"});
    if (l.name == "states") {
      d.olap_relation.present = true;
      d.olap_relation.table = "gis_olap_states";
      d.olap_relation.gisId = "gisid";
      d.olap_relation.olapId = "olapid";
      d.olap_relation.olapDimensionName = "Store";
      d.olap_relation.olapLevelName = "Store State";
      d.olap_relation.olap_table = {"store", "state_id", "store_state",
                                    "[Store].[All Stores]"};
    }
    schema.layers.push_back(d);
  }
  schema.measures.push_back({"StoresQuantity", "stores", "count", "", "copy"});
  schema.measures.push_back({"CitiesQuantity", "cities", "count", "", "copy"});
  schema.measures.push_back({"AvgElevation", "volcanoes", "avg", "elev", "copy"});
  store::save_piet_schema(schema, out_dir / "piet.json");

  // warehouse: Store dimension over the generated states + media/product/time
  StarSchema star;
  star.cube = "Sales";
  OlapDimension store_dim;
  store_dim.name = "Store";
  store_dim.levels = {"Store Country", "Store State", "Store City"};
  store_dim.members.push_back({"All Stores", 0, -1, {}});
  auto add = [](OlapDimension& d, const std::string& n, int level, int parent) {
    d.members.push_back({n, level, parent, {}});
    int id = static_cast<int>(d.members.size()) - 1;
    d.members[parent].children.push_back(id);
    return id;
  };
  int usa = add(store_dim, "USA", 1, 0);
  std::vector<GisOlapRow> mapping;
  std::vector<int> city_leaves;
  const Layer& states = layers[0];
  for (const Polygon& pg : states.polygons) {
    std::string state_name = states.attributes.at(pg.gid).at("name");
    int st = add(store_dim, state_name, 2, usa);
    city_leaves.push_back(add(store_dim, state_name + " City A", 3, st));
    city_leaves.push_back(add(store_dim, state_name + " City B", 3, st));
    mapping.push_back({pg.gid, state_name, state_name});
  }
  OlapDimension media;
  media.name = "Promotion Media";
  media.levels = {"Media Type"};
  media.members.push_back({"All Media", 0, -1, {}});
  int tv = add(media, "TV", 1, 0);
  int radio = add(media, "Radio", 1, 0);
  OlapDimension product;
  product.name = "Product";
  product.levels = {"Product Family"};
  product.members.push_back({"All Products", 0, -1, {}});
  int drink = add(product, "Drink", 1, 0);
  int food = add(product, "Food", 1, 0);
  OlapDimension time;
  time.name = "Time";
  time.levels = {"Year", "Quarter"};
  time.members.push_back({"All Time", 0, -1, {}});
  int y97 = add(time, "1997", 1, 0);
  int q1 = add(time, "Q1-1997", 2, y97);
  int q2 = add(time, "Q2-1997", 2, y97);
  star.dimensions = {store_dim, media, product, time};
  star.measures = {"Unit Sales", "Store Cost", "Store Sales"};
  std::uint64_t h = spec.seed;
  auto next = [&h]() {
    h = h * 6364136223846793005ULL + 1442695040888963407ULL;
    return (h >> 33) % 97;
  };
  for (int leaf : city_leaves) {
    for (int m : {tv, radio}) {
      for (int p : {drink, food}) {
        for (int t : {q1, q2}) {
          StarFactRow row;
          row.leaf["Store"] = leaf;
          row.leaf["Promotion Media"] = m;
          row.leaf["Product"] = p;
          row.leaf["Time"] = t;
          double units = 10.0 + static_cast<double>(next());
          row.measures["Unit Sales"] = units;
          row.measures["Store Cost"] = units * 0.4;
          row.measures["Store Sales"] = units * 1.2;
          star.facts.push_back(row);
        }
      }
    }
  }
  store::save_star_schema(star, out_dir / "warehouse");
  store::save_gis_olap(mapping, out_dir / "mapping" / "gis_olap_states.csv");

  std::cout << "generated " << layers.size() << " layers under "
            << (out_dir / "layers").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- build ----

int cmd_build(const fs::path& schema_path, const fs::path& data_dir,
              GridSpec grid, const std::string& combos_arg, int threads,
              double point_eps, double line_eps, double area_eps) {
  Workspace ws = open_workspace(schema_path, data_dir);
  BBox box = bbox_of_layers(ws.layers, 0.02);
  EpsilonConfig eps = EpsilonConfig::for_box(box);
  if (point_eps > 0) eps.point_eps = point_eps;
  if (line_eps > 0) eps.line_eps = line_eps;
  if (area_eps > 0) eps.area_eps = area_eps;

  std::vector<std::vector<std::string>> combos;
  if (combos_arg == "all") {
    std::size_t n = ws.layers.size();
    if (n == 1) {
      combos.push_back({ws.layers[0].name});
    } else {
      for (std::size_t mask = 1; mask < (1ULL << n); ++mask) {
        if (__builtin_popcountll(mask) < 2) continue;
        std::vector<std::string> pick;
        for (std::size_t b = 0; b < n; ++b)
          if (mask & (1ULL << b)) pick.push_back(ws.layers[b].name);
        combos.push_back(pick);
      }
    }
  } else {
    // comma-separated list of plus-joined layer sets: states+rivers,states+cities
    std::string cur;
    std::vector<std::string> sets;
    for (char c : combos_arg + ",") {
      if (c == ',') {
        if (!cur.empty()) sets.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    for (const std::string& s : sets) {
      std::vector<std::string> pick;
      std::string name;
      for (char c : s + "+") {
        if (c == '+') {
          if (!name.empty()) pick.push_back(name);
          name.clear();
        } else {
          name += c;
        }
      }
      combos.push_back(pick);
    }
  }

  std::map<std::string, MeasureSplit> semantics;
  for (const MeasureDesc& m : ws.schema.measures)
    if (!m.property.empty())
      semantics[m.property] =
          m.split == "proportional" ? MeasureSplit::Proportional : MeasureSplit::Copy;

  struct BuildRow {
    std::string combo;
    std::size_t layer_count;
    double ms;
  };
  std::vector<BuildRow> report;
  for (const std::vector<std::string>& pick : combos) {
    std::vector<Layer> selected;
    for (const std::string& name : pick) {
      const Layer* l = ws.layer(name);
      if (!l) throw store::store_error("unknown layer in combos: " + name);
      selected.push_back(*l);
    }
    double t0 = now_ms();
    GridCspOptions opts;
    opts.threads = threads;
    Overlay ov = grid_csp(selected, box, grid, eps, opts);
    associate(ov, selected);
    auto measures = propagate_measures(ov, selected, ws.facts, semantics);
    store::save_overlay(ov, measures, ws.overlay_dir());
    double ms = now_ms() - t0;
    report.push_back({ov.combo_id(), pick.size(), ms});
    std::cout << "built " << ov.combo_id() << ": " << ov.cells.size() << " cells, "
              << ov.associations.size() << " associations, " << ms << " ms\n";
  }

  // timing report shaped like the build-time tables: per-size average + total
  std::ofstream times(ws.overlay_dir() / "build_times.csv");
  times << "combo,layers,ms\n";
  for (const BuildRow& r : report)
    times << r.combo << "," << r.layer_count << "," << r.ms << "\n";
  std::map<std::size_t, std::pair<double, int>> by_size;
  for (const BuildRow& r : report) {
    by_size[r.layer_count].first += r.ms;
    by_size[r.layer_count].second += 1;
  }
  std::cout << "layers,avg_ms,total_ms\n";
  for (auto it = by_size.rbegin(); it != by_size.rend(); ++it)
    std::cout << it->first << "," << it->second.first / it->second.second << ","
              << it->second.first << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- query ----

struct OverlayCache {
  const Workspace* ws;
  std::map<std::string, std::shared_ptr<OverlayIndex>> by_combo;
  std::map<std::string, store::LoadedOverlay> loaded;

  std::shared_ptr<OverlayIndex> index_for(const std::vector<std::string>& names) {
    std::vector<std::string> combos = store::list_combos(ws->overlay_dir());
    std::set<std::string> want(names.begin(), names.end());
    std::string best;
    std::size_t best_size = SIZE_MAX;
    for (const std::string& combo : combos) {
      std::vector<std::string> members = split_combo(combo);
      std::set<std::string> have(members.begin(), members.end());
      bool covers = true;
      for (const std::string& n : want)
        if (!have.count(n)) covers = false;
      if (covers && have.size() < best_size) {
        best = combo;
        best_size = have.size();
      }
    }
    if (best.empty())
      throw missing_combination_error("no stored combination covers {" +
                                      combo_of(names) + "}; run piet build");
    auto it = by_combo.find(best);
    if (it != by_combo.end()) return it->second;
    loaded[best] = store::load_overlay(ws->overlay_dir(), best);
    auto idx = std::make_shared<OverlayIndex>(loaded[best].overlay,
                                              loaded[best].measures);
    by_combo[best] = idx;
    return idx;
  }
};

struct RTreeCache {
  const Workspace* ws;
  std::map<std::string, RTree> trees;

  const RTree& tree_for(const std::string& layer_name) {
    auto it = trees.find(layer_name);
    if (it != trees.end()) return it->second;
    const Layer* layer = ws->layer(layer_name);
    if (!layer) throw store::store_error("unknown layer " + layer_name);
    std::vector<RTreeEntry> entries;
    for (const PointFeature& f : layer->points)
      entries.push_back({Mbr::of_point(f.p), f.gid, 0.0});
    for (const Polyline& pl : layer->polylines)
      entries.push_back({Mbr::of_points(pl.vertices), pl.gid, 0.0});
    for (const Polygon& pg : layer->polygons)
      entries.push_back({Mbr::of_points(pg.ring), pg.gid, 0.0});
    trees[layer_name] = RTree::bulk_load(std::move(entries), 16);
    return trees.at(layer_name);
  }
};

struct GeomLookup {
  GeomKind kind;
  std::size_t idx;
};

std::map<std::int64_t, GeomLookup> lookup_of(const Layer& layer) {
  std::map<std::int64_t, GeomLookup> out;
  for (std::size_t i = 0; i < layer.points.size(); ++i)
    out[layer.points[i].gid] = {GeomKind::Point, i};
  for (std::size_t i = 0; i < layer.polylines.size(); ++i)
    out[layer.polylines[i].gid] = {GeomKind::Polyline, i};
  for (std::size_t i = 0; i < layer.polygons.size(); ++i)
    out[layer.polygons[i].gid] = {GeomKind::Polygon, i};
  return out;
}

OpEvaluator make_evaluator(const std::string& mode, Workspace& ws,
                           OverlayCache& overlays, RTreeCache& rtrees,
                           const EpsilonConfig& eps) {
  if (mode == "piet") {
    return [&ws, &overlays](const GisOp& op) {
      auto index = overlays.index_for({op.a.layer, op.b.layer});
      if (op.name == "intersection")
        return region_intersection(*index, op.a.layer, op.b.layer, op.level);
      return region_contains(*index, op.a.layer, op.b.layer, op.level);
    };
  }
  if (mode == "naive") {
    return [&ws, eps](const GisOp& op) {
      const Layer* a = ws.layer(op.a.layer);
      const Layer* b = ws.layer(op.b.layer);
      if (!a || !b) throw store::store_error("unknown layer in WHERE clause");
      if (op.name == "intersection") return naive_intersection(*a, *b, op.level, eps);
      return naive_contains(*a, *b, op.level, eps);
    };
  }
  if (mode == "rtree") {
    return [&ws, &rtrees, eps](const GisOp& op) {
      const Layer* a = ws.layer(op.a.layer);
      const Layer* b = ws.layer(op.b.layer);
      if (!a || !b) throw store::store_error("unknown layer in WHERE clause");
      auto la = lookup_of(*a);
      auto lb = lookup_of(*b);
      const RTree& ta = rtrees.tree_for(op.a.layer);
      const RTree& tb = rtrees.tree_for(op.b.layer);
      CellKind level = op.level;
      bool contains_op = op.name == "contains";
      auto exact = [&, level, contains_op](std::int64_t ga, std::int64_t gb) {
        const GeomLookup& ra = la.at(ga);
        const GeomLookup& rb = lb.at(gb);
        if (a->name == b->name && ga == gb) return false;
        if (contains_op) {
          if (level == CellKind::SubLine && rb.kind == GeomKind::Point) return false;
          if (level == CellKind::SubPolygon && rb.kind != GeomKind::Polygon)
            return false;
          return exact_contains(*a, ra.kind, ra.idx, *b, rb.kind, rb.idx, eps);
        }
        return exact_intersects(*a, ra.kind, ra.idx, *b, rb.kind, rb.idx, level, eps);
      };
      return RTree::spatial_join(ta, tb, exact);
    };
  }
  throw store::store_error("unknown mode " + mode);
}

int cmd_query(const fs::path& schema_path, const fs::path& data_dir,
              const fs::path& query_file, const std::string& mode,
              const fs::path& region_file, const std::string& target_layer,
              const std::string& agg_text, bool exact_mode, const fs::path& out_csv) {
  Workspace ws = open_workspace(schema_path, data_dir);
  BBox box = bbox_of_layers(ws.layers, 0.02);
  EpsilonConfig eps = EpsilonConfig::for_box(box);
  OverlayCache overlays{&ws, {}, {}};
  RTreeCache rtrees{&ws, {}};

  // region aggregation form: --region r.tsv --target rivers --agg length
  if (!region_file.empty()) {
    Layer region_layer = store::ingest_layer(region_file, "region");
    if (region_layer.polygons.empty())
      throw store::store_error("region file holds no polygon");
    QueryRegion qr;
    qr.polygons = region_layer.polygons;

    std::string agg_name = agg_text;
    std::string measure;
    std::size_t colon = agg_text.find(':');
    if (colon != std::string::npos) {
      agg_name = agg_text.substr(0, colon);
      measure = agg_text.substr(colon + 1);
    }
    auto kind = agg_kind_of(agg_name);
    if (!kind) throw store::store_error("unknown aggregator " + agg_name);
    Aggregator agg{*kind, measure};

    reset_predicate_eval_counter();
    double t0 = now_ms();
    ResultTable table;
    table.columns = {"gid", "value", "exact"};
    if (mode == "piet") {
      auto index = overlays.index_for({target_layer});
      RegionEvalStats stats;
      auto rows = eval_in_query_region(
          *index, qr, target_layer, agg, ws.facts,
          exact_mode ? RegionMode::Exact : RegionMode::Fast, &stats);
      for (const RegionRow& r : rows)
        table.rows.push_back({std::to_string(r.gid), std::to_string(r.value),
                              r.exact ? "1" : "0"});
      std::cout << "grid cells visited: " << stats.grid_cells_visited << "/"
                << stats.grid_cells_total << "\n";
    } else {
      // clipped-geometry evaluation over the original layer (naive), with an
      // MBR prefilter in rtree mode
      const Layer* layer = ws.layer(target_layer);
      if (!layer) throw store::store_error("unknown layer " + target_layer);
      std::set<std::int64_t> candidates;
      if (mode == "rtree") {
        Mbr rb{1e300, 1e300, -1e300, -1e300};
        for (const Polygon& pg : qr.polygons) rb.expand(Mbr::of_points(pg.ring));
        for (std::int64_t id : rtrees.tree_for(target_layer).range_query(rb))
          candidates.insert(id);
      }
      auto in_scope = [&](std::int64_t gid) {
        return mode == "naive" || candidates.count(gid) > 0;
      };
      for (const Polyline& pl : layer->polylines) {
        if (!in_scope(pl.gid)) continue;
        double total = 0;
        for (const Polygon& pg : qr.polygons)
          total += clipped_polyline_length(pl, pg, eps.point_eps);
        if (total > 0)
          table.rows.push_back({std::to_string(pl.gid), std::to_string(total), "1"});
      }
      for (const PointFeature& f : layer->points) {
        if (!in_scope(f.gid)) continue;
        bool inside = false;
        for (const Polygon& pg : qr.polygons) {
          note_predicate_eval();
          if (point_in_polygon(f.p, pg, eps.point_eps) != PointLocation::Outside)
            inside = true;
        }
        if (inside)
          table.rows.push_back({std::to_string(f.gid), "1", "1"});
      }
    }
    double ms = now_ms() - t0;
    print_table(table, std::cout);
    if (!out_csv.empty()) write_csv(out_csv, table);
    std::cout << "mode=" << mode << " time_ms=" << ms
              << " predicate_evals=" << predicate_eval_counter() << "\n";
    return kExitOk;
  }

  // GISOLAP-QL form
  std::ifstream qf(query_file);
  if (!qf) throw store::store_error("cannot open query file " + query_file.string());
  std::string text((std::istreambuf_iterator<char>(qf)),
                   std::istreambuf_iterator<char>());
  GisolapQuery query = parse(text);

  reset_predicate_eval_counter();
  double assembly_ms = 0.0, execution_ms = 0.0;
  GisPlanResult plan;
  if (query.gis) {
    OpEvaluator eval = make_evaluator(mode, ws, overlays, rtrees, eps);
    double t0 = now_ms();
    plan = plan_and_execute(*query.gis, eval, ws.schema, ws.facts, ws.layers);
    assembly_ms = now_ms() - t0;
    for (const std::string& w : plan.warnings) std::cerr << "warning: " << w << "\n";
  }

  if (!query.olap) {
    print_table(plan.result, std::cout);
    if (!out_csv.empty()) write_csv(out_csv, plan.result);
    std::cout << "mode=" << mode << " time_ms=" << assembly_ms
              << " predicate_evals=" << predicate_eval_counter() << "\n";
    return kExitOk;
  }

  // full query: rewrite the MDX with the member set of the GIS result
  StarSchema star = store::load_star_schema(ws.warehouse_dir());
  MdxAst mdx = *query.olap;
  if (query.gis) {
    const LayerDesc* linked = nullptr;
    for (const GisSelectItem& item : query.gis->select) {
      if (item.kind != GisSelectItem::Layer) continue;
      const LayerDesc* d = ws.schema.layer(item.name);
      if (d && d->olap_relation.present) {
        linked = d;
        break;
      }
    }
    if (!linked)
      throw store::store_error("no selected layer carries an OLAPRelation");
    double t0 = now_ms();
    auto mapping = store::load_gis_olap(
        ws.mapping_dir() / (linked->olap_relation.table + ".csv"));
    std::size_t col = 0;
    for (std::size_t i = 0; i < plan.result.columns.size(); ++i)
      if (plan.result.columns[i] == linked->name) col = i;
    std::vector<std::int64_t> ids;
    for (const auto& row : plan.result.rows) ids.push_back(std::stoll(row[col]));
    std::vector<std::string> warnings;
    mdx = rewrite_olap(ids, mapping, *linked, star, mdx, &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
    assembly_ms += now_ms() - t0;
  }

  double t1 = now_ms();
  PivotResult pivot = eval_mdx(mdx, star);
  execution_ms = now_ms() - t1;

  ResultTable table;
  for (std::size_t i = 0; !pivot.row_headers.empty() &&
                          i < pivot.row_headers[0].size();
       ++i)
    table.columns.push_back("member_" + std::to_string(i));
  for (const std::string& m : pivot.col_headers) table.columns.push_back(m);
  for (std::size_t r = 0; r < pivot.row_headers.size(); ++r) {
    std::vector<std::string> row = pivot.row_headers[r];
    for (double v : pivot.body[r]) row.push_back(std::to_string(v));
    table.rows.push_back(row);
  }
  print_table(table, std::cout);
  if (!out_csv.empty()) write_csv(out_csv, table);
  std::cout << "mode=" << mode << " assembly_ms=" << assembly_ms
            << " execution_ms=" << execution_ms
            << " total_ms=" << assembly_ms + execution_ms << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- bench ----

struct BenchRow {
  std::string query;
  std::string mode;
  double mean_ms = 0, min_ms = 0, max_ms = 0;
  std::uint64_t predicate_evals = 0;
  std::size_t result_rows = 0;
};

int cmd_bench(const fs::path& schema_path, const fs::path& data_dir,
              const std::string& suite, int repeats, const fs::path& out_csv) {
  Workspace ws = open_workspace(schema_path, data_dir);
  BBox box = bbox_of_layers(ws.layers, 0.02);
  EpsilonConfig eps = EpsilonConfig::for_box(box);
  OverlayCache overlays{&ws, {}, {}};
  RTreeCache rtrees{&ws, {}};

  std::vector<BenchRow> rows;
  auto run = [&](const std::string& query_name, const std::string& mode,
                 const std::function<std::size_t()>& fn) {
    fn();  // warm-up, excluded from the stats
    BenchRow row;
    row.query = query_name;
    row.mode = mode;
    row.min_ms = 1e300;
    std::size_t result = 0;
    for (int i = 0; i < repeats; ++i) {
      reset_predicate_eval_counter();
      double t0 = now_ms();
      result = fn();
      double ms = now_ms() - t0;
      row.mean_ms += ms;
      row.min_ms = std::min(row.min_ms, ms);
      row.max_ms = std::max(row.max_ms, ms);
      row.predicate_evals = predicate_eval_counter();
    }
    row.mean_ms /= repeats;
    row.result_rows = result;
    rows.push_back(row);
    std::cout << query_name << "," << mode << "," << row.mean_ms << ","
              << row.min_ms << "," << row.max_ms << "," << row.predicate_evals
              << "," << row.result_rows << "\n";
  };

  auto op_pairs = [&](const std::string& mode, const std::string& op,
                      const std::string& la, const std::string& lb, CellKind level) {
    GisOp gis_op;
    gis_op.name = op;
    gis_op.a = {GisOpArg::LayerRef, la, 0};
    gis_op.b = {GisOpArg::LayerRef, lb, 0};
    gis_op.level = level;
    OpEvaluator eval = make_evaluator(mode, ws, overlays, rtrees, eps);
    return eval(gis_op);
  };

  std::cout << "query,mode,mean_ms,min_ms,max_ms,predicate_evals,result_rows\n";
  const std::vector<std::string> modes{"piet", "rtree", "naive"};

  if (suite == "geometric") {
    for (const std::string& mode : modes) {
      run("Q1_states_with_volcano", mode, [&] {
        auto pairs = op_pairs(mode, "contains", "states", "volcanoes", CellKind::SubNode);
        std::set<std::int64_t> states;
        for (const IdPair& p : pairs) states.insert(p.first);
        return states.size();
      });
      run("Q2_states_and_cities", mode, [&] {
        return op_pairs(mode, "contains", "states", "cities", CellKind::SubNode).size();
      });
      run("Q3_states_cities_river_crossed", mode, [&] {
        auto sc = op_pairs(mode, "contains", "states", "cities", CellKind::SubNode);
        auto sr = op_pairs(mode, "intersection", "states", "rivers", CellKind::SubLine);
        std::set<std::int64_t> crossed;
        for (const IdPair& p : sr) crossed.insert(p.first);
        std::size_t n = 0;
        for (const IdPair& p : sc)
          if (crossed.count(p.first)) ++n;
        return n;
      });
      run("Q4_states_crossed_by_2_rivers", mode, [&] {
        auto sr = op_pairs(mode, "intersection", "states", "rivers", CellKind::SubLine);
        std::map<std::int64_t, std::set<std::int64_t>> per_state;
        for (const IdPair& p : sr) per_state[p.first].insert(p.second);
        std::size_t n = 0;
        for (const auto& [s, rs] : per_state)
          if (rs.size() >= 2) ++n;
        return n;
      });
    }
  } else if (suite == "aggregation") {
    for (const std::string& mode : modes) {
      run("Q5_counts_in_first_state", mode, [&] {
        auto sr = op_pairs(mode, "intersection", "states", "rivers", CellKind::SubLine);
        auto sv = op_pairs(mode, "contains", "states", "volcanoes", CellKind::SubNode);
        std::set<std::int64_t> rivers, volcanoes;
        for (const IdPair& p : sr)
          if (p.first == 1) rivers.insert(p.second);
        for (const IdPair& p : sv)
          if (p.first == 1) volcanoes.insert(p.second);
        return rivers.size() + volcanoes.size();
      });
      run("Q6_avg_elev_by_state", mode, [&] {
        auto sv = op_pairs(mode, "contains", "states", "volcanoes", CellKind::SubNode);
        RegionIds region;
        region.layer = "volcanoes";
        std::map<std::int64_t, std::int64_t> group;
        for (const IdPair& p : sv) {
          region.ids.push_back(p.second);
          group[p.second] = p.first;
        }
        return eval_summable(region, {AggKind::Avg, "elev"}, ws.facts, ws.layers,
                             &group)
            .size();
      });
      run("Q7_avg_elev_crossed_states", mode, [&] {
        auto sv = op_pairs(mode, "contains", "states", "volcanoes", CellKind::SubNode);
        auto sr = op_pairs(mode, "intersection", "states", "rivers", CellKind::SubLine);
        std::set<std::int64_t> crossed;
        for (const IdPair& p : sr) crossed.insert(p.first);
        RegionIds region;
        region.layer = "volcanoes";
        std::map<std::int64_t, std::int64_t> group;
        for (const IdPair& p : sv) {
          if (!crossed.count(p.first)) continue;
          region.ids.push_back(p.second);
          group[p.second] = p.first;
        }
        return eval_summable(region, {AggKind::Avg, "elev"}, ws.facts, ws.layers,
                             &group)
            .size();
      });
      run("Q8_river_length_high_volcano_states", mode, [&] {
        auto sv = op_pairs(mode, "contains", "states", "volcanoes", CellKind::SubNode);
        std::set<std::int64_t> hot;
        for (const IdPair& p : sv) {
          auto it = ws.facts.find({"volcanoes", p.second});
          if (it != ws.facts.end() && it->second.count("elev") &&
              it->second.at("elev") > 4300)
            hot.insert(p.first);
        }
        auto sr = op_pairs(mode, "intersection", "states", "rivers", CellKind::SubLine);
        std::set<std::int64_t> rivers;
        for (const IdPair& p : sr)
          if (hot.count(p.first)) rivers.insert(p.second);
        return rivers.size();
      });
    }
  } else if (suite == "region" || suite == "artree") {
    // two query regions: a small and a large rectangle
    auto rect_region = [&](double frac) {
      QueryRegion qr;
      double w = box.width() * frac, h = box.height() * frac;
      double cx = box.xmin + box.width() * 0.4, cy = box.ymin + box.height() * 0.45;
      qr.polygons.push_back({1,
                             {{cx - w / 2, cy - h / 2},
                              {cx + w / 2, cy - h / 2},
                              {cx + w / 2, cy + h / 2},
                              {cx - w / 2, cy + h / 2}}});
      return qr;
    };
    std::vector<std::pair<std::string, QueryRegion>> regions{
        {"region1_small", rect_region(0.25)}, {"region2_large", rect_region(0.7)}};

    if (suite == "region") {
      for (const auto& [rname, qr] : regions) {
        for (const std::string& mode : modes) {
          run("Q9_river_length_" + rname, mode, [&, qr = qr] {
            if (mode == "piet") {
              auto index = overlays.index_for({"rivers"});
              return eval_in_query_region(*index, qr, "rivers",
                                          {AggKind::Length, ""}, ws.facts,
                                          RegionMode::Exact)
                  .size();
            }
            const Layer* rivers = ws.layer("rivers");
            std::size_t n = 0;
            for (const Polyline& pl : rivers->polylines) {
              if (mode == "rtree") {
                Mbr rb = Mbr::of_points(qr.polygons[0].ring);
                if (!Mbr::of_points(pl.vertices).intersects(rb)) continue;
              }
              double len = clipped_polyline_length(pl, qr.polygons[0], eps.point_eps);
              if (len > 0) ++n;
            }
            return n;
          });
          run("Q10_volcanoes_in_region_by_state_" + rname, mode, [&, qr = qr] {
            std::set<std::int64_t> in_region;
            if (mode == "piet") {
              auto index = overlays.index_for({"volcanoes"});
              for (const RegionRow& r :
                   eval_in_query_region(*index, qr, "volcanoes",
                                        {AggKind::Count, ""}, ws.facts,
                                        RegionMode::Exact))
                in_region.insert(r.gid);
            } else {
              const Layer* volcanoes = ws.layer("volcanoes");
              for (const PointFeature& f : volcanoes->points) {
                note_predicate_eval();
                if (point_in_polygon(f.p, qr.polygons[0], eps.point_eps) !=
                    PointLocation::Outside)
                  in_region.insert(f.gid);
              }
            }
            auto sv = op_pairs(mode, "contains", "states", "volcanoes",
                               CellKind::SubNode);
            std::map<std::int64_t, double> sums;
            std::map<std::int64_t, int> counts;
            for (const IdPair& p : sv) {
              if (!in_region.count(p.second)) continue;
              auto it = ws.facts.find({"volcanoes", p.second});
              if (it == ws.facts.end()) continue;
              sums[p.first] += it->second.at("elev");
              counts[p.first] += 1;
            }
            return sums.size();
          });
        }
      }
    } else {
      // aR-tree suite: count/sum/max of volcano elevations inside regions
      const Layer* volcanoes = ws.layer("volcanoes");
      std::vector<RTreeEntry> entries;
      for (const PointFeature& f : volcanoes->points)
        entries.push_back({Mbr::of_point(f.p), f.gid,
                           ws.facts.count({"volcanoes", f.gid})
                               ? ws.facts.at({"volcanoes", f.gid}).at("elev")
                               : 0.0});
      RTree artree = RTree::bulk_load(entries, 16);
      for (const auto& [rname, qr] : regions) {
        Mbr rect = Mbr::of_points(qr.polygons[0].ring);
        run("Q12_max_elev_" + rname, "artree", [&, rect] {
          double mx = artree.ar_aggregate(rect, ArAggKind::Max);
          return static_cast<std::size_t>(std::max(0.0, mx));
        });
        run("Q12_max_elev_" + rname, "rtree", [&, rect] {
          double mx = 0;
          for (std::int64_t id : artree.range_query(rect)) {
            note_predicate_eval();
            mx = std::max(mx, ws.facts.at({"volcanoes", id}).at("elev"));
          }
          return static_cast<std::size_t>(mx);
        });
        run("Q12_max_elev_" + rname, "naive", [&, qr = qr] {
          double mx = 0;
          for (const PointFeature& f : volcanoes->points) {
            note_predicate_eval();
            if (point_in_polygon(f.p, qr.polygons[0], eps.point_eps) !=
                PointLocation::Outside)
              mx = std::max(mx, ws.facts.at({"volcanoes", f.gid}).at("elev"));
          }
          return static_cast<std::size_t>(mx);
        });
        run("Q12_count_" + rname, "artree", [&, rect] {
          return static_cast<std::size_t>(artree.ar_aggregate(rect, ArAggKind::Count));
        });
      }
    }
  } else {
    std::cerr << "unknown suite " << suite << "\n";
    return kExitUsage;
  }

  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    out << "query,mode,mean_ms,min_ms,max_ms,predicate_evals,result_rows\n";
    for (const BenchRow& r : rows)
      out << r.query << "," << r.mode << "," << r.mean_ms << "," << r.min_ms << ","
          << r.max_ms << "," << r.predicate_evals << "," << r.result_rows << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- inspect --

int cmd_inspect(const fs::path& schema_path, const fs::path& data_dir,
                const std::string& combo, bool dump_carriers) {
  Workspace ws = open_workspace(schema_path, data_dir);
  store::LoadedOverlay loaded = store::load_overlay(ws.overlay_dir(), combo);
  std::cout << "combination " << combo << ": " << loaded.overlay.cells.size()
            << " cells, " << loaded.overlay.associations.size() << " associations, "
            << loaded.overlay.orphan_cells << " orphan cells\n";
  std::cout << "subgeometry,max,min,avg\n";
  for (const store::StatsRow& row : store::stats(loaded.overlay))
    std::cout << row.what << "," << row.max << "," << row.min << "," << row.avg
              << "\n";
  if (dump_carriers) {
    std::vector<Layer> selected;
    for (const std::string& name : loaded.overlay.layer_names) {
      const Layer* l = ws.layer(name);
      if (l) selected.push_back(*l);
    }
    CarrierSet cs = carriers_of_layers(selected, loaded.overlay.eps);
    std::cout << "a,b,c,provenance\n";
    for (std::size_t i = 0; i < cs.lines.size(); ++i) {
      std::cout << cs.lines[i].a << "," << cs.lines[i].b << "," << cs.lines[i].c
                << ",";
      bool first = true;
      for (const Provenance& p : cs.provenance[i]) {
        std::cout << (first ? "" : ";") << p.layer << ":" << p.gid;
        first = false;
      }
      std::cout << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piet: overlay-precomputation spatial OLAP engine"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a deterministic synthetic map");
  GenSpec spec;
  std::string gen_out = ".";
  gen->add_option("--seed", spec.seed, "random seed");
  gen->add_option("--states", spec.states, "number of state tiles");
  gen->add_option("--rivers", spec.rivers, "number of river polylines");
  gen->add_option("--points", spec.points, "points per point layer");
  gen->add_flag("--west-heavy", spec.west_heavy, "skew point density westward");
  gen->add_option("--width", spec.width, "map width in map units");
  gen->add_option("--height", spec.height, "map height in map units");
  gen->add_option("--out", gen_out, "output data directory");

  // build
  auto* build = app.add_subcommand("build", "precompute overlay stores");
  std::string schema_file = "piet.json";
  std::string data_dir;
  std::string grid_text = "20x50";
  std::string combos = "all";
  int threads = 0;
  double opt_point_eps = 0, opt_line_eps = 0, opt_area_eps = 0;
  build->add_option("--schema", schema_file, "Piet-Schema json")->required();
  build->add_option("--data-dir", data_dir, "data directory (defaults to schema dir)");
  build->add_option("--grid", grid_text, "grid as RxC, e.g. 20x50");
  build->add_option("--combos", combos, "all | states+rivers,states+cities,...");
  build->add_option("--threads", threads, "worker threads (0 = hardware)");
  build->add_option("--point-eps", opt_point_eps, "override point epsilon");
  build->add_option("--line-eps", opt_line_eps, "override line epsilon");
  build->add_option("--area-eps", opt_area_eps, "override area epsilon");

  // query
  auto* query = app.add_subcommand("query", "run a GISOLAP-QL or region query");
  std::string query_schema = "piet.json", query_data;
  std::string query_file, region_file, target_layer, agg_text = "count";
  std::string mode = "piet", out_csv;
  bool exact = false;
  query->add_option("--schema", query_schema, "Piet-Schema json")->required();
  query->add_option("--data-dir", query_data, "data directory");
  query->add_option("--file", query_file, "GISOLAP-QL query file");
  query->add_option("--mode", mode, "piet | rtree | naive");
  query->add_option("--region", region_file, "query region layer (TSV polygon)");
  query->add_option("--target", target_layer, "target layer for region queries");
  query->add_option("--agg", agg_text, "aggregator for region queries (kind[:measure])");
  query->add_flag("--exact", exact, "clip boundary-crossing cells exactly");
  query->add_option("--out", out_csv, "write the result CSV here");

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  std::string bench_schema = "piet.json", bench_data, suite = "geometric";
  std::string bench_out;
  int repeats = 10;
  bench->add_option("--schema", bench_schema, "Piet-Schema json")->required();
  bench->add_option("--data-dir", bench_data, "data directory");
  bench->add_option("--suite", suite, "geometric | aggregation | region | artree");
  bench->add_option("--repeats", repeats, "runs per query (plus one warm-up)");
  bench->add_option("--out", bench_out, "results CSV");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "show stats of a stored combination");
  std::string inspect_schema = "piet.json", inspect_data, inspect_combo;
  bool dump_carriers = false;
  inspect->add_option("--schema", inspect_schema, "Piet-Schema json")->required();
  inspect->add_option("--data-dir", inspect_data, "data directory");
  inspect->add_option("--combo", inspect_combo, "combination id")->required();
  inspect->add_flag("--carriers", dump_carriers, "dump deduplicated carrier lines");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_out, spec);
    if (build->parsed()) {
      GridSpec grid;
      if (sscanf(grid_text.c_str(), "%dx%d", &grid.rows, &grid.cols) != 2 ||
          grid.rows < 1 || grid.cols < 1) {
        std::cerr << "bad --grid, expected RxC\n";
        return kExitUsage;
      }
      return cmd_build(schema_file, data_dir, grid, combos, threads, opt_point_eps,
                       opt_line_eps, opt_area_eps);
    }
    if (query->parsed())
      return cmd_query(query_schema, query_data, query_file, mode, region_file,
                       target_layer, agg_text, exact, out_csv);
    if (bench->parsed())
      return cmd_bench(bench_schema, bench_data, suite, repeats, bench_out);
    if (inspect->parsed())
      return cmd_inspect(inspect_schema, inspect_data, inspect_combo, dump_carriers);
  } catch (const line_cap_exceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
