// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "piet/store.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace piet::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw store_error(std::string("bad number for ") + what + ": '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<Point2> parse_coord_list(const std::string& body, const char* ctx) {
  std::vector<Point2> pts;
  for (const std::string& pair : split(body, ',')) {
    std::istringstream ss(trim(pair));
    double x, y;
    if (!(ss >> x >> y)) throw store_error(std::string("bad coordinate in ") + ctx);
    std::string rest;
    if (ss >> rest) throw store_error(std::string("trailing token in ") + ctx);
    pts.push_back({x, y});
  }
  return pts;
}

// POINT(...), LINESTRING(...), POLYGON((...)), POLYGON(...)
void parse_wkt_into(Layer& layer, std::int64_t gid, const std::string& wkt) {
  std::string s = trim(wkt);
  auto upper = s;
  std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
  auto body_of = [&](std::size_t taglen) {
    std::string rest = trim(s.substr(taglen));
    if (rest.empty() || rest.front() != '(' || rest.back() != ')')
      throw store_error("malformed WKT: " + s);
    return trim(rest.substr(1, rest.size() - 2));
  };
  if (upper.rfind("POINT", 0) == 0) {
    auto pts = parse_coord_list(body_of(5), "POINT");
    if (pts.size() != 1) throw store_error("POINT needs one coordinate pair");
    layer.points.push_back({gid, pts[0]});
  } else if (upper.rfind("LINESTRING", 0) == 0) {
    auto pts = parse_coord_list(body_of(10), "LINESTRING");
    if (pts.size() < 2) throw store_error("LINESTRING needs at least 2 points");
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      if (pts[i] == pts[i + 1])
        throw store_error("LINESTRING has repeated consecutive vertices");
    layer.polylines.push_back({gid, pts});
  } else if (upper.rfind("POLYGON", 0) == 0) {
    std::string body = body_of(7);
    if (!body.empty() && body.front() == '(') {
      if (body.back() != ')') throw store_error("malformed POLYGON ring: " + s);
      body = trim(body.substr(1, body.size() - 2));
    }
    auto pts = parse_coord_list(body, "POLYGON");
    if (pts.size() < 4 || !(pts.front() == pts.back()))
      throw store_error("POLYGON ring must be closed (first point repeated)");
    pts.pop_back();
    Polygon pg{gid, pts};
    if (ring_area(pg.ring) < 0.0) std::reverse(pg.ring.begin(), pg.ring.end());
    if (ring_area(pg.ring) <= 0.0) throw store_error("POLYGON has no area");
    if (!ring_is_simple(pg.ring)) throw store_error("POLYGON is not simple");
    layer.polygons.push_back(pg);
  } else {
    throw store_error("unknown geometry type in: " + s);
  }
}

}  // namespace

std::string to_wkt(const Point2& p) {
  return "POINT(" + fmt_double(p.x) + " " + fmt_double(p.y) + ")";
}

std::string to_wkt(const Polyline& pl) {
  std::string out = "LINESTRING(";
  for (std::size_t i = 0; i < pl.vertices.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(pl.vertices[i].x) + " " + fmt_double(pl.vertices[i].y);
  }
  return out + ")";
}

std::string to_wkt(const Polygon& pg) {
  std::string out = "POLYGON((";
  for (std::size_t i = 0; i <= pg.ring.size(); ++i) {
    if (i) out += ", ";
    const Point2& p = pg.ring[i % pg.ring.size()];
    out += fmt_double(p.x) + " " + fmt_double(p.y);
  }
  return out + "))";
}

Layer ingest_layer(const fs::path& file, const std::string& name) {
  std::ifstream in(file);
  if (!in) throw store_error("cannot open layer file " + file.string());
  Layer layer;
  layer.name = name.empty() ? file.stem().string() : name;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() < 2)
      throw store_error(file.string() + ":" + std::to_string(lineno) +
                        ": expected gid<TAB>geometry");
    std::int64_t gid = 0;
    try {
      gid = std::stoll(trim(cols[0]));
    } catch (const std::exception&) {
      throw store_error(file.string() + ":" + std::to_string(lineno) + ": bad gid '" +
                        cols[0] + "'");
    }
    try {
      parse_wkt_into(layer, gid, cols[1]);
    } catch (const store_error& e) {
      throw store_error(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    for (std::size_t i = 2; i < cols.size(); ++i) {
      std::string kv = trim(cols[i]);
      if (kv.empty()) continue;
      std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw store_error(file.string() + ":" + std::to_string(lineno) +
                          ": attribute without '=': " + kv);
      layer.attributes[gid][kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  }
  return layer;
}

std::vector<Layer> load_layers_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".tsv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Layer> layers;
  for (const fs::path& f : files) layers.push_back(ingest_layer(f));
  return layers;
}

void write_layer(const Layer& layer, const fs::path& file) {
  std::ofstream out(file);
  auto attrs_of = [&](std::int64_t gid) {
    std::string s;
    auto it = layer.attributes.find(gid);
    if (it == layer.attributes.end()) return s;
    for (const auto& [k, v] : it->second) s += "\t" + k + "=" + v;
    return s;
  };
  for (const PointFeature& f : layer.points)
    out << f.gid << "\t" << to_wkt(f.p) << attrs_of(f.gid) << "\n";
  for (const Polyline& pl : layer.polylines)
    out << pl.gid << "\t" << to_wkt(pl) << attrs_of(pl.gid) << "\n";
  for (const Polygon& pg : layer.polygons)
    out << pg.gid << "\t" << to_wkt(pg) << attrs_of(pg.gid) << "\n";
}

namespace {

constexpr int kStoreVersion = 1;

const char* kind_name(CellKind k) {
  switch (k) {
    case CellKind::SubNode: return "point";
    case CellKind::SubLine: return "linestring";
    case CellKind::SubPolygon: return "polygon";
  }
  return "?";
}

CellKind kind_of(const std::string& s) {
  if (s == "point") return CellKind::SubNode;
  if (s == "linestring") return CellKind::SubLine;
  if (s == "polygon") return CellKind::SubPolygon;
  throw store_error("unknown cell kind " + s);
}

GeomKind geom_kind_of(const std::string& s) {
  if (s == "point") return GeomKind::Point;
  if (s == "polyline") return GeomKind::Polyline;
  if (s == "polygon") return GeomKind::Polygon;
  throw store_error("unknown geometry kind " + s);
}

const char* geom_kind_name(GeomKind k) {
  switch (k) {
    case GeomKind::Point: return "point";
    case GeomKind::Polyline: return "polyline";
    case GeomKind::Polygon: return "polygon";
  }
  return "?";
}

}  // namespace

void save_overlay(const Overlay& overlay, const std::vector<CellMeasure>& measures,
                  const fs::path& overlay_root) {
  std::string combo = overlay.combo_id();
  fs::path dir = overlay_root / combo;
  fs::create_directories(dir);

  json manifest;
  manifest["version"] = kStoreVersion;
  manifest["combo"] = combo;
  manifest["layers"] = overlay.layer_names;
  manifest["grid"] = {{"rows", overlay.grid.rows}, {"cols", overlay.grid.cols}};
  manifest["box"] = {{"xmin", overlay.box.xmin},
                     {"ymin", overlay.box.ymin},
                     {"xmax", overlay.box.xmax},
                     {"ymax", overlay.box.ymax}};
  manifest["eps"] = {{"point_eps", overlay.eps.point_eps},
                     {"line_eps", overlay.eps.line_eps},
                     {"area_eps", overlay.eps.area_eps}};
  manifest["orphan_cells"] = overlay.orphan_cells;
  manifest["built_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";

  std::ofstream subp[3] = {
      std::ofstream(dir / ("gis_subp_point_" + combo + ".csv")),
      std::ofstream(dir / ("gis_subp_linestring_" + combo + ".csv")),
      std::ofstream(dir / ("gis_subp_polygon_" + combo + ".csv"))};
  for (auto& f : subp) f << "cell_id,row,col,geometry\n";
  for (const Cell& c : overlay.cells) {
    std::string wkt;
    switch (c.kind()) {
      case CellKind::SubNode: wkt = to_wkt(c.node()); break;
      case CellKind::SubLine: {
        Polyline pl{0, {c.segment().a, c.segment().b}};
        wkt = to_wkt(pl);
        break;
      }
      case CellKind::SubPolygon: wkt = to_wkt(c.polygon()); break;
    }
    subp[static_cast<int>(c.kind())]
        << c.cell_id << "," << c.grid_row << "," << c.grid_col << "," << wkt << "\n";
  }

  std::vector<Association> assocs = overlay.associations;
  std::sort(assocs.begin(), assocs.end(), [](const Association& a, const Association& b) {
    return std::tie(a.cell_id, a.layer, a.gid) < std::tie(b.cell_id, b.layer, b.gid);
  });
  std::ofstream pre[3] = {
      std::ofstream(dir / ("gis_pre_point_" + combo + ".csv")),
      std::ofstream(dir / ("gis_pre_linestring_" + combo + ".csv")),
      std::ofstream(dir / ("gis_pre_polygon_" + combo + ".csv"))};
  for (auto& f : pre) f << "cell_id,layer,gid,parent_level\n";
  for (const Association& a : assocs)
    pre[static_cast<int>(a.sub_level)] << a.cell_id << "," << a.layer << "," << a.gid
                                       << "," << geom_kind_name(a.parent_level) << "\n";

  std::vector<CellMeasure> ms = measures;
  std::sort(ms.begin(), ms.end(), [](const CellMeasure& a, const CellMeasure& b) {
    return std::tie(a.cell_id, a.layer, a.gid, a.measure) <
           std::tie(b.cell_id, b.layer, b.gid, b.measure);
  });
  std::ofstream mf(dir / ("cell_measures_" + combo + ".csv"));
  mf << "cell_id,layer,gid,measure,value\n";
  for (const CellMeasure& m : ms)
    mf << m.cell_id << "," << m.layer << "," << m.gid << "," << m.measure << ","
       << fmt_double(m.value) << "\n";

  std::ofstream sf(dir / ("stats_" + combo + ".csv"));
  sf << "row,col,carrier_lines,points,segments,polygons\n";
  for (const GridStats& st : overlay.stats)
    sf << st.row << "," << st.col << "," << st.carrier_lines << "," << st.points << ","
       << st.segments << "," << st.polygons << "\n";
}

LoadedOverlay load_overlay(const fs::path& overlay_root, const std::string& combo,
                           const EpsilonConfig* expect_eps) {
  fs::path dir = overlay_root / combo;
  std::ifstream mfile(dir / "manifest.json");
  if (!mfile) throw store_error("no manifest for combination " + combo);
  json manifest = json::parse(mfile);
  if (manifest.at("version").get<int>() != kStoreVersion)
    throw store_error("store version mismatch for " + combo);

  LoadedOverlay out;
  Overlay& ov = out.overlay;
  ov.layer_names = manifest.at("layers").get<std::vector<std::string>>();
  ov.grid.rows = manifest.at("grid").at("rows").get<int>();
  ov.grid.cols = manifest.at("grid").at("cols").get<int>();
  ov.box = {manifest.at("box").at("xmin").get<double>(),
            manifest.at("box").at("ymin").get<double>(),
            manifest.at("box").at("xmax").get<double>(),
            manifest.at("box").at("ymax").get<double>()};
  ov.eps.point_eps = manifest.at("eps").at("point_eps").get<double>();
  ov.eps.line_eps = manifest.at("eps").at("line_eps").get<double>();
  ov.eps.area_eps = manifest.at("eps").at("area_eps").get<double>();
  ov.orphan_cells = manifest.at("orphan_cells").get<std::size_t>();
  if (expect_eps) {
    if (expect_eps->point_eps != ov.eps.point_eps ||
        expect_eps->line_eps != ov.eps.line_eps ||
        expect_eps->area_eps != ov.eps.area_eps)
      throw store_error("overlay " + combo +
                        " was built with different epsilons; rebuild required");
  }

  for (const char* kind : {"point", "linestring", "polygon"}) {
    fs::path f = dir / ("gis_subp_" + std::string(kind) + "_" + combo + ".csv");
    std::ifstream in(f);
    if (!in) throw store_error("missing table " + f.string());
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      // geometry column may contain commas; split only the first 3
      std::size_t p1 = line.find(',');
      std::size_t p2 = line.find(',', p1 + 1);
      std::size_t p3 = line.find(',', p2 + 1);
      Cell cell;
      cell.cell_id = std::stoll(line.substr(0, p1));
      cell.grid_row = std::stoi(line.substr(p1 + 1, p2 - p1 - 1));
      cell.grid_col = std::stoi(line.substr(p2 + 1, p3 - p2 - 1));
      Layer tmp;
      parse_wkt_into(tmp, 0, line.substr(p3 + 1));
      if (!tmp.points.empty())
        cell.geometry = tmp.points[0].p;
      else if (!tmp.polylines.empty())
        cell.geometry = Segment{tmp.polylines[0].vertices[0], tmp.polylines[0].vertices[1]};
      else
        cell.geometry = tmp.polygons[0];
      ov.cells.push_back(std::move(cell));
    }
  }
  std::sort(ov.cells.begin(), ov.cells.end(),
            [](const Cell& a, const Cell& b) { return a.cell_id < b.cell_id; });

  for (const char* kind : {"point", "linestring", "polygon"}) {
    fs::path f = dir / ("gis_pre_" + std::string(kind) + "_" + combo + ".csv");
    std::ifstream in(f);
    if (!in) throw store_error("missing table " + f.string());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cols = split(line, ',');
      if (cols.size() != 4) throw store_error("bad pre row: " + line);
      Association a;
      a.cell_id = std::stoll(cols[0]);
      a.layer = cols[1];
      a.gid = std::stoll(cols[2]);
      a.sub_level = kind_of(kind);
      a.parent_level = geom_kind_of(cols[3]);
      ov.associations.push_back(a);
    }
  }

  {
    std::ifstream in(dir / ("cell_measures_" + combo + ".csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cols = split(line, ',');
      if (cols.size() != 5) throw store_error("bad measure row: " + line);
      out.measures.push_back({std::stoll(cols[0]), cols[1], std::stoll(cols[2]),
                              cols[3], parse_double(cols[4], "measure value")});
    }
  }
  {
    std::ifstream in(dir / ("stats_" + combo + ".csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cols = split(line, ',');
      if (cols.size() != 6) throw store_error("bad stats row: " + line);
      GridStats st;
      st.row = std::stoi(cols[0]);
      st.col = std::stoi(cols[1]);
      st.carrier_lines = std::stoull(cols[2]);
      st.points = std::stoull(cols[3]);
      st.segments = std::stoull(cols[4]);
      st.polygons = std::stoull(cols[5]);
      ov.stats.push_back(st);
    }
  }
  return out;
}

std::vector<std::string> list_combos(const fs::path& overlay_root) {
  std::vector<std::string> combos;
  if (!fs::exists(overlay_root)) return combos;
  for (const auto& e : fs::directory_iterator(overlay_root))
    if (e.is_directory() && fs::exists(e.path() / "manifest.json"))
      combos.push_back(e.path().filename().string());
  std::sort(combos.begin(), combos.end());
  return combos;
}

std::vector<StatsRow> stats(const Overlay& overlay) {
  auto row = [&](const std::string& what, auto getter) {
    StatsRow r;
    r.what = what;
    r.min = std::numeric_limits<std::size_t>::max();
    double sum = 0;
    for (const GridStats& st : overlay.stats) {
      std::size_t v = getter(st);
      r.max = std::max(r.max, v);
      r.min = std::min(r.min, v);
      sum += static_cast<double>(v);
    }
    if (overlay.stats.empty()) r.min = 0;
    r.avg = overlay.stats.empty() ? 0.0 : sum / overlay.stats.size();
    return r;
  };
  return {
      row("carrier_lines", [](const GridStats& s) { return s.carrier_lines; }),
      row("points", [](const GridStats& s) { return s.points; }),
      row("segments", [](const GridStats& s) { return s.segments; }),
      row("polygons", [](const GridStats& s) { return s.polygons; }),
  };
}

// -- Piet-Schema ------------------------------------------------------------------

PietSchema load_piet_schema(const fs::path& json_file) {
  std::ifstream in(json_file);
  if (!in) throw store_error("cannot open schema " + json_file.string());
  json j = json::parse(in);
  PietSchema schema;
  for (const json& s : j.value("Subpolygonization", json::array())) {
    SubPLevelDesc d;
    d.name = s.at("name").get<std::string>();
    d.table = s.value("table", "");
    d.primaryKey = s.value("primaryKey", "id");
    d.uniqueIdColumn = s.value("uniqueIdColumn", "uniqueid");
    d.originalGeometryColumn = s.value("originalGeometryColumn", "originalgeometryid");
    schema.subpolygonization.push_back(d);
  }
  for (const json& l : j.value("Layers", json::array())) {
    LayerDesc d;
    d.name = l.at("name").get<std::string>();
    d.hasAll = l.value("hasAll", true);
    d.table = l.value("table", d.name);
    d.primaryKey = l.value("primaryKey", "id");
    d.geometry = l.value("geometry", "geometry");
    d.descriptionField = l.value("descriptionField", "name");
    for (const json& p : l.value("Properties", json::array()))
      d.properties.push_back({p.at("name").get<std::string>(),
                              p.value("column", ""), p.value("type", "Double")});
    for (const json& s : l.value("SubpolygonizationLevels", json::array()))
      d.subp_levels.push_back(s.get<std::string>());
    if (l.contains("OLAPRelation")) {
      const json& r = l.at("OLAPRelation");
      d.olap_relation.present = true;
      d.olap_relation.table = r.value("table", "");
      d.olap_relation.gisId = r.value("gisId", "gisid");
      d.olap_relation.olapId = r.value("olapId", "olapid");
      d.olap_relation.olapDimensionName = r.value("olapDimensionName", "");
      d.olap_relation.olapLevelName = r.value("olapLevelName", "");
      if (r.contains("OlapTable")) {
        const json& t = r.at("OlapTable");
        d.olap_relation.olap_table = {t.value("name", ""), t.value("id", ""),
                                      t.value("hierarchyNameField", ""),
                                      t.value("hierarchyAll", "")};
      }
    }
    schema.layers.push_back(d);
  }
  for (const json& m : j.value("Measures", json::array())) {
    MeasureDesc d;
    d.name = m.at("name").get<std::string>();
    d.layer = m.at("layer").get<std::string>();
    d.aggregator = m.value("aggregator", "count");
    d.property = m.value("property", "");
    d.split = m.value("split", "copy");
    schema.measures.push_back(d);
  }
  auto problems = validate_piet_schema(schema);
  if (!problems.empty()) {
    std::string msg = "invalid Piet-Schema:";
    for (const std::string& p : problems) msg += "\n  " + p;
    throw store_error(msg);
  }
  return schema;
}

void save_piet_schema(const PietSchema& schema, const fs::path& json_file) {
  json j;
  j["Subpolygonization"] = json::array();
  for (const SubPLevelDesc& d : schema.subpolygonization)
    j["Subpolygonization"].push_back({{"name", d.name},
                                      {"table", d.table},
                                      {"primaryKey", d.primaryKey},
                                      {"uniqueIdColumn", d.uniqueIdColumn},
                                      {"originalGeometryColumn", d.originalGeometryColumn}});
  j["Layers"] = json::array();
  for (const LayerDesc& d : schema.layers) {
    json l = {{"name", d.name},
              {"hasAll", d.hasAll},
              {"table", d.table},
              {"primaryKey", d.primaryKey},
              {"geometry", d.geometry},
              {"descriptionField", d.descriptionField}};
    l["Properties"] = json::array();
    for (const PropertyDesc& p : d.properties)
      l["Properties"].push_back({{"name", p.name}, {"column", p.column}, {"type", p.type}});
    l["SubpolygonizationLevels"] = d.subp_levels;
    if (d.olap_relation.present) {
      l["OLAPRelation"] = {{"table", d.olap_relation.table},
                           {"gisId", d.olap_relation.gisId},
                           {"olapId", d.olap_relation.olapId},
                           {"olapDimensionName", d.olap_relation.olapDimensionName},
                           {"olapLevelName", d.olap_relation.olapLevelName},
                           {"OlapTable",
                            {{"name", d.olap_relation.olap_table.name},
                             {"id", d.olap_relation.olap_table.id},
                             {"hierarchyNameField", d.olap_relation.olap_table.hierarchyNameField},
                             {"hierarchyAll", d.olap_relation.olap_table.hierarchyAll}}}};
    }
    j["Layers"].push_back(l);
  }
  j["Measures"] = json::array();
  for (const MeasureDesc& m : schema.measures) {
    json mm = {{"name", m.name}, {"layer", m.layer}, {"aggregator", m.aggregator}};
    if (!m.property.empty()) mm["property"] = m.property;
    if (m.split != "copy") mm["split"] = m.split;
    j["Measures"].push_back(mm);
  }
  fs::create_directories(json_file.parent_path());
  std::ofstream(json_file) << j.dump(2) << "\n";
}

std::vector<GisOlapRow> load_gis_olap(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw store_error("cannot open mapping " + csv.string());
  std::vector<GisOlapRow> rows;
  std::string line;
  std::getline(in, line);  // gisid,olapid,description
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() < 2) throw store_error("bad mapping row: " + line);
    GisOlapRow r;
    r.gisid = std::stoll(cols[0]);
    r.olapid = cols[1];
    r.description = cols.size() > 2 ? cols[2] : "";
    rows.push_back(r);
  }
  return rows;
}

void save_gis_olap(const std::vector<GisOlapRow>& rows, const fs::path& csv) {
  fs::create_directories(csv.parent_path());
  std::ofstream out(csv);
  out << "gisid,olapid,description\n";
  for (const GisOlapRow& r : rows)
    out << r.gisid << "," << r.olapid << "," << r.description << "\n";
}

// -- warehouse --------------------------------------------------------------------

StarSchema load_star_schema(const fs::path& warehouse_dir) {
  StarSchema star;
  std::vector<fs::path> dim_files, fact_files;
  for (const auto& e : fs::directory_iterator(warehouse_dir)) {
    std::string fn = e.path().filename().string();
    if (fn.rfind("dim_", 0) == 0 && e.path().extension() == ".csv")
      dim_files.push_back(e.path());
    if (fn.rfind("fact_", 0) == 0 && e.path().extension() == ".csv")
      fact_files.push_back(e.path());
  }
  std::sort(dim_files.begin(), dim_files.end());
  std::sort(fact_files.begin(), fact_files.end());

  for (const fs::path& f : dim_files) {
    std::ifstream in(f);
    std::string line;
    OlapDimension dim;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cols = split(line, ',');
      if (cols[0] == "dimension") {
        dim.name = cols.at(1);
        OlapMember root;
        root.name = cols.at(2);
        root.level = 0;
        dim.members.push_back(root);
      } else if (cols[0] == "levels") {
        dim.levels.assign(cols.begin() + 1, cols.end());
      } else if (cols[0] == "member") {
        int cur = 0;
        for (std::size_t i = 1; i < cols.size(); ++i) {
          int child = dim.child_named(cur, cols[i]);
          if (child < 0) {
            OlapMember m;
            m.name = cols[i];
            m.level = static_cast<int>(i);
            m.parent = cur;
            child = static_cast<int>(dim.members.size());
            dim.members.push_back(m);
            dim.members[cur].children.push_back(child);
          }
          cur = child;
        }
      } else {
        throw store_error("bad dimension row in " + f.string() + ": " + line);
      }
    }
    if (dim.name.empty()) throw store_error("dimension file without name: " + f.string());
    star.dimensions.push_back(std::move(dim));
  }

  for (const fs::path& f : fact_files) {
    std::ifstream in(f);
    std::string line;
    std::vector<std::string> dims;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cols = split(line, ',');
      if (cols[0] == "fact") {
        star.cube = cols.at(1);
      } else if (cols[0] == "dims") {
        dims.assign(cols.begin() + 1, cols.end());
      } else if (cols[0] == "measures") {
        star.measures.assign(cols.begin() + 1, cols.end());
      } else if (cols[0] == "row") {
        if (cols.size() != 1 + dims.size() + star.measures.size())
          throw store_error("bad fact row arity in " + f.string() + ": " + line);
        StarFactRow row;
        for (std::size_t d = 0; d < dims.size(); ++d) {
          const OlapDimension* dim = star.dimension(dims[d]);
          if (!dim) throw store_error("fact references unknown dimension " + dims[d]);
          int leaf = -1;
          const std::string& name = cols[1 + d];
          for (std::size_t m = 0; m < dim->members.size(); ++m) {
            if (dim->members[m].name == name && dim->members[m].children.empty()) {
              if (leaf >= 0)
                throw store_error("ambiguous leaf member '" + name + "' in " + dims[d]);
              leaf = static_cast<int>(m);
            }
          }
          if (leaf < 0)
            throw store_error("unknown leaf member '" + name + "' in " + dims[d]);
          row.leaf[dims[d]] = leaf;
        }
        for (std::size_t m = 0; m < star.measures.size(); ++m)
          row.measures[star.measures[m]] =
              parse_double(cols[1 + dims.size() + m], "fact measure");
        star.facts.push_back(std::move(row));
      } else {
        throw store_error("bad fact row in " + f.string() + ": " + line);
      }
    }
  }
  return star;
}

void save_star_schema(const StarSchema& star, const fs::path& warehouse_dir) {
  fs::create_directories(warehouse_dir);
  for (const OlapDimension& dim : star.dimensions) {
    std::string fname = "dim_" + dim.name + ".csv";
    std::replace(fname.begin(), fname.end(), ' ', '_');
    std::ofstream out(warehouse_dir / fname);
    out << "dimension," << dim.name << "," << dim.members[0].name << "\n";
    out << "levels";
    for (const std::string& l : dim.levels) out << "," << l;
    out << "\n";
    // one row per leaf: path below the root
    std::function<void(int, std::vector<std::string>&)> walk =
        [&](int m, std::vector<std::string>& path) {
          if (dim.members[m].children.empty() && m != 0) {
            out << "member";
            for (const std::string& s : path) out << "," << s;
            out << "\n";
            return;
          }
          for (int c : dim.members[m].children) {
            path.push_back(dim.members[c].name);
            walk(c, path);
            path.pop_back();
          }
        };
    std::vector<std::string> path;
    walk(0, path);
  }
  std::ofstream out(warehouse_dir / ("fact_" + star.cube + ".csv"));
  out << "fact," << star.cube << "\n";
  out << "dims";
  std::vector<std::string> dim_order;
  for (const OlapDimension& d : star.dimensions) dim_order.push_back(d.name);
  for (const std::string& d : dim_order) out << "," << d;
  out << "\n";
  out << "measures";
  for (const std::string& m : star.measures) out << "," << m;
  out << "\n";
  for (const StarFactRow& row : star.facts) {
    out << "row";
    for (const std::string& d : dim_order) {
      const OlapDimension* dim = star.dimension(d);
      out << "," << dim->members[row.leaf.at(d)].name;
    }
    for (const std::string& m : star.measures) out << "," << row.measures.at(m);
    out << "\n";
  }
}

GisFactTable facts_from_attributes(const Layer& layer, const std::string& level) {
  GisFactTable table;
  table.layer = layer.name;
  table.level = level;
  std::set<std::string> numeric;
  for (const auto& [gid, attrs] : layer.attributes) {
    for (const auto& [k, v] : attrs) {
      char* end = nullptr;
      std::strtod(v.c_str(), &end);
      if (end && *end == '\0' && end != v.c_str()) numeric.insert(k);
    }
  }
  table.measures.assign(numeric.begin(), numeric.end());
  for (const auto& [gid, attrs] : layer.attributes) {
    std::vector<double> vals(table.measures.size(),
                             std::numeric_limits<double>::quiet_NaN());
    bool any = false;
    for (std::size_t i = 0; i < table.measures.size(); ++i) {
      auto it = attrs.find(table.measures[i]);
      if (it == attrs.end()) continue;
      char* end = nullptr;
      double v = std::strtod(it->second.c_str(), &end);
      if (end && *end == '\0') {
        vals[i] = v;
        any = true;
      }
    }
    if (any) table.rows[gid] = vals;
  }
  return table;
}

}  // namespace piet::store
