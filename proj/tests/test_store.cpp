#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "piet/gen.hpp"
#include "piet/store.hpp"

using namespace piet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("piet_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream(p) << content;
}

}  // namespace

TEST_CASE("ingest_layer parses points, polylines and polygons") {
  fs::path dir = temp_dir("ingest");
  write_file(dir / "mix.tsv",
             "7\tPOINT(378 145)\telev=2100\n"
             "9\tPOLYGON((0 0,1 0,1 1,0 1,0 0))\n"
             "3\tLINESTRING(191 300, 280 319, 350 272, 367 300)\tname=river\n");
  Layer layer = store::ingest_layer(dir / "mix.tsv");
  CHECK(layer.name == "mix");
  REQUIRE(layer.points.size() == 1);
  CHECK(layer.points[0].gid == 7);
  CHECK(layer.points[0].p.x == doctest::Approx(378));
  CHECK(layer.attributes.at(7).at("elev") == "2100");
  REQUIRE(layer.polygons.size() == 1);
  CHECK(polygon_area(layer.polygons[0]) == doctest::Approx(1.0));
  REQUIRE(layer.polylines.size() == 1);
  CHECK(layer.polylines[0].vertices.size() == 4);

  // single-paren polygon variant
  write_file(dir / "alt.tsv", "1\tPOLYGON (83 215, 298 213, 204 74, 120 113, 83 215)\n");
  Layer alt = store::ingest_layer(dir / "alt.tsv");
  CHECK(alt.polygons.size() == 1);

  // clockwise ring is normalized to CCW
  write_file(dir / "cw.tsv", "1\tPOLYGON((0 0,0 1,1 1,1 0,0 0))\n");
  Layer cw = store::ingest_layer(dir / "cw.tsv");
  CHECK(polygon_area(cw.polygons[0]) == doctest::Approx(1.0));
}

TEST_CASE("ingest_layer rejects malformed input with line numbers") {
  fs::path dir = temp_dir("reject");
  write_file(dir / "open.tsv", "1\tPOLYGON((0 0,1 0,0 1))\n");
  CHECK_THROWS_WITH_AS(store::ingest_layer(dir / "open.tsv"),
                       doctest::Contains("open.tsv:1"), store::store_error);

  write_file(dir / "bowtie.tsv", "1\tPOLYGON((0 0,1 1,1 0,0 1,0 0))\n");
  CHECK_THROWS_AS(store::ingest_layer(dir / "bowtie.tsv"), store::store_error);

  write_file(dir / "gid.tsv", "x\tPOINT(1 2)\n");
  CHECK_THROWS_AS(store::ingest_layer(dir / "gid.tsv"), store::store_error);

  write_file(dir / "type.tsv", "1\tCIRCLE(1 2 3)\n");
  CHECK_THROWS_AS(store::ingest_layer(dir / "type.tsv"), store::store_error);
}

TEST_CASE("layer round-trip through TSV is bit-exact") {
  GenSpec spec;
  spec.seed = 5;
  spec.states = 4;
  spec.rivers = 2;
  spec.points = 6;
  auto layers = generate_map(spec);
  fs::path dir = temp_dir("roundtrip");
  for (const Layer& l : layers) store::write_layer(l, dir / (l.name + ".tsv"));
  auto loaded = store::load_layers_dir(dir);
  REQUIRE(loaded.size() == layers.size());
  for (const Layer& orig : layers) {
    const Layer* got = nullptr;
    for (const Layer& l : loaded)
      if (l.name == orig.name) got = &l;
    REQUIRE(got != nullptr);
    REQUIRE(got->points.size() == orig.points.size());
    REQUIRE(got->polylines.size() == orig.polylines.size());
    REQUIRE(got->polygons.size() == orig.polygons.size());
    for (std::size_t i = 0; i < orig.points.size(); ++i)
      CHECK(got->points[i].p == orig.points[i].p);
    for (std::size_t i = 0; i < orig.polygons.size(); ++i)
      CHECK(got->polygons[i].ring == orig.polygons[i].ring);
  }
}

TEST_CASE("overlay save/load round-trip") {
  Layer city;
  city.name = "city";
  city.polygons.push_back({1, {{0, 0}, {8, 0}, {10, 6}, {5, 10}, {0, 6}}});
  Layer river;
  river.name = "river";
  river.polylines.push_back({1, {{-4, 2}, {6, 4}, {9, 12}}});
  std::vector<Layer> layers{city, river};
  BBox box = bbox_of_layers(layers, 0.25);
  EpsilonConfig eps = EpsilonConfig::for_box(box);
  Overlay ov = grid_csp(layers, box, {2, 3}, eps);
  associate(ov, layers);
  FactRows facts;
  facts[{"city", 1}]["population"] = 500.0;
  auto measures =
      propagate_measures(ov, layers, facts, {{"population", MeasureSplit::Proportional}});

  fs::path root = temp_dir("overlay");
  store::save_overlay(ov, measures, root);
  CHECK(store::list_combos(root) == std::vector<std::string>{"city-river"});

  store::LoadedOverlay loaded = store::load_overlay(root, "city-river", &eps);
  REQUIRE(loaded.overlay.cells.size() == ov.cells.size());
  for (std::size_t i = 0; i < ov.cells.size(); ++i) {
    const Cell& a = ov.cells[i];
    const Cell& b = loaded.overlay.cells[i];
    CHECK(a.cell_id == b.cell_id);
    CHECK(a.kind() == b.kind());
    CHECK(a.grid_row == b.grid_row);
    CHECK(a.grid_col == b.grid_col);
    if (a.kind() == CellKind::SubNode) CHECK(a.node() == b.node());
    if (a.kind() == CellKind::SubLine) {
      CHECK(a.segment().a == b.segment().a);
      CHECK(a.segment().b == b.segment().b);
    }
    if (a.kind() == CellKind::SubPolygon) CHECK(a.polygon().ring == b.polygon().ring);
  }
  CHECK(loaded.overlay.associations.size() == ov.associations.size());
  CHECK(loaded.measures.size() == measures.size());
  CHECK(loaded.overlay.stats.size() == ov.stats.size());

  // refusing to load under different epsilons
  EpsilonConfig other = eps;
  other.point_eps *= 10.0;
  CHECK_THROWS_AS(store::load_overlay(root, "city-river", &other), store::store_error);
  CHECK_THROWS_AS(store::load_overlay(root, "nothing-there", nullptr),
                  store::store_error);
}

TEST_CASE("all 2-, 3- and 4-layer combinations of four layers make 11 stores") {
  GenSpec spec;
  spec.seed = 12;
  spec.states = 2;
  spec.rivers = 1;
  spec.points = 2;
  spec.width = 60;
  spec.height = 40;
  auto all = generate_map(spec);
  // four layers: states, rivers, cities, volcanoes
  std::vector<Layer> four{all[0], all[1], all[2], all[3]};
  BBox box = bbox_of_layers(four, 0.1);
  EpsilonConfig eps = EpsilonConfig::for_box(box);

  fs::path root = temp_dir("combos");
  int built = 0;
  for (int mask = 1; mask < 16; ++mask) {
    if (__builtin_popcount(mask) < 2) continue;
    std::vector<Layer> pick;
    for (int b = 0; b < 4; ++b)
      if (mask & (1 << b)) pick.push_back(four[b]);
    Overlay ov = grid_csp(pick, box, {1, 1}, eps);
    associate(ov, pick);
    store::save_overlay(ov, {}, root);
    ++built;
  }
  CHECK(built == 11);
  CHECK(store::list_combos(root).size() == 11);
}

TEST_CASE("stats report has the four Table-3 rows") {
  Layer sq;
  sq.name = "sq";
  sq.polygons.push_back({1, {{1, 1}, {2, 1}, {2, 2}, {1, 2}}});
  BBox box{0, 0, 20, 20};
  Overlay ov = grid_csp({sq}, box, {2, 2}, EpsilonConfig::for_box(box));
  auto rows = store::stats(ov);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].what == "carrier_lines");
  CHECK(rows[0].min == 4);  // empty cells keep the frame floor
  CHECK(rows[1].min == 4);
  CHECK(rows[2].min == 4);
  CHECK(rows[3].min == 1);
  CHECK(rows[3].max > 1);
}

TEST_CASE("piet schema json round-trip and validation") {
  PietSchema schema;
  schema.subpolygonization = {
      {"Polygon", "gis_subp_polygon_4", "id", "uniqueid", "originalgeometryid"},
      {"Linestring", "gis_subp_linestring_4", "id", "uniqueid", "originalgeometryid"},
      {"Point", "gis_subp_point_4", "id", "uniqueid", "originalgeometryid"}};
  LayerDesc states;
  states.name = "usa_states";
  states.table = "usa_states";
  states.properties = {{"Population", "f_pop", "Double"}};
  states.subp_levels = {"Polygon", "Linestring", "Point"};
  states.olap_relation.present = true;
  states.olap_relation.table = "gis_olap_states";
  states.olap_relation.gisId = "gisid";
  states.olap_relation.olapId = "olapid";
  states.olap_relation.olapDimensionName = "Store";
  states.olap_relation.olapLevelName = "Store State";
  states.olap_relation.olap_table = {"store", "state_id", "store_state",
                                     "[Store].[All Stores]"};
  schema.layers.push_back(states);
  LayerDesc stores;
  stores.name = "usa_stores";
  schema.layers.push_back(stores);
  schema.measures.push_back({"StoresQuantity", "usa_stores", "count", "", "copy"});

  fs::path dir = temp_dir("schema");
  store::save_piet_schema(schema, dir / "piet.json");
  PietSchema loaded = store::load_piet_schema(dir / "piet.json");
  CHECK(loaded.layers.size() == 2);
  CHECK(loaded.layer("usa_states")->olap_relation.olap_table.hierarchyAll ==
        "[Store].[All Stores]");
  CHECK(loaded.measure("StoresQuantity")->aggregator == "count");

  schema.measures.push_back({"Broken", "nowhere", "sum", "", "copy"});
  CHECK(!validate_piet_schema(schema).empty());
}

TEST_CASE("warehouse star schema round-trip") {
  OlapDimension dim;
  dim.name = "Store";
  dim.levels = {"Store Country", "Store State", "Store City"};
  dim.members.push_back({"All Stores", 0, -1, {}});
  auto add = [&](const std::string& name, int level, int parent) {
    dim.members.push_back({name, level, parent, {}});
    int id = static_cast<int>(dim.members.size()) - 1;
    dim.members[parent].children.push_back(id);
    return id;
  };
  int usa = add("USA", 1, 0);
  int ca = add("CA", 2, usa);
  int sf = add("San Francisco", 3, ca);
  int la = add("Los Angeles", 3, ca);
  (void)la;

  StarSchema star;
  star.cube = "Sales";
  star.dimensions.push_back(dim);
  star.measures = {"Unit Sales", "Store Cost"};
  StarFactRow row;
  row.leaf["Store"] = sf;
  row.measures["Unit Sales"] = 12;
  row.measures["Store Cost"] = 5;
  star.facts.push_back(row);

  fs::path dir = temp_dir("warehouse");
  store::save_star_schema(star, dir);
  StarSchema loaded = store::load_star_schema(dir);
  REQUIRE(loaded.dimensions.size() == 1);
  const OlapDimension* d = loaded.dimension("Store");
  REQUIRE(d != nullptr);
  CHECK(d->resolve({"All Stores", "USA", "CA"}) >= 0);
  CHECK(d->full_path(d->resolve({"All Stores", "USA", "CA", "San Francisco"})) ==
        "[Store].[All Stores].[USA].[CA].[San Francisco]");
  REQUIRE(loaded.facts.size() == 1);
  CHECK(loaded.facts[0].measures.at("Unit Sales") == doctest::Approx(12));

  // gis-olap mapping file
  store::save_gis_olap({{1, "CA", "California"}, {2, "OR", "Oregon"}},
                       dir / "gis_olap_states.csv");
  auto mapping = store::load_gis_olap(dir / "gis_olap_states.csv");
  REQUIRE(mapping.size() == 2);
  CHECK(mapping[1].olapid == "OR");
}

TEST_CASE("facts_from_attributes keeps numeric attributes only") {
  Layer volcano;
  volcano.name = "volcanoes";
  volcano.points.push_back({1, {1, 1}});
  volcano.points.push_back({2, {2, 2}});
  volcano.attributes[1] = {{"elev", "2100"}, {"name", "Rainier"}};
  volcano.attributes[2] = {{"elev", "3400"}, {"name", "Hood"}};
  GisFactTable t = store::facts_from_attributes(volcano, "node");
  CHECK(t.measures == std::vector<std::string>{"elev"});
  CHECK(t.rows.at(1)[0] == doctest::Approx(2100));
  CHECK(t.rows.at(2)[0] == doctest::Approx(3400));
}
