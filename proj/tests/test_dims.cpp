#include "doctest.h"
#include "piet/dims.hpp"

using namespace piet;

namespace {

// the running-example schema: rivers, volcanoes, states
GisDimensionSchema example_schema() {
  GisDimensionSchema s;
  s.graphs.push_back({"L_r",
                      {"point", "line", "polyline", "All"},
                      {{"point", "line"}, {"line", "polyline"}, {"polyline", "All"}}});
  s.graphs.push_back(
      {"L_v", {"point", "node", "All"}, {{"point", "node"}, {"node", "All"}}});
  s.graphs.push_back(
      {"L_e", {"point", "polygon", "All"}, {{"point", "polygon"}, {"polygon", "All"}}});
  s.att.push_back({"state", "States", "polygon", "L_e"});
  s.att.push_back({"river", "Rivers", "polyline", "L_r"});
  s.olap_dimensions = {"States", "Rivers"};
  return s;
}

}  // namespace

TEST_CASE("validate accepts the running-example schema") {
  CHECK(validate(example_schema()).empty());
}

TEST_CASE("validate flags broken graphs") {
  GisDimensionSchema s = example_schema();
  s.graphs[0].nodes = {"point", "line", "polyline"};  // no All
  auto v1 = validate(s);
  CHECK(!v1.empty());

  s = example_schema();
  s.graphs[1].nodes.push_back("point");  // two point nodes
  CHECK(!validate(s).empty());

  s = example_schema();
  s.graphs[2].edges.push_back({"All", "polygon"});  // All with outgoing edge + cycle
  CHECK(!validate(s).empty());

  s = example_schema();
  s.att.push_back({"city", "Cities", "polygon", "L_r"});  // level not in layer
  CHECK(!validate(s).empty());
}

TEST_CASE("rollup relations, All, and errors") {
  GisDimensionInstance inst;
  inst.schema = example_schema();
  // lines 11,12,13 compose polyline 1 (the Colorado)
  auto& rel = inst.rollups[{"L_r", "line", "polyline"}];
  rel.insert({11, 1});
  rel.insert({12, 1});
  rel.insert({13, 1});

  CHECK(rollup(inst, "L_r", "line", "polyline", 12) == std::vector<std::int64_t>{1});
  CHECK(rollup(inst, "L_r", "polyline", "All", 1) == std::vector<std::int64_t>{kAllGid});
  CHECK_THROWS_AS(rollup(inst, "L_r", "line", "polyline", 99), unknown_gid_error);
  CHECK(rollup_is_functional(inst, {"L_r", "line", "polyline"}));

  rel.insert({12, 2});  // 12 now has two parents
  CHECK(!rollup_is_functional(inst, {"L_r", "line", "polyline"}));
}

TEST_CASE("alpha maps members to geometry ids") {
  GisDimensionInstance inst;
  inst.schema = example_schema();
  inst.alpha_maps[{"L_e", "States"}]["San Francisco"] = 41;
  inst.alpha_maps[{"L_r", "Rivers"}]["Colorado"] = 7;

  CHECK(alpha(inst, "L_e", "States", "San Francisco") == 41);
  CHECK(alpha(inst, "L_r", "Rivers", "Colorado") == 7);
  CHECK_THROWS_AS(alpha(inst, "L_e", "States", "Atlantis"), unmapped_member_error);
  CHECK_THROWS_AS(alpha(inst, "L_x", "States", "San Francisco"), unmapped_member_error);
}

TEST_CASE("GIS fact tables") {
  GisFactTable t;
  t.layer = "L_e";
  t.level = "polygon";
  t.measures = {"population"};
  t.rows[41] = {815000.0};

  auto v = ft(t, 41);
  REQUIRE(v.has_value());
  CHECK((*v)[0] == doctest::Approx(815000.0));
  CHECK(!ft(t, 99).has_value());

  FactRows rows = fact_rows_of({t});
  CHECK(rows.at({"L_e", 41}).at("population") == doctest::Approx(815000.0));
}

TEST_CASE("apply_overlay_update installs sub-level rollup functions") {
  // city polygon + crossing river, one grid cell
  Layer city;
  city.name = "city";
  city.polygons.push_back({1, {{0, 0}, {8, 0}, {10, 6}, {5, 10}, {0, 6}}});
  Layer river;
  river.name = "river";
  river.polylines.push_back({1, {{-4, 2}, {6, 4}, {9, 12}}});
  std::vector<Layer> layers{city, river};
  BBox box = bbox_of_layers(layers, 0.25);
  Overlay ov = grid_csp(layers, box, {1, 1}, EpsilonConfig::for_box(box));
  associate(ov, layers);

  GisDimensionInstance inst;
  inst.schema = example_schema();
  GisDimensionInstance updated = apply_overlay_update(inst, ov);

  CHECK(validate(updated.schema).empty());
  REQUIRE(updated.schema.graphs.size() == 1);
  const GeometryGraph& g = updated.schema.graphs[0];
  auto has_edge = [&](const std::string& a, const std::string& b) {
    for (const auto& e : g.edges)
      if (e.first == a && e.second == b) return true;
    return false;
  };
  CHECK(has_edge("point", "Node"));
  CHECK(has_edge("point", "OPolyline"));
  CHECK(has_edge("point", "OPolygon"));
  CHECK(has_edge("OPolyline", "polyline"));  // Polyline sits between OPolyline
  CHECK(has_edge("polyline", "polygon"));    // and Polygon in the merged graph
  CHECK(has_edge("OPolygon", "polygon"));

  // f[river, OPolyline -> polyline] is total on river sub-lines and functional
  const auto key = RollupKey{"river", "OPolyline", "polyline"};
  REQUIRE(updated.rollups.count(key));
  CHECK(rollup_is_functional(updated, key));
  std::size_t river_lines = 0;
  for (const Association& a : ov.associations)
    if (a.layer == "river" && a.sub_level == CellKind::SubLine) ++river_lines;
  CHECK(updated.rollups.at(key).size() == river_lines);
  for (const Association& a : ov.associations)
    if (a.layer == "river" && a.sub_level == CellKind::SubLine)
      CHECK(rollup(updated, "river", "OPolyline", "polyline", a.cell_id) ==
            std::vector<std::int64_t>{1});

  // every sub-polygon inside the city rolls up to the city polygon
  const auto pgkey = RollupKey{"city", "OPolygon", "polygon"};
  REQUIRE(updated.rollups.count(pgkey));
  CHECK(rollup_is_functional(updated, pgkey));
}

TEST_CASE("star-schema rollup aggregation is associative") {
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
  int wa = add("WA", 2, usa);
  int sf = add("San Francisco", 3, ca);
  int la = add("Los Angeles", 3, ca);
  int sea = add("Seattle", 3, wa);

  StarSchema star;
  star.cube = "Sales";
  star.dimensions.push_back(dim);
  star.measures = {"Unit Sales"};
  auto fact = [&](int leaf, double v) {
    StarFactRow r;
    r.leaf["Store"] = leaf;
    r.measures["Unit Sales"] = v;
    star.facts.push_back(r);
  };
  fact(sf, 10);
  fact(sf, 5);
  fact(la, 20);
  fact(sea, 40);

  const OlapDimension& d = star.dimensions[0];
  auto total_under = [&](int member) {
    double s = 0;
    for (const StarFactRow& f : star.facts)
      if (d.is_descendant_or_self(f.leaf.at("Store"), member))
        s += f.measures.at("Unit Sales");
    return s;
  };
  // grouping city -> state -> country equals grouping directly at country
  double by_state = total_under(ca) + total_under(wa);
  double by_city = total_under(sf) + total_under(la) + total_under(sea);
  CHECK(by_state == doctest::Approx(total_under(usa)));
  CHECK(by_city == doctest::Approx(total_under(usa)));
  CHECK(total_under(0) == doctest::Approx(75.0));
}
