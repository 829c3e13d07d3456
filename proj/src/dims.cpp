// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "piet/dims.hpp"

#include <algorithm>
#include <functional>

namespace piet {

std::vector<std::string> validate(const GisDimensionSchema& schema) {
  std::vector<std::string> out;
  for (const GeometryGraph& g : schema.graphs) {
    std::set<std::string> nodes(g.nodes.begin(), g.nodes.end());
    if (nodes.size() != g.nodes.size())
      out.push_back(g.layer + ": duplicate node names");

    std::size_t point_count = std::count(g.nodes.begin(), g.nodes.end(), "point");
    if (point_count != 1)
      out.push_back(g.layer + ": expected exactly one point node, found " +
                    std::to_string(point_count));
    if (!nodes.count("All")) out.push_back(g.layer + ": no All node");

    std::map<std::string, int> in, outdeg;
    for (const auto& [a, b] : g.edges) {
      if (!nodes.count(a) || !nodes.count(b))
        out.push_back(g.layer + ": edge (" + a + "," + b + ") over unknown nodes");
      ++outdeg[a];
      ++in[b];
    }
    if (point_count == 1 && in["point"] != 0)
      out.push_back(g.layer + ": point node has incoming edges");
    if (nodes.count("All") && outdeg["All"] != 0)
      out.push_back(g.layer + ": All node has outgoing edges");

    // cycle check by repeated source elimination
    std::map<std::string, int> indeg = in;
    for (const std::string& n : g.nodes)
      if (!indeg.count(n)) indeg[n] = 0;
    std::vector<std::string> order;
    std::set<std::string> removed;
    bool progress = true;
    while (progress) {
      progress = false;
      for (const auto& [n, d] : indeg) {
        if (d == 0 && !removed.count(n)) {
          removed.insert(n);
          progress = true;
          for (const auto& [a, b] : g.edges)
            if (a == n) --indeg[b];
        }
      }
    }
    if (removed.size() != nodes.size()) out.push_back(g.layer + ": cycle in graph");
  }
  for (const AttMapping& m : schema.att) {
    bool found = false;
    for (const GeometryGraph& g : schema.graphs)
      if (g.layer == m.layer &&
          std::count(g.nodes.begin(), g.nodes.end(), m.level))
        found = true;
    if (!found)
      out.push_back("att " + m.attribute + ": level " + m.level +
                    " not in layer " + m.layer);
  }
  return out;
}

std::vector<std::int64_t> rollup(const GisDimensionInstance& inst,
                                 const std::string& layer, const std::string& from,
                                 const std::string& to, std::int64_t gid) {
  if (to == "All") return {kAllGid};
  auto it = inst.rollups.find({layer, from, to});
  if (it == inst.rollups.end())
    throw unknown_gid_error("no rollup " + layer + ":" + from + "->" + to);
  auto [lo, hi] = it->second.equal_range(gid);
  if (lo == hi)
    throw unknown_gid_error("gid " + std::to_string(gid) + " unknown in " + layer +
                            ":" + from + "->" + to);
  std::vector<std::int64_t> parents;
  for (auto i = lo; i != hi; ++i) parents.push_back(i->second);
  std::sort(parents.begin(), parents.end());
  parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
  return parents;
}

std::int64_t alpha(const GisDimensionInstance& inst, const std::string& layer,
                   const std::string& dimension, const std::string& member) {
  auto it = inst.alpha_maps.find({layer, dimension});
  if (it == inst.alpha_maps.end())
    throw unmapped_member_error("no alpha mapping for " + layer + "/" + dimension);
  auto mit = it->second.find(member);
  if (mit == it->second.end())
    throw unmapped_member_error("member '" + member + "' unmapped in " + layer +
                                "/" + dimension);
  return mit->second;
}

bool rollup_is_functional(const GisDimensionInstance& inst, const RollupKey& key) {
  auto it = inst.rollups.find(key);
  if (it == inst.rollups.end()) return true;
  const auto& mm = it->second;
  for (auto i = mm.begin(); i != mm.end();) {
    auto [lo, hi] = mm.equal_range(i->first);
    std::set<std::int64_t> parents;
    for (auto k = lo; k != hi; ++k) parents.insert(k->second);
    if (parents.size() > 1) return false;
    i = hi;
  }
  return true;
}

std::optional<std::vector<double>> ft(const GisFactTable& table, std::int64_t gid) {
  auto it = table.rows.find(gid);
  if (it == table.rows.end()) return std::nullopt;
  return it->second;
}

FactRows fact_rows_of(const std::vector<GisFactTable>& tables) {
  FactRows out;
  for (const GisFactTable& t : tables)
    for (const auto& [gid, values] : t.rows)
      for (std::size_t i = 0; i < t.measures.size() && i < values.size(); ++i)
        out[{t.layer, gid}][t.measures[i]] = values[i];
  return out;
}

GisDimensionInstance apply_overlay_update(const GisDimensionInstance& inst,
                                          const Overlay& overlay) {
  GisDimensionInstance updated = inst;

  GeometryGraph merged;
  merged.layer = overlay.combo_id();
  merged.nodes = {"point",    "Node", "OPolyline", "OPolygon",
                  "node",     "line", "polyline",  "polygon",
                  "All"};
  merged.edges = {{"point", "Node"},        {"point", "OPolyline"},
                  {"point", "OPolygon"},    {"Node", "node"},
                  {"Node", "polyline"},     {"Node", "polygon"},
                  {"OPolyline", "polyline"}, {"OPolyline", "polygon"},
                  {"OPolygon", "polygon"},  {"line", "polyline"},
                  {"polyline", "polygon"},  {"node", "All"},
                  {"polygon", "All"}};
  updated.schema.graphs = {merged};
  // attribute mappings now target the merged layer; levels keep their names
  for (AttMapping& m : updated.schema.att) m.layer = merged.layer;

  for (const Association& a : overlay.associations) {
    RollupKey key{a.layer, sub_level_name(a.sub_level), geom_level_name(a.parent_level)};
    updated.rollups[key].insert({a.cell_id, a.gid});
  }
  return updated;
}

// -- star schema ----------------------------------------------------------------

int OlapDimension::child_named(int parent, const std::string& name) const {
  for (int c : members[parent].children)
    if (members[c].name == name) return c;
  return -1;
}

int OlapDimension::resolve(const std::vector<std::string>& path) const {
  if (path.empty() || members.empty()) return -1;
  // paths may start at the All member or omit it ([Time].[1997] style)
  std::size_t start = members[0].name == path[0] ? 1 : 0;
  int cur = 0;
  for (std::size_t i = start; i < path.size(); ++i) {
    cur = child_named(cur, path[i]);
    if (cur < 0) return -1;
  }
  return cur;
}

std::string OlapDimension::full_path(int member) const {
  std::vector<std::string> parts;
  for (int m = member; m >= 0; m = members[m].parent) parts.push_back(members[m].name);
  std::string out = "[" + name + "]";
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) out += ".[" + *it + "]";
  return out;
}

bool OlapDimension::is_descendant_or_self(int member, int ancestor) const {
  for (int m = member; m >= 0; m = members[m].parent)
    if (m == ancestor) return true;
  return false;
}

std::vector<int> OlapDimension::dfs_order() const {
  std::vector<int> order(members.size(), 0);
  int counter = 0;
  std::function<void(int)> walk = [&](int m) {
    order[m] = counter++;
    for (int c : members[m].children) walk(c);
  };
  if (!members.empty()) walk(0);
  return order;
}

const OlapDimension* StarSchema::dimension(const std::string& name) const {
  for (const OlapDimension& d : dimensions)
    if (d.name == name) return &d;
  return nullptr;
}

// -- Piet-Schema -----------------------------------------------------------------

const LayerDesc* PietSchema::layer(const std::string& name) const {
  for (const LayerDesc& l : layers)
    if (l.name == name) return &l;
  return nullptr;
}

const MeasureDesc* PietSchema::measure(const std::string& name) const {
  for (const MeasureDesc& m : measures)
    if (m.name == name) return &m;
  return nullptr;
}

std::vector<std::string> validate_piet_schema(const PietSchema& schema) {
  std::vector<std::string> out;
  for (const MeasureDesc& m : schema.measures) {
    if (!schema.layer(m.layer))
      out.push_back("measure " + m.name + ": unknown layer " + m.layer);
    static const std::set<std::string> kAggs{"count", "sum",    "avg", "min",
                                             "max",   "length", "area"};
    if (!kAggs.count(m.aggregator))
      out.push_back("measure " + m.name + ": unknown aggregator " + m.aggregator);
    if (m.aggregator != "count" && m.aggregator != "length" && m.aggregator != "area" &&
        m.property.empty())
      out.push_back("measure " + m.name + ": aggregator " + m.aggregator +
                    " needs a property");
  }
  static const std::set<std::string> kLevels{"Polygon", "Linestring", "Point"};
  for (const LayerDesc& l : schema.layers)
    for (const std::string& lvl : l.subp_levels)
      if (!kLevels.count(lvl))
        out.push_back("layer " + l.name + ": bad subpolygonization level " + lvl);
  for (const SubPLevelDesc& s : schema.subpolygonization)
    if (!kLevels.count(s.name))
      out.push_back("subpolygonization: bad level name " + s.name);
  return out;
}

}  // namespace piet
