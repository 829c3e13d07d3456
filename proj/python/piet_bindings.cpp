// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).
//
// piet_core: python bindings over the overlay engine. The module mirrors the
// CLI surface: generate synthetic maps, build overlay stores, run region
// operators and GISOLAP-QL queries.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <fstream>

#include "piet/engine.hpp"
#include "piet/gen.hpp"
#include "piet/gisolapql.hpp"
#include "piet/store.hpp"
#include "piet/subdivision.hpp"
#include "piet/topo.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace piet;

namespace {

CellKind level_of(const std::string& name) {
  std::string n;
  for (char c : name) n += static_cast<char>(::tolower(c));
  if (n == "point") return CellKind::SubNode;
  if (n == "linestring") return CellKind::SubLine;
  if (n == "polygon") return CellKind::SubPolygon;
  throw std::invalid_argument("level must be Point, LineString or Polygon");
}

// an opened data directory: layers + facts + lazily loaded overlays
struct PyWorkspace {
  fs::path root;
  std::vector<Layer> layers;
  FactRows facts;
  std::map<std::string, store::LoadedOverlay> loaded;
  std::map<std::string, std::shared_ptr<OverlayIndex>> indexes;

  explicit PyWorkspace(const std::string& dir) : root(dir) {
    layers = store::load_layers_dir(root / "layers");
    std::vector<GisFactTable> tables;
    for (const Layer& l : layers)
      tables.push_back(store::facts_from_attributes(l, ""));
    facts = fact_rows_of(tables);
  }

  const Layer* layer(const std::string& name) const {
    for (const Layer& l : layers)
      if (l.name == name) return &l;
    return nullptr;
  }

  std::shared_ptr<OverlayIndex> index_for(const std::vector<std::string>& names) {
    std::set<std::string> want(names.begin(), names.end());
    std::string best;
    std::size_t best_size = SIZE_MAX;
    for (const std::string& combo : store::list_combos(root / "overlay")) {
      std::set<std::string> have;
      std::string cur;
      for (char c : combo + "-") {
        if (c == '-') {
          have.insert(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      bool covers = true;
      for (const std::string& n : want)
        if (!have.count(n)) covers = false;
      if (covers && have.size() < best_size) {
        best = combo;
        best_size = have.size();
      }
    }
    if (best.empty())
      throw missing_combination_error("no stored combination covers the layers");
    auto it = indexes.find(best);
    if (it != indexes.end()) return it->second;
    loaded[best] = store::load_overlay(root / "overlay", best);
    auto idx =
        std::make_shared<OverlayIndex>(loaded[best].overlay, loaded[best].measures);
    indexes[best] = idx;
    return idx;
  }
};

}  // namespace

PYBIND11_MODULE(piet_core, m) {
  m.doc() = "overlay-precomputation spatial OLAP engine";

  m.def(
      "generate_map",
      [](const std::string& out_dir, std::uint64_t seed, int states, int rivers,
         int points, bool west_heavy) {
        GenSpec spec;
        spec.seed = seed;
        spec.states = states;
        spec.rivers = rivers;
        spec.points = points;
        spec.west_heavy = west_heavy;
        auto layers = generate_map(spec);
        fs::create_directories(fs::path(out_dir) / "layers");
        std::vector<std::string> names;
        for (const Layer& l : layers) {
          store::write_layer(l, fs::path(out_dir) / "layers" / (l.name + ".tsv"));
          names.push_back(l.name);
        }
        return names;
      },
      py::arg("out_dir"), py::arg("seed") = 42, py::arg("states") = 12,
      py::arg("rivers") = 6, py::arg("points") = 40, py::arg("west_heavy") = false,
      "Write a deterministic synthetic map into <out_dir>/layers");

  m.def(
      "build_overlay",
      [](const std::string& data_dir, const std::vector<std::string>& layer_names,
         int grid_rows, int grid_cols, int threads) {
        fs::path root(data_dir);
        auto layers = store::load_layers_dir(root / "layers");
        std::vector<Layer> selected;
        for (const std::string& name : layer_names) {
          bool found = false;
          for (const Layer& l : layers)
            if (l.name == name) {
              selected.push_back(l);
              found = true;
            }
          if (!found) throw std::invalid_argument("unknown layer " + name);
        }
        BBox box = bbox_of_layers(layers, 0.02);
        EpsilonConfig eps = EpsilonConfig::for_box(box);
        GridCspOptions opts;
        opts.threads = threads;
        Overlay ov = grid_csp(selected, box, {grid_rows, grid_cols}, eps, opts);
        associate(ov, selected);
        std::vector<GisFactTable> tables;
        for (const Layer& l : selected)
          tables.push_back(store::facts_from_attributes(l, ""));
        auto measures = propagate_measures(ov, selected, fact_rows_of(tables), {});
        store::save_overlay(ov, measures, root / "overlay");
        py::dict out;
        out["combo"] = ov.combo_id();
        out["cells"] = ov.cells.size();
        out["associations"] = ov.associations.size();
        out["orphans"] = ov.orphan_cells;
        return out;
      },
      py::arg("data_dir"), py::arg("layers"), py::arg("grid_rows") = 20,
      py::arg("grid_cols") = 50, py::arg("threads") = 0,
      "Precompute one layer-combination overlay store");

  py::class_<PyWorkspace>(m, "Workspace")
      .def(py::init<const std::string&>(), py::arg("data_dir"))
      .def_property_readonly("layers",
                             [](const PyWorkspace& ws) {
                               std::vector<std::string> names;
                               for (const Layer& l : ws.layers) names.push_back(l.name);
                               return names;
                             })
      .def(
          "intersection",
          [](PyWorkspace& ws, const std::string& a, const std::string& b,
             const std::string& level) {
            auto index = ws.index_for({a, b});
            return region_intersection(*index, a, b, level_of(level));
          },
          py::arg("layer_a"), py::arg("layer_b"), py::arg("level") = "Point",
          "Pairs sharing an overlay cell of the given kind")
      .def(
          "contains",
          [](PyWorkspace& ws, const std::string& a, const std::string& b,
             const std::string& level) {
            auto index = ws.index_for({a, b});
            return region_contains(*index, a, b, level_of(level));
          },
          py::arg("layer_a"), py::arg("layer_b"), py::arg("level") = "Point")
      .def(
          "naive_intersection",
          [](PyWorkspace& ws, const std::string& a, const std::string& b,
             const std::string& level) {
            const Layer* la = ws.layer(a);
            const Layer* lb = ws.layer(b);
            if (!la || !lb) throw std::invalid_argument("unknown layer");
            BBox box = bbox_of_layers(ws.layers, 0.02);
            return naive_intersection(*la, *lb, level_of(level),
                                      EpsilonConfig::for_box(box));
          },
          py::arg("layer_a"), py::arg("layer_b"), py::arg("level") = "Point",
          "Nested-loop geometric join over the original geometries")
      .def(
          "region_aggregate",
          [](PyWorkspace& ws, const std::string& target,
             const std::vector<std::pair<double, double>>& region_ring,
             const std::string& agg, const std::string& measure, bool exact) {
            auto index = ws.index_for({target});
            QueryRegion qr;
            Polygon pg;
            pg.gid = 1;
            for (auto [x, y] : region_ring) pg.ring.push_back({x, y});
            if (ring_area(pg.ring) < 0) std::reverse(pg.ring.begin(), pg.ring.end());
            qr.polygons.push_back(pg);
            auto kind = agg_kind_of(agg);
            if (!kind) throw std::invalid_argument("unknown aggregator " + agg);
            auto rows = eval_in_query_region(
                *index, qr, target, {*kind, measure}, ws.facts,
                exact ? RegionMode::Exact : RegionMode::Fast);
            py::list out;
            for (const RegionRow& r : rows) {
              py::dict d;
              d["gid"] = r.gid;
              d["value"] = r.value;
              d["exact"] = r.exact;
              out.append(d);
            }
            return out;
          },
          py::arg("target"), py::arg("region"), py::arg("agg") = "length",
          py::arg("measure") = "", py::arg("exact") = true,
          "Aggregate the target layer inside a query-region ring")
      .def(
          "query",
          [](PyWorkspace& ws, const std::string& text) {
            GisolapQuery q = parse(text);
            if (!q.gis) throw std::invalid_argument("query has no GIS part");
            OpEvaluator eval = [&ws](const GisOp& op) {
              auto index = ws.index_for({op.a.layer, op.b.layer});
              if (op.name == "intersection")
                return region_intersection(*index, op.a.layer, op.b.layer, op.level);
              return region_contains(*index, op.a.layer, op.b.layer, op.level);
            };
            PietSchema schema;
            if (fs::exists(ws.root / "piet.json"))
              schema = store::load_piet_schema(ws.root / "piet.json");
            GisPlanResult plan =
                plan_and_execute(*q.gis, eval, schema, ws.facts, ws.layers);
            py::dict out;
            out["columns"] = plan.result.columns;
            out["rows"] = plan.result.rows;
            out["warnings"] = plan.warnings;
            return out;
          },
          py::arg("text"), "Run the GIS part of a GISOLAP-QL query");

  m.def("parse_query", [](const std::string& text) {
    GisolapQuery q = parse(text);
    py::dict out;
    out["has_gis"] = q.gis.has_value();
    out["has_olap"] = q.olap.has_value();
    if (q.gis) out["gis"] = print(*q.gis);
    if (q.olap) out["olap"] = print(*q.olap);
    return out;
  });

  m.def("predicate_evals", [] { return predicate_eval_counter(); });
  m.def("reset_predicate_evals", [] { reset_predicate_eval_counter(); });
}
