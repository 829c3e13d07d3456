// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "piet/topo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace piet {

RegionCells regions_of(const Overlay& overlay) {
  return regions_of_associations(overlay.associations);
}

RegionCells regions_of_associations(const std::vector<Association>& assocs) {
  RegionCells out;
  for (const Association& a : assocs)
    out[a.layer + "." + std::to_string(a.gid)].insert(a.cell_id);
  return out;
}

namespace {

// perimeter parameter of a boundary point, counter-clockwise from (xmin,ymin)
double perimeter_param(Point2 p, const BBox& box, double eps) {
  double w = box.width(), h = box.height();
  if (std::fabs(p.y - box.ymin) <= eps) return p.x - box.xmin;
  if (std::fabs(p.x - box.xmax) <= eps) return w + (p.y - box.ymin);
  if (std::fabs(p.y - box.ymax) <= eps) return w + h + (box.xmax - p.x);
  return 2 * w + h + (box.ymax - p.y);
}

BBox frame_box_of(const ArrangementGraph& g) {
  BBox b{1e300, 1e300, -1e300, -1e300};
  for (const auto& v : g.vertices) {
    if (!v.on_boundary) continue;
    b.xmin = std::min(b.xmin, v.p.x);
    b.ymin = std::min(b.ymin, v.p.y);
    b.xmax = std::max(b.xmax, v.p.x);
    b.ymax = std::max(b.ymax, v.p.y);
  }
  return b;
}

}  // namespace

// The clip-rectangle frame enters the invariant as pieces between carrier
// exit points only; the four box corners are not cells of the decomposition,
// so an orientation-preserving affine rebuild keeps the structure intact.
TopologicalInvariant build_invariant(const Arrangement& arr, const RegionCells& regions) {
  TopologicalInvariant inv;
  const ArrangementGraph& g = arr.graph;
  const BBox frame = frame_box_of(g);
  const double eps = 1e-9 * (frame.width() + frame.height() + 1.0);

  std::int64_t next_id = 0;
  for (const Cell& c : arr.cells) next_id = std::max(next_id, c.cell_id + 1);

  // vertices kept: interior nodes, plus boundary vertices where a carrier
  // edge actually ends (chord exit points)
  std::vector<char> is_exit(g.vertices.size(), 0);
  for (const auto& e : g.edges) {
    if (e.on_boundary) continue;
    if (g.vertices[e.v0].on_boundary) is_exit[e.v0] = 1;
    if (g.vertices[e.v1].on_boundary) is_exit[e.v1] = 1;
  }
  std::vector<std::int64_t> vid(g.vertices.size(), -1);
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (!g.vertices[v].on_boundary) {
      vid[v] = g.vertices[v].cell_id;
    } else if (is_exit[v]) {
      vid[v] = next_id++;
    }
  }

  // frame pieces between consecutive exit points in perimeter order
  std::vector<std::pair<double, std::size_t>> exits;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (vid[v] >= 0 && g.vertices[v].on_boundary)
      exits.push_back({perimeter_param(g.vertices[v].p, frame, eps), v});
  std::sort(exits.begin(), exits.end());
  std::vector<std::int64_t> piece_id(exits.size());  // piece k runs exit k -> k+1
  for (std::size_t k = 0; k < exits.size(); ++k) piece_id[k] = next_id++;
  auto piece_of_param = [&](double t) -> std::int64_t {
    if (exits.empty()) return -1;
    // the piece starting at the last exit with param <= t (cyclic)
    std::size_t lo = 0;
    for (std::size_t k = 0; k < exits.size(); ++k)
      if (exits[k].first <= t + eps) lo = k;
    if (t + eps < exits[0].first) lo = exits.size() - 1;  // wrapped
    return piece_id[lo];
  };

  // edge ids: carrier edges keep their cell id; frame edges map to pieces
  std::vector<std::int64_t> eid(g.edges.size(), -1);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    if (!ed.on_boundary) {
      eid[e] = ed.cell_id;
    } else {
      Point2 mid{0.5 * (g.vertices[ed.v0].p.x + g.vertices[ed.v1].p.x),
                 0.5 * (g.vertices[ed.v0].p.y + g.vertices[ed.v1].p.y)};
      eid[e] = piece_of_param(perimeter_param(mid, frame, eps));
    }
  }

  std::vector<std::int64_t> fid(g.faces.size());
  for (std::size_t f = 0; f < g.faces.size(); ++f) {
    if (g.faces[f].exterior) {
      fid[f] = next_id++;
      inv.exterior_face = fid[f];
    } else {
      fid[f] = g.faces[f].cell_id;
    }
  }

  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (vid[v] >= 0) inv.vertex.insert(vid[v]);
  for (std::size_t k = 0; k < exits.size(); ++k) {
    std::int64_t v0 = vid[exits[k].second];
    std::int64_t v1 = vid[exits[(k + 1) % exits.size()].second];
    inv.edge.insert(piece_id[k]);
    inv.endpoints.insert({piece_id[k], v0, v1});
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (g.edges[e].on_boundary) continue;
    inv.edge.insert(eid[e]);
    inv.endpoints.insert({eid[e], vid[g.edges[e].v0], vid[g.edges[e].v1]});
  }
  for (std::size_t f = 0; f < g.faces.size(); ++f) {
    if (!g.faces[f].exterior) inv.face.insert(fid[f]);
    for (int e : g.faces[f].edges)
      if (eid[e] >= 0) inv.face_edge.insert({fid[f], eid[e]});
    for (int v : g.faces[f].vertices)
      if (vid[v] >= 0) inv.face_vertex.insert({fid[f], vid[v]});
  }

  // Between: ccw order of incident edges around each kept vertex; the two
  // frame neighbors of an exit point map to distinct pieces
  std::vector<std::vector<std::pair<double, std::int64_t>>> incident(g.vertices.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    if (eid[e] < 0) continue;
    Point2 p0 = g.vertices[ed.v0].p;
    Point2 p1 = g.vertices[ed.v1].p;
    incident[ed.v0].push_back({std::atan2(p1.y - p0.y, p1.x - p0.x), eid[e]});
    incident[ed.v1].push_back({std::atan2(p0.y - p1.y, p0.x - p1.x), eid[e]});
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (vid[v] < 0) continue;
    auto& list = incident[v];
    std::sort(list.begin(), list.end());
    std::size_t n = list.size();
    if (n < 3) continue;
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t a = list[i].second;
      std::int64_t m = list[(i + 1) % n].second;
      std::int64_t b = list[(i + 2) % n].second;
      inv.between.insert({Orientation::Ccw, a, m, b});
      inv.between.insert({Orientation::Cw, b, m, a});
    }
  }

  inv.regions = regions;
  return inv;
}

std::set<std::string> adjacent_regions(const TopologicalInvariant& inv,
                                       const std::string& region) {
  auto rit = inv.regions.find(region);
  if (rit == inv.regions.end()) throw unknown_region_error("unknown region " + region);

  // faces of the region, then regions of faces sharing an edge with them
  std::set<std::int64_t> my_faces;
  for (std::int64_t id : rit->second)
    if (inv.face.count(id)) my_faces.insert(id);

  std::set<std::int64_t> boundary_edges;
  for (const auto& [f, e] : inv.face_edge)
    if (my_faces.count(f)) boundary_edges.insert(e);

  std::set<std::int64_t> touching_faces;
  for (const auto& [f, e] : inv.face_edge)
    if (boundary_edges.count(e) && !my_faces.count(f) && inv.face.count(f))
      touching_faces.insert(f);

  std::set<std::string> out;
  for (const auto& [name, cells] : inv.regions) {
    if (name == region) continue;
    for (std::int64_t f : touching_faces)
      if (cells.count(f)) {
        out.insert(name);
        break;
      }
  }
  return out;
}

std::size_t adjacent_region_count(const TopologicalInvariant& inv,
                                  const std::string& region) {
  return adjacent_regions(inv, region).size();
}

namespace {

struct Element {
  std::int64_t id;
  int type;  // 0 vertex, 1 edge, 2 face, 3 exterior
};

struct Structure {
  std::vector<std::int64_t> ids;
  std::map<std::int64_t, int> index;
  std::vector<int> type;
  std::vector<std::vector<int>> nbr_ev;  // edge -> vertices
  std::vector<std::vector<int>> nbr_ve;  // vertex -> edges
  std::vector<std::vector<int>> nbr_fe;  // face -> edges
  std::vector<std::vector<int>> nbr_ef;  // edge -> faces
  std::vector<std::vector<int>> nbr_fv;  // face -> vertices
  std::vector<std::vector<int>> nbr_vf;  // vertex -> faces
  std::vector<std::vector<std::string>> region_tags;
};

Structure structure_of(const TopologicalInvariant& inv) {
  Structure s;
  auto add = [&](std::int64_t id, int t) {
    s.index[id] = static_cast<int>(s.ids.size());
    s.ids.push_back(id);
    s.type.push_back(t);
  };
  for (std::int64_t v : inv.vertex) add(v, 0);
  for (std::int64_t e : inv.edge) add(e, 1);
  for (std::int64_t f : inv.face) add(f, 2);
  add(inv.exterior_face, 3);

  std::size_t n = s.ids.size();
  s.nbr_ev.resize(n);
  s.nbr_ve.resize(n);
  s.nbr_fe.resize(n);
  s.nbr_ef.resize(n);
  s.nbr_fv.resize(n);
  s.nbr_vf.resize(n);
  s.region_tags.resize(n);

  for (const auto& [e, v1, v2] : inv.endpoints) {
    int ei = s.index.at(e);
    for (std::int64_t v : {v1, v2}) {
      int vi = s.index.at(v);
      s.nbr_ev[ei].push_back(vi);
      s.nbr_ve[vi].push_back(ei);
    }
  }
  for (const auto& [f, e] : inv.face_edge) {
    int fi = s.index.at(f), ei = s.index.at(e);
    s.nbr_fe[fi].push_back(ei);
    s.nbr_ef[ei].push_back(fi);
  }
  for (const auto& [f, v] : inv.face_vertex) {
    int fi = s.index.at(f), vi = s.index.at(v);
    s.nbr_fv[fi].push_back(vi);
    s.nbr_vf[vi].push_back(fi);
  }
  for (const auto& [name, cells] : inv.regions)
    for (std::int64_t id : cells) {
      auto it = s.index.find(id);
      if (it != s.index.end()) s.region_tags[it->second].push_back(name);
    }
  for (auto& tags : s.region_tags) std::sort(tags.begin(), tags.end());
  return s;
}

// joint iterative refinement over both structures with one shared palette,
// so color ids are comparable between them
std::pair<std::vector<int>, std::vector<int>> refine_colors(const Structure& sa,
                                                            const Structure& sb) {
  std::size_t na = sa.ids.size(), nb = sb.ids.size();
  std::vector<int> ca(na), cb(nb);
  {
    std::map<std::pair<int, std::vector<std::string>>, int> palette;
    auto assign = [&](const Structure& s, std::vector<int>& color) {
      for (std::size_t i = 0; i < s.ids.size(); ++i) {
        auto key = std::make_pair(s.type[i], s.region_tags[i]);
        auto it = palette.find(key);
        if (it == palette.end()) it = palette.insert({key, (int)palette.size()}).first;
        color[i] = it->second;
      }
    };
    assign(sa, ca);
    assign(sb, cb);
  }
  for (int round = 0; round < 64; ++round) {
    std::map<std::vector<int>, int> palette;
    auto signature = [&](const Structure& s, const std::vector<int>& color,
                         std::size_t i) {
      std::vector<int> sig{color[i]};
      auto push_sorted = [&](const std::vector<int>& nbrs) {
        std::vector<int> cs;
        for (int j : nbrs) cs.push_back(color[j]);
        std::sort(cs.begin(), cs.end());
        sig.push_back(-1);
        sig.insert(sig.end(), cs.begin(), cs.end());
      };
      push_sorted(s.nbr_ev[i]);
      push_sorted(s.nbr_ve[i]);
      push_sorted(s.nbr_fe[i]);
      push_sorted(s.nbr_ef[i]);
      push_sorted(s.nbr_fv[i]);
      push_sorted(s.nbr_vf[i]);
      return sig;
    };
    std::vector<int> next_a(na), next_b(nb);
    auto relabel = [&](const Structure& s, const std::vector<int>& color,
                       std::vector<int>& next) {
      for (std::size_t i = 0; i < s.ids.size(); ++i) {
        std::vector<int> sig = signature(s, color, i);
        auto it = palette.find(sig);
        if (it == palette.end()) it = palette.insert({sig, (int)palette.size()}).first;
        next[i] = it->second;
      }
    };
    relabel(sa, ca, next_a);
    relabel(sb, cb, next_b);
    if (next_a == ca && next_b == cb) break;
    ca = std::move(next_a);
    cb = std::move(next_b);
  }
  return {ca, cb};
}

using BetweenSet =
    std::set<std::tuple<Orientation, std::int64_t, std::int64_t, std::int64_t>>;

bool verify_mapping(const TopologicalInvariant& a, const TopologicalInvariant& b,
                    const std::map<std::int64_t, std::int64_t>& m) {
  auto mapped = [&](std::int64_t id) { return m.at(id); };
  for (const auto& [e, v1, v2] : a.endpoints) {
    if (!b.endpoints.count({mapped(e), mapped(v1), mapped(v2)}) &&
        !b.endpoints.count({mapped(e), mapped(v2), mapped(v1)}))
      return false;
  }
  for (const auto& [f, e] : a.face_edge)
    if (!b.face_edge.count({mapped(f), mapped(e)})) return false;
  for (const auto& [f, v] : a.face_vertex)
    if (!b.face_vertex.count({mapped(f), mapped(v)})) return false;
  BetweenSet bt;
  for (const auto& [o, x, y, z] : a.between) bt.insert({o, mapped(x), mapped(y), mapped(z)});
  if (bt != b.between) return false;
  for (const auto& [name, cells] : a.regions) {
    auto it = b.regions.find(name);
    if (it == b.regions.end()) return false;
    std::set<std::int64_t> mapped_cells;
    for (std::int64_t c : cells) {
      auto mit = m.find(c);
      if (mit == m.end()) return false;
      mapped_cells.insert(mit->second);
    }
    if (mapped_cells != it->second) return false;
  }
  return true;
}

}  // namespace

bool invariant_equal_up_to_relabel(const TopologicalInvariant& a,
                                   const TopologicalInvariant& b) {
  if (a.vertex.size() != b.vertex.size() || a.edge.size() != b.edge.size() ||
      a.face.size() != b.face.size())
    return false;
  if (a.regions.size() != b.regions.size()) return false;
  for (const auto& [name, cells] : a.regions) {
    auto it = b.regions.find(name);
    if (it == b.regions.end() || it->second.size() != cells.size()) return false;
  }

  Structure sa = structure_of(a);
  Structure sb = structure_of(b);
  if (sa.ids.size() != sb.ids.size()) return false;
  auto [ca, cb] = refine_colors(sa, sb);

  // color histograms must agree
  std::map<int, int> ha, hb;
  for (int c : ca) ++ha[c];
  for (int c : cb) ++hb[c];
  if (ha != hb) return false;

  std::size_t n = sa.ids.size();
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (ha[ca[x]] != ha[ca[y]]) return ha[ca[x]] < ha[ca[y]];
    return ca[x] < ca[y];
  });

  std::vector<int> assign(n, -1);   // sa index -> sb index
  std::vector<char> used(n, 0);

  // relation-local consistency check for incremental pruning
  auto consistent = [&](int ia, int ib) {
    if (ca[ia] != cb[ib]) return false;
    auto check = [&](const std::vector<int>& na, const std::vector<int>& nb) {
      for (int x : na) {
        if (assign[x] < 0) continue;
        if (std::find(nb.begin(), nb.end(), assign[x]) == nb.end()) return false;
      }
      return true;
    };
    return check(sa.nbr_ev[ia], sb.nbr_ev[ib]) && check(sa.nbr_ve[ia], sb.nbr_ve[ib]) &&
           check(sa.nbr_fe[ia], sb.nbr_fe[ib]) && check(sa.nbr_ef[ia], sb.nbr_ef[ib]) &&
           check(sa.nbr_fv[ia], sb.nbr_fv[ib]) && check(sa.nbr_vf[ia], sb.nbr_vf[ib]);
  };

  std::function<bool(std::size_t)> search = [&](std::size_t k) -> bool {
    if (k == n) {
      std::map<std::int64_t, std::int64_t> m;
      for (std::size_t i = 0; i < n; ++i) m[sa.ids[i]] = sb.ids[assign[i]];
      return verify_mapping(a, b, m);
    }
    int ia = order[k];
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (!consistent(ia, static_cast<int>(j))) continue;
      assign[ia] = static_cast<int>(j);
      used[j] = 1;
      if (search(k + 1)) return true;
      assign[ia] = -1;
      used[j] = 0;
    }
    return false;
  };
  return search(0);
}

}  // namespace piet
