// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "piet/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace piet {

Mbr Mbr::of_points(const std::vector<Point2>& pts) {
  Mbr m{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity()};
  for (Point2 p : pts) {
    m.xmin = std::min(m.xmin, p.x);
    m.ymin = std::min(m.ymin, p.y);
    m.xmax = std::max(m.xmax, p.x);
    m.ymax = std::max(m.ymax, p.y);
  }
  return m;
}

void Mbr::expand(const Mbr& o) {
  xmin = std::min(xmin, o.xmin);
  ymin = std::min(ymin, o.ymin);
  xmax = std::max(xmax, o.xmax);
  ymax = std::max(ymax, o.ymax);
}

double Mbr::enlargement(const Mbr& o) const {
  Mbr u = *this;
  u.expand(o);
  return u.area() - area();
}

RTree::RTree(int fanout) : fanout_(std::max(4, fanout)) {}

namespace {

// even group sizes: ceil(n / groups) or one less, never under half-full
std::vector<std::size_t> even_groups(std::size_t n, std::size_t cap) {
  std::size_t k = (n + cap - 1) / cap;
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t i = 0; i < n % k; ++i) ++sizes[i];
  return sizes;
}

}  // namespace

int RTree::build_leaves(std::vector<RTreeEntry>& entries) {
  // sort-tile-recursive packing
  std::sort(entries.begin(), entries.end(), [](const RTreeEntry& a, const RTreeEntry& b) {
    double ax = 0.5 * (a.box.xmin + a.box.xmax), bx = 0.5 * (b.box.xmin + b.box.xmax);
    if (ax != bx) return ax < bx;
    return 0.5 * (a.box.ymin + a.box.ymax) < 0.5 * (b.box.ymin + b.box.ymax);
  });
  std::size_t n = entries.size();
  std::size_t leaf_count = (n + fanout_ - 1) / fanout_;
  std::size_t slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaf_count))));
  slices = std::max<std::size_t>(1, slices);
  std::size_t per_slice = (n + slices - 1) / slices;

  std::vector<int> leaves;
  std::size_t i = 0;
  while (i < n) {
    std::size_t hi = std::min(n, i + per_slice);
    std::sort(entries.begin() + i, entries.begin() + hi,
              [](const RTreeEntry& a, const RTreeEntry& b) {
                double ay = 0.5 * (a.box.ymin + a.box.ymax),
                       by = 0.5 * (b.box.ymin + b.box.ymax);
                if (ay != by) return ay < by;
                return 0.5 * (a.box.xmin + a.box.xmax) < 0.5 * (b.box.xmin + b.box.xmax);
              });
    for (std::size_t sz : even_groups(hi - i, fanout_)) {
      Node leaf;
      leaf.leaf = true;
      leaf.entries.assign(entries.begin() + i, entries.begin() + i + sz);
      i += sz;
      int id = static_cast<int>(nodes_.size());
      nodes_.push_back(std::move(leaf));
      recompute(id);
      leaves.push_back(id);
    }
  }
  return build_level(std::move(leaves));
}

int RTree::build_level(std::vector<int> level) {
  while (level.size() > 1) {
    std::sort(level.begin(), level.end(), [&](int a, int b) {
      double ax = 0.5 * (nodes_[a].box.xmin + nodes_[a].box.xmax);
      double bx = 0.5 * (nodes_[b].box.xmin + nodes_[b].box.xmax);
      if (ax != bx) return ax < bx;
      return 0.5 * (nodes_[a].box.ymin + nodes_[a].box.ymax) <
             0.5 * (nodes_[b].box.ymin + nodes_[b].box.ymax);
    });
    std::vector<int> next;
    std::size_t i = 0;
    for (std::size_t sz : even_groups(level.size(), fanout_)) {
      Node inner;
      inner.leaf = false;
      inner.children.assign(level.begin() + i, level.begin() + i + sz);
      i += sz;
      int id = static_cast<int>(nodes_.size());
      nodes_.push_back(std::move(inner));
      recompute(id);
      next.push_back(id);
    }
    level = std::move(next);
  }
  return level.empty() ? -1 : level[0];
}

RTree RTree::bulk_load(std::vector<RTreeEntry> entries, int fanout) {
  RTree t(fanout);
  t.count_ = entries.size();
  if (entries.empty()) return t;
  t.root_ = t.build_leaves(entries);
  return t;
}

void RTree::recompute(int node) {
  Node& n = nodes_[node];
  n.agg_count = 0.0;
  n.agg_sum = 0.0;
  n.agg_max = -std::numeric_limits<double>::infinity();
  bool first = true;
  if (n.leaf) {
    for (const RTreeEntry& e : n.entries) {
      if (first) {
        n.box = e.box;
        first = false;
      } else {
        n.box.expand(e.box);
      }
      n.agg_count += 1.0;
      n.agg_sum += e.value;
      n.agg_max = std::max(n.agg_max, e.value);
    }
  } else {
    for (int c : n.children) {
      if (first) {
        n.box = nodes_[c].box;
        first = false;
      } else {
        n.box.expand(nodes_[c].box);
      }
      n.agg_count += nodes_[c].agg_count;
      n.agg_sum += nodes_[c].agg_sum;
      n.agg_max = std::max(n.agg_max, nodes_[c].agg_max);
    }
  }
}

int RTree::height() const {
  if (root_ < 0) return -1;
  int h = 0;
  int cur = root_;
  while (!nodes_[cur].leaf) {
    cur = nodes_[cur].children[0];
    ++h;
  }
  return h;
}

int RTree::choose_leaf(int node, const Mbr& box, std::vector<int>& path) {
  path.push_back(node);
  if (nodes_[node].leaf) return node;
  int best = -1;
  double best_enlarge = std::numeric_limits<double>::infinity();
  double best_area = std::numeric_limits<double>::infinity();
  for (int c : nodes_[node].children) {
    double enlarge = nodes_[c].box.enlargement(box);
    double area = nodes_[c].box.area();
    if (enlarge < best_enlarge || (enlarge == best_enlarge && area < best_area)) {
      best = c;
      best_enlarge = enlarge;
      best_area = area;
    }
  }
  return choose_leaf(best, box, path);
}

void RTree::split_node(int node, std::vector<int>& path) {
  // quadratic split of either leaf entries or children
  Node& n = nodes_[node];
  auto box_of = [&](std::size_t i) {
    return n.leaf ? n.entries[i].box : nodes_[n.children[i]].box;
  };
  std::size_t m = n.leaf ? n.entries.size() : n.children.size();
  // pick the pair wasting the most area as seeds
  std::size_t s1 = 0, s2 = 1;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      Mbr u = box_of(i);
      u.expand(box_of(j));
      double waste = u.area() - box_of(i).area() - box_of(j).area();
      if (waste > worst) {
        worst = waste;
        s1 = i;
        s2 = j;
      }
    }
  std::vector<std::size_t> g1{s1}, g2{s2};
  Mbr b1 = box_of(s1), b2 = box_of(s2);
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < m; ++i)
    if (i != s1 && i != s2) rest.push_back(i);
  const std::size_t min_fill = m / 2;
  for (std::size_t k = 0; k < rest.size(); ++k) {
    std::size_t i = rest[k];
    std::size_t remaining = rest.size() - k;
    // force-assign when a group needs every remaining entry to reach min fill
    if (g1.size() + remaining <= min_fill) {
      g1.push_back(i);
      b1.expand(box_of(i));
      continue;
    }
    if (g2.size() + remaining <= min_fill) {
      g2.push_back(i);
      b2.expand(box_of(i));
      continue;
    }
    if (b1.enlargement(box_of(i)) <= b2.enlargement(box_of(i))) {
      g1.push_back(i);
      b1.expand(box_of(i));
    } else {
      g2.push_back(i);
      b2.expand(box_of(i));
    }
  }

  Node sibling;
  sibling.leaf = n.leaf;
  if (n.leaf) {
    std::vector<RTreeEntry> keep, move;
    for (std::size_t i : g1) keep.push_back(n.entries[i]);
    for (std::size_t i : g2) move.push_back(n.entries[i]);
    n.entries = std::move(keep);
    sibling.entries = std::move(move);
  } else {
    std::vector<int> keep, move;
    for (std::size_t i : g1) keep.push_back(n.children[i]);
    for (std::size_t i : g2) move.push_back(n.children[i]);
    n.children = std::move(keep);
    sibling.children = std::move(move);
  }
  int sid = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(sibling));
  recompute(node);
  recompute(sid);

  if (path.size() == 1) {
    // split root: grow a new root
    Node new_root;
    new_root.leaf = false;
    new_root.children = {node, sid};
    root_ = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(new_root));
    recompute(root_);
    return;
  }
  int parent = path[path.size() - 2];
  nodes_[parent].children.push_back(sid);
  path.pop_back();
  recompute(parent);
  if (static_cast<int>(nodes_[parent].children.size()) > fanout_)
    split_node(parent, path);
}

void RTree::insert(const RTreeEntry& entry) {
  ++count_;
  if (root_ < 0) {
    Node leaf;
    leaf.leaf = true;
    leaf.entries.push_back(entry);
    nodes_.push_back(std::move(leaf));
    root_ = 0;
    recompute(root_);
    return;
  }
  std::vector<int> path;
  int leaf = choose_leaf(root_, entry.box, path);
  nodes_[leaf].entries.push_back(entry);
  for (auto it = path.rbegin(); it != path.rend(); ++it) recompute(*it);
  if (static_cast<int>(nodes_[leaf].entries.size()) > fanout_) split_node(leaf, path);
  // MBRs and aggregates above the split point are recomputed inside split_node
  std::vector<int> up;
  up.push_back(root_);
  recompute_upwards(up);
}

void RTree::recompute_upwards(std::vector<int>& path) {
  // full bottom-up recompute of the touched spine is cheap at these sizes
  std::function<void(int)> walk = [&](int node) {
    if (!nodes_[node].leaf)
      for (int c : nodes_[node].children) walk(c);
    recompute(node);
  };
  if (root_ >= 0) walk(root_);
  (void)path;
}

std::vector<std::int64_t> RTree::range_query(const Mbr& rect) const {
  std::vector<std::int64_t> out;
  if (root_ < 0) return out;
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[id];
    if (!n.box.intersects(rect)) continue;
    if (n.leaf) {
      for (const RTreeEntry& e : n.entries)
        if (e.box.intersects(rect)) out.push_back(e.id);
    } else {
      for (int c : n.children) stack.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::int64_t> RTree::range_query_exact(
    const Mbr& rect, const std::function<bool(std::int64_t)>& exact) const {
  std::vector<std::int64_t> out;
  for (std::int64_t id : range_query(rect))
    if (exact(id)) out.push_back(id);
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> RTree::spatial_join(
    const RTree& a, const RTree& b,
    const std::function<bool(std::int64_t, std::int64_t)>& exact) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (a.root_ < 0 || b.root_ < 0) return out;
  std::vector<std::pair<int, int>> stack{{a.root_, b.root_}};
  while (!stack.empty()) {
    auto [na, nb] = stack.back();
    stack.pop_back();
    const Node& x = a.nodes_[na];
    const Node& y = b.nodes_[nb];
    if (!x.box.intersects(y.box)) continue;
    if (x.leaf && y.leaf) {
      for (const RTreeEntry& ea : x.entries)
        for (const RTreeEntry& eb : y.entries)
          if (ea.box.intersects(eb.box) && exact(ea.id, eb.id))
            out.push_back({ea.id, eb.id});
    } else if (x.leaf) {
      for (int c : y.children) stack.push_back({na, c});
    } else if (y.leaf) {
      for (int c : x.children) stack.push_back({c, nb});
    } else {
      for (int ca : x.children)
        for (int cb : y.children) stack.push_back({ca, cb});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double RTree::aggregate_node(int node, const Mbr& rect, ArAggKind kind) const {
  ++visits_;
  trace_.push_back(node);
  const Node& n = nodes_[node];
  double identity = kind == ArAggKind::Max ? -std::numeric_limits<double>::infinity() : 0.0;
  if (!n.box.intersects(rect)) return identity;
  if (rect.contains(n.box)) {
    // pruning: the precomputed aggregate answers for the whole subtree
    switch (kind) {
      case ArAggKind::Count: return n.agg_count;
      case ArAggKind::Sum: return n.agg_sum;
      case ArAggKind::Max: return n.agg_max;
    }
  }
  double acc = identity;
  if (n.leaf) {
    for (const RTreeEntry& e : n.entries) {
      if (!rect.contains(e.box)) continue;  // exact for point-like entries
      switch (kind) {
        case ArAggKind::Count: acc += 1.0; break;
        case ArAggKind::Sum: acc += e.value; break;
        case ArAggKind::Max: acc = std::max(acc, e.value); break;
      }
    }
  } else {
    for (int c : n.children) {
      double v = aggregate_node(c, rect, kind);
      acc = kind == ArAggKind::Max ? std::max(acc, v) : acc + v;
    }
  }
  return acc;
}

double RTree::ar_aggregate(const Mbr& rect, ArAggKind kind) const {
  visits_ = 0;
  trace_.clear();
  if (root_ < 0) return kind == ArAggKind::Max ? -std::numeric_limits<double>::infinity() : 0.0;
  return aggregate_node(root_, rect, kind);
}

std::vector<int> RTree::descendants(int node) const {
  std::vector<int> out;
  std::vector<int> stack{node};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (id != node) out.push_back(id);
    if (!nodes_[id].leaf)
      for (int c : nodes_[id].children) stack.push_back(c);
  }
  return out;
}

std::vector<int> RTree::nodes_inside(const Mbr& rect) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (rect.contains(nodes_[i].box)) out.push_back(static_cast<int>(i));
  return out;
}

RTree::InvariantReport RTree::check_invariants(bool check_fill) const {
  InvariantReport rep;
  if (root_ < 0) return rep;
  // balance: all leaves at the same depth
  int depth = -1;
  std::function<void(int, int)> walk = [&](int node, int d) {
    const Node& n = nodes_[node];
    if (n.leaf) {
      if (depth < 0) depth = d;
      if (d != depth) {
        rep.balanced = false;
        rep.detail += "leaf depth mismatch; ";
      }
    }
    Mbr tight;
    bool first = true;
    if (n.leaf) {
      for (const RTreeEntry& e : n.entries) {
        if (first) {
          tight = e.box;
          first = false;
        } else {
          tight.expand(e.box);
        }
      }
    } else {
      for (int c : n.children) {
        if (first) {
          tight = nodes_[c].box;
          first = false;
        } else {
          tight.expand(nodes_[c].box);
        }
        walk(c, d + 1);
      }
    }
    if (!first) {
      if (tight.xmin != n.box.xmin || tight.ymin != n.box.ymin ||
          tight.xmax != n.box.xmax || tight.ymax != n.box.ymax) {
        rep.mbrs_tight = false;
        rep.detail += "loose mbr; ";
      }
    }
    if (check_fill && node != root_) {
      std::size_t sz = n.leaf ? n.entries.size() : n.children.size();
      if (sz < static_cast<std::size_t>(fanout_) / 2) {
        rep.fill_ok = false;
        rep.detail += "underfull node; ";
      }
    }
  };
  walk(root_, 0);
  return rep;
}

}  // namespace piet
