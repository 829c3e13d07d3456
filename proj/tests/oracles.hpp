// Test-only oracles: independent brute-force implementations used to freeze
// expected values. These deliberately avoid the arrangement / association
// code paths they are used to check.

#ifndef PIET_TESTS_ORACLES_HPP
#define PIET_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "piet/geom.hpp"

namespace oracle {

struct Counts {
  std::size_t nodes = 0;
  std::size_t segments = 0;
  std::size_t polygons = 0;
};

// Chord t-interval of a line in a box, computed directly from the four
// half-plane constraints (no endpoint snapping, no shared code with
// piet::clip_line_to_box beyond the line representation).
inline std::optional<std::pair<double, double>> chord_interval(
    const piet::Line& l, const piet::BBox& box) {
  piet::Point2 base = l.base_point();
  piet::Point2 d = l.direction();
  double t0 = -1e300, t1 = 1e300;
  auto apply = [&](double q, double r) {
    if (q == 0.0) return r >= 0.0;
    double t = r / q;
    if (q > 0.0)
      t1 = std::min(t1, t);
    else
      t0 = std::max(t0, t);
    return true;
  };
  if (!apply(-d.x, base.x - box.xmin)) return std::nullopt;
  if (!apply(d.x, box.xmax - base.x)) return std::nullopt;
  if (!apply(-d.y, base.y - box.ymin)) return std::nullopt;
  if (!apply(d.y, box.ymax - base.y)) return std::nullopt;
  if (!(t0 < t1)) return std::nullopt;
  return std::make_pair(t0, t1);
}

// Brute-force arrangement census: nodes by pairwise intersection with eps
// clustering, segments by counting nodes per chord, faces from Euler's
// formula on the chord graph (dangling frame excluded): F_bounded = E - V + 1.
inline Counts arrangement_counts(const std::vector<piet::Line>& lines,
                                 const piet::BBox& box,
                                 const piet::EpsilonConfig& eps) {
  std::vector<piet::Line> kept;
  for (const piet::Line& l : lines) {
    auto iv = chord_interval(l, box);
    if (!iv) continue;
    double len = iv->second - iv->first;
    if (len < 2.0 * eps.point_eps) continue;
    kept.push_back(l);
  }
  std::vector<piet::Point2> nodes;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      auto p = piet::line_intersection(kept[i], kept[j]);
      if (!p) continue;
      if (!box.strictly_inside(*p, eps.point_eps)) continue;
      bool dup = false;
      for (const piet::Point2& q : nodes)
        if (piet::is_similar_point(*p, q, eps.point_eps)) {
          dup = true;
          break;
        }
      if (!dup) nodes.push_back(*p);
    }
  }
  Counts c;
  c.nodes = nodes.size();
  std::size_t edges = 0;
  for (const piet::Line& l : kept) {
    std::size_t on_line = 0;
    for (const piet::Point2& q : nodes)
      if (std::fabs(l.eval(q)) < 2.0 * eps.point_eps) ++on_line;
    edges += on_line + 1;
  }
  c.segments = edges;
  c.polygons = edges - nodes.size() + 1;
  return c;
}

// Random lines through point pairs inside the box: every line has a chord.
inline std::vector<piet::Line> random_lines(std::mt19937_64& rng, std::size_t n,
                                            const piet::BBox& box) {
  std::uniform_real_distribution<double> ux(box.xmin, box.xmax);
  std::uniform_real_distribution<double> uy(box.ymin, box.ymax);
  std::vector<piet::Line> lines;
  while (lines.size() < n) {
    piet::Point2 p{ux(rng), uy(rng)};
    piet::Point2 q{ux(rng), uy(rng)};
    if (piet::dist(p, q) < 1e-3) continue;
    piet::Line l = piet::line_through(p, q);
    bool dup = false;
    for (const piet::Line& e : lines)
      if (piet::similar_lines(e, l, 1e-6)) dup = true;
    if (!dup) lines.push_back(l);
  }
  return lines;
}

inline double shoelace(const std::vector<piet::Point2>& ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const piet::Point2& p = ring[i];
    const piet::Point2& q = ring[(i + 1) % ring.size()];
    twice += (p.x - q.x) * (p.y + q.y);
  }
  return std::fabs(twice) * 0.5;
}

}  // namespace oracle

#endif  // PIET_TESTS_ORACLES_HPP
