// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "piet/gen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace piet {

namespace {

// platform-stable uniform doubles (std distributions are not portable)
class Rand {
 public:
  explicit Rand(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return (rng_() >> 11) * (1.0 / 9007199254740992.0); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1 - 1e-12));
  }

 private:
  std::mt19937_64 rng_;
};

std::string fmt_no_trailing(double v) {
  char buf[40];
  snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::vector<Layer> generate_map(const GenSpec& spec) {
  Rand rng(spec.seed);
  const double W = spec.width, H = spec.height;

  std::vector<Layer> layers;

  // states: jittered quad tiling, convex by construction (small jitter)
  Layer states;
  states.name = "states";
  {
    int cols = std::max(1, static_cast<int>(std::ceil(
                               std::sqrt(spec.states * (W / H)))));
    int rows = std::max(1, (spec.states + cols - 1) / cols);
    double cw = W / cols, ch = H / rows;
    // jittered grid corners
    std::vector<std::vector<Point2>> corner(rows + 1,
                                            std::vector<Point2>(cols + 1));
    for (int r = 0; r <= rows; ++r) {
      for (int c = 0; c <= cols; ++c) {
        double jx = (r == 0 || r == rows || c == 0 || c == cols)
                        ? 0.0
                        : rng.uniform(-0.2, 0.2);
        double jy = (r == 0 || r == rows || c == 0 || c == cols)
                        ? 0.0
                        : rng.uniform(-0.2, 0.2);
        corner[r][c] = {c * cw + jx * cw, r * ch + jy * ch};
      }
    }
    int made = 0;
    for (int r = 0; r < rows && made < spec.states; ++r) {
      for (int c = 0; c < cols && made < spec.states; ++c) {
        Polygon pg;
        pg.gid = ++made;
        pg.ring = {corner[r][c], corner[r][c + 1], corner[r + 1][c + 1],
                   corner[r + 1][c]};
        states.polygons.push_back(pg);
        states.attributes[pg.gid]["name"] = "State" + std::to_string(made);
        states.attributes[pg.gid]["population"] =
            fmt_no_trailing(std::floor(rng.uniform(5e4, 5e6)));
      }
    }
  }
  layers.push_back(states);

  // rivers: bounded random walks
  Layer rivers;
  rivers.name = "rivers";
  for (int i = 1; i <= spec.rivers; ++i) {
    Polyline pl;
    pl.gid = i;
    double x = rng.uniform(0.05 * W, 0.95 * W);
    double y = rng.uniform(0.05 * H, 0.95 * H);
    double heading = rng.uniform(0.0, 2.0 * M_PI);
    int segs = rng.uniform_int(2, 5);
    pl.vertices.push_back({x, y});
    for (int s = 0; s < segs; ++s) {
      heading += rng.uniform(-0.9, 0.9);
      double step = rng.uniform(0.05, 0.2) * std::min(W, H);
      x = std::clamp(x + step * std::cos(heading), 0.01 * W, 0.99 * W);
      y = std::clamp(y + step * std::sin(heading), 0.01 * H, 0.99 * H);
      if (is_similar_point(pl.vertices.back(), {x, y}, 1e-9)) continue;
      pl.vertices.push_back({x, y});
    }
    if (pl.vertices.size() < 2) {
      pl.vertices.push_back({x + 0.05 * W, y});
    }
    rivers.polylines.push_back(pl);
    rivers.attributes[pl.gid]["name"] = "River" + std::to_string(i);
  }
  layers.push_back(rivers);

  auto point_layer = [&](const std::string& name, bool with_elev, bool with_pop) {
    Layer layer;
    layer.name = name;
    for (int i = 1; i <= spec.points; ++i) {
      double u = rng.uniform();
      double x = spec.west_heavy ? W * u * u : W * u;
      double y = rng.uniform(0.0, H);
      layer.points.push_back({i, {x, y}});
      layer.attributes[i]["name"] =
          name.substr(0, 1) + std::to_string(i);
      if (with_elev)
        layer.attributes[i]["elev"] = fmt_no_trailing(std::floor(rng.uniform(800, 6200)));
      if (with_pop)
        layer.attributes[i]["population"] =
            fmt_no_trailing(std::floor(rng.uniform(1e4, 2e6)));
    }
    return layer;
  };
  layers.push_back(point_layer("cities", false, true));
  layers.push_back(point_layer("volcanoes", true, false));
  layers.push_back(point_layer("stores", false, false));
  return layers;
}

}  // namespace piet
