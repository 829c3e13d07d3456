// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#ifndef PIET_GEN_HPP
#define PIET_GEN_HPP

#include <cstdint>
#include <vector>

#include "piet/geom.hpp"

namespace piet {

/// Synthetic map: states as convex jittered tiles, rivers as random walks,
/// cities / volcanoes / stores as point layers (each with `points` members).
/// Volcanoes carry an elev measure, cities and states a population, all
/// layers a name attribute. Deterministic for a given spec.
struct GenSpec {
  std::uint64_t seed = 42;
  int states = 12;
  int rivers = 6;
  int points = 40;
  bool west_heavy = false;  // point density decays eastward
  double width = 1000.0;
  double height = 600.0;
};

std::vector<Layer> generate_map(const GenSpec& spec);

}  // namespace piet

#endif  // PIET_GEN_HPP
