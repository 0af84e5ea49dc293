#pragma once

// Frameworks derived from the fixtures that several test files need.

#include "perimax/fixtures.hpp"
#include "perimax/pseudo_tri.hpp"

namespace support {

/// A pseudo-triangulation with two extra edge orbits: the top rigidifying candidate and the next
/// ranked candidate that still fits. It carries a one-dimensional periodic stress.
inline perimax::PeriodicFramework stressed_ppt(const perimax::PeriodicFramework& base) {
  const auto cands = perimax::find_rigidifying_edges(base);
  const auto once = perimax::insert_edge_orbit(base, cands.front());
  for (std::size_t k = 1; k < cands.size(); ++k) {
    if (perimax::insertable(once, cands[k].spec())) return perimax::insert_edge_orbit(once, cands[k]);
  }
  throw perimax::ValidationError("no second candidate");
}

}  // namespace support
