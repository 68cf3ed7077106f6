#pragma once

#include <array>
#include <vector>

#include "fsi/geometry.hpp"

namespace fsi::detail {

// Bowyer-Watson Delaunay triangulation.  Deterministic for a fixed input
// order; callers are expected to avoid exactly degenerate (cocircular) point
// sets, which the mesh generator does by jittering interior grid points.
std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points);

}  // namespace fsi::detail
