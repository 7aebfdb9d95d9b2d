#pragma once

#include "flameforge/grid.hpp"

namespace flameforge {

/// Distance assigned to cells outside the swept region or when no material exists.
inline constexpr double kSdfFar = 1.0e30;

struct SdfOptions {
  /// Cells swept around the bounding box of the material; negative sweeps the whole grid.
  int margin = 3;
  /// Cap on full 8-ordering sweep passes.
  int max_passes = 32;
};

/// Signed distance to the material surface, negative inside.
struct Sdf {
  ScalarGrid distance;
  double iso_threshold = 0.05;
  bool empty = true;

  double at(const Coord& c) const { return distance.get(c); }
};

/// First-order fast-sweeping solution of |grad d| = 1. Cells with
/// mass >= iso_threshold are inside; the interface is located by linear
/// interpolation of the mass between neighbouring cell centers.
Sdf rebuild_sdf(const ScalarGrid& mass, double iso_threshold, const SdfOptions& options = {});

/// Depth below the surface, max(0, -d). Zero for cells outside material.
double query_depth(const Sdf& sdf, const Coord& cell);

}  // namespace flameforge
