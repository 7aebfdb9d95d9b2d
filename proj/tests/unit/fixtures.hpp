#pragma once

#include <functional>

#include "flameforge/material.hpp"

namespace flameforge::fixtures {

inline GridDesc cube_desc(int n, double h, Vec3 origin = {}) {
  GridDesc d;
  d.resolution = {n, n, n};
  d.voxel_size = h;
  d.origin = origin;
  return d;
}

/// Material state with one fresh material on every fine cell accepted by `filled`.
inline MaterialState make_material(const GridDesc& fine, const std::function<bool(const Coord&)>& filled,
                                   double T = 293.0, MaterialProperties props = {}) {
  MaterialState m;
  GridDesc d = fine;
  d.background = 293.0;
  m.T_m = create_grid(d, 293.0);
  d.background = 0.0;
  m.M_v = create_grid(d, 0.0);
  m.M_c = create_grid(d, 0.0);
  m.I = IndexGrid(d, 0);
  m.object = IndexGrid(d, 0);
  m.materials.push_back(props);
  for (std::size_t n = 0; n < d.cell_count(); ++n) {
    const Coord c = d.coord_of(n);
    if (!filled(c)) continue;
    m.T_m.set(c, T);
    m.M_v.set(c, 1.0);
    m.M_c.set(c, props.charring ? 1.0 : 0.0);
    m.I.set(c, 0);
    m.object.set(c, 0);
  }
  return m;
}

}  // namespace flameforge::fixtures
