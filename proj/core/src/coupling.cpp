#include "flameforge/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flameforge/error.hpp"

namespace flameforge {

namespace {

template <class Body>
void for_each_cell(const GridDesc& d, Body&& body) {
  const auto& r = d.resolution;
  for (int k = 0; k < r[2]; ++k)
    for (int j = 0; j < r[1]; ++j)
      for (int i = 0; i < r[0]; ++i) body(Coord{i, j, k});
}

}  // namespace

GridDesc refine_desc(const GridDesc& coarse, int ratio, double background) {
  if (ratio < 1) throw ConfigError("material_ratio must be an integer >= 1");
  GridDesc f = coarse;
  for (auto& n : f.resolution) n *= ratio;
  f.voxel_size = coarse.voxel_size / ratio;
  f.background = background;
  return f;
}

CellMask compute_solid_mask(const MaterialState& material, const GridDesc& air_desc, int ratio,
                            double iso_threshold) {
  CellMask solid(air_desc);
  material.I.for_each_active([&](const Coord& x, std::uint16_t) {
    if (material.relative_mass(x) >= iso_threshold) solid.set(coarse_cell_of(x, ratio), true);
  });
  return solid;
}

InterfaceMasks interface_masks(const CellMask& solid) {
  const GridDesc& d = solid.desc();
  InterfaceMasks m{CellMask(d), CellMask(d)};
  for_each_cell(d, [&](const Coord& c) {
    const bool s = solid.test(c);
    for (const Coord& o : kFaceNeighbors) {
      const Coord nb = c + o;
      if (!d.contains(nb)) continue;
      if (s && !solid.test(nb)) m.inside.set(c, true);
      if (!s && solid.test(nb)) m.outside.set(c, true);
    }
  });
  return m;
}

ScalarGrid project_material_to_air(const ScalarGrid& fine, const GridDesc& air_desc, int ratio,
                                   const InterfaceMasks& masks, ProjectionMode mode) {
  GridDesc d = air_desc;
  d.background = 0.0;
  ScalarGrid out(d, 0.0);
  fine.for_each_active([&](const Coord& x, double v) {
    const Coord c = coarse_cell_of(x, ratio);
    if (!masks.inside.test(c)) return;
    if (!out.is_active(c) || v > out.get(c)) out.set(c, v);
  });
  for_each_cell(d, [&](const Coord& c) {
    if (!masks.outside.test(c)) return;
    double sum = 0.0;
    int n = 0;
    for (const Coord& o : kFaceNeighbors) {
      const Coord nb = c + o;
      if (masks.inside.test(nb) && out.is_active(nb)) {
        sum += out.get(nb);
        ++n;
      }
    }
    out.set(c, (mode == ProjectionMode::mean && n > 0) ? sum / n : sum);
  });
  return out;
}

std::vector<Coord> material_boundary_cells(const MaterialState& material) {
  std::vector<Coord> cells;
  material.I.for_each_active([&](const Coord& x, std::uint16_t) {
    for (const Coord& o : kFaceNeighbors)
      if (!material.I.is_active(x + o)) {
        cells.push_back(x);
        return;
      }
  });
  return cells;
}

ScalarGrid project_air_to_material(const ScalarGrid& coarse, const CellMask& solid, const InterfaceMasks& masks,
                                   const MaterialState& material, int ratio) {
  const GridDesc& cd = coarse.desc();
  const auto n_cells = cd.cell_count();
  std::vector<double> value(n_cells, 0.0);
  std::vector<std::uint8_t> valid(n_cells, 0);
  for_each_cell(cd, [&](const Coord& c) {
    const auto id = cd.linear_index(c);
    if (!solid.test(c)) {
      value[id] = coarse.get(c);
      valid[id] = 1;
    } else if (masks.inside.test(c)) {
      double sum = 0.0;
      int n = 0;
      for (const Coord& o : kFaceNeighbors) {
        const Coord nb = c + o;
        if (cd.contains(nb) && !solid.test(nb)) {
          sum += coarse.get(nb);
          ++n;
        }
      }
      if (n > 0) {
        value[id] = sum / n;
        valid[id] = 1;
      }
    }
  });

  GridDesc fd = material.desc();
  fd.background = 0.0;
  ScalarGrid out(fd, 0.0);
  for (const Coord& x : material_boundary_cells(material)) {
    const Vec3 q = cd.to_index_space(fd.world_pos(x));
    const int i0 = static_cast<int>(std::floor(q.x)), j0 = static_cast<int>(std::floor(q.y)),
              k0 = static_cast<int>(std::floor(q.z));
    const double fx = q.x - i0, fy = q.y - j0, fz = q.z - k0;
    double acc = 0.0, wsum = 0.0;
    for (int n = 0; n < 8; ++n) {
      const Coord c{std::clamp(i0 + (n & 1), 0, cd.resolution[0] - 1),
                    std::clamp(j0 + ((n >> 1) & 1), 0, cd.resolution[1] - 1),
                    std::clamp(k0 + ((n >> 2) & 1), 0, cd.resolution[2] - 1)};
      const auto id = cd.linear_index(c);
      if (!valid[id]) continue;
      const double w = ((n & 1) ? fx : 1.0 - fx) * (((n >> 1) & 1) ? fy : 1.0 - fy) * (((n >> 2) & 1) ? fz : 1.0 - fz);
      acc += w * value[id];
      wsum += w;
    }
    if (wsum > 1e-12) {
      out.set(x, acc / wsum);
    } else {
      const auto id = cd.linear_index(coarse_cell_of(x, ratio));
      if (valid[id]) out.set(x, value[id]);
    }
  }
  return out;
}

ExchangeResult exchange_heat(const ScalarGrid& T_a, const ScalarGrid& T_m, const ScalarGrid& T_m_on_air,
                             const ScalarGrid& T_a_on_material, const InterfaceMasks& masks, double phi_a,
                             double phi_m, double dt) {
  ExchangeResult r{T_a, T_m};
  for_each_cell(T_a.desc(), [&](const Coord& c) {
    if (!masks.outside.test(c) || !T_m_on_air.is_active(c)) return;
    const double ta = T_a.get(c);
    r.T_a.set(c, ta + dt * (T_m_on_air.get(c) - ta) * phi_a);
  });
  T_a_on_material.for_each_active([&](const Coord& x, double ta) {
    if (!T_m.is_active(x)) return;
    const double tm = T_m.get(x);
    r.T_m.set_active_value(x, tm + dt * (ta - tm) * phi_m);
  });
  return r;
}

void check_exchange_stability(double dt, double phi_a, double phi_m) {
  if (dt * std::max(phi_a, phi_m) >= 1.0) {
    std::ostringstream msg;
    msg << "heat exchange is unstable: dt * max(phi_a, phi_m) = " << dt * std::max(phi_a, phi_m) << " >= 1";
    throw ConfigError(msg.str());
  }
}

SmokeDistribution distribute_smoke_sources(const ScalarGrid& S_Sm, const GridDesc& air_desc, const CellMask& solid,
                                           int ratio) {
  GridDesc d = air_desc;
  d.background = 0.0;
  SmokeDistribution out{create_dense_grid(d, 0.0)};
  const double volume_ratio = 1.0 / (static_cast<double>(ratio) * ratio * ratio);
  std::vector<double> total(d.cell_count(), 0.0);
  std::vector<std::size_t> sources(d.cell_count(), 0);
  S_Sm.for_each_active([&](const Coord& x, double s) {
    if (s == 0.0) return;
    const auto id = d.linear_index(coarse_cell_of(x, ratio));
    total[id] += s * volume_ratio;
    ++sources[id];
  });
  for_each_cell(d, [&](const Coord& c) {
    const auto id = d.linear_index(c);
    if (sources[id] == 0) return;
    Coord open[6];
    int n = 0;
    for (const Coord& o : kFaceNeighbors) {
      const Coord nb = c + o;
      if (d.contains(nb) && !solid.test(nb)) open[n++] = nb;
    }
    if (n == 0) {
      out.dropped_sources += sources[id];
      out.dropped_amount += total[id];
      return;
    }
    const double share = total[id] / n;
    for (int m = 0; m < n; ++m) out.S_Sa.set_active_value(open[m], out.S_Sa.get(open[m]) + share);
  });
  return out;
}

}  // namespace flameforge
