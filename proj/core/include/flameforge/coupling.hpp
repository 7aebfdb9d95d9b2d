#pragma once

#include <cstddef>

#include "flameforge/grid.hpp"
#include "flameforge/material.hpp"

namespace flameforge {

enum class ProjectionMode { sum, mean };

/// Coarse cells on either side of the air/material interface (face adjacency).
struct InterfaceMasks {
  /// Solid cells with at least one non-solid face neighbour.
  CellMask inside;
  /// Non-solid cells with at least one solid face neighbour.
  CellMask outside;
};

/// Fine grid refining `coarse` by an integer factor; shares its origin.
GridDesc refine_desc(const GridDesc& coarse, int ratio, double background = 0.0);

inline Coord coarse_cell_of(const Coord& fine, int ratio) {
  return {fine.i / ratio, fine.j / ratio, fine.k / ratio};
}

/// A coarse cell is solid when any fine cell it overlaps keeps relative mass >= iso_threshold.
CellMask compute_solid_mask(const MaterialState& material, const GridDesc& air_desc, int ratio,
                            double iso_threshold);

InterfaceMasks interface_masks(const CellMask& solid);

/// Inside cells take the maximum of the active fine cells they overlap;
/// outside cells take the sum (or mean) of their face-adjacent inside values.
/// Other cells are inactive.
ScalarGrid project_material_to_air(const ScalarGrid& fine, const GridDesc& air_desc, int ratio,
                                   const InterfaceMasks& masks, ProjectionMode mode = ProjectionMode::sum);

/// Active fine cells with an inactive face neighbour.
std::vector<Coord> material_boundary_cells(const MaterialState& material);

/// Inside cells first take the mean of their face-adjacent air values; each
/// fine boundary cell then reads a trilinear blend restricted to air and
/// inside cells. Cells with no valid contributor stay inactive.
ScalarGrid project_air_to_material(const ScalarGrid& coarse, const CellMask& solid, const InterfaceMasks& masks,
                                   const MaterialState& material, int ratio);

struct ExchangeResult {
  ScalarGrid T_a;
  ScalarGrid T_m;
};

/// Explicit exchange from pre-step values: outside air cells move toward
/// `T_m_on_air` at rate phi_a, fine cells active in `T_a_on_material` move
/// toward it at rate phi_m.
ExchangeResult exchange_heat(const ScalarGrid& T_a, const ScalarGrid& T_m, const ScalarGrid& T_m_on_air,
                             const ScalarGrid& T_a_on_material, const InterfaceMasks& masks, double phi_a,
                             double phi_m, double dt);

/// Throws ConfigError when dt * max(phi_a, phi_m) >= 1.
void check_exchange_stability(double dt, double phi_a, double phi_m);

struct SmokeDistribution {
  ScalarGrid S_Sa;
  std::size_t dropped_sources = 0;
  double dropped_amount = 0.0;
};

/// Each fine source, scaled by the fine/coarse volume ratio, is shared equally
/// by the non-solid face neighbours of its coarse cell. Sources without any
/// such neighbour are dropped and counted.
SmokeDistribution distribute_smoke_sources(const ScalarGrid& S_Sm, const GridDesc& air_desc, const CellMask& solid,
                                           int ratio);

}  // namespace flameforge
