#pragma once

#include <cstdint>
#include <vector>

#include "flameforge/grid.hpp"
#include "flameforge/properties.hpp"
#include "flameforge/sdf.hpp"

namespace flameforge {

/// Fine-grid material fields. A cell holds material while it is active in I;
/// T_m, M_v and M_c share that active set.
struct MaterialState {
  ScalarGrid T_m;
  ScalarGrid M_v;
  ScalarGrid M_c;
  /// Index into `materials`.
  IndexGrid I;
  /// Object index of every initially filled cell; never shrinks.
  IndexGrid object;
  std::vector<MaterialProperties> materials;

  const GridDesc& desc() const { return T_m.desc(); }
  bool is_active(const Coord& c) const { return I.is_active(c); }
  std::size_t active_count() const { return I.active_count(); }
  const MaterialProperties& props(const Coord& c) const { return materials[I.get(c)]; }
  /// (M_v + M_c) relative to the cell's initial total, in [0, 1].
  double relative_mass(const Coord& c) const;
};

/// 0 below T_m0, 1 above T_m1, smoothstep 3x^2 - 2x^3 in between.
/// An infinite T_m0 (non-combustible) always yields 0.
double reaction_rate(double T_m, double T_m0, double T_m1);

/// c = c_min + (1 - c_min) exp(-h c_r).
double char_insulation(double h, double c_min, double c_r);

struct CellCombustion {
  double M_v;
  double M_c;
  double dMv_dt;
  double dMc_dt;
};

/// Clamped explicit mass loss of one cell.
CellCombustion combust_cell(double M_v, double M_c, double T_m, double c, const MaterialProperties& props,
                            double dt);

struct CellSources {
  double S_Tm;  // K/s
  double S_Sm;  // 1/s
};

CellSources combustion_sources(double dMv_dt, double dMc_dt, const MaterialProperties& props);

struct CombustionResult {
  ScalarGrid M_v;
  ScalarGrid M_c;
  ScalarGrid dMv_dt;
  ScalarGrid dMc_dt;
};

/// Applies combust_cell to every active cell. `c` null means c = 1.
CombustionResult combust(const MaterialState& state, const ScalarGrid* c, double dt);

struct SourceFields {
  ScalarGrid S_Tm;
  ScalarGrid S_Sm;
};

SourceFields combustion_sources(const MaterialState& state, const ScalarGrid& dMv_dt, const ScalarGrid& dMc_dt);

/// Insulation per active cell from the SDF depth for charring materials;
/// 1 for non-charring materials or when `enabled` is false.
ScalarGrid insulation_field(const MaterialState& state, const Sdf& sdf, bool enabled);

/// T_m + dt * (beta lap T_m + radiation + S_Tm). The Laplacian only couples
/// active cells, so the material surface is insulated here.
ScalarGrid step_material_temperature(const MaterialState& state, const ScalarGrid* S_Tm, double T_far,
                                     double dt);

/// Removes cells whose relative mass fell below `iso_threshold`; returns how many.
std::size_t deactivate_burned_out(MaterialState& state, double iso_threshold);

/// Active cells as occupancy 1 for SDF construction.
ScalarGrid occupancy(const MaterialState& state);

/// Sum of M_v + M_c over active cells in a fixed order.
double total_mass(const MaterialState& state);

}  // namespace flameforge
