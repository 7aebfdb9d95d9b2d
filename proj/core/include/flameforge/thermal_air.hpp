#pragma once

#include "flameforge/fluid.hpp"

namespace flameforge {

/// Radiative change over dt for dT/dt = gamma (T_far^4 - T^4). Switches to a
/// linearized implicit update when dt * gamma * max(T, T_far)^3 > 0.1, which
/// never crosses T_far.
double radiative_increment(double T, double T_far, double gamma, double dt);

struct AirHeatOptions {
  /// Cells excluded from the update; they also act as insulating walls.
  const CellMask* solid = nullptr;
  /// Far-field temperature; env.T_amb when unset (<= 0).
  double T_far = 0.0;
};

/// T_a + dt * (k lap T_a + radiation + S_Ta) with zero-gradient walls and a
/// 1 K floor. `S_Ta` may be null.
ScalarGrid apply_air_heat_terms(const ScalarGrid& T_a, const ScalarGrid* S_Ta, const EnvironmentConfig& env,
                                double dt, const AirHeatOptions& options = {});

/// Advects T_a by u, then applies the heat terms.
ScalarGrid step_air_temperature(const ScalarGrid& T_a, const MacVelocityField& u, const ScalarGrid* S_Ta,
                                const EnvironmentConfig& env, double dt, const AirHeatOptions& options = {});

/// Advects smoke and adds dt * S_Sa, clamped at zero. `S_Sa` may be null.
ScalarGrid step_smoke(const ScalarGrid& S, const MacVelocityField& u, const ScalarGrid* S_Sa, double dt);
/// Same, reusing the departure points of `advector`, which must step by `dt`.
ScalarGrid step_smoke(const ScalarGrid& S, const Advector& advector, const ScalarGrid* S_Sa, double dt);

/// Overwrites solid cells with the mean of their non-solid face neighbours,
/// repeated layer by layer inward, so advection near walls only sees air values.
void extrapolate_into_solid(ScalarGrid& field, const CellMask& solid, double fallback);

}  // namespace flameforge
