#include "flameforge/thermal_air.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace flameforge {

double radiative_increment(double T, double T_far, double gamma, double dt) {
  const double f = gamma * (T_far * T_far * T_far * T_far - T * T * T * T);
  const double m = std::max(T, T_far);
  const double stiffness = dt * gamma * m * m * m;
  if (stiffness <= 0.1) return dt * f;
  return dt * f / (1.0 + 4.0 * stiffness);
}

ScalarGrid apply_air_heat_terms(const ScalarGrid& T_a, const ScalarGrid* S_Ta, const EnvironmentConfig& env,
                                double dt, const AirHeatOptions& options) {
  const GridDesc& d = T_a.desc();
  const double h = d.voxel_size;
  const double s = env.k * dt / (h * h);
  const double T_far = options.T_far > 0.0 ? options.T_far : env.T_amb;
  const CellMask* solid = options.solid;
  const auto blocked = [&](const Coord& c) { return !d.contains(c) || (solid && solid->test(c)); };

  ScalarGrid out = T_a;
  const auto& r = d.resolution;
  parallel_for(0, r[2], [&](std::int64_t kk) {
    const int k = static_cast<int>(kk);
    for (int j = 0; j < r[1]; ++j)
      for (int i = 0; i < r[0]; ++i) {
        const Coord c{i, j, k};
        if (solid && solid->test(c)) continue;
        const double t = T_a.get(c);
        double lap = 0.0;
        for (const Coord& o : kFaceNeighbors) {
          const Coord nb = c + o;
          if (!blocked(nb)) lap += T_a.get(nb) - t;
        }
        double next = t + s * lap + radiative_increment(t, T_far, env.gamma_a, dt);
        if (S_Ta) next += dt * S_Ta->get(c);
        out.set_active_value(c, std::max(next, 1.0));
      }
  });
  return out;
}

ScalarGrid step_air_temperature(const ScalarGrid& T_a, const MacVelocityField& u, const ScalarGrid* S_Ta,
                                const EnvironmentConfig& env, double dt, const AirHeatOptions& options) {
  return apply_air_heat_terms(advect_maccormack(T_a, u, dt), S_Ta, env, dt, options);
}

ScalarGrid step_smoke(const ScalarGrid& S, const MacVelocityField& u, const ScalarGrid* S_Sa, double dt) {
  return step_smoke(S, Advector(u, dt), S_Sa, dt);
}

ScalarGrid step_smoke(const ScalarGrid& S, const Advector& advector, const ScalarGrid* S_Sa, double dt) {
  ScalarGrid out = advector.maccormack(S);
  const auto& r = out.desc().resolution;
  for (int k = 0; k < r[2]; ++k)
    for (int j = 0; j < r[1]; ++j)
      for (int i = 0; i < r[0]; ++i) {
        const Coord c{i, j, k};
        double v = out.get(c);
        if (S_Sa) v += dt * S_Sa->get(c);
        out.set(c, std::max(v, 0.0));
      }
  return out;
}

void extrapolate_into_solid(ScalarGrid& field, const CellMask& solid, double fallback) {
  const GridDesc& d = field.desc();
  std::vector<Coord> pending;
  const auto& r = d.resolution;
  for (int k = 0; k < r[2]; ++k)
    for (int j = 0; j < r[1]; ++j)
      for (int i = 0; i < r[0]; ++i)
        if (solid.test({i, j, k})) pending.push_back({i, j, k});
  if (pending.empty()) return;

  CellMask known(d);
  for (int k = 0; k < r[2]; ++k)
    for (int j = 0; j < r[1]; ++j)
      for (int i = 0; i < r[0]; ++i) known.set({i, j, k}, !solid.test({i, j, k}));

  std::vector<std::pair<Coord, double>> layer;
  while (!pending.empty()) {
    layer.clear();
    std::vector<Coord> rest;
    for (const Coord& c : pending) {
      double sum = 0.0;
      int n = 0;
      for (const Coord& o : kFaceNeighbors) {
        const Coord nb = c + o;
        if (known.test(nb)) {
          sum += field.get(nb);
          ++n;
        }
      }
      if (n > 0) {
        layer.emplace_back(c, sum / n);
      } else {
        rest.push_back(c);
      }
    }
    if (layer.empty()) {
      for (const Coord& c : rest) field.set(c, fallback);
      return;
    }
    for (const auto& [c, v] : layer) {
      field.set(c, v);
      known.set(c, true);
    }
    pending.swap(rest);
  }
}

}  // namespace flameforge
