#include "flameforge/material.hpp"

#include <algorithm>
#include <cmath>

#include "flameforge/thermal_air.hpp"

namespace flameforge {

double MaterialState::relative_mass(const Coord& c) const {
  if (!is_active(c)) return 0.0;
  return (M_v.get(c) + M_c.get(c)) / props(c).initial_total_mass();
}

double reaction_rate(double T_m, double T_m0, double T_m1) {
  if (!std::isfinite(T_m0) || T_m <= T_m0) return 0.0;
  if (T_m >= T_m1) return 1.0;
  const double x = (T_m - T_m0) / (T_m1 - T_m0);
  return x * x * (3.0 - 2.0 * x);
}

double char_insulation(double h, double c_min, double c_r) {
  return c_min + (1.0 - c_min) * std::exp(-std::max(h, 0.0) * c_r);
}

CellCombustion combust_cell(double M_v, double M_c, double T_m, double c, const MaterialProperties& props,
                            double dt) {
  const double xi = reaction_rate(T_m, props.ignition_threshold(), props.T_m1);
  if (xi == 0.0) return {M_v, M_c, 0.0, 0.0};
  const double rate = c * xi;
  const double mv = std::max(0.0, M_v - dt * props.eps_v * rate);
  const double mc = props.charring ? std::max(0.0, M_c - dt * props.eps_c * rate) : M_c;
  return {mv, mc, (mv - M_v) / dt, (mc - M_c) / dt};
}

CellSources combustion_sources(double dMv_dt, double dMc_dt, const MaterialProperties& props) {
  return {-props.T_Mc * dMc_dt - props.T_Mv * dMv_dt, -props.S_Mc * dMc_dt - props.S_Mv * dMv_dt};
}

CombustionResult combust(const MaterialState& state, const ScalarGrid* c, double dt) {
  CombustionResult r{state.M_v, state.M_c, state.M_v.same_topology(0.0, 0.0), state.M_v.same_topology(0.0, 0.0)};
  state.I.parallel_for_each_active([&](const Coord& x, std::uint16_t idx) {
    const CellCombustion out = combust_cell(state.M_v.get(x), state.M_c.get(x), state.T_m.get(x),
                                            c ? c->get(x) : 1.0, state.materials[idx], dt);
    r.M_v.set_active_value(x, out.M_v);
    r.M_c.set_active_value(x, out.M_c);
    r.dMv_dt.set_active_value(x, out.dMv_dt);
    r.dMc_dt.set_active_value(x, out.dMc_dt);
  });
  return r;
}

SourceFields combustion_sources(const MaterialState& state, const ScalarGrid& dMv_dt, const ScalarGrid& dMc_dt) {
  SourceFields f{state.M_v.same_topology(0.0, 0.0), state.M_v.same_topology(0.0, 0.0)};
  state.I.parallel_for_each_active([&](const Coord& x, std::uint16_t idx) {
    const CellSources s = combustion_sources(dMv_dt.get(x), dMc_dt.get(x), state.materials[idx]);
    f.S_Tm.set_active_value(x, s.S_Tm);
    f.S_Sm.set_active_value(x, s.S_Sm);
  });
  return f;
}

ScalarGrid insulation_field(const MaterialState& state, const Sdf& sdf, bool enabled) {
  ScalarGrid c = state.M_v.same_topology(1.0, 1.0);
  if (!enabled || sdf.empty) return c;
  state.I.parallel_for_each_active([&](const Coord& x, std::uint16_t idx) {
    const MaterialProperties& p = state.materials[idx];
    if (p.charring) c.set_active_value(x, char_insulation(query_depth(sdf, x), p.c_min, p.c_r));
  });
  return c;
}

ScalarGrid step_material_temperature(const MaterialState& state, const ScalarGrid* S_Tm, double T_far,
                                     double dt) {
  ScalarGrid out = state.T_m;
  const double h = state.desc().voxel_size;
  const double inv_h2 = 1.0 / (h * h);
  state.I.parallel_for_each_active([&](const Coord& x, std::uint16_t idx) {
    const MaterialProperties& p = state.materials[idx];
    const double t = state.T_m.get(x);
    double lap = 0.0;
    for (const Coord& o : kFaceNeighbors) {
      const Coord nb = x + o;
      if (state.I.is_active(nb)) lap += state.T_m.get(nb) - t;
    }
    double next = t + dt * p.beta * lap * inv_h2 + radiative_increment(t, T_far, p.gamma_m, dt);
    if (S_Tm) next += dt * S_Tm->get(x);
    out.set_active_value(x, std::max(next, 1.0));
  });
  return out;
}

std::size_t deactivate_burned_out(MaterialState& state, double iso_threshold) {
  std::vector<Coord> gone;
  state.I.for_each_active([&](const Coord& x, std::uint16_t) {
    if (state.relative_mass(x) < iso_threshold) gone.push_back(x);
  });
  for (const Coord& x : gone) {
    state.I.deactivate(x);
    state.T_m.deactivate(x);
    state.M_v.deactivate(x);
    state.M_c.deactivate(x);
  }
  return gone.size();
}

ScalarGrid occupancy(const MaterialState& state) {
  GridDesc d = state.desc();
  d.background = 0.0;
  ScalarGrid occ(d, 0.0);
  state.I.for_each_active([&](const Coord& x, std::uint16_t) { occ.set(x, 1.0); });
  return occ;
}

double total_mass(const MaterialState& state) {
  std::vector<double> values;
  values.reserve(state.active_count());
  state.I.for_each_active([&](const Coord& x, std::uint16_t) { values.push_back(state.M_v.get(x) + state.M_c.get(x)); });
  return deterministic_sum(values);
}

}  // namespace flameforge
