#include <gtest/gtest.h>

#include <cmath>

#include "flameforge/thermal_air.hpp"

using namespace flameforge;

namespace {

GridDesc cube_desc(int n, double h) {
  GridDesc d;
  d.resolution = {n, n, n};
  d.voxel_size = h;
  return d;
}

double total(const ScalarGrid& g) {
  double s = 0.0;
  g.for_each_active([&](const Coord&, double v) { s += v; });
  return s;
}

}  // namespace

TEST(AirHeat, AmbientIsFixedPoint) {
  const GridDesc d = cube_desc(6, 0.004);
  EnvironmentConfig env;
  const ScalarGrid t = create_dense_grid(d, env.T_amb);
  EXPECT_TRUE(step_air_temperature(t, MacVelocityField(d), nullptr, env, 0.033) == t);
}

TEST(AirHeat, HotSpotCoolsAtStefanBoltzmannRate) {
  // gamma_a (293^4 - 1000^4) = 5.0e-11 * -9.926e11 = -49.6 K/s.
  EnvironmentConfig env;
  env.k = 0.0;
  const double expected = env.gamma_a * (std::pow(293.0, 4) - std::pow(1000.0, 4));
  EXPECT_NEAR(expected, -49.6, 0.05);
  const double dt = 1.0e-4;  // dt gamma T^3 = 5e-6, explicit branch
  EXPECT_NEAR(radiative_increment(1000.0, 293.0, env.gamma_a, dt) / dt, expected, 1e-9 * std::abs(expected));
  const GridDesc d = cube_desc(3, 0.01);
  ScalarGrid t = create_dense_grid(d, env.T_amb);
  t.set({1, 1, 1}, 1000.0);
  const ScalarGrid next = apply_air_heat_terms(t, nullptr, env, dt);
  EXPECT_NEAR((next.get({1, 1, 1}) - 1000.0) / dt, expected, 1e-6 * std::abs(expected));
}

TEST(AirHeat, RadiationIsMonotoneAndNeverCrossesAmbient) {
  EnvironmentConfig env;
  for (double dt : {0.001, 0.033, 1.0, 100.0}) {
    for (double t0 : {310.0, 1500.0, 5000.0, 250.0, 50.0}) {
      double t = t0;
      for (int s = 0; s < 200; ++s) {
        const double next = t + radiative_increment(t, env.T_amb, env.gamma_a, dt);
        if (t0 > env.T_amb) {
          EXPECT_LE(next, t);
          EXPECT_GE(next, env.T_amb);
        } else {
          EXPECT_GE(next, t);
          EXPECT_LE(next, env.T_amb);
        }
        t = next;
      }
    }
  }
}

TEST(AirHeat, UniformSourceRaisesTemperature) {
  const GridDesc d = cube_desc(4, 0.01);
  EnvironmentConfig env;
  ScalarGrid t = create_dense_grid(d, env.T_amb);
  const ScalarGrid src = create_dense_grid(d, 10.0);
  const double dt = 0.01;
  for (int s = 0; s < 100; ++s) t = apply_air_heat_terms(t, &src, env, dt);
  t.for_each_active([&](const Coord&, double v) {
    EXPECT_LT(v, env.T_amb + 10.0);
    EXPECT_GT(v, env.T_amb + 9.9);
  });
}

TEST(AirHeat, SolidCellsAreLeftAlone) {
  const GridDesc d = cube_desc(4, 0.01);
  EnvironmentConfig env;
  ScalarGrid t = create_dense_grid(d, env.T_amb);
  t.set({1, 1, 1}, 900.0);
  CellMask solid(d);
  solid.set({1, 1, 1}, true);
  AirHeatOptions o;
  o.solid = &solid;
  const ScalarGrid next = apply_air_heat_terms(t, nullptr, env, 0.033, o);
  EXPECT_EQ(next.get({1, 1, 1}), 900.0);
  EXPECT_EQ(next.get({2, 1, 1}), env.T_amb);
}

TEST(Smoke, StillAirWithoutSourcesIsUnchanged) {
  const GridDesc d = cube_desc(5, 0.01);
  ScalarGrid s = create_dense_grid(d, 0.0);
  s.set({2, 2, 2}, 0.4);
  EXPECT_TRUE(step_smoke(s, MacVelocityField(d), nullptr, 0.033) == s);
}

TEST(Smoke, SourceAddsDtTimesRate) {
  const GridDesc d = cube_desc(5, 0.01);
  const ScalarGrid s = create_dense_grid(d, 0.0);
  ScalarGrid src = create_dense_grid(d, 0.0);
  src.set({1, 2, 3}, 2.5);
  const ScalarGrid next = step_smoke(s, MacVelocityField(d), &src, 0.1);
  EXPECT_DOUBLE_EQ(next.get({1, 2, 3}), 0.25);
  EXPECT_EQ(next.get({2, 2, 3}), 0.0);
}

TEST(Smoke, BlobMassConservedOverTenVoxels) {
  const int n = 40;
  const double h = 1.0 / n;
  GridDesc d;
  d.resolution = {n, 20, 20};
  d.voxel_size = h;
  ScalarGrid s = create_dense_grid(d, 0.0);
  const Vec3 c0{12.5 * h, 10.0 * h, 10.0 * h};
  for (std::size_t m = 0; m < d.cell_count(); ++m) {
    const Coord c = d.coord_of(m);
    const Vec3 p = d.world_pos(c) - c0;
    s.set(c, std::exp(-dot(p, p) / (2 * 9 * h * h)));
  }
  const double before = total(s);
  const MacVelocityField u(d, {1.0, 0.0, 0.0});
  for (int k = 0; k < 20; ++k) s = step_smoke(s, u, nullptr, 0.5 * h);
  EXPECT_NEAR(total(s), before, 0.02 * before);
  s.for_each_active([](const Coord&, double v) { EXPECT_GE(v, 0.0); });
}

TEST(Extrapolation, SolidCellsTakeNeighbourMean) {
  const GridDesc d = cube_desc(5, 0.01);
  ScalarGrid t = create_dense_grid(d, 300.0);
  t.set({1, 2, 2}, 400.0);
  t.set({2, 2, 2}, 9999.0);
  CellMask solid(d);
  solid.set({2, 2, 2}, true);
  extrapolate_into_solid(t, solid, 293.0);
  EXPECT_NEAR(t.get({2, 2, 2}), (400.0 + 5 * 300.0) / 6.0, 1e-12);
}
