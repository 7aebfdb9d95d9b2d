#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "flameforge/material.hpp"

using namespace flameforge;

namespace {

MaterialState rod_state(int n, double h, double T0) {
  GridDesc d;
  d.resolution = {n, 1, 1};
  d.voxel_size = h;
  d.background = 293.0;
  MaterialState m;
  m.T_m = create_grid(d, 293.0);
  m.M_v = create_grid(d, 0.0);
  m.M_c = create_grid(d, 0.0);
  m.I = IndexGrid(d, 0);
  m.object = IndexGrid(d, 0);
  m.materials.push_back(MaterialProperties{});
  for (int i = 0; i < n; ++i) {
    m.T_m.set({i, 0, 0}, T0);
    m.M_v.set({i, 0, 0}, 1.0);
    m.M_c.set({i, 0, 0}, 1.0);
    m.I.set({i, 0, 0}, 0);
    m.object.set({i, 0, 0}, 0);
  }
  return m;
}

}  // namespace

TEST(ReactionRate, ClosedFormPoints) {
  const double t0 = 423.15, t1 = 723.15;
  EXPECT_EQ(reaction_rate(t0, t0, t1), 0.0);
  EXPECT_EQ(reaction_rate(t1, t0, t1), 1.0);
  EXPECT_NEAR(reaction_rate(0.5 * (t0 + t1), t0, t1), 0.5, 1e-12);
  EXPECT_EQ(reaction_rate(200.0, t0, t1), 0.0);
  EXPECT_EQ(reaction_rate(5000.0, t0, t1), 1.0);
  EXPECT_EQ(reaction_rate(1.0e9, std::numeric_limits<double>::infinity(), t1), 0.0);
}

TEST(ReactionRate, SmoothAtBothEnds) {
  // f'(0) = f'(1) = 0, so the change over delta is O(delta^2) there.
  const double t0 = 400.0, t1 = 700.0;
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    EXPECT_LE(std::abs(reaction_rate(t0 + delta, t0, t1) - reaction_rate(t0, t0, t1)), 4.0 * delta * delta / 9e4);
    EXPECT_LE(std::abs(reaction_rate(t1 - delta, t0, t1) - reaction_rate(t1, t0, t1)), 4.0 * delta * delta / 9e4);
  }
  // Lipschitz with constant 1.5 / (t1 - t0) everywhere.
  for (double t = 350.0; t < 750.0; t += 0.37)
    EXPECT_LE(std::abs(reaction_rate(t + 0.01, t0, t1) - reaction_rate(t, t0, t1)), 1.5 / 300.0 * 0.01 + 1e-15);
}

TEST(Insulation, ClosedForm) {
  EXPECT_EQ(char_insulation(0.0, 0.1, 75.0), 1.0);
  EXPECT_NEAR(char_insulation(1.0e3, 0.1, 75.0), 0.1, 1e-15);
  EXPECT_NEAR(char_insulation(0.02, 0.1, 75.0), 0.1 + 0.9 * std::exp(-1.5), 1e-15);
  EXPECT_NEAR(char_insulation(0.02, 0.1, 75.0), 0.3008, 5e-5);
}

TEST(Insulation, BoundedAndDecreasing) {
  double prev = 2.0;
  for (double h = 0.0; h < 0.2; h += 0.001) {
    const double c = char_insulation(h, 0.1, 75.0);
    EXPECT_GE(c, 0.1);
    EXPECT_LE(c, 1.0);
    EXPECT_LT(c, prev);
    prev = c;
  }
}

TEST(Combustion, BelowThresholdNothingHappens) {
  const MaterialProperties p;
  const CellCombustion r = combust_cell(1.0, 1.0, 400.0, 1.0, p, 0.1);
  EXPECT_EQ(r.M_v, 1.0);
  EXPECT_EQ(r.M_c, 1.0);
  EXPECT_EQ(r.dMv_dt, 0.0);
}

TEST(Combustion, OneEulerStep) {
  MaterialProperties p;
  p.eps_v = 0.1;
  const CellCombustion r = combust_cell(1.0, 1.0, 2000.0, 1.0, p, 0.1);
  EXPECT_NEAR(r.M_v, 0.99, 1e-15);
  EXPECT_NEAR(r.dMv_dt, -0.1, 1e-12);
  EXPECT_NEAR(r.M_c, 1.0 - 0.1 * p.eps_c, 1e-15);
}

TEST(Combustion, ClampsAtZero) {
  const MaterialProperties p;
  const CellCombustion r = combust_cell(0.0, 1e-6, 2000.0, 1.0, p, 1.0);
  EXPECT_EQ(r.M_v, 0.0);
  EXPECT_EQ(r.M_c, 0.0);
  EXPECT_EQ(r.dMv_dt, 0.0);
  EXPECT_NEAR(r.dMc_dt, -1e-6, 1e-18);
}

TEST(Combustion, NonCharringKeepsCharAndStoneIsInert) {
  MaterialProperties p = *material_preset("pmma");
  EXPECT_FALSE(p.charring);
  EXPECT_EQ(combust_cell(1.0, 0.0, 2000.0, 1.0, p, 0.1).M_c, 0.0);
  const MaterialProperties stone = *material_preset("stone");
  const CellCombustion s = combust_cell(1.0, 0.0, 1.0e5, 1.0, stone, 0.1);
  EXPECT_EQ(s.M_v, 1.0);
  EXPECT_EQ(s.dMv_dt, 0.0);
}

TEST(Combustion, MassesStayBoundedAndNonIncreasing) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> temp(200.0, 3000.0), c(0.1, 1.0), dt(0.001, 2.0);
  const MaterialProperties p;
  double mv = 1.0, mc = 1.0;
  for (int n = 0; n < 2000; ++n) {
    const CellCombustion r = combust_cell(mv, mc, temp(rng), c(rng), p, dt(rng));
    EXPECT_LE(r.M_v, mv);
    EXPECT_LE(r.M_c, mc);
    EXPECT_GE(r.M_v, 0.0);
    EXPECT_GE(r.M_c, 0.0);
    const CellSources s = combustion_sources(r.dMv_dt, r.dMc_dt, p);
    EXPECT_GE(s.S_Tm, 0.0);
    EXPECT_GE(s.S_Sm, 0.0);
    mv = r.M_v;
    mc = r.M_c;
  }
}

TEST(Sources, TableRates) {
  const MaterialProperties p;
  EXPECT_EQ(combustion_sources(0.0, 0.0, p).S_Tm, 0.0);
  EXPECT_EQ(combustion_sources(0.0, 0.0, p).S_Sm, 0.0);
  EXPECT_NEAR(combustion_sources(-0.1, 0.0, p).S_Tm, 2.0e6, 1e-6);
  EXPECT_NEAR(combustion_sources(0.0, -1e-4, p).S_Sm, 0.1, 1e-15);
}

TEST(MaterialTemperature, AmbientIsStationary) {
  const MaterialState m = rod_state(10, 0.001, 293.0);
  const ScalarGrid t = step_material_temperature(m, nullptr, 293.0, 0.033);
  EXPECT_TRUE(t == m.T_m);
}

TEST(MaterialTemperature, IsolatedHotCellRadiates) {
  // gamma_m (293^4 - 800^4) = 5.9e-14 * -4.022e11 = -0.0237 K/s.
  MaterialState m = rod_state(1, 0.001, 800.0);
  m.materials[0].beta = 0.0;
  const double dt = 0.5;
  const double rate = (step_material_temperature(m, nullptr, 293.0, dt).get({0, 0, 0}) - 800.0) / dt;
  const double expected = 5.9e-14 * (std::pow(293.0, 4) - std::pow(800.0, 4));
  EXPECT_NEAR(expected, -0.024, 5e-4);
  EXPECT_NEAR(rate, expected, 1e-9);
}

TEST(MaterialTemperature, RodApproachesDiscreteSteadyState) {
  // Ends held at 800 K and 300 K; the steady state of the discrete Laplacian
  // with Dirichlet ends is linear. Oracle: Thomas algorithm on the tridiagonal system.
  const int n = 12;
  MaterialState m = rod_state(n, 0.001, 293.0);
  m.materials[0].beta = 1.0e-7;
  m.materials[0].gamma_m = 0.0;
  const double dt = 0.001 * 0.001 / (6 * 1.0e-7) * 0.9;
  const int interior = n - 2;
  std::vector<double> a(interior, -1.0), b(interior, 2.0), c(interior, -1.0), r(interior, 0.0);
  r.front() = 800.0;
  r.back() = 300.0;
  for (int i = 1; i < interior; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    r[i] -= w * r[i - 1];
  }
  std::vector<double> x(interior);
  x.back() = r.back() / b.back();
  for (int i = interior - 2; i >= 0; --i) x[i] = (r[i] - c[i] * x[i + 1]) / b[i];

  for (int s = 0; s < 20000; ++s) {
    m.T_m.set({0, 0, 0}, 800.0);
    m.T_m.set({n - 1, 0, 0}, 300.0);
    m.T_m = step_material_temperature(m, nullptr, 293.0, dt);
  }
  for (int i = 1; i < n - 1; ++i) {
    EXPECT_NEAR(m.T_m.get({i, 0, 0}), x[i - 1], 0.5);
    EXPECT_NEAR(x[i - 1], 800.0 - 500.0 * i / (n - 1), 1e-9);
  }
}

TEST(MaterialTemperature, SurfaceIsInsulated) {
  MaterialState m = rod_state(3, 0.001, 500.0);
  m.materials[0].gamma_m = 0.0;
  const ScalarGrid t = step_material_temperature(m, nullptr, 293.0, 0.033);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(t.get({i, 0, 0}), 500.0);
}

TEST(BurnOut, CellsBelowIsoAreRemoved) {
  MaterialState m = rod_state(4, 0.001, 293.0);
  m.M_v.set({1, 0, 0}, 0.0);
  m.M_c.set({1, 0, 0}, 0.09);  // relative mass 0.045
  m.M_v.set({2, 0, 0}, 0.05);
  m.M_c.set({2, 0, 0}, 0.06);  // 0.055, survives
  EXPECT_EQ(deactivate_burned_out(m, 0.05), 1u);
  EXPECT_FALSE(m.is_active({1, 0, 0}));
  EXPECT_FALSE(m.T_m.is_active({1, 0, 0}));
  EXPECT_TRUE(m.is_active({2, 0, 0}));
  EXPECT_EQ(occupancy(m).active_count(), 3u);
  EXPECT_NEAR(total_mass(m), 2.0 + 0.11 + 2.0, 1e-12);
}
