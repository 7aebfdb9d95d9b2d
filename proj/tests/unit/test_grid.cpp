#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "flameforge/error.hpp"
#include "flameforge/grid.hpp"
#include "flameforge/snapshot.hpp"

using namespace flameforge;

namespace {

GridDesc cube_desc(int n, double h = 0.1) {
  GridDesc d;
  d.resolution = {n, n, n};
  d.voxel_size = h;
  return d;
}

}  // namespace

TEST(Grid, BackgroundFillSamplesEverywhere) {
  const ScalarGrid g = create_grid(cube_desc(4), 293.0);
  EXPECT_EQ(g.active_count(), 0u);
  EXPECT_DOUBLE_EQ(sample_trilinear(g, {0.13, 0.27, 0.39}), 293.0);
  EXPECT_DOUBLE_EQ(sample_trilinear(g, {-5.0, 9.0, 0.2}), 293.0);
}

TEST(Grid, SingleCellGridStartsEmpty) {
  EXPECT_EQ(create_grid(cube_desc(1), 0.0).active_count(), 0u);
}

TEST(Grid, InvalidDescriptionsAreRejected) {
  GridDesc d = cube_desc(4);
  d.voxel_size = 0.0;
  EXPECT_THROW(create_grid(d, 0.0), ConfigError);
  d = cube_desc(4);
  d.resolution[1] = 0;
  EXPECT_THROW(create_grid(d, 0.0), ConfigError);
}

TEST(Grid, CellCenterSampleIsCellValue) {
  ScalarGrid g = create_grid(cube_desc(5), 0.0);
  g.set({2, 3, 1}, 7.5);
  EXPECT_DOUBLE_EQ(sample_trilinear(g, g.desc().world_pos({2, 3, 1})), 7.5);
}

TEST(Grid, MidpointBetweenCentersBlendsHalfAndHalf) {
  // Weight of each of the two centers at the midpoint is 1/2 along x and 1 along y and z.
  ScalarGrid g = create_dense_grid(cube_desc(4), 0.0);
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) g.set({2, j, k}, 1.0);
  const Vec3 a = g.desc().world_pos({1, 1, 1});
  const Vec3 b = g.desc().world_pos({2, 1, 1});
  EXPECT_NEAR(sample_trilinear(g, 0.5 * (a + b)), 0.5, 1e-15);
}

TEST(Grid, ConstantFieldPreservedAtRandomPoints) {
  const ScalarGrid g = create_dense_grid(cube_desc(7, 0.05), 3.25);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pos(-0.05, 0.4);
  for (int n = 0; n < 200; ++n) EXPECT_DOUBLE_EQ(sample_trilinear(g, {pos(rng), pos(rng), pos(rng)}), 3.25);
}

TEST(Grid, SparseAndDenseSamplesAgreeBitForBit) {
  // Cells left inactive in the sparse grid read its zero background, so both
  // grids describe the same field.
  const GridDesc d = cube_desc(10);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(-0.1, 1.1);
  ScalarGrid dense = create_dense_grid(d, 0.0);
  ScalarGrid sparse = create_grid(d, 0.0);
  for (std::size_t n = 0; n < d.cell_count(); ++n) {
    if (rng() % 3 != 0) continue;
    const double v = val(rng);
    dense.set(d.coord_of(n), v);
    sparse.set(d.coord_of(n), v);
  }
  EXPECT_LT(sparse.active_count(), dense.active_count());
  for (int n = 0; n < 500; ++n) {
    const Vec3 p{pos(rng), pos(rng), pos(rng)};
    EXPECT_EQ(sample_trilinear(sparse, p), sample_trilinear(dense, p));
  }
  for (std::size_t n = 0; n < d.cell_count(); ++n) {
    const Coord c = d.coord_of(n);
    EXPECT_NEAR(sample_trilinear(sparse, d.world_pos(c)), dense.get(c), 1e-15);
  }
}

TEST(Grid, DeactivateRestoresBackground) {
  ScalarGrid g = create_grid(cube_desc(9), -2.0);
  g.set({8, 0, 4}, 5.0);
  EXPECT_TRUE(g.is_active({8, 0, 4}));
  g.deactivate({8, 0, 4});
  EXPECT_FALSE(g.is_active({8, 0, 4}));
  EXPECT_DOUBLE_EQ(g.get({8, 0, 4}), -2.0);
  EXPECT_EQ(g.active_count(), 0u);
}

TEST(Grid, WritesOutsideDomainThrow) {
  ScalarGrid g = create_grid(cube_desc(3), 0.0);
  EXPECT_THROW(g.set({3, 0, 0}, 1.0), std::out_of_range);
  EXPECT_DOUBLE_EQ(g.get({-1, 0, 0}), 0.0);
}

TEST(Grid, CopiesAreDeep) {
  ScalarGrid a = create_grid(cube_desc(3), 0.0);
  a.set({1, 1, 1}, 1.0);
  ScalarGrid b = a;
  b.set({1, 1, 1}, 2.0);
  EXPECT_DOUBLE_EQ(a.get({1, 1, 1}), 1.0);
}

TEST(Velocity, ComponentsHaveOneExtraSampleAlongOwnAxis) {
  const MacVelocityField u(cube_desc(4), {1.0, 2.0, 3.0});
  EXPECT_EQ(u.component(0).size(), 5u * 4u * 4u);
  EXPECT_EQ(u.face_resolution(2)[2], 5);
}

TEST(Velocity, UniformAndZeroFields) {
  const MacVelocityField u(cube_desc(4), {1.0, 2.0, 3.0});
  const MacVelocityField z(cube_desc(4));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> pos(0.0, 0.4);
  for (int n = 0; n < 50; ++n) {
    const Vec3 p{pos(rng), pos(rng), pos(rng)};
    const Vec3 v = sample_velocity(u, p);
    EXPECT_DOUBLE_EQ(v.x, 1.0);
    EXPECT_DOUBLE_EQ(v.y, 2.0);
    EXPECT_DOUBLE_EQ(v.z, 3.0);
    EXPECT_EQ(sample_velocity(z, p), Vec3{});
  }
}

TEST(Velocity, FaceCenterReadsStoredValue) {
  MacVelocityField u(cube_desc(4));
  u.at(1, {2, 3, 1}) = 0.75;
  EXPECT_DOUBLE_EQ(u.sample(u.face_position(1, {2, 3, 1})).y, 0.75);
}

TEST(Snapshot, RoundTripPreservesActiveCells) {
  GridDesc d = cube_desc(6, 0.002);
  d.origin = {0.1, -0.2, 0.3};
  ScalarGrid g = create_grid(d, 0.0);
  g.set({0, 0, 0}, 293.0);
  g.set({5, 4, 3}, -1.5e-7);
  std::stringstream buf;
  write_snapshot(buf, g);
  const ScalarGrid r = read_snapshot(buf);
  EXPECT_EQ(r.desc().resolution, d.resolution);
  EXPECT_EQ(r.desc().voxel_size, d.voxel_size);
  EXPECT_EQ(r.desc().origin, d.origin);
  EXPECT_EQ(r.active_count(), 2u);
  EXPECT_TRUE(r == g);
  EXPECT_EQ(r.get({5, 4, 3}), -1.5e-7);
  EXPECT_EQ(r.get({0, 0, 0}), 293.0);
}

TEST(Snapshot, CorruptMagicIsReported) {
  std::stringstream buf("XXXXsome bytes that are not a grid");
  try {
    read_snapshot(buf);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("FFGD"), std::string::npos);
  }
}
