#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flameforge/error.hpp"
#include "flameforge/sdf.hpp"
#include "sdf_oracle.hpp"

using namespace flameforge;

namespace {

GridDesc cube_desc(int n, double h) {
  GridDesc d;
  d.resolution = {n, n, n};
  d.voxel_size = h;
  return d;
}

ScalarGrid box_occupancy(const GridDesc& d, Coord lo, Coord hi) {
  ScalarGrid g = create_grid(d, 0.0);
  for (int k = lo.k; k <= hi.k; ++k)
    for (int j = lo.j; j <= hi.j; ++j)
      for (int i = lo.i; i <= hi.i; ++i) g.set({i, j, k}, 1.0);
  return g;
}

double max_oracle_error(const ScalarGrid& occ, const Sdf& sdf) {
  const std::vector<double> exact = oracle::brute_force_sdf(occ);
  const GridDesc& d = occ.desc();
  double worst = 0.0;
  for (std::size_t n = 0; n < d.cell_count(); ++n) worst = std::max(worst, std::abs(sdf.at(d.coord_of(n)) - exact[n]));
  return worst;
}

SdfOptions whole_grid() {
  SdfOptions o;
  o.margin = -1;
  return o;
}

}  // namespace

TEST(Sdf, HalfSpaceIsPlanarDistance) {
  // Material ends at the domain edge, which is surface too; outside the
  // material only the plane at x0 matters.
  const GridDesc d = cube_desc(16, 0.01);
  const ScalarGrid occ = box_occupancy(d, {0, 0, 0}, {6, 15, 15});
  const Sdf s = rebuild_sdf(occ, 0.5, whole_grid());
  const double x0 = 7 * d.voxel_size;
  for (int i = 0; i < 16; ++i) {
    const double x = d.world_pos({i, 8, 8}).x;
    const double expected = x > x0 ? x - x0 : -std::min(x0 - x, x);
    EXPECT_NEAR(s.at({i, 8, 8}), expected, d.voxel_size);
  }
  for (int i = 7; i < 16; ++i) EXPECT_NEAR(s.at({i, 3, 11}), d.world_pos({i, 3, 11}).x - x0, d.voxel_size);
}

TEST(Sdf, SingleCellMatchesBruteForce) {
  const GridDesc d = cube_desc(16, 0.01);
  const ScalarGrid occ = box_occupancy(d, {7, 8, 6}, {7, 8, 6});
  const Sdf s = rebuild_sdf(occ, 0.5, whole_grid());
  EXPECT_FALSE(s.empty);
  EXPECT_LE(max_oracle_error(occ, s), d.voxel_size);
}

TEST(Sdf, RandomPatternsMatchBruteForce) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 8 + trial;
    const GridDesc d = cube_desc(n, 0.5);
    ScalarGrid occ = create_grid(d, 0.0);
    std::bernoulli_distribution fill(0.1 + 0.1 * trial);
    for (std::size_t c = 0; c < d.cell_count(); ++c)
      if (fill(rng)) occ.set(d.coord_of(c), 1.0);
    const Sdf s = rebuild_sdf(occ, 0.5, whole_grid());
    EXPECT_LE(max_oracle_error(occ, s), d.voxel_size) << "trial " << trial;
  }
}

TEST(Sdf, EmptyMaterialIsFlagged) {
  const Sdf s = rebuild_sdf(create_grid(cube_desc(8, 0.1), 0.0), 0.5);
  EXPECT_TRUE(s.empty);
  EXPECT_EQ(s.at({3, 3, 3}), kSdfFar);
  EXPECT_EQ(query_depth(s, {3, 3, 3}), 0.0);
}

TEST(Sdf, IsoThresholdOutsideUnitIntervalIsRejected) {
  const ScalarGrid occ = create_grid(cube_desc(4, 0.1), 0.0);
  EXPECT_THROW(rebuild_sdf(occ, 0.0), ConfigError);
  EXPECT_THROW(rebuild_sdf(occ, 1.0), ConfigError);
}

TEST(Sdf, SignConventionAndLipschitzBound) {
  const GridDesc d = cube_desc(16, 0.01);
  const ScalarGrid occ = box_occupancy(d, {3, 4, 5}, {11, 12, 10});
  const Sdf s = rebuild_sdf(occ, 0.5, whole_grid());
  for (std::size_t n = 0; n < d.cell_count(); ++n) {
    const Coord c = d.coord_of(n);
    if (occ.get(c) >= 0.5) {
      EXPECT_LT(s.at(c), 0.0);
    } else {
      EXPECT_GT(s.at(c), 0.0);
    }
    for (const Coord& o : kFaceNeighbors) {
      const Coord nb = c + o;
      if (!d.contains(nb)) continue;
      EXPECT_LE(std::abs(std::abs(s.at(c)) - std::abs(s.at(nb))), d.voxel_size * std::sqrt(3.0) + 1e-12);
    }
  }
}

TEST(Sdf, RebuildIsIdempotent) {
  const GridDesc d = cube_desc(12, 0.01);
  const ScalarGrid occ = box_occupancy(d, {2, 2, 2}, {8, 9, 7});
  const Sdf a = rebuild_sdf(occ, 0.5);
  const Sdf b = rebuild_sdf(occ, 0.5);
  EXPECT_TRUE(a.distance == b.distance);
}

TEST(Sdf, ErosionNeverDeepens) {
  const GridDesc d = cube_desc(14, 0.01);
  ScalarGrid occ = box_occupancy(d, {2, 2, 2}, {11, 11, 11});
  const Sdf before = rebuild_sdf(occ, 0.5);
  std::mt19937 rng(5);
  std::bernoulli_distribution remove(0.15);
  for (std::size_t n = 0; n < d.cell_count(); ++n)
    if (occ.get(d.coord_of(n)) > 0.5 && remove(rng)) occ.set(d.coord_of(n), 0.0);
  const Sdf after = rebuild_sdf(occ, 0.5);
  for (std::size_t n = 0; n < d.cell_count(); ++n) {
    const Coord c = d.coord_of(n);
    if (occ.get(c) > 0.5) EXPECT_LE(query_depth(after, c), query_depth(before, c) + 1e-12);
  }
}

TEST(Sdf, SlabCenterDepthIsHalfThickness) {
  // 40 mm cube on a 1 mm grid; its center lies 20 mm from every face.
  const GridDesc d = cube_desc(48, 0.001);
  const ScalarGrid occ = box_occupancy(d, {4, 4, 4}, {43, 43, 43});
  const Sdf s = rebuild_sdf(occ, 0.5);
  EXPECT_NEAR(query_depth(s, {23, 23, 23}), 0.020, 0.001);
  EXPECT_NEAR(query_depth(s, {4, 23, 23}), 0.0, 0.001);
}

TEST(Sdf, CornerIsShallowerThanFaceCenter) {
  const GridDesc d = cube_desc(16, 0.01);
  const ScalarGrid occ = box_occupancy(d, {2, 2, 2}, {13, 13, 13});
  const Sdf s = rebuild_sdf(occ, 0.5);
  // The corner cell is exposed on three faces, the face-center cell on one.
  EXPECT_LT(query_depth(s, {2, 2, 2}), query_depth(s, {2, 8, 8}));
  // Along the diagonal the depth never exceeds the depth under the face center.
  for (int n = 0; n < 6; ++n) EXPECT_LE(query_depth(s, {2 + n, 2 + n, 2 + n}), query_depth(s, {2 + n, 8, 8}) + 1e-12);
}
