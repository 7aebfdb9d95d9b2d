#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "flameforge/error.hpp"
#include "flameforge/scene.hpp"

using namespace flameforge;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "domain": {"air_resolution": 10, "air_voxel_size": 0.01},
  "materials": [{"name": "pine"}],
  "objects": [{"mesh": "builtin:box", "material": "pine",
               "transform": {"scale": [0.04, 0.04, 0.04], "translate": [0.03, 0.03, 0.03]}}]
})";

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

GridDesc grid(int n, double h, Vec3 origin = {}) {
  GridDesc d;
  d.resolution = {n, n, n};
  d.voxel_size = h;
  d.origin = origin;
  return d;
}

}  // namespace

TEST(Scene, MinimalConfigTakesTableDefaults) {
  const SceneConfig s = parse_scene(kMinimal);
  EXPECT_EQ(s.environment.T_amb, 293.0);
  EXPECT_EQ(s.environment.nu, 1.6e-5);
  EXPECT_EQ(s.environment.rho_amb, 1.2041);
  EXPECT_EQ(s.environment.k, 1.8e-5);
  EXPECT_EQ(s.environment.gamma_a, 5.0e-11);
  EXPECT_EQ(s.environment.phi_m, 0.02);
  EXPECT_EQ(s.environment.phi_a, 0.05);
  EXPECT_EQ(s.environment.g, 9.81);
  ASSERT_EQ(s.materials.size(), 1u);
  const MaterialProperties& m = s.materials[0];
  EXPECT_EQ(m.c_min, 0.1);
  EXPECT_EQ(m.c_r, 75.0);
  EXPECT_EQ(m.eps_v, 0.1);
  EXPECT_EQ(m.T_Mv, 2.0e7);
  EXPECT_EQ(m.S_Mc, 1.0e3);
  EXPECT_EQ(s.dt, 0.033);
  EXPECT_EQ(s.domain.material_ratio, 5);
}

TEST(Scene, ReactionThresholdsAreCelsius) {
  const SceneConfig s = parse_scene(R"({"materials": [{"name": "a", "T_m0": 150, "T_m1": 450}]})");
  EXPECT_DOUBLE_EQ(s.materials[0].T_m0, 423.15);
  EXPECT_DOUBLE_EQ(s.materials[0].T_m1, 723.15);
}

TEST(Scene, UnknownMaterialIsNamed) {
  const std::string msg = message_of([] {
    parse_scene(R"({"materials": [{"name": "oak"}], "objects": [{"mesh": "builtin:box", "material": "steel"}]})");
  });
  EXPECT_NE(msg.find("steel"), std::string::npos) << msg;
}

TEST(Scene, NonIntegerRatioIsRejected) {
  EXPECT_THROW(parse_scene(R"({"domain": {"material_ratio": 2.5}})"), ConfigError);
}

TEST(Scene, MissingMeshFileIsRejected) {
  const std::string msg = message_of([] {
    parse_scene(R"({"materials": [{"name": "oak"}], "objects": [{"mesh": "no/such.stl", "material": "oak"}]})");
  });
  EXPECT_NE(msg.find("no/such.stl"), std::string::npos) << msg;
}

TEST(Scene, RatioFiveOnThirtyCubedGivesOneHundredFifty) {
  const SceneConfig s = parse_scene(R"({"domain": {"air_resolution": 30, "air_voxel_size": 0.004}})");
  const GridDesc fine = s.material_desc();
  EXPECT_EQ(fine.resolution, (std::array<int, 3>{150, 150, 150}));
  EXPECT_DOUBLE_EQ(fine.voxel_size * 5, s.air_desc().voxel_size);
}

TEST(Scene, OverridesUseDottedPaths) {
  const SceneConfig s = parse_scene(kMinimal, {}, {"dt=0.01", "environment.T_amb=300", "name=override"});
  EXPECT_EQ(s.dt, 0.01);
  EXPECT_EQ(s.environment.T_amb, 300.0);
  EXPECT_EQ(s.name, "override");
}

TEST(Scene, SerializeRoundTrips) {
  SceneConfig s = parse_scene(R"({
    "name": "round",
    "domain": {"air_resolution": [8, 9, 10], "air_voxel_size": 0.01, "boundary": {"-z": "closed", "+x": "closed"}},
    "environment": {"wind": [{"t": 0, "velocity": [1, 0, 0]}, {"t": 2, "velocity": [0, 0.5, 0]}],
                    "oven": {"target": 700, "warmup": 5}},
    "materials": [{"preset": "pmma", "name": "acrylic"}, {"preset": "stone"}],
    "objects": [{"name": "blk", "mesh": "builtin:sphere", "material": "stone",
                 "transform": {"scale": [0.02, 0.02, 0.02], "translate": [0.04, 0.04, 0.05], "rotate_deg": [0, 0, 30]}}],
    "ignitions": [{"shape": "sphere", "center": [0.04, 0.04, 0.02], "radius": 0.01, "temperature": 900, "duration": 2}],
    "probes": [{"id": "p", "position": [0.04, 0.04, 0.05], "object": "blk"}],
    "output": {"probe_interval": 2, "snapshot_interval": 5, "fields": ["T_a", "p"]},
    "solver": {"projection_mode": "mean", "insulation": false, "sdf_interval": 3}
  })");
  const SceneConfig back = parse_scene(serialize_scene(s));
  EXPECT_TRUE(back == s);
}

TEST(Mesh, AlignedUnitCubeCoversSixtyFourCells) {
  const ScalarGrid occ = voxelize_mesh(load_mesh("builtin:box"), {}, grid(6, 0.25, {-0.25, -0.25, -0.25}));
  // Oracle: cell centers strictly inside [0,1]^3.
  std::size_t expected = 0;
  const GridDesc& d = occ.desc();
  for (std::size_t n = 0; n < d.cell_count(); ++n) {
    const Vec3 p = d.world_pos(d.coord_of(n));
    const bool in = p.x > 0 && p.x < 1 && p.y > 0 && p.y < 1 && p.z > 0 && p.z < 1;
    expected += in ? 1 : 0;
    EXPECT_EQ(occ.is_active(d.coord_of(n)), in);
  }
  EXPECT_EQ(expected, 64u);
  EXPECT_EQ(occ.active_count(), 64u);
}

TEST(Mesh, MeshOutsideDomainIsEmpty) {
  Transform t;
  t.translate = {5.0, 5.0, 5.0};
  EXPECT_EQ(voxelize_mesh(load_mesh("builtin:box"), t, grid(8, 0.1)).active_count(), 0u);
}

TEST(Mesh, SphereVolumeWithinTenPercent) {
  const double r = 0.4, h = 0.02;  // 40 cells across the diameter
  Transform t;
  t.scale = {r, r, r};
  t.translate = {0.5, 0.5, 0.5};
  const ScalarGrid occ = voxelize_mesh(load_mesh("builtin:sphere"), t, grid(50, h));
  const double expected = 4.0 / 3.0 * std::numbers::pi * r * r * r / (h * h * h);
  EXPECT_NEAR(static_cast<double>(occ.active_count()), expected, 0.1 * expected);
}

TEST(Mesh, TranslationConsistency) {
  Transform a;
  a.scale = {0.3, 0.25, 0.35};
  a.rotate_deg = {10, 20, 30};
  a.translate = {0.5, 0.45, 0.5};
  Transform b = a;
  const Vec3 shift{0.3, -0.2, 0.7};
  b.translate = a.translate + shift;
  const ScalarGrid ga = voxelize_mesh(load_mesh("builtin:sphere"), a, grid(20, 0.05));
  const ScalarGrid gb = voxelize_mesh(load_mesh("builtin:sphere"), b, grid(20, 0.05, shift));
  EXPECT_GT(ga.active_count(), 0u);
  EXPECT_EQ(ga.active_count(), gb.active_count());
  ga.for_each_active([&](const Coord& c, double) { EXPECT_TRUE(gb.is_active(c)); });
}

TEST(Mesh, EmptyMeshIsError) { EXPECT_THROW(voxelize_mesh(TriangleMesh{}, {}, grid(4, 0.1)), ConfigError); }

TEST(Mesh, OpenMeshWarnsAndFallsBack) {
  TriangleMesh m = make_box_mesh({{0.1, 0.1, 0.1}, {0.7, 0.7, 0.7}});
  m.faces.pop_back();
  EXPECT_FALSE(is_watertight(m));
  std::vector<std::string> warnings;
  const ScalarGrid occ = voxelize_mesh(m, {}, grid(8, 0.1), &warnings);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_EQ(occ.active_count(), 6u * 6u * 6u);
}

TEST(Mesh, StlAndObjFilesLoad) {
  const fs::path dir = fs::temp_directory_path() / "flameforge_mesh_test";
  fs::create_directories(dir);
  {
    std::ofstream obj(dir / "tet.obj");
    obj << "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 2\nf 1 2 4\nf 1 4 3\nf 2 3 4\n";
    std::ofstream stl(dir / "tet.stl");
    stl << "solid t\n";
    const char* tris[4][3] = {{"0 0 0", "0 1 0", "1 0 0"},
                              {"0 0 0", "1 0 0", "0 0 1"},
                              {"0 0 0", "0 0 1", "0 1 0"},
                              {"1 0 0", "0 1 0", "0 0 1"}};
    for (const auto& t : tris)
      stl << "facet normal 0 0 0\nouter loop\nvertex " << t[0] << "\nvertex " << t[1] << "\nvertex " << t[2]
          << "\nendloop\nendfacet\n";
    stl << "endsolid t\n";
  }
  const TriangleMesh a = load_mesh((dir / "tet.obj").string());
  const TriangleMesh b = load_mesh((dir / "tet.stl").string());
  EXPECT_EQ(a.faces.size(), 4u);
  EXPECT_EQ(b.vertices.size(), 4u);
  EXPECT_TRUE(is_watertight(a));
  EXPECT_TRUE(is_watertight(b));
  fs::remove_all(dir);
}

TEST(Init, ColdSceneIsAmbient) {
  const SceneConfig s = parse_scene(kMinimal);
  const InitialState st = init_state(s);
  EXPECT_GT(st.material.active_count(), 0u);
  double hi = 0.0;
  st.material.T_m.for_each_active([&](const Coord&, double v) { hi = std::max(hi, v); });
  EXPECT_EQ(hi, 293.0);
  st.material.M_v.for_each_active([&](const Coord&, double v) { EXPECT_EQ(v, 1.0); });
  EXPECT_FALSE(st.sdf.empty);
  EXPECT_GT(st.air.solid.count(), 0u);
}

TEST(Init, IgnitionRegionIsHot) {
  SceneConfig s = parse_scene(kMinimal);
  IgnitionConfig ig;
  ig.box = {{0.03, 0.03, 0.03}, {0.05, 0.07, 0.04}};
  ig.temperature = 800.0;
  s.ignitions.push_back(ig);
  const InitialState st = init_state(s);
  const GridDesc& d = st.material.desc();
  std::size_t hot = 0;
  st.material.T_m.for_each_active([&](const Coord& c, double v) {
    const bool in = ig.contains(d.world_pos(c));
    EXPECT_EQ(v, in ? 800.0 : 293.0);
    hot += in ? 1 : 0;
  });
  EXPECT_GT(hot, 0u);
}

TEST(Init, EmptyObjectListIsPureAir) {
  const InitialState st = init_state(parse_scene(R"({"domain": {"air_resolution": 6, "air_voxel_size": 0.01}})"));
  EXPECT_EQ(st.material.active_count(), 0u);
  EXPECT_TRUE(st.sdf.empty);
  EXPECT_EQ(st.air.solid.count(), 0u);
}

TEST(Init, OverlappingObjectsWarnAndLaterWins) {
  SceneConfig s = parse_scene(R"({
    "domain": {"air_resolution": 10, "air_voxel_size": 0.01},
    "materials": [{"name": "a"}, {"preset": "stone"}],
    "objects": [{"mesh": "builtin:box", "material": "a", "transform": {"scale": [0.04, 0.04, 0.04], "translate": [0.02, 0.02, 0.02]}},
                {"mesh": "builtin:box", "material": "stone", "transform": {"scale": [0.04, 0.04, 0.04], "translate": [0.04, 0.04, 0.04]}}]
  })");
  const InitialState st = init_state(s);
  EXPECT_FALSE(st.warnings.empty());
  const Coord c = st.material.desc().cell_of({0.05, 0.05, 0.05});
  EXPECT_EQ(st.material.I.get(c), 1);
}
