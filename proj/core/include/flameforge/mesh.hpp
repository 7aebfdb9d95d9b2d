#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flameforge/grid.hpp"
#include "flameforge/vec.hpp"

namespace flameforge {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;

  bool empty() const { return faces.empty(); }
};

/// Scale, then rotate (Euler XYZ, degrees), then translate.
struct Transform {
  Vec3 translate{};
  Vec3 scale{1.0, 1.0, 1.0};
  Vec3 rotate_deg{};

  Vec3 apply(const Vec3& p) const;
  friend bool operator==(const Transform&, const Transform&) = default;
};

/// ASCII or binary STL; coincident vertices are merged.
TriangleMesh load_stl(const std::filesystem::path& path);
/// Wavefront OBJ, polygons fan-triangulated.
TriangleMesh load_obj(const std::filesystem::path& path);
/// Dispatches on extension, or on the "builtin:box" / "builtin:sphere" names.
TriangleMesh load_mesh(const std::string& source);

bool is_builtin_mesh(const std::string& source);

/// Closed, outward-oriented box mesh (12 triangles).
TriangleMesh make_box_mesh(const Aabb& box);
/// Closed, outward-oriented UV sphere.
TriangleMesh make_sphere_mesh(const Vec3& center, double radius, int segments = 48);

TriangleMesh transformed(const TriangleMesh& mesh, const Transform& transform);

/// Every edge is shared by exactly two faces that traverse it in opposite directions.
bool is_watertight(const TriangleMesh& mesh);

/// Occupancy with value 1 at every cell whose center lies inside the mesh,
/// decided by ray parity along x. Non-watertight meshes fall back to a
/// majority vote over x, y and z rays and add a message to `warnings`.
ScalarGrid voxelize_mesh(const TriangleMesh& mesh, const Transform& transform, const GridDesc& desc,
                         std::vector<std::string>* warnings = nullptr);

}  // namespace flameforge
