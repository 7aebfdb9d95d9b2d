#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flameforge/coupling.hpp"
#include "flameforge/fluid.hpp"
#include "flameforge/material.hpp"
#include "flameforge/mesh.hpp"
#include "flameforge/properties.hpp"
#include "flameforge/sdf.hpp"

namespace flameforge {

struct DomainConfig {
  Vec3 origin{};
  std::array<int, 3> air_resolution{30, 30, 30};
  double air_voxel_size = 0.004;
  /// Material cells per air cell along each axis.
  int material_ratio = 5;
  DomainBoundary boundary{};

  friend bool operator==(const DomainConfig&, const DomainConfig&) = default;
};

struct ObjectConfig {
  std::string name;
  /// File path (relative to the scene file) or "builtin:box" / "builtin:sphere".
  std::string mesh;
  Transform transform{};
  std::string material;

  friend bool operator==(const ObjectConfig&, const ObjectConfig&) = default;
};

enum class RegionShape { box, sphere };

struct IgnitionConfig {
  RegionShape shape = RegionShape::box;
  Aabb box{};
  Vec3 center{};
  double radius = 0.0;
  double temperature = 800.0;  // K
  double duration = 1.0;       // s

  bool contains(const Vec3& p) const;
  friend bool operator==(const IgnitionConfig&, const IgnitionConfig&) = default;
};

struct ProbeConfig {
  std::string id;
  Vec3 position{};
  /// Object whose mass is reported; defaults to the object containing the probe.
  std::optional<std::string> object;

  friend bool operator==(const ProbeConfig&, const ProbeConfig&) = default;
};

struct OutputConfig {
  /// Frames between probe rows.
  int probe_interval = 1;
  /// Frames between snapshots; 0 writes only the initial frame.
  int snapshot_interval = 0;
  std::vector<std::string> fields{"T_a", "T_m", "M_v", "M_c", "S", "sdf"};

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct SolverOptions {
  /// Steps between SDF rebuilds when no cell burned out.
  int sdf_interval = 10;
  int sdf_margin = 3;
  double div_max = 5.0;
  ProjectionMode projection_mode = ProjectionMode::sum;
  double cg_relative_tolerance = 1.0e-5;
  double cg_absolute_tolerance = 1.0e-5;
  int cg_max_iterations = 500;
  /// Relative mass below which a cell burns out.
  double iso_threshold = 0.05;
  /// Char insulation from the SDF; false forces c = 1.
  bool insulation = true;

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

struct SceneConfig {
  std::string name = "scene";
  double dt = 0.033;
  int n_frames = 100;
  DomainConfig domain{};
  EnvironmentConfig environment{};
  std::vector<MaterialProperties> materials;
  std::vector<ObjectConfig> objects;
  std::vector<IgnitionConfig> ignitions;
  std::vector<ProbeConfig> probes;
  OutputConfig output{};
  SolverOptions solver{};
  /// Directory relative mesh paths resolve against.
  std::filesystem::path base_dir;

  GridDesc air_desc() const;
  GridDesc material_desc() const;
  /// Throws ConfigError naming the material when it is not defined.
  std::size_t material_index(const std::string& name) const;
  std::optional<std::size_t> object_index(const std::string& name) const;
  std::string resolve_mesh_path(const std::string& mesh) const;

  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

/// Parses a JSON scene document (comments allowed). Each override has the
/// form "dotted.key=value"; the value is read as JSON, or as a string when
/// it is not valid JSON. Throws ConfigError on schema or consistency errors.
SceneConfig parse_scene(const std::string& text, const std::filesystem::path& base_dir = {},
                        const std::vector<std::string>& overrides = {});

SceneConfig load_scene(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// JSON document that parses back to an equal configuration.
std::string serialize_scene(const SceneConfig& scene);

/// Consistency and explicit-stability checks performed by parse_scene.
void validate_scene(const SceneConfig& scene);

struct InitialState {
  AirState air;
  MaterialState material;
  Sdf sdf;
  std::vector<std::string> warnings;
};

/// Voxelizes all objects, applies ignition temperatures and builds the SDF.
InitialState init_state(const SceneConfig& scene);

/// Occupancy threshold used when building the SDF from the active mask.
inline constexpr double kSdfOccupancyIso = 0.5;

}  // namespace flameforge
