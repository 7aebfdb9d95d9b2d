#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "flameforge/scene.hpp"

namespace flameforge {

struct Diagnostics {
  int last_cg_iterations = 0;
  int max_cg_iterations = 0;
  long long total_cg_iterations = 0;
  double last_cg_residual = 0.0;
  /// Fluid cells whose divergence target was shifted in sealed air pockets.
  std::size_t incompatible_cells = 0;
  std::size_t dropped_smoke_sources = 0;
  double dropped_smoke_amount = 0.0;
  std::size_t burned_out_cells = 0;
  std::size_t sdf_rebuilds = 0;

  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

struct SimState {
  AirState air;
  MaterialState material;
  Sdf sdf;
  double t = 0.0;
  int frame = 0;
  Diagnostics diagnostics;
  /// Sources produced by the previous step, consumed by the next one.
  ScalarGrid S_Tm;
  ScalarGrid S_Sa;
  ScalarGrid divergence_target;
};

struct ProbeReading {
  double t = 0.0;
  std::string probe_id;
  double temperature_K = 0.0;
  double object_mass = 0.0;

  friend bool operator==(const ProbeReading&, const ProbeReading&) = default;
};

/// Steps a fixed scene. One step is one frame of length scene.dt.
class Engine {
 public:
  explicit Engine(SceneConfig scene);

  const SceneConfig& scene() const { return scene_; }
  /// Warnings collected while voxelizing the objects.
  const std::vector<std::string>& warnings() const { return warnings_; }

  const SimState& initial_state() const { return initial_; }

  /// Advances one frame; `state` is left untouched. Solver failures are
  /// rethrown as SolverError with the frame number in the message.
  SimState step(const SimState& state) const;

  /// Relative remaining mass of an object, averaged over its initial cells.
  double object_mass(const SimState& state, std::size_t object) const;
  std::vector<double> object_masses(const SimState& state) const;

  std::vector<ProbeReading> sample_probes(const SimState& state) const;

  /// Object probed by each probe, or -1 when the probe has none.
  const std::vector<int>& probe_objects() const { return probe_objects_; }

 private:
  SimState step_impl(const SimState& state) const;

  SceneConfig scene_;
  SimState initial_;
  std::vector<std::string> warnings_;
  std::vector<double> initial_object_mass_;
  std::vector<int> probe_objects_;
};

/// Total remaining material per fine cell, M_v + M_c.
ScalarGrid mass_density(const SimState& state);

struct RunSinks {
  /// Called after every step whose frame is a multiple of probe_interval.
  std::function<void(const std::vector<ProbeReading>&)> probes;
  /// Called for frame 0 and every snapshot_interval frames.
  std::function<void(const SimState&)> snapshot;
  /// Called after every step.
  std::function<void(const SimState&)> frame;
  /// Ends the run early when it returns true (checked after every step).
  std::function<bool(const SimState&)> stop;
};

struct RunSummary {
  int frames = 0;
  double wall_seconds = 0.0;
  double seconds_per_frame = 0.0;
  bool stopped_early = false;
  Diagnostics diagnostics;
  std::vector<std::string> warnings;
};

RunSummary run(const SceneConfig& scene, const RunSinks& sinks = {});
RunSummary run(const Engine& engine, const RunSinks& sinks = {});

inline constexpr const char* kProbeCsvHeader = "t,probe_id,temperature_K,object_mass";

/// One CSV line per reading, numbers written so they read back exactly.
void write_probe_rows(std::ostream& out, const std::vector<ProbeReading>& rows);
std::vector<ProbeReading> read_probe_csv(std::istream& in);

/// Writes the configured fields of one frame as snapshots into `dir`.
void write_frame_snapshots(const std::string& dir, const SimState& state, const std::vector<std::string>& fields);

}  // namespace flameforge
