#pragma once

#include <string>
#include <vector>

#include "flameforge/engine.hpp"

namespace flameforge {

enum class CubePreset { charring, noncharring };

/// The built-in oven experiment: a 40 mm cube on a 30^3 air grid, heated by
/// a far-field temperature ramp, with three probes on the line from the
/// centre of a side face to the cube centre.
struct CubeOptions {
  CubePreset preset = CubePreset::charring;
  bool insulation = true;
  int max_frames = 6000;
  double oven_target = 800.0;
  double oven_warmup = 20.0;
};

/// Probe ids in depth order.
inline constexpr const char* kCubeProbeIds[3] = {"surface", "depth_5mm", "depth_20mm"};

/// Object mass at which the run counts as burned: all volatiles of the
/// charring preset, or burn-out of the non-charring preset.
double cube_end_mass(CubePreset preset);

SceneConfig make_cube_scene(const CubeOptions& options);

struct CubeRun {
  CubeOptions options;
  std::vector<double> t;
  /// Probe temperatures per frame, indexed like kCubeProbeIds.
  std::vector<double> probe_T[3];
  std::vector<double> mass;
  std::vector<ProbeReading> readings;
  /// First time any material cell exceeds its ignition threshold; NaN if never.
  double t_ignition = 0.0;
  /// First time the mass reaches cube_end_mass; NaN if never.
  double t_end = 0.0;
  RunSummary summary;

  bool finished() const;
  double burn_duration() const { return t_end - t_ignition; }
  /// Probe CSV text, header included.
  std::string probe_csv() const;
};

/// Simulates until the end mass is reached or the frame budget runs out.
CubeRun run_cube(const CubeOptions& options);

struct ShapeCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// First time `series` reaches `level`, linearly interpolated between frames; NaN if never.
double first_crossing(const std::vector<double>& t, const std::vector<double>& series, double level);

/// Second differences of `series` resampled at `samples` evenly spaced times
/// over [t0, t1]. Values with magnitude <= `tolerance` are set to zero.
std::vector<double> resampled_second_difference(const std::vector<double>& t, const std::vector<double>& series,
                                                double t0, double t1, int samples, double tolerance);

/// Number of sign changes in a sequence, skipping zeros.
int sign_changes(const std::vector<double>& values);

ShapeCheck check_crossing_order(const CubeRun& run, double level = 400.0);
ShapeCheck check_mass_non_increasing(const CubeRun& run);
ShapeCheck check_burn_completes(const CubeRun& run);
/// Largest per-frame rise of the core probe lies in the last third of [0, t_end].
ShapeCheck check_late_core_rise(const CubeRun& run);
/// Second difference of the mass over [t_ignition, t_end] changes sign.
ShapeCheck check_mass_inflection(const CubeRun& run);
/// Second difference over the middle 60% of [t_ignition, t_end] keeps one sign.
ShapeCheck check_mass_parabolic(const CubeRun& run);
ShapeCheck check_insulation_slows_burn(const CubeRun& insulated, const CubeRun& bare, double min_ratio = 1.2);

/// Samples per window used by the curve-shape checks and the zero tolerance.
inline constexpr int kShapeSamples = 24;
inline constexpr double kShapeTolerance = 1.0e-4;

/// Normalized-time curves as CSV: t_norm,t,surface,depth_5mm,depth_20mm,mass.
std::string cube_curves_csv(const CubeRun& run);

}  // namespace flameforge
