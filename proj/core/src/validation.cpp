#include "flameforge/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace flameforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Geometry of the experiment, metres.
constexpr double kDomain = 0.12;
constexpr int kAirCells = 30;
constexpr int kRatio = 5;
constexpr double kCubeEdge = 0.04;
constexpr double kCubeMinX = 0.04, kCubeMinY = 0.04, kCubeMinZ = 0.02;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

bool any_ignited(const MaterialState& m) {
  bool hit = false;
  m.I.for_each_active([&](const Coord& c, std::uint16_t idx) {
    if (!hit && m.T_m.get(c) > m.materials[idx].ignition_threshold()) hit = true;
  });
  return hit;
}

double interpolate(const std::vector<double>& t, const std::vector<double>& v, double x) {
  if (x <= t.front()) return v.front();
  if (x >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - t.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - t[lo]) / (t[hi] - t[lo]);
  return v[lo] + w * (v[hi] - v[lo]);
}

}  // namespace

double cube_end_mass(CubePreset preset) { return preset == CubePreset::charring ? 0.5 : 0.05; }

SceneConfig make_cube_scene(const CubeOptions& o) {
  SceneConfig s;
  s.name = o.preset == CubePreset::charring ? "cube-charring" : "cube-noncharring";
  s.dt = 0.033;
  s.n_frames = o.max_frames;
  s.domain.origin = {0.0, 0.0, 0.0};
  s.domain.air_resolution = {kAirCells, kAirCells, kAirCells};
  s.domain.air_voxel_size = kDomain / kAirCells;
  s.domain.material_ratio = kRatio;
  // Oven chamber: walls and floor closed, vented at the top.
  s.domain.boundary = DomainBoundary::all_closed();
  s.domain.boundary.faces[5] = FaceBoundary::open;
  s.environment.oven = OvenRamp{o.oven_target, o.oven_warmup};

  MaterialProperties m = *material_preset(o.preset == CubePreset::charring ? "wood" : "pmma");
  s.materials.push_back(m);

  ObjectConfig cube;
  cube.name = "cube";
  cube.mesh = "builtin:box";
  cube.material = m.name;
  cube.transform.scale = {kCubeEdge, kCubeEdge, kCubeEdge};
  cube.transform.translate = {kCubeMinX, kCubeMinY, kCubeMinZ};
  s.objects.push_back(cube);

  const double fine = s.domain.air_voxel_size / kRatio;
  const double y = kCubeMinY + 0.5 * kCubeEdge;
  const double z = kCubeMinZ + 0.5 * kCubeEdge;
  // The surface probe sits at the first material cell center below the face.
  const double depths[3] = {0.5 * fine, 0.005, 0.5 * kCubeEdge};
  for (int n = 0; n < 3; ++n) s.probes.push_back({kCubeProbeIds[n], {kCubeMinX + depths[n], y, z}, std::string("cube")});

  s.solver.insulation = o.insulation;
  return s;
}

bool CubeRun::finished() const { return !std::isnan(t_end); }

CubeRun run_cube(const CubeOptions& options) {
  CubeRun r;
  r.options = options;
  r.t_ignition = kNaN;
  r.t_end = kNaN;
  const Engine engine(make_cube_scene(options));
  const double end_mass = cube_end_mass(options.preset);

  const std::vector<ProbeReading> first = engine.sample_probes(engine.initial_state());
  r.t.push_back(0.0);
  for (int n = 0; n < 3; ++n) r.probe_T[n].push_back(first[static_cast<std::size_t>(n)].temperature_K);
  r.mass.push_back(first[0].object_mass);

  RunSinks sinks;
  sinks.probes = [&](const std::vector<ProbeReading>& rows) {
    r.readings.insert(r.readings.end(), rows.begin(), rows.end());
    r.t.push_back(rows[0].t);
    for (int n = 0; n < 3; ++n) r.probe_T[n].push_back(rows[static_cast<std::size_t>(n)].temperature_K);
    r.mass.push_back(rows[0].object_mass);
  };
  sinks.frame = [&](const SimState& s) {
    if (std::isnan(r.t_ignition) && any_ignited(s.material)) r.t_ignition = s.t;
  };
  sinks.stop = [&](const SimState& s) {
    if (r.mass.back() <= end_mass) {
      r.t_end = s.t;
      return true;
    }
    return false;
  };
  r.summary = run(engine, sinks);
  return r;
}

std::string CubeRun::probe_csv() const {
  std::ostringstream out;
  out << kProbeCsvHeader << '\n';
  write_probe_rows(out, readings);
  return out.str();
}

double first_crossing(const std::vector<double>& t, const std::vector<double>& series, double level) {
  for (std::size_t n = 0; n < series.size(); ++n) {
    if (series[n] < level) continue;
    if (n == 0) return t[0];
    const double w = (level - series[n - 1]) / (series[n] - series[n - 1]);
    return t[n - 1] + w * (t[n] - t[n - 1]);
  }
  return kNaN;
}

std::vector<double> resampled_second_difference(const std::vector<double>& t, const std::vector<double>& series,
                                                double t0, double t1, int samples, double tolerance) {
  std::vector<double> v(static_cast<std::size_t>(samples));
  for (int n = 0; n < samples; ++n)
    v[static_cast<std::size_t>(n)] = interpolate(t, series, t0 + (t1 - t0) * n / (samples - 1));
  std::vector<double> d2;
  for (std::size_t n = 1; n + 1 < v.size(); ++n) {
    const double d = v[n + 1] - 2.0 * v[n] + v[n - 1];
    d2.push_back(std::abs(d) <= tolerance ? 0.0 : d);
  }
  return d2;
}

int sign_changes(const std::vector<double>& values) {
  int changes = 0;
  int last = 0;
  for (double v : values) {
    const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

ShapeCheck check_crossing_order(const CubeRun& run, double level) {
  double c[3];
  for (int n = 0; n < 3; ++n) c[n] = first_crossing(run.t, run.probe_T[n], level);
  ShapeCheck k{"crossing order at " + fmt(level) + " K", false, ""};
  k.passed = c[0] < c[1] && c[1] < c[2];  // false when any is NaN
  k.detail = "surface " + fmt(c[0]) + " s, 5 mm " + fmt(c[1]) + " s, 20 mm " + fmt(c[2]) + " s";
  return k;
}

ShapeCheck check_mass_non_increasing(const CubeRun& run) {
  ShapeCheck k{"mass non-increasing", true, ""};
  for (std::size_t n = 1; n < run.mass.size(); ++n)
    if (run.mass[n] > run.mass[n - 1]) {
      k.passed = false;
      k.detail = "mass rose at t = " + fmt(run.t[n]) + " s";
      return k;
    }
  k.detail = fmt(static_cast<double>(run.mass.size())) + " frames, final mass " + fmt(run.mass.back());
  return k;
}

ShapeCheck check_burn_completes(const CubeRun& run) {
  const double target = cube_end_mass(run.options.preset);
  ShapeCheck k{"mass below " + fmt(target), run.mass.back() < target, ""};
  k.detail = "final mass " + fmt(run.mass.back()) + " after " + fmt(run.t.back()) + " s";
  return k;
}

ShapeCheck check_late_core_rise(const CubeRun& run) {
  ShapeCheck k{"late core temperature rise", false, ""};
  if (!run.finished()) {
    k.detail = "burn did not finish";
    return k;
  }
  const auto& T = run.probe_T[2];
  double best = -std::numeric_limits<double>::infinity();
  double at = 0.0;
  for (std::size_t n = 1; n < T.size(); ++n) {
    const double d = T[n] - T[n - 1];
    if (d > best) {
      best = d;
      at = run.t[n];
    }
  }
  // Time from the start of heating, as on the measured curves.
  const double normalized = at / run.t_end;
  k.passed = normalized >= 2.0 / 3.0;
  k.detail = "largest rise " + fmt(best) + " K/frame at normalized time " + fmt(normalized);
  return k;
}

ShapeCheck check_mass_inflection(const CubeRun& run) {
  ShapeCheck k{"S-shaped mass curve", false, ""};
  if (!run.finished() || std::isnan(run.t_ignition)) {
    k.detail = "burn did not finish";
    return k;
  }
  const auto d2 =
      resampled_second_difference(run.t, run.mass, run.t_ignition, run.t_end, kShapeSamples, kShapeTolerance);
  const int changes = sign_changes(d2);
  k.passed = changes >= 1;
  k.detail = std::to_string(changes) + " sign changes of the second difference";
  return k;
}

ShapeCheck check_mass_parabolic(const CubeRun& run) {
  ShapeCheck k{"parabolic mass curve", false, ""};
  if (!run.finished() || std::isnan(run.t_ignition)) {
    k.detail = "burn did not finish";
    return k;
  }
  const double span = run.t_end - run.t_ignition;
  const auto d2 = resampled_second_difference(run.t, run.mass, run.t_ignition + 0.2 * span,
                                              run.t_ignition + 0.8 * span, kShapeSamples, kShapeTolerance);
  const int changes = sign_changes(d2);
  k.passed = changes == 0;
  k.detail = std::to_string(changes) + " sign changes over the middle 60% of the burn";
  return k;
}

ShapeCheck check_insulation_slows_burn(const CubeRun& insulated, const CubeRun& bare, double min_ratio) {
  ShapeCheck k{"insulation lengthens the burn", false, ""};
  const double a = insulated.burn_duration();
  const double b = bare.burn_duration();
  k.passed = insulated.finished() && bare.finished() && a >= min_ratio * b;
  k.detail = "with insulation " + fmt(a) + " s, without " + fmt(b) + " s (ratio " + fmt(a / b) + ")";
  return k;
}

std::string cube_curves_csv(const CubeRun& run) {
  std::ostringstream out;
  out.precision(10);
  out << "t_norm,t,surface,depth_5mm,depth_20mm,mass\n";
  const double span = run.finished() ? run.t_end : run.t.back();
  for (std::size_t n = 0; n < run.t.size(); ++n)
    out << (span > 0.0 ? run.t[n] / span : 0.0) << ',' << run.t[n] << ',' << run.probe_T[0][n] << ','
        << run.probe_T[1][n] << ',' << run.probe_T[2][n] << ',' << run.mass[n] << '\n';
  return out.str();
}

}  // namespace flameforge
