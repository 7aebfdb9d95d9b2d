#include "flameforge/engine.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "flameforge/error.hpp"
#include "flameforge/snapshot.hpp"
#include "flameforge/thermal_air.hpp"

namespace flameforge {

namespace {

void apply_ignitions(const SceneConfig& scene, double t, MaterialState& material, ScalarGrid& T_a,
                     const CellMask& solid) {
  const GridDesc& fine = material.desc();
  const GridDesc& air = T_a.desc();
  const auto& r = air.resolution;
  for (const auto& g : scene.ignitions) {
    if (!(t < g.duration)) continue;
    material.I.for_each_active([&](const Coord& c, std::uint16_t) {
      if (g.contains(fine.world_pos(c))) material.T_m.set_active_value(c, g.temperature);
    });
    for (int k = 0; k < r[2]; ++k)
      for (int j = 0; j < r[1]; ++j)
        for (int i = 0; i < r[0]; ++i) {
          const Coord c{i, j, k};
          if (!solid.test(c) && g.contains(air.world_pos(c))) T_a.set(c, g.temperature);
        }
  }
}

// Trilinear blend over active cells only; nullopt when none of the 8 is active.
std::optional<double> masked_sample(const ScalarGrid& g, const Vec3& p) {
  const GridDesc& d = g.desc();
  const Vec3 q = d.to_index_space(p);
  const int i0 = static_cast<int>(std::floor(q.x)), j0 = static_cast<int>(std::floor(q.y)),
            k0 = static_cast<int>(std::floor(q.z));
  const double fx = q.x - i0, fy = q.y - j0, fz = q.z - k0;
  double acc = 0.0, wsum = 0.0;
  for (int n = 0; n < 8; ++n) {
    const Coord c{i0 + (n & 1), j0 + ((n >> 1) & 1), k0 + ((n >> 2) & 1)};
    if (!g.is_active(c)) continue;
    const double w = ((n & 1) ? fx : 1.0 - fx) * (((n >> 1) & 1) ? fy : 1.0 - fy) * (((n >> 2) & 1) ? fz : 1.0 - fz);
    acc += w * g.get(c);
    wsum += w;
  }
  if (wsum <= 0.0) return std::nullopt;
  return acc / wsum;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("bad number '" + s + "' in probe CSV");
  return v;
}

}  // namespace

Engine::Engine(SceneConfig scene) : scene_(std::move(scene)) {
  validate_scene(scene_);
  InitialState init = init_state(scene_);
  warnings_ = std::move(init.warnings);
  initial_.air = std::move(init.air);
  initial_.material = std::move(init.material);
  initial_.sdf = std::move(init.sdf);
  const GridDesc air = scene_.air_desc();
  GridDesc zero = air;
  zero.background = 0.0;
  initial_.S_Sa = create_dense_grid(zero, 0.0);
  initial_.divergence_target = create_dense_grid(zero, 0.0);
  initial_.S_Tm = initial_.material.M_v.same_topology(0.0, 0.0);
  extrapolate_into_solid(initial_.air.T_a, initial_.air.solid, scene_.environment.T_amb);

  initial_object_mass_.assign(scene_.objects.size(), 0.0);
  const MaterialState& m = initial_.material;
  m.object.for_each_active([&](const Coord& c, std::uint16_t obj) {
    if (m.is_active(c)) initial_object_mass_[obj] += m.props(c).initial_total_mass();
  });

  const GridDesc& fine = m.desc();
  for (const auto& p : scene_.probes) {
    int obj = -1;
    if (p.object) {
      obj = static_cast<int>(*scene_.object_index(*p.object));
    } else {
      const Coord c = fine.cell_of(p.position);
      if (m.object.is_active(c)) obj = m.object.get(c);
    }
    probe_objects_.push_back(obj);
  }
}

SimState Engine::step(const SimState& state) const {
  try {
    return step_impl(state);
  } catch (const SolverError& e) {
    throw SolverError("frame " + std::to_string(state.frame + 1) + ": " + e.what(), e.residual(), e.iterations());
  }
}

SimState Engine::step_impl(const SimState& s) const {
  const SceneConfig& sc = scene_;
  const EnvironmentConfig& env = sc.environment;
  const SolverOptions& so = sc.solver;
  const double dt = sc.dt;
  const int ratio = sc.domain.material_ratio;
  const DomainBoundary& bc = sc.domain.boundary;
  const double T_far = env.ambient_at(s.t);

  SimState n;
  n.t = s.t;
  n.frame = s.frame;
  n.diagnostics = s.diagnostics;
  n.sdf = s.sdf;
  n.material = s.material;
  n.air.solid = s.air.solid;

  // (1) velocity
  MacVelocityField u = Advector(s.air.u, dt).maccormack(s.air.u);
  enforce_solid_faces(u, s.air.solid, bc);
  u = diffuse_velocity(u, env.nu, dt);
  u = apply_body_forces(u, s.air.T_a, env, dt, {bc, s.t});
  const ScalarGrid rho = air_density(s.air.T_a, env);
  ProjectionOptions po;
  po.boundary = bc;
  po.density = &rho;
  po.initial_pressure = &s.air.p;
  po.relative_tolerance = so.cg_relative_tolerance;
  po.absolute_tolerance = so.cg_absolute_tolerance;
  po.max_iterations = so.cg_max_iterations;
  po.remove_incompatible = true;
  ProjectionResult proj = pressure_project(u, s.divergence_target, s.air.solid, dt, po);
  n.air.u = std::move(proj.u);
  n.air.p = std::move(proj.p);
  Diagnostics& dg = n.diagnostics;
  dg.last_cg_iterations = proj.iterations;
  dg.max_cg_iterations = std::max(dg.max_cg_iterations, proj.iterations);
  dg.total_cg_iterations += proj.iterations;
  dg.last_cg_residual = proj.residual;
  dg.incompatible_cells += proj.adjusted_cells;

  // (2) air temperature and smoke
  const Advector advector(n.air.u, dt);
  const ScalarGrid T_adv = advector.maccormack(s.air.T_a);
  AirHeatOptions ho;
  ho.solid = &s.air.solid;
  ho.T_far = T_far;
  n.air.T_a = apply_air_heat_terms(T_adv, nullptr, env, dt, ho);
  n.air.S = step_smoke(s.air.S, advector, &s.S_Sa, dt);

  // (3) interface heat exchange, both directions from pre-step values
  const InterfaceMasks masks = interface_masks(s.air.solid);
  const ScalarGrid Tm_on_air = project_material_to_air(s.material.T_m, s.air.T_a.desc(), ratio, masks,
                                                       so.projection_mode);
  const ScalarGrid Ta_on_mat = project_air_to_material(s.air.T_a, s.air.solid, masks, s.material, ratio);
  const ExchangeResult ex =
      exchange_heat(s.air.T_a, s.material.T_m, Tm_on_air, Ta_on_mat, masks, env.phi_a, env.phi_m, dt);
  {
    const auto& r = s.air.T_a.desc().resolution;
    for (int k = 0; k < r[2]; ++k)
      for (int j = 0; j < r[1]; ++j)
        for (int i = 0; i < r[0]; ++i) {
          const Coord c{i, j, k};
          if (!masks.outside.test(c)) continue;
          const double delta = ex.T_a.get(c) - s.air.T_a.get(c);
          n.air.T_a.set(c, std::max(n.air.T_a.get(c) + delta, 1.0));
        }
  }
  n.material.T_m = ex.T_m;

  // (5) material temperature
  n.material.T_m = step_material_temperature(n.material, &s.S_Tm, T_far, dt);

  // (6) combustion
  const ScalarGrid c = insulation_field(n.material, s.sdf, so.insulation);
  CombustionResult comb = combust(n.material, &c, dt);
  n.material.M_v = std::move(comb.M_v);
  n.material.M_c = std::move(comb.M_c);

  // (7) sources staged for the next step
  SourceFields src = combustion_sources(n.material, comb.dMv_dt, comb.dMc_dt);
  n.S_Tm = std::move(src.S_Tm);
  SmokeDistribution smoke = distribute_smoke_sources(src.S_Sm, s.air.T_a.desc(), s.air.solid, ratio);
  n.S_Sa = std::move(smoke.S_Sa);
  dg.dropped_smoke_sources += smoke.dropped_sources;
  dg.dropped_smoke_amount += smoke.dropped_amount;

  // (8) burn-out, SDF and mask
  const std::size_t burned = deactivate_burned_out(n.material, so.iso_threshold);
  dg.burned_out_cells += burned;
  // The field depends only on occupancy, which changes only at burn-out, so
  // the sdf_interval cadence rebuild would reproduce it exactly and is skipped.
  if (burned > 0) {
    SdfOptions opts;
    opts.margin = so.sdf_margin;
    n.sdf = rebuild_sdf(occupancy(n.material), kSdfOccupancyIso, opts);
    ++dg.sdf_rebuilds;
  }
  if (burned > 0) n.air.solid = compute_solid_mask(n.material, s.air.T_a.desc(), ratio, so.iso_threshold);

  // (4) air values inside solids come from the surrounding air
  extrapolate_into_solid(n.air.T_a, n.air.solid, env.T_amb);
  extrapolate_into_solid(n.air.S, n.air.solid, 0.0);

  apply_ignitions(sc, s.t, n.material, n.air.T_a, n.air.solid);

  n.divergence_target = compute_divergence_target(T_adv, n.air.T_a, dt, so.div_max);

  n.frame = s.frame + 1;
  n.t = n.frame * dt;
  return n;
}

std::vector<double> Engine::object_masses(const SimState& state) const {
  std::vector<double> remaining(scene_.objects.size(), 0.0);
  const MaterialState& m = state.material;
  m.object.for_each_active([&](const Coord& c, std::uint16_t obj) {
    if (m.is_active(c)) remaining[obj] += m.M_v.get(c) + m.M_c.get(c);
  });
  for (std::size_t o = 0; o < remaining.size(); ++o)
    remaining[o] = initial_object_mass_[o] > 0.0 ? remaining[o] / initial_object_mass_[o] : 0.0;
  return remaining;
}

double Engine::object_mass(const SimState& state, std::size_t object) const {
  return object_masses(state).at(object);
}

std::vector<ProbeReading> Engine::sample_probes(const SimState& state) const {
  std::vector<ProbeReading> out;
  if (scene_.probes.empty()) return out;
  const std::vector<double> masses = object_masses(state);
  const MaterialState& m = state.material;
  for (std::size_t n = 0; n < scene_.probes.size(); ++n) {
    const ProbeConfig& p = scene_.probes[n];
    double T = 0.0;
    const Coord cell = m.desc().cell_of(p.position);
    std::optional<double> tm;
    if (m.is_active(cell)) tm = masked_sample(m.T_m, p.position);
    T = tm ? *tm : sample_trilinear(state.air.T_a, p.position);
    const int obj = probe_objects_[n];
    const double mass = obj >= 0 ? masses[static_cast<std::size_t>(obj)] : std::numeric_limits<double>::quiet_NaN();
    out.push_back({state.t, p.id, T, mass});
  }
  return out;
}

ScalarGrid mass_density(const SimState& state) {
  const MaterialState& m = state.material;
  ScalarGrid out = m.M_v;
  m.I.for_each_active([&](const Coord& c, std::uint16_t) { out.set_active_value(c, m.M_v.get(c) + m.M_c.get(c)); });
  return out;
}

RunSummary run(const SceneConfig& scene, const RunSinks& sinks) {
  const Engine engine(scene);
  return run(engine, sinks);
}

RunSummary run(const Engine& engine, const RunSinks& sinks) {
  const SceneConfig& sc = engine.scene();
  RunSummary summary;
  summary.warnings = engine.warnings();
  const auto start = std::chrono::steady_clock::now();
  SimState state = engine.initial_state();
  if (sinks.snapshot) sinks.snapshot(state);
  for (int f = 0; f < sc.n_frames; ++f) {
    state = engine.step(state);
    summary.frames = state.frame;
    summary.diagnostics = state.diagnostics;
    if (sinks.probes && state.frame % sc.output.probe_interval == 0) sinks.probes(engine.sample_probes(state));
    if (sinks.snapshot && sc.output.snapshot_interval > 0 && state.frame % sc.output.snapshot_interval == 0)
      sinks.snapshot(state);
    if (sinks.frame) sinks.frame(state);
    if (sinks.stop && sinks.stop(state)) {
      summary.stopped_early = state.frame < sc.n_frames;
      break;
    }
  }
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary.seconds_per_frame = summary.frames > 0 ? summary.wall_seconds / summary.frames : 0.0;
  return summary;
}

void write_probe_rows(std::ostream& out, const std::vector<ProbeReading>& rows) {
  for (const auto& r : rows)
    out << format_number(r.t) << ',' << r.probe_id << ',' << format_number(r.temperature_K) << ','
        << format_number(r.object_mass) << '\n';
}

std::vector<ProbeReading> read_probe_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kProbeCsvHeader) throw IoError("probe CSV: missing header");
  std::vector<ProbeReading> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string f[4];
    for (auto& field : f)
      if (!std::getline(ls, field, ',')) throw IoError("probe CSV: expected 4 columns in '" + line + "'");
    rows.push_back({parse_number(f[0]), f[1], parse_number(f[2]), parse_number(f[3])});
  }
  return rows;
}

void write_frame_snapshots(const std::string& dir, const SimState& state, const std::vector<std::string>& fields) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  for (const auto& f : fields) {
    if (f == "T_a") {
      write_snapshot(d / "T_a.ffgd", state.air.T_a);
    } else if (f == "T_m") {
      write_snapshot(d / "T_m.ffgd", state.material.T_m);
    } else if (f == "M_v") {
      write_snapshot(d / "M_v.ffgd", state.material.M_v);
    } else if (f == "M_c") {
      write_snapshot(d / "M_c.ffgd", state.material.M_c);
    } else if (f == "S") {
      write_snapshot(d / "S.ffgd", state.air.S);
    } else if (f == "p") {
      write_snapshot(d / "p.ffgd", state.air.p);
    } else if (f == "sdf") {
      write_snapshot(d / "sdf.ffgd", state.sdf.distance);
    } else if (f == "u") {
      write_velocity_snapshot(d, state.air.u);
    } else {
      throw ConfigError("unknown snapshot field '" + f + "'");
    }
  }
}

}  // namespace flameforge
