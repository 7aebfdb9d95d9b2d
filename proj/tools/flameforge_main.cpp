#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "flameforge/engine.hpp"
#include "flameforge/error.hpp"
#include "flameforge/parallel.hpp"
#include "flameforge/snapshot.hpp"
#include "flameforge/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace flameforge;

namespace {

json diagnostics_json(const Diagnostics& d) {
  return {{"last_cg_iterations", d.last_cg_iterations},
          {"max_cg_iterations", d.max_cg_iterations},
          {"total_cg_iterations", d.total_cg_iterations},
          {"last_cg_residual", d.last_cg_residual},
          {"incompatible_cells", d.incompatible_cells},
          {"dropped_smoke_sources", d.dropped_smoke_sources},
          {"dropped_smoke_amount", d.dropped_smoke_amount},
          {"burned_out_cells", d.burned_out_cells},
          {"sdf_rebuilds", d.sdf_rebuilds}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
}

std::string frame_dir(const fs::path& root, int frame) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%06d", frame);
  return (root / "snapshots" / name).string();
}

int cmd_run(const std::string& config, const std::string& out_dir, const std::vector<std::string>& overrides) {
  if (!fs::exists(config)) throw IoError("config file '" + config + "' does not exist");
  const SceneConfig scene = load_scene(config, overrides);
  fs::create_directories(out_dir);
  const fs::path root(out_dir);
  std::ofstream probes(root / "probes.csv", std::ios::binary);
  if (!probes) throw IoError("cannot write '" + (root / "probes.csv").string() + "'");
  probes << kProbeCsvHeader << '\n';

  const Engine engine(scene);
  for (const auto& w : engine.warnings()) std::cerr << "warning: " << w << '\n';

  RunSinks sinks;
  sinks.probes = [&](const std::vector<ProbeReading>& rows) {
    write_probe_rows(probes, rows);
    probes.flush();
  };
  sinks.snapshot = [&](const SimState& s) { write_frame_snapshots(frame_dir(root, s.frame), s, scene.output.fields); };

  json summary = {{"scene", scene.name}, {"dt", scene.dt}, {"n_frames", scene.n_frames}};
  int status = 0;
  try {
    const RunSummary r = run(engine, sinks);
    summary["frames"] = r.frames;
    summary["wall_seconds"] = r.wall_seconds;
    summary["seconds_per_frame"] = r.seconds_per_frame;
    summary["diagnostics"] = diagnostics_json(r.diagnostics);
    summary["warnings"] = r.warnings;
  } catch (const SolverError& e) {
    summary["error"] = e.what();
    std::cerr << "error: " << e.what() << '\n';
    status = 1;
  }
  summary["threads"] = thread_count();
  probes.close();
  write_text(root / "summary.json", summary.dump(2) + "\n");
  return status;
}

void write_cube_outputs(const fs::path& root, const std::string& suffix, const CubeRun& run) {
  write_text(root / ("probes" + suffix + ".csv"), run.probe_csv());
  write_text(root / ("curves" + suffix + ".csv"), cube_curves_csv(run));
}

int cmd_validate_cube(const std::string& material, const std::string& out_dir, int max_frames) {
  CubeOptions opts;
  if (material == "charring") {
    opts.preset = CubePreset::charring;
  } else if (material == "noncharring") {
    opts.preset = CubePreset::noncharring;
  } else {
    throw ConfigError("--material must be charring or noncharring, got '" + material + "'");
  }
  opts.max_frames = max_frames;
  fs::create_directories(out_dir);
  const fs::path root(out_dir);

  const CubeRun main = run_cube(opts);
  write_cube_outputs(root, "", main);
  std::vector<ShapeCheck> checks = {check_crossing_order(main), check_mass_non_increasing(main)};
  if (opts.preset == CubePreset::charring) {
    CubeOptions bare = opts;
    bare.insulation = false;
    const CubeRun flat = run_cube(bare);
    write_cube_outputs(root, "_no_insulation", flat);
    checks.push_back(check_insulation_slows_burn(main, flat));
    checks.push_back(check_mass_parabolic(main));
  } else {
    checks.push_back(check_burn_completes(main));
    checks.push_back(check_late_core_rise(main));
    checks.push_back(check_mass_inflection(main));
  }

  json report = {{"material", material},
                 {"frames", main.summary.frames},
                 {"t_ignition", main.t_ignition},
                 {"t_end", main.t_end},
                 {"seconds_per_frame", main.summary.seconds_per_frame}};
  report["checks"] = json::array();
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    report["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    if (!c.passed) failed.push_back(c.name);
  }
  write_text(root / "report.json", report.dump(2) + "\n");
  if (!failed.empty()) {
    std::cerr << "validate-cube: failed check";
    for (const auto& f : failed) std::cerr << " '" << f << "'";
    std::cerr << '\n';
    return 2;
  }
  return 0;
}

bool looks_like_snapshot(const std::string& path) {
  if (fs::path(path).extension() == ".ffgd") return true;
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::equal(magic, magic + 4, kSnapshotMagic);
}

int cmd_info(const std::string& path) {
  if (!fs::exists(path)) throw IoError("'" + path + "' does not exist");
  if (looks_like_snapshot(path)) {
    const ScalarGrid g = read_snapshot(fs::path(path));
    const GridDesc& d = g.desc();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    g.for_each_active([&](const Coord&, double v) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    });
    std::cout << "resolution  " << d.resolution[0] << " x " << d.resolution[1] << " x " << d.resolution[2] << '\n'
              << "voxel size  " << d.voxel_size << " m\n"
              << "origin      " << d.origin.x << " " << d.origin.y << " " << d.origin.z << '\n'
              << "active      " << g.active_count() << '\n';
    if (g.active_count() > 0) std::cout << "min         " << lo << '\n' << "max         " << hi << '\n';
    return 0;
  }
  const SceneConfig scene = load_scene(path);
  std::cout << serialize_scene(scene);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flameforge: volumetric combustion simulator"};
  app.require_subcommand(1);

  std::string config, out_dir;
  std::vector<std::string> overrides;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scene and write probes, snapshots and a summary");
  run_cmd->add_option("config", config, "Scene file (JSON)")->required();
  run_cmd->add_option("-o,--output", out_dir, "Output directory")->required();
  run_cmd->add_option("--set", overrides, "Override a config value, e.g. --set dt=0.01");

  std::string material;
  int max_frames = CubeOptions{}.max_frames;
  auto* cube_cmd = app.add_subcommand("validate-cube", "Run the built-in cube combustion experiment");
  cube_cmd->add_option("--material", material, "charring or noncharring")->required();
  cube_cmd->add_option("-o,--output", out_dir, "Output directory")->required();
  cube_cmd->add_option("--max-frames", max_frames, "Frame budget per run");

  std::string info_path;
  auto* info_cmd = app.add_subcommand("info", "Describe a grid snapshot or a scene file");
  info_cmd->add_option("path", info_path, "Snapshot (.ffgd) or scene file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(config, out_dir, overrides);
    if (*cube_cmd) return cmd_validate_cube(material, out_dir, max_frames);
    if (*info_cmd) return cmd_info(info_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
