#include <benchmark/benchmark.h>

#include <random>

#include "flameforge/engine.hpp"
#include "flameforge/fluid.hpp"
#include "flameforge/sdf.hpp"
#include "flameforge/validation.hpp"

using namespace flameforge;

namespace {

GridDesc cube_desc(int n, double h) {
  GridDesc d;
  d.resolution = {n, n, n};
  d.voxel_size = h;
  return d;
}

void BM_CubeStep(benchmark::State& state) {
  CubeOptions o;
  o.preset = state.range(0) ? CubePreset::charring : CubePreset::noncharring;
  const Engine engine(make_cube_scene(o));
  SimState s = engine.initial_state();
  for (auto _ : state) {
    s = engine.step(s);
    benchmark::DoNotOptimize(s.t);
  }
  state.SetLabel(state.range(0) ? "charring" : "noncharring");
}
BENCHMARK(BM_CubeStep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_PressureProject(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridDesc d = cube_desc(n, 1.0 / n);
  MacVelocityField u(d);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  for (int a = 0; a < 3; ++a)
    for (double& x : u.component(a)) x = v(rng);
  const ScalarGrid target = create_dense_grid(d, 0.0);
  const CellMask solid(d);
  ProjectionOptions o;
  o.boundary.faces.fill(FaceBoundary::closed);
  o.boundary.faces[5] = FaceBoundary::open;
  int iterations = 0;
  for (auto _ : state) {
    const ProjectionResult r = pressure_project(u, target, solid, 0.033, o);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.residual);
  }
  state.counters["cg_iterations"] = iterations;
}
BENCHMARK(BM_PressureProject)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_AdvectScalar(benchmark::State& state) {
  const GridDesc d = cube_desc(static_cast<int>(state.range(0)), 0.004);
  const MacVelocityField u(d, {0.3, 0.1, 0.5});
  const ScalarGrid f = create_dense_grid(d, 293.0);
  for (auto _ : state) benchmark::DoNotOptimize(advect_maccormack(f, u, 0.033));
}
BENCHMARK(BM_AdvectScalar)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_RebuildSdf(benchmark::State& state) {
  // The cube's material grid: 150^3 cells at 0.8 mm holding a 40 mm block.
  const GridDesc d = cube_desc(150, 0.0008);
  ScalarGrid mass = create_grid(d, 0.0);
  for (int k = 25; k < 75; ++k)
    for (int j = 50; j < 100; ++j)
      for (int i = 50; i < 100; ++i) mass.set({i, j, k}, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(rebuild_sdf(mass, 0.5));
}
BENCHMARK(BM_RebuildSdf)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
