#include <benchmark/benchmark.h>

#include "foodvol/fixtures.hpp"
#include "foodvol/pnp.hpp"
#include "foodvol/render.hpp"
#include "foodvol/synth.hpp"

using namespace foodvol;

namespace {

SynthScene canonical_scene(const std::string& fixture) {
  SynthParams params;
  params.fixture = fixture;
  return generate_scene(params);
}

void BM_SolvePnp(benchmark::State& state) {
  const SynthScene scene = canonical_scene("cube");
  const auto grid = checkerboard_world_grid(scene.grid.cols, scene.grid.rows,
                                            scene.grid.spacing_cm);
  std::vector<Correspondence> cs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cs.push_back({scene.input.corners[i], grid[i]});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_pnp(cs, scene.intrinsics));
  }
}
BENCHMARK(BM_SolvePnp);

void BM_RenderSilhouette(benchmark::State& state) {
  const SynthScene scene = canonical_scene("icosphere");
  const TriangleMesh posed =
      apply_object_pose(scene.mesh, scene.true_object_pose, scene.true_scale);
  const Mat34 p = projection_matrix(scene.intrinsics, scene.extrinsics);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        render_silhouette(posed, p, scene.image_width, scene.image_height));
  }
}
BENCHMARK(BM_RenderSilhouette);

void BM_MeshVolume(benchmark::State& state) {
  const TriangleMesh sphere = make_icosphere(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mesh_volume(sphere));
  }
  state.SetComplexityN(static_cast<std::int64_t>(sphere.triangles.size()));
}
BENCHMARK(BM_MeshVolume)->Arg(2)->Arg(3)->Arg(4)->Complexity();

void BM_FullPipeline(benchmark::State& state) {
  const SynthScene scene = canonical_scene("cube");
  PipelineConfig config;
  config.grid = scene.grid;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_pipeline(scene.input, scene.mesh,
                                          scene.rho_kcal_per_ml, scene.intrinsics,
                                          config));
  }
}
BENCHMARK(BM_FullPipeline);

}  // namespace

BENCHMARK_MAIN();
