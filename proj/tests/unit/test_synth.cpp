#include <doctest.h>

#include "foodvol/synth.hpp"

#include "../common/test_util.hpp"

using namespace foodvol;

TEST_SUITE_BEGIN("synth");

TEST_CASE("random scenes are reproducible from the seed") {
  Rng a(7), b(7);
  const SynthScene s1 = random_scene(a, "torus", 1.25);
  const SynthScene s2 = random_scene(b, "torus", 1.25);
  CHECK(s1.input.mask == s2.input.mask);
  REQUIRE(s1.input.corners.size() == s2.input.corners.size());
  for (std::size_t i = 0; i < s1.input.corners.size(); ++i) {
    CHECK(s1.input.corners[i] == s2.input.corners[i]);
  }
  CHECK(s1.true_volume_ml == s2.true_volume_ml);

  Rng c(8);
  const SynthScene s3 = random_scene(c, "torus", 1.25);
  CHECK(s1.input.mask.bits != s3.input.mask.bits);
}

TEST_CASE("true volume follows the cubic law of the fixture volume") {
  SynthParams params;
  params.fixture = "cube";
  params.scale = 2.0;
  const SynthScene scene = generate_scene(params);
  CHECK(scene.true_volume_ml ==
        doctest::Approx(8.0 * mesh_volume(scene.mesh)).epsilon(1e-12));
  CHECK(scene.true_energy_kcal ==
        doctest::Approx(scene.rho_kcal_per_ml * scene.true_volume_ml));
}

TEST_CASE("generation fails when the camera does not face the grid") {
  SynthParams params;
  params.auto_look_at = false;
  params.camera.look_at = Vec3(500.0, 500.0, 0.0);  // grid far off-frame
  try {
    generate_scene(params);
    FAIL("expected generation failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GenerationFailed);
  }
}

TEST_CASE("corner noise is applied only when requested") {
  SynthParams params;
  const SynthScene clean = generate_scene(params);

  params.corner_noise_px = 0.5;
  Rng rng(3);
  const SynthScene noisy = generate_scene(params, &rng);
  double max_shift = 0.0;
  for (std::size_t i = 0; i < clean.input.corners.size(); ++i) {
    max_shift = std::max(max_shift,
                         (clean.input.corners[i] - noisy.input.corners[i]).norm());
  }
  CHECK(max_shift > 0.0);
  CHECK(max_shift < 5.0);
}

TEST_CASE("written scenes load back as a valid dataset") {
  testutil::TempDir tmp;
  Rng rng(21);
  std::vector<SynthScene> scenes;
  scenes.push_back(random_scene(rng, "cube", 1.0));
  scenes.push_back(random_scene(rng, "icosphere", 0.8));
  write_scenes(tmp.path(), scenes);

  const DatasetManifest manifest = load_manifest(tmp / "manifest.json");
  REQUIRE(manifest.scenes.size() == 2);
  const EvalContext ctx = build_eval_context(manifest);
  const EvaluationResult result = evaluate(manifest.scenes, ctx, PipelineConfig{});
  CHECK(result.report.n == 2);
  CHECK(result.report.n_failed == 0);
  CHECK(result.report.vmape < 5.0);
}

TEST_SUITE_END();
