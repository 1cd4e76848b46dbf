#include <doctest.h>

#include <cmath>
#include <fstream>

#include "foodvol/estimate.hpp"
#include "foodvol/fixtures.hpp"
#include "foodvol/synth.hpp"

#include "../common/test_util.hpp"

using namespace foodvol;

namespace {

Silhouette checkerboard_mask(int n) {
  Silhouette mask = Silhouette::blank(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if ((x + y) % 2 == 0) mask.set(x, y, true);
    }
  }
  return mask;
}

EstimateRecord run_scene(const SynthScene& scene, const AblationFlags& ablation = {}) {
  PipelineConfig config;
  config.grid = scene.grid;
  config.ablation = ablation;
  return run_pipeline(scene.input, scene.mesh, scene.rho_kcal_per_ml, scene.intrinsics,
                      config);
}

}  // namespace

TEST_SUITE_BEGIN("estimate");

TEST_CASE("mask_area counts foreground pixels") {
  CHECK(mask_area(Silhouette::blank(10, 10)) == 0);
  Silhouette full = Silhouette::blank(10, 10);
  for (auto& b : full.bits) b = 1;
  CHECK(mask_area(full) == 100);
  CHECK(mask_area(checkerboard_mask(4)) == 8);
}

TEST_CASE("scale_factor is the square root of the area ratio") {
  CHECK(scale_factor(100, 100) == doctest::Approx(1.0));
  CHECK(scale_factor(400, 100) == doctest::Approx(2.0));
  CHECK(scale_factor(100, 400) == doctest::Approx(0.5));
  try {
    scale_factor(0, 100);
    FAIL("expected empty-mask");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyMask);
  }
  try {
    scale_factor(100, 0);
    FAIL("expected empty-render");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyRender);
  }
}

TEST_CASE("estimate_volume applies the cubic law") {
  CHECK(estimate_volume(1.0, 250.0) == doctest::Approx(250.0));
  CHECK(estimate_volume(2.0, 10.0) == doctest::Approx(80.0));
  CHECK(estimate_volume(0.5, 80.0) == doctest::Approx(10.0));
  CHECK_THROWS_AS(estimate_volume(0.0, 10.0), Error);
  CHECK_THROWS_AS(estimate_volume(1.0, -2.0), Error);
}

TEST_CASE("estimate_energy multiplies density by volume") {
  CHECK(estimate_energy(0.52, 100.0) == doctest::Approx(52.0));
  CHECK(estimate_energy(0.52, 0.0) == 0.0);
  CHECK_THROWS_AS(estimate_energy(0.0, 10.0), Error);
  CHECK_THROWS_AS(estimate_energy(1.0, -1.0), Error);
}

TEST_CASE("density table lookups and CSV parsing") {
  testutil::TempDir tmp;
  {
    std::ofstream out(tmp / "density.csv");
    out << "label,kcal_per_ml,note\n"
        << "apple,0.52,fresh with skin\n"
        << "bagel,2.5\n"
        << "# comment line\n"
        << "pizza,2.24,per slice average\n";
  }
  const EnergyDensityTable table = load_density_csv(tmp / "density.csv");
  CHECK(table.lookup("apple") == doctest::Approx(0.52));
  CHECK(table.lookup("bagel") == doctest::Approx(2.5));
  try {
    table.lookup("unknown");
    FAIL("expected missing-density");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingDensity);
  }

  {
    std::ofstream out(tmp / "dup.csv");
    out << "a,1.0\na,2.0\n";
  }
  CHECK_THROWS_AS(load_density_csv(tmp / "dup.csv"), Error);
  {
    std::ofstream out(tmp / "neg.csv");
    out << "a,-1.0\n";
  }
  CHECK_THROWS_AS(load_density_csv(tmp / "neg.csv"), Error);
}

TEST_CASE("pipeline recovers the scaled cube volume within three percent") {
  SynthParams params;
  params.fixture = "cube";
  params.scale = 1.25;
  params.camera.distance_cm = 120.0;
  params.camera.elevation_deg = 78.0;
  const SynthScene scene = generate_scene(params);
  const EstimateRecord rec = run_scene(scene);
  REQUIRE(rec.ok);
  CHECK(std::abs(rec.volume_ml - scene.true_volume_ml) / scene.true_volume_ml < 0.03);
  CHECK(rec.pnp_residual_px < 1e-6);
}

TEST_CASE("estimate record satisfies its internal consistency invariants") {
  SynthParams params;
  params.fixture = "icosphere";
  const SynthScene scene = generate_scene(params);
  const EstimateRecord rec = run_scene(scene);
  REQUIRE(rec.ok);

  CHECK(std::abs(rec.scale * rec.scale * rec.area_rendered_px - rec.area_input_px) /
            rec.area_input_px <
        1e-9);
  CHECK(rec.volume_ml == rec.scale * rec.scale * rec.scale * rec.model_volume_ml);
  CHECK(rec.energy_kcal == scene.rho_kcal_per_ml * rec.volume_ml);
}

TEST_CASE("pipeline is deterministic") {
  SynthParams params;
  params.fixture = "torus";
  params.object_pose.theta_z_rad = 0.4;
  const SynthScene scene = generate_scene(params);
  const EstimateRecord a = run_scene(scene);
  const EstimateRecord b = run_scene(scene);
  CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("zeroing the depth-axis translation makes a single scene worse") {
  SynthParams params;
  params.fixture = "icosphere";
  params.object_pose = {2.0, 6.0, 0.0};
  params.camera.distance_cm = 150.0;
  params.camera.elevation_deg = 70.0;
  const SynthScene scene = generate_scene(params);

  const EstimateRecord plain = run_scene(scene);
  const EstimateRecord ablated = run_scene(scene, AblationFlags::parse("zero_ty"));
  REQUIRE(plain.ok);
  REQUIRE(ablated.ok);
  CHECK(ablated.ablation.zero_ty);
  CHECK(std::abs(ablated.volume_ml - scene.true_volume_ml) >
        std::abs(plain.volume_ml - scene.true_volume_ml));
}

TEST_CASE("full ablation equals truth for a centered object, hurts off-center") {
  // With the object at the board origin the zeroed pose IS the true pose,
  // so both runs land within rasterization tolerance of the truth.
  SynthParams centered;
  centered.fixture = "icosphere";
  centered.object_pose = {0.0, 0.0, 0.0};
  const SynthScene scene = generate_scene(centered);

  const EstimateRecord plain = run_scene(scene);
  const EstimateRecord ablated =
      run_scene(scene, AblationFlags::parse("zero_tx,zero_ty,zero_theta_z"));
  REQUIRE(plain.ok);
  REQUIRE(ablated.ok);
  CHECK(std::abs(ablated.volume_ml - scene.true_volume_ml) / scene.true_volume_ml < 0.01);
  CHECK(std::abs(plain.volume_ml - scene.true_volume_ml) / scene.true_volume_ml < 0.03);

  // Off-center, dropping the pose strictly degrades the estimate.
  SynthParams offset = centered;
  offset.object_pose = {3.0, 6.0, 0.0};
  offset.camera.distance_cm = 150.0;
  offset.camera.elevation_deg = 70.0;
  const SynthScene off_scene = generate_scene(offset);
  const EstimateRecord off_plain = run_scene(off_scene);
  const EstimateRecord off_ablated =
      run_scene(off_scene, AblationFlags::parse("zero_tx,zero_ty,zero_theta_z"));
  REQUIRE(off_plain.ok);
  REQUIRE(off_ablated.ok);
  CHECK(std::abs(off_ablated.volume_ml - off_scene.true_volume_ml) >
        std::abs(off_plain.volume_ml - off_scene.true_volume_ml));
}

TEST_CASE("an empty mask fails at the mask stage with partial diagnostics") {
  SynthParams params;
  SynthScene scene = generate_scene(params);
  scene.input.mask = Silhouette::blank(scene.image_width, scene.image_height);

  const EstimateRecord rec = run_scene(scene);
  CHECK(!rec.ok);
  CHECK(rec.failed_stage == "mask");
  REQUIRE(rec.error.has_value());
  CHECK(*rec.error == ErrorCode::EmptyMask);
  CHECK(rec.volume_ml == 0.0);
}

TEST_CASE("corner count mismatch is rejected before any solve") {
  SynthParams params;
  SynthScene scene = generate_scene(params);
  scene.input.corners.pop_back();
  const EstimateRecord rec = run_scene(scene);
  CHECK(!rec.ok);
  CHECK(rec.failed_stage == "setup");
}

TEST_SUITE_END();
