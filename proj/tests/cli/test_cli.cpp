#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "foodvol/io.hpp"
#include "foodvol/schema.hpp"

#include "../common/test_util.hpp"

namespace fs = std::filesystem;
using testutil::run_command;
using testutil::TempDir;

namespace {

const std::string kCli = FOODVOL_CLI_PATH;
const fs::path kSchemaDir = FOODVOL_SCHEMA_DIR;

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

nlohmann::json schema(const std::string& name) {
  return nlohmann::json::parse(foodvol::read_file(kSchemaDir / name));
}

// One shared scene directory for the read-only tests.
struct SceneFixture {
  TempDir tmp;
  fs::path dir;
  SceneFixture() : dir(tmp / "scene") {
    const auto r = run_command(kCli + " synth --out " + q(dir) + " --fixture cube");
    REQUIRE(r.exit_code == 0);
  }
  std::string estimate_args() const {
    return " --manifest " + q(dir / "manifest.json") + " --id cube_0 --intrinsics " +
           q(dir / "intrinsics.json") + " --mesh-db " + q(dir / "meshdb") +
           " --density " + q(dir / "density.csv");
  }
};

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("estimate emits a schema-valid record and exit code zero") {
  SceneFixture fx;
  const auto r = run_command(kCli + " estimate" + fx.estimate_args());
  REQUIRE(r.exit_code == 0);

  const nlohmann::json record = nlohmann::json::parse(r.output);
  foodvol::validate_schema(schema("estimate_record.schema.json"), record);
  CHECK(record["ok"] == true);
  CHECK(record["scale"].get<double>() > 0.5);
  CHECK(record["volume_ml"].get<double>() > 0.0);
  CHECK(record["energy_kcal"].get<double>() > 0.0);
}

TEST_CASE("estimate echoes ablation flags in the record") {
  SceneFixture fx;
  const auto r = run_command(kCli + " estimate" + fx.estimate_args() +
                             " --ablate zero_tx,zero_ty,zero_theta_z");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json record = nlohmann::json::parse(r.output);
  CHECK(record["ablation"]["zero_tx"] == true);
  CHECK(record["ablation"]["zero_ty"] == true);
  CHECK(record["ablation"]["zero_theta_z"] == true);
  CHECK(record["object_pose"]["tx_cm"] == 0.0);
}

TEST_CASE("a missing mask file maps to the input-error exit code") {
  SceneFixture fx;
  TempDir tmp;
  std::ofstream corners(tmp / "corners.json");
  corners << "[[0,0],[1,0],[2,0],[3,0],[0,1],[1,1],[2,1],[3,1],[0,2],[1,2],[2,2],[3,2]]";
  corners.close();

  const auto r = run_command(
      kCli + " estimate --mask " + q(tmp / "missing.png") + " --corners " +
      q(tmp / "corners.json") + " --label cube --intrinsics " +
      q(fx.dir / "intrinsics.json") + " --mesh-db " + q(fx.dir / "meshdb") +
      " --density " + q(fx.dir / "density.csv"));
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("missing.png") != std::string::npos);
}

TEST_CASE("nonzero distortion in the intrinsics file is rejected") {
  SceneFixture fx;
  nlohmann::json intr =
      nlohmann::json::parse(foodvol::read_file(fx.dir / "intrinsics.json"));
  intr["distortion"] = {0.01, 0.0, 0.0};
  foodvol::write_file_atomic(fx.dir / "distorted.json", intr.dump());

  const auto r = run_command(
      kCli + " estimate --manifest " + q(fx.dir / "manifest.json") +
      " --id cube_0 --intrinsics " + q(fx.dir / "distorted.json") + " --mesh-db " +
      q(fx.dir / "meshdb") + " --density " + q(fx.dir / "density.csv"));
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("distortion") != std::string::npos);
}

TEST_CASE("estimate writes debug renders when asked") {
  SceneFixture fx;
  const fs::path dbg = fx.tmp / "debug";
  const auto r = run_command(kCli + " estimate" + fx.estimate_args() + " --debug-dir " +
                             q(dbg));
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dbg / "cube_0_rendered.png"));
  const foodvol::Silhouette rendered = foodvol::load_mask_png(dbg / "cube_0_rendered.png");
  CHECK(rendered.area() > 0);
}

TEST_CASE("synth with a seed is byte-reproducible") {
  TempDir tmp;
  const auto r1 = run_command(kCli + " synth --out " + q(tmp / "a") +
                              " --fixture torus --random --seed 7 --count 3");
  const auto r2 = run_command(kCli + " synth --out " + q(tmp / "b") +
                              " --fixture torus --random --seed 7 --count 3");
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(foodvol::read_file(tmp / "a" / "manifest.json") ==
        foodvol::read_file(tmp / "b" / "manifest.json"));

  for (const auto& entry : fs::directory_iterator(tmp / "a" / "masks")) {
    const fs::path other = tmp / "b" / "masks" / entry.path().filename();
    CHECK(foodvol::read_file(entry.path()) == foodvol::read_file(other));
  }
}

TEST_CASE("evaluate produces schema-valid reports and deterministic CSVs") {
  TempDir tmp;
  const auto gen = run_command(kCli + " synth --out " + q(tmp / "set") +
                               " --fixture icosphere --random --seed 11 --count 6");
  REQUIRE(gen.exit_code == 0);

  const std::string eval_cmd = kCli + " evaluate --manifest " +
                               q(tmp / "set" / "manifest.json") + " --split-seed 5";
  const auto r1 = run_command(eval_cmd + " --out " + q(tmp / "out1"));
  REQUIRE(r1.exit_code == 0);
  const auto r2 = run_command(eval_cmd + " --out " + q(tmp / "out2"));
  REQUIRE(r2.exit_code == 0);

  const nlohmann::json report =
      nlohmann::json::parse(foodvol::read_file(tmp / "out1" / "report.json"));
  foodvol::validate_schema(schema("report.schema.json"), report);
  CHECK(report["n"].get<int>() == 6);

  CHECK(foodvol::read_file(tmp / "out1" / "per_scene.csv") ==
        foodvol::read_file(tmp / "out2" / "per_scene.csv"));

  // the manifest itself validates against its schema
  const nlohmann::json manifest =
      nlohmann::json::parse(foodvol::read_file(tmp / "set" / "manifest.json"));
  foodvol::validate_schema(schema("manifest.schema.json"), manifest);
}

TEST_CASE("evaluate without scenes exits nonzero") {
  TempDir tmp;
  foodvol::write_file_atomic(tmp / "empty.json", R"({"scenes": []})");
  const auto r = run_command(kCli + " evaluate --manifest " + q(tmp / "empty.json") +
                             " --out " + q(tmp / "out"));
  CHECK(r.exit_code == 5);
}

TEST_CASE("the mesh database can come from the environment") {
  SceneFixture fx;
  const std::string cmd =
      "FOODVOL_MESH_DB=" + q(fx.dir / "meshdb") + " " + kCli + " estimate --manifest " +
      q(fx.dir / "manifest.json") + " --id cube_0 --intrinsics " +
      q(fx.dir / "intrinsics.json") + " --density " + q(fx.dir / "density.csv");
  const auto r = run_command(cmd);
  CHECK(r.exit_code == 0);

  const std::string no_db = kCli + " estimate --manifest " + q(fx.dir / "manifest.json") +
                            " --id cube_0 --intrinsics " + q(fx.dir / "intrinsics.json") +
                            " --density " + q(fx.dir / "density.csv");
  CHECK(run_command("env -u FOODVOL_MESH_DB " + no_db).exit_code == 2);
}

TEST_CASE("estimate composites an overlay when the image is given") {
  SceneFixture fx;
  // fabricate an RGB capture matching the mask resolution
  const foodvol::Silhouette mask =
      foodvol::load_mask_png(fx.dir / "masks" / "cube_0.png");
  foodvol::RgbImage image;
  image.width = mask.width;
  image.height = mask.height;
  image.pixels.assign(static_cast<std::size_t>(mask.width) * mask.height * 3, 90);
  foodvol::save_rgb_png(image, fx.dir / "photo.png");

  const fs::path dbg = fx.tmp / "debug";
  const auto r = run_command(kCli + " estimate" + fx.estimate_args() + " --image " +
                             q(fx.dir / "photo.png") + " --debug-dir " + q(dbg));
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dbg / "cube_0_overlay.png"));
  const foodvol::RgbImage overlay = foodvol::load_rgb_png(dbg / "cube_0_overlay.png");
  bool has_red = false;
  for (std::size_t i = 0; i + 2 < overlay.pixels.size(); i += 3) {
    has_red |= overlay.pixels[i] == 255 && overlay.pixels[i + 1] == 0;
  }
  CHECK(has_red);
}

TEST_CASE("evaluate --ablate sweep emits one report per pose row") {
  TempDir tmp;
  const auto gen = run_command(kCli + " synth --out " + q(tmp / "set") +
                               " --fixture icosphere --random --seed 17 --count 4");
  REQUIRE(gen.exit_code == 0);
  const auto r = run_command(kCli + " evaluate --manifest " +
                             q(tmp / "set" / "manifest.json") + " --ablate sweep --out " +
                             q(tmp / "sweep"));
  REQUIRE(r.exit_code == 0);
  for (const char* row : {"full", "zero_tx", "zero_ty", "zero_tx_ty", "zero_theta_z"}) {
    CHECK(fs::exists(tmp / "sweep" / row / "report.json"));
  }
  const auto full =
      nlohmann::json::parse(foodvol::read_file(tmp / "sweep" / "full" / "report.json"));
  const auto no_ty =
      nlohmann::json::parse(foodvol::read_file(tmp / "sweep" / "zero_ty" / "report.json"));
  CHECK(no_ty["vmae_ml"].get<double>() > full["vmae_ml"].get<double>());
}

TEST_CASE("evaluate runs an ablation sweep row") {
  TempDir tmp;
  const auto gen = run_command(kCli + " synth --out " + q(tmp / "set") +
                               " --fixture torus --random --seed 3 --count 5");
  REQUIRE(gen.exit_code == 0);

  const std::string base = kCli + " evaluate --manifest " +
                           q(tmp / "set" / "manifest.json");
  REQUIRE(run_command(base + " --out " + q(tmp / "plain")).exit_code == 0);
  REQUIRE(run_command(base + " --out " + q(tmp / "no_ty") + " --ablate zero_ty")
              .exit_code == 0);

  const auto plain =
      nlohmann::json::parse(foodvol::read_file(tmp / "plain" / "report.json"));
  const auto ablated =
      nlohmann::json::parse(foodvol::read_file(tmp / "no_ty" / "report.json"));
  CHECK(ablated["ablation"] == "zero_ty");
  CHECK(ablated["vmae_ml"].get<double>() > plain["vmae_ml"].get<double>());
}

TEST_SUITE_END();
