#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "foodvol/dataset.hpp"
#include "foodvol/fixtures.hpp"
#include "foodvol/io.hpp"
#include "foodvol/synth.hpp"

namespace fs = std::filesystem;
using foodvol::Error;
using foodvol::ErrorCode;

namespace {

struct CommonConfig {
  std::string ablate;
  std::string config_file;
  std::string debug_dir;
};

foodvol::AblationFlags resolve_ablation(const CommonConfig& cc, std::string* debug_dir) {
  std::string ablate = cc.ablate;
  if (!cc.config_file.empty()) {
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(foodvol::read_file(cc.config_file));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("bad config file: ") + e.what());
    }
    if (ablate.empty() && cfg.contains("ablate")) {
      if (cfg["ablate"].is_array()) {
        std::string joined;
        for (const auto& f : cfg["ablate"]) {
          if (!joined.empty()) joined += ',';
          joined += f.get<std::string>();
        }
        ablate = joined;
      } else {
        ablate = cfg["ablate"].get<std::string>();
      }
    }
    if (debug_dir != nullptr && debug_dir->empty()) {
      *debug_dir = cfg.value("debug_dir", std::string());
    }
  }
  return foodvol::AblationFlags::parse(ablate);
}

std::vector<foodvol::Vec2> load_corners_json(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(foodvol::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError,
                "bad corners file " + path.string() + ": " + e.what());
  }
  const nlohmann::json& arr = j.is_object() && j.contains("corners") ? j["corners"] : j;
  if (!arr.is_array()) {
    throw Error(ErrorCode::ValidationError,
                "corners file must hold an array of [u, v] pairs");
  }
  std::vector<foodvol::Vec2> corners;
  for (const auto& c : arr) {
    corners.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
  }
  return corners;
}

fs::path mesh_db_or_env(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("FOODVOL_MESH_DB"); env != nullptr && *env != '\0') {
    return env;
  }
  throw Error(ErrorCode::InvalidArgument,
              "mesh database not given (--mesh-db or FOODVOL_MESH_DB)");
}

int run_estimate(const std::string& mask_file, const std::string& corners_file,
                 const std::string& manifest_file, const std::string& scene_id,
                 const std::string& intrinsics_file, const std::string& mesh_db_flag,
                 const std::string& density_file, const std::string& label_flag,
                 const std::string& image_file, const foodvol::GridSpec& grid,
                 const CommonConfig& cc) {
  std::string debug_dir = cc.debug_dir;
  foodvol::PipelineConfig config;
  config.ablation = resolve_ablation(cc, &debug_dir);
  config.grid = grid;

  foodvol::SceneInput scene;
  fs::path image_path = image_file;

  if (!manifest_file.empty()) {
    const foodvol::DatasetManifest manifest = foodvol::load_manifest(manifest_file);
    config.grid = manifest.grid;
    const auto it = std::find_if(manifest.scenes.begin(), manifest.scenes.end(),
                                 [&](const auto& e) { return e.id == scene_id; });
    if (it == manifest.scenes.end()) {
      throw Error(ErrorCode::ValidationError,
                  "scene id '" + scene_id + "' not found in manifest");
    }
    scene.id = it->id;
    scene.label = label_flag.empty() ? it->label : label_flag;
    scene.corners = it->corners;
    scene.mask = foodvol::load_mask_png(it->mask_path);
    if (image_path.empty()) image_path = it->image_path;
  } else {
    if (mask_file.empty() || corners_file.empty() || label_flag.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "need --mask, --corners and --label (or --manifest with --id)");
    }
    scene.id = fs::path(mask_file).stem().string();
    scene.label = label_flag;
    scene.corners = load_corners_json(corners_file);
    scene.mask = foodvol::load_mask_png(mask_file);
  }

  const foodvol::IntrinsicsFile intr = foodvol::load_intrinsics_json(intrinsics_file);
  if (intr.image_width != scene.mask.width || intr.image_height != scene.mask.height) {
    throw Error(ErrorCode::ValidationError,
                "mask is " + std::to_string(scene.mask.width) + "x" +
                    std::to_string(scene.mask.height) + " but intrinsics declare " +
                    std::to_string(intr.image_width) + "x" +
                    std::to_string(intr.image_height));
  }

  const fs::path db = mesh_db_or_env(mesh_db_flag);
  const foodvol::TriangleMesh mesh =
      foodvol::canonicalize(foodvol::load_mesh(db / (scene.label + ".obj")));
  const double rho = foodvol::load_density_csv(density_file).lookup(scene.label);

  foodvol::Silhouette rendered;
  const foodvol::EstimateRecord record =
      foodvol::run_pipeline(scene, mesh, rho, intr.k, config, &rendered);
  std::cout << record.to_json().dump(2) << "\n";

  if (!debug_dir.empty() && record.ok) {
    fs::create_directories(debug_dir);
    foodvol::save_mask_png(rendered, fs::path(debug_dir) / (scene.id + "_rendered.png"));
    if (!image_path.empty()) {
      try {
        const foodvol::RgbImage image = foodvol::load_rgb_png(image_path);
        foodvol::save_rgb_png(foodvol::overlay_boundary(image, rendered),
                              fs::path(debug_dir) / (scene.id + "_overlay.png"));
      } catch (const Error& e) {
        std::cerr << "warning: skipping overlay, cannot decode image: " << e.what()
                  << "\n";
      }
    }
  }

  if (!record.ok) {
    std::cerr << "stage '" << record.failed_stage
              << "' failed: " << record.error_message << "\n";
    return foodvol::exit_code_for(record.error.value_or(ErrorCode::EvaluationFailed));
  }
  return 0;
}

void write_one_evaluation(const std::vector<foodvol::SceneEntry>& entries,
                          const foodvol::EvalContext& ctx,
                          const foodvol::AblationFlags& ablation,
                          std::optional<std::uint64_t> split_seed, bool test_only,
                          int jobs, const fs::path& out_dir) {
  foodvol::PipelineConfig config;
  config.ablation = ablation;
  const foodvol::EvaluationResult result = foodvol::evaluate(entries, ctx, config, jobs);

  fs::create_directories(out_dir);
  nlohmann::json report = result.report.to_json();
  report["ablation"] = ablation.to_string();
  if (split_seed) report["split_seed"] = *split_seed;
  report["test_only"] = test_only;
  foodvol::write_file_atomic(out_dir / "report.json", report.dump(2) + "\n");
  const std::string human = foodvol::human_report(result.report);
  foodvol::write_file_atomic(out_dir / "report.txt", human);
  foodvol::write_file_atomic(out_dir / "per_scene.csv", foodvol::per_scene_csv(result));
  std::cout << human;
}

int run_evaluate(const std::string& manifest_file, const std::string& intrinsics_file,
                 const std::string& mesh_db_flag, const std::string& density_file,
                 const std::string& out_dir, std::optional<std::uint64_t> split_seed,
                 double test_fraction, bool test_only, int jobs, const CommonConfig& cc) {
  const foodvol::DatasetManifest manifest = foodvol::load_manifest(manifest_file);
  if (manifest.scenes.empty()) {
    throw Error(ErrorCode::EvaluationFailed, "manifest has no scenes");
  }

  std::vector<foodvol::SceneEntry> entries = manifest.scenes;
  if (split_seed) {
    const foodvol::SplitResult split =
        foodvol::split_dataset(entries, test_fraction, *split_seed);
    if (test_only) {
      entries = split.test;
    } else {
      entries = split.train;
      entries.insert(entries.end(), split.test.begin(), split.test.end());
    }
  } else if (test_only) {
    std::erase_if(entries, [](const auto& e) { return e.split != "test"; });
    if (entries.empty()) {
      throw Error(ErrorCode::EvaluationFailed,
                  "--test-only: manifest has no entries tagged test "
                  "(tag them or pass --split-seed)");
    }
  }

  fs::path db_override;
  if (!mesh_db_flag.empty()) {
    db_override = mesh_db_flag;
  } else if (manifest.mesh_db.empty()) {
    db_override = mesh_db_or_env("");
  }
  const foodvol::EvalContext ctx =
      foodvol::build_eval_context(manifest, intrinsics_file, db_override, density_file);

  if (cc.ablate == "sweep") {
    // one report per pose-ablation row: full pose, each translation axis
    // dropped, both dropped, rotation dropped
    const std::vector<std::pair<std::string, std::string>> rows{
        {"full", ""},
        {"zero_tx", "zero_tx"},
        {"zero_ty", "zero_ty"},
        {"zero_tx_ty", "zero_tx,zero_ty"},
        {"zero_theta_z", "zero_theta_z"},
    };
    for (const auto& [tag, flags] : rows) {
      std::cout << "== ablation " << (flags.empty() ? "(none)" : flags) << "\n";
      write_one_evaluation(entries, ctx, foodvol::AblationFlags::parse(flags),
                           split_seed, test_only, jobs, fs::path(out_dir) / tag);
    }
    return 0;
  }

  write_one_evaluation(entries, ctx, resolve_ablation(cc, nullptr), split_seed,
                       test_only, jobs, out_dir);
  return 0;
}

int run_synth(const std::string& out_dir, const std::string& fixture, double scale,
              bool random, std::uint64_t seed, int count, const foodvol::SynthParams& base,
              double corner_noise) {
  std::vector<foodvol::SynthScene> scenes;
  if (random) {
    foodvol::Rng rng(seed);
    for (int i = 0; i < count; ++i) {
      scenes.push_back(foodvol::random_scene(rng, fixture, scale));
    }
  } else {
    foodvol::SynthParams p = base;
    p.fixture = fixture;
    p.scale = scale;
    p.corner_noise_px = corner_noise;
    foodvol::Rng rng(seed);
    foodvol::Rng* noise = corner_noise > 0.0 ? &rng : nullptr;
    for (int i = 0; i < count; ++i) {
      scenes.push_back(foodvol::generate_scene(p, noise));
    }
  }
  foodvol::write_scenes(out_dir, scenes);
  std::cout << "wrote " << scenes.size() << " scene(s) to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-image food volume and energy estimation"};
  app.require_subcommand(1);

  CommonConfig cc;

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate one scene and print the record");
  std::string mask_file, corners_file, manifest_file, scene_id, intrinsics_file;
  std::string mesh_db_flag, density_file, label_flag, image_file;
  foodvol::GridSpec grid;
  est->add_option("--mask", mask_file, "Segmentation mask PNG");
  est->add_option("--corners", corners_file, "JSON file with 12 [u,v] corner pixels");
  est->add_option("--manifest", manifest_file, "Take scene inputs from a manifest");
  est->add_option("--id", scene_id, "Scene id inside --manifest");
  est->add_option("--intrinsics", intrinsics_file, "Camera intrinsics JSON")->required();
  est->add_option("--mesh-db", mesh_db_flag, "Mesh database directory (or FOODVOL_MESH_DB)");
  est->add_option("--density", density_file, "Energy density CSV")->required();
  est->add_option("--label", label_flag, "Food label (else from manifest entry)");
  est->add_option("--image", image_file, "RGB image, only used for debug overlays");
  est->add_option("--grid-cols", grid.cols, "Checkerboard corner columns");
  est->add_option("--grid-rows", grid.rows, "Checkerboard corner rows");
  est->add_option("--grid-spacing", grid.spacing_cm, "Corner spacing, cm");
  est->add_option("--ablate", cc.ablate, "Comma list: zero_tx,zero_ty,zero_theta_z");
  est->add_option("--config", cc.config_file, "JSON run config");
  est->add_option("--debug-dir", cc.debug_dir, "Write rendered mask / overlay PNGs here");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Evaluate a dataset manifest");
  std::string ev_manifest, ev_intrinsics, ev_mesh_db, ev_density, ev_out = "eval_out";
  std::uint64_t ev_seed = 0;
  double ev_fraction = 0.2;
  bool ev_test_only = false;
  int ev_jobs = 0;
  ev->add_option("--manifest", ev_manifest, "Dataset manifest JSON")->required();
  ev->add_option("--intrinsics", ev_intrinsics, "Override manifest intrinsics path");
  ev->add_option("--mesh-db", ev_mesh_db, "Override manifest mesh db path");
  ev->add_option("--density", ev_density, "Override manifest density path");
  ev->add_option("--out", ev_out, "Output directory for report files");
  auto* seed_opt = ev->add_option("--split-seed", ev_seed, "Stratified 80-20 split seed");
  ev->add_option("--test-fraction", ev_fraction, "Test fraction for --split-seed");
  ev->add_flag("--test-only", ev_test_only, "Evaluate only the test split");
  ev->add_option("--jobs", ev_jobs, "Worker threads (0 = all cores)");
  ev->add_option("--ablate", cc.ablate, "Comma list: zero_tx,zero_ty,zero_theta_z");
  ev->add_option("--config", cc.config_file, "JSON run config");

  // synth
  auto* sy = app.add_subcommand("synth", "Generate a self-contained synthetic scene set");
  std::string sy_out, sy_fixture = "cube";
  double sy_scale = 1.0, sy_noise = 0.0;
  bool sy_random = false;
  std::uint64_t sy_seed = 1;
  int sy_count = 1;
  foodvol::SynthParams sp;
  sy->add_option("--out", sy_out, "Output scene directory")->required();
  sy->add_option("--fixture", sy_fixture, "cube | box | icosphere | torus");
  sy->add_option("--scale", sy_scale, "Object scale factor (true volume = scale^3 * V)");
  sy->add_flag("--random", sy_random, "Sample camera and object pose");
  sy->add_option("--seed", sy_seed, "Seed for --random / --corner-noise");
  sy->add_option("--count", sy_count, "Number of scenes");
  sy->add_option("--cam-distance", sp.camera.distance_cm, "Camera distance, cm");
  sy->add_option("--cam-elevation", sp.camera.elevation_deg, "Camera elevation, deg");
  sy->add_option("--cam-azimuth", sp.camera.azimuth_deg, "Camera azimuth, deg");
  sy->add_option("--cam-roll", sp.camera.roll_deg, "Camera roll, deg");
  sy->add_option("--object-x", sp.object_pose.tx_cm, "Object x offset, cm");
  sy->add_option("--object-y", sp.object_pose.ty_cm, "Object y offset, cm");
  double theta_deg = 0.0;
  sy->add_option("--object-theta-deg", theta_deg, "Object rotation about up axis, deg");
  sy->add_option("--focal", sp.intrinsics.fx, "Focal length, px");
  sy->add_option("--width", sp.image_width, "Image width, px");
  sy->add_option("--height", sp.image_height, "Image height, px");
  sy->add_option("--corner-noise", sy_noise, "Gaussian corner noise sigma, px");

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) {
      return run_estimate(mask_file, corners_file, manifest_file, scene_id,
                          intrinsics_file, mesh_db_flag, density_file, label_flag,
                          image_file, grid, cc);
    }
    if (ev->parsed()) {
      return run_evaluate(ev_manifest, ev_intrinsics, ev_mesh_db, ev_density, ev_out,
                          seed_opt->count() > 0 ? std::optional(ev_seed) : std::nullopt,
                          ev_fraction, ev_test_only, ev_jobs, cc);
    }
    if (sy->parsed()) {
      sp.intrinsics.fy = sp.intrinsics.fx;
      sp.intrinsics.cx = (sp.image_width - 1) / 2.0;
      sp.intrinsics.cy = (sp.image_height - 1) / 2.0;
      sp.object_pose.theta_z_rad = theta_deg * 3.14159265358979323846 / 180.0;
      return run_synth(sy_out, sy_fixture, sy_scale, sy_random, sy_seed, sy_count, sp,
                       sy_noise);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return foodvol::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
