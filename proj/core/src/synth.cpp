#include "foodvol/synth.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "foodvol/fixtures.hpp"
#include "foodvol/io.hpp"

namespace foodvol {
namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

bool mask_touches_border(const Silhouette& mask) {
  for (int x = 0; x < mask.width; ++x) {
    if (mask.at(x, 0) || mask.at(x, mask.height - 1)) return true;
  }
  for (int y = 0; y < mask.height; ++y) {
    if (mask.at(0, y) || mask.at(mask.width - 1, y)) return true;
  }
  return false;
}

}  // namespace

RigidTransform camera_from_params(const SynthCamera& cam) {
  if (!(cam.distance_cm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "camera distance must be positive");
  }
  if (cam.elevation_deg <= 0.0 || cam.elevation_deg >= 89.5) {
    throw Error(ErrorCode::InvalidArgument,
                "camera elevation must be in (0, 89.5) degrees");
  }
  const double el = cam.elevation_deg * kDegree;
  const double az = cam.azimuth_deg * kDegree;
  const double roll = cam.roll_deg * kDegree;

  const Vec3 offset(std::sin(az) * std::cos(el), std::cos(az) * std::cos(el),
                    std::sin(el));
  const Vec3 center = cam.look_at + cam.distance_cm * offset;
  const Vec3 forward = -offset;

  Vec3 right = Vec3(forward.y(), -forward.x(), 0.0).normalized();
  Vec3 down = forward.cross(right);
  const Vec3 right_rolled = std::cos(roll) * right + std::sin(roll) * down;
  const Vec3 down_rolled = -std::sin(roll) * right + std::cos(roll) * down;

  RigidTransform extrinsics;
  extrinsics.rotation.row(0) = right_rolled;
  extrinsics.rotation.row(1) = down_rolled;
  extrinsics.rotation.row(2) = forward;
  extrinsics.translation = -(extrinsics.rotation * center);
  return extrinsics;
}

double fixture_density(const std::string& fixture) {
  if (fixture == "cube") return 0.9;
  if (fixture == "box") return 1.0;
  if (fixture == "icosphere") return 1.1;
  if (fixture == "torus") return 0.8;
  return 1.0;
}

SynthScene generate_scene(const SynthParams& params, Rng* noise_rng) {
  SynthParams p = params;
  if (p.auto_look_at) {
    const Vec2 grid_center((p.grid.cols - 1) * p.grid.spacing_cm / 2.0,
                           (p.grid.rows - 1) * p.grid.spacing_cm / 2.0);
    p.camera.look_at = Vec3((grid_center.x() + p.object_pose.tx_cm) / 2.0,
                            (grid_center.y() + p.object_pose.ty_cm) / 2.0, 0.0);
  }

  SynthScene scene;
  scene.intrinsics = p.intrinsics;
  scene.image_width = p.image_width;
  scene.image_height = p.image_height;
  scene.grid = p.grid;
  scene.mesh = canonicalize(make_fixture(p.fixture));
  scene.rho_kcal_per_ml = fixture_density(p.fixture);
  scene.true_scale = p.scale;
  scene.true_object_pose = p.object_pose;
  scene.extrinsics = camera_from_params(p.camera);
  scene.true_volume_ml = p.scale * p.scale * p.scale * mesh_volume(scene.mesh);
  scene.true_energy_kcal = scene.rho_kcal_per_ml * scene.true_volume_ml;

  scene.input.id = p.fixture;
  scene.input.label = p.fixture;

  const std::vector<Vec3> grid_points =
      checkerboard_world_grid(p.grid.cols, p.grid.rows, p.grid.spacing_cm);
  const double margin = 4.0;
  for (const Vec3& g : grid_points) {
    Vec2 px;
    try {
      px = project_point(p.intrinsics, scene.extrinsics, g);
    } catch (const Error&) {
      throw Error(ErrorCode::GenerationFailed, "camera does not face the grid");
    }
    if (px.x() < margin || px.y() < margin || px.x() > p.image_width - 1 - margin ||
        px.y() > p.image_height - 1 - margin) {
      throw Error(ErrorCode::GenerationFailed, "grid corner projects outside the image");
    }
    if (noise_rng != nullptr && p.corner_noise_px > 0.0) {
      px.x() += p.corner_noise_px * noise_rng->normal();
      px.y() += p.corner_noise_px * noise_rng->normal();
    }
    scene.input.corners.push_back(px);
  }

  const TriangleMesh posed = apply_object_pose(scene.mesh, p.object_pose, p.scale);
  const Mat34 proj = projection_matrix(p.intrinsics, scene.extrinsics);
  Silhouette mask;
  try {
    mask = render_silhouette(posed, proj, p.image_width, p.image_height);
  } catch (const Error&) {
    throw Error(ErrorCode::GenerationFailed, "object is behind the camera");
  }
  if (mask_touches_border(mask)) {
    throw Error(ErrorCode::GenerationFailed, "object silhouette is clipped at the border");
  }
  if (mask.area() < 64) {
    throw Error(ErrorCode::GenerationFailed, "object silhouette is too small");
  }
  scene.input.mask = std::move(mask);
  return scene;
}

SynthScene random_scene(Rng& rng, const std::string& fixture, double scale) {
  // Flat-sided fixtures keep a part of their silhouette (the vertical
  // faces) whose area moves with the rotation angle, and a square footprint
  // hides that angle from the covariance estimate. Their scenes therefore
  // stay close to nadir where the face slivers vanish; rotation-symmetric
  // fixtures get the full pose range.
  const bool flat_sided = fixture == "cube" || fixture == "box";

  for (int attempt = 0; attempt < 100; ++attempt) {
    SynthParams p;
    p.fixture = fixture;
    p.scale = scale;
    p.object_pose.tx_cm = (rng.coin() ? 1.0 : -1.0) * rng.uniform(2.0, 6.0);
    p.object_pose.ty_cm = (rng.coin() ? 1.0 : -1.0) * rng.uniform(3.0, 9.0);
    if (fixture != "cube") {
      p.object_pose.theta_z_rad =
          rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
    }
    if (flat_sided) {
      p.camera.distance_cm = rng.uniform(150.0, 220.0);
      p.camera.elevation_deg = rng.uniform(85.0, 88.0);
      // keep a little tilt so pixel rounding never locks onto the axes
      p.camera.azimuth_deg = (rng.coin() ? 1.0 : -1.0) * rng.uniform(1.0, 5.0);
      p.camera.roll_deg = (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.5, 2.0);
    } else {
      p.camera.distance_cm = rng.uniform(130.0, 210.0);
      p.camera.elevation_deg = rng.uniform(65.0, 85.0);
      p.camera.azimuth_deg = rng.uniform(-35.0, 35.0);
      p.camera.roll_deg = rng.uniform(-8.0, 8.0);
    }
    try {
      SynthScene scene = generate_scene(p);
      scene.input.id = fixture + "_" + std::to_string(rng.next_u64() % 1000000);
      return scene;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GenerationFailed) throw;
    }
  }
  throw Error(ErrorCode::GenerationFailed,
              "no valid random scene found in 100 attempts");
}

void write_scenes(const std::filesystem::path& dir, std::span<const SynthScene> scenes) {
  if (scenes.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no scenes to write");
  }
  std::filesystem::create_directories(dir / "masks");
  std::filesystem::create_directories(dir / "meshdb");

  const SynthScene& first = scenes.front();
  IntrinsicsFile intr{first.intrinsics, first.image_width, first.image_height};
  save_intrinsics_json(intr, dir / "intrinsics.json");

  std::string density_csv = "label,kcal_per_ml,note\n";
  std::set<std::string> labels;
  nlohmann::json manifest;
  manifest["grid"] = {{"cols", first.grid.cols},
                      {"rows", first.grid.rows},
                      {"spacing_cm", first.grid.spacing_cm}};
  manifest["mesh_db"] = "meshdb";
  manifest["density"] = "density.csv";
  manifest["intrinsics"] = "intrinsics.json";
  manifest["scenes"] = nlohmann::json::array();

  int index = 0;
  for (const SynthScene& scene : scenes) {
    const std::string id = scene.input.id + "_" + std::to_string(index);
    ++index;
    const std::string mask_rel = "masks/" + id + ".png";
    save_mask_png(scene.input.mask, dir / mask_rel);
    if (labels.insert(scene.input.label).second) {
      save_mesh(scene.mesh, dir / "meshdb" / (scene.input.label + ".obj"));
      density_csv += scene.input.label + "," + std::to_string(scene.rho_kcal_per_ml) +
                     ",synthetic fixture\n";
    }

    nlohmann::json corners = nlohmann::json::array();
    for (const Vec2& c : scene.input.corners) {
      corners.push_back({c.x(), c.y()});
    }
    manifest["scenes"].push_back({{"id", id},
                                  {"label", scene.input.label},
                                  {"mask", mask_rel},
                                  {"corners", corners},
                                  {"volume_ml", scene.true_volume_ml},
                                  {"weight_g", scene.true_volume_ml},
                                  {"energy_kcal", scene.true_energy_kcal},
                                  {"true_scale", scene.true_scale},
                                  {"true_object_pose",
                                   {{"tx_cm", scene.true_object_pose.tx_cm},
                                    {"ty_cm", scene.true_object_pose.ty_cm},
                                    {"theta_z_rad", scene.true_object_pose.theta_z_rad}}}});
  }
  write_file_atomic(dir / "density.csv", density_csv);
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace foodvol
