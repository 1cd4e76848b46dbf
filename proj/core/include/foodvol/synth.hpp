#pragma once

#include <filesystem>
#include <span>

#include "foodvol/dataset.hpp"
#include "foodvol/estimate.hpp"
#include "foodvol/rng.hpp"

namespace foodvol {

// Camera placement relative to a look-at point on the board plane. Azimuth 0
// puts the camera on the +Y side (the near rows of the grid), elevation is
// the angle above the plane, roll spins about the optical axis.
struct SynthCamera {
  double distance_cm = 70.710678118654755;  // 50 cm up at 45 degrees
  double elevation_deg = 45.0;
  double azimuth_deg = 0.0;
  double roll_deg = 0.0;
  Vec3 look_at = Vec3::Zero();
};

struct SynthParams {
  std::string fixture = "cube";
  double scale = 1.0;
  ObjectPose object_pose{2.0, 4.0, 0.0};
  SynthCamera camera;
  bool auto_look_at = true;  // aim between grid center and object
  GridSpec grid;
  CameraIntrinsics intrinsics{12000.0, 12000.0, 1023.5, 767.5, 0.0};
  int image_width = 2048;
  int image_height = 1536;
  double corner_noise_px = 0.0;  // optional Gaussian noise on annotations
};

// A self-contained scene: the rendered ground-truth silhouette, the
// projected grid corners, the camera truth, and the fixture mesh whose
// scaled volume is the scene's ground-truth volume.
struct SynthScene {
  SceneInput input;
  CameraIntrinsics intrinsics;
  int image_width = 0;
  int image_height = 0;
  GridSpec grid;
  TriangleMesh mesh;  // canonical, unit scale
  double rho_kcal_per_ml = 1.0;
  double true_volume_ml = 0.0;
  double true_energy_kcal = 0.0;
  double true_scale = 1.0;
  ObjectPose true_object_pose;
  RigidTransform extrinsics;  // ground-truth world -> camera
};

// World -> camera transform for the given placement.
RigidTransform camera_from_params(const SynthCamera& cam);

double fixture_density(const std::string& fixture);

// Builds the scene, projecting all grid corners and rendering the mask.
// Throws GenerationFailed when the grid or the object is not fully and
// cleanly in view (corner behind the camera, mask clipped at the border,
// or a silhouette too small to be meaningful).
SynthScene generate_scene(const SynthParams& params, Rng* noise_rng = nullptr);

// Deterministic random scene: samples camera and object pose from ranges
// that keep the grid and object in frame, retrying the draw until a valid
// configuration appears.
SynthScene random_scene(Rng& rng, const std::string& fixture, double scale);

// Writes masks/, meshdb/, intrinsics.json, density.csv and manifest.json
// under `dir`. All scenes must share grid and intrinsics.
void write_scenes(const std::filesystem::path& dir, std::span<const SynthScene> scenes);

}  // namespace foodvol
