#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "foodvol/mesh.hpp"
#include "foodvol/pnp.hpp"
#include "foodvol/render.hpp"
#include "foodvol/silhouette.hpp"

namespace foodvol {

// kCal per mL by food-type label.
struct EnergyDensityTable {
  std::map<std::string, double> kcal_per_ml;

  double lookup(const std::string& label) const;  // throws MissingDensity
};

// CSV rows "label,kcal_per_ml[,note]"; a non-numeric first row is treated
// as a header.
EnergyDensityTable load_density_csv(const std::filesystem::path& path);

std::int64_t mask_area(const Silhouette& mask);

// sqrt(A / A'), the one-dimensional ratio of input and rendered areas.
double scale_factor(double area_input_px, double area_rendered_px);

// s^3 * V: a uniform linear scale changes volume cubically.
double estimate_volume(double scale, double model_volume_ml);

double estimate_energy(double rho_kcal_per_ml, double volume_ml);

struct GridSpec {
  int cols = 4;
  int rows = 3;
  double spacing_cm = 1.2;
};

struct PipelineConfig {
  AblationFlags ablation;
  GridSpec grid;
};

// One scene, already in memory. Corners are row-major from the top-right
// grid corner and must match grid.cols * grid.rows.
struct SceneInput {
  std::string id;
  std::string label;
  Silhouette mask;
  std::vector<Vec2> corners;
};

struct EstimateRecord {
  std::string id;
  std::string label;
  AblationFlags ablation;

  // Populated up to the failing stage.
  double area_input_px = 0.0;
  double area_rendered_px = 0.0;
  double scale = 0.0;
  double volume_ml = 0.0;
  double energy_kcal = 0.0;
  double model_volume_ml = 0.0;
  double pnp_residual_px = 0.0;
  double homography_transfer_error_px = 0.0;
  ObjectPose object_pose;
  RigidTransform camera_pose;  // camera in world coordinates
  int mask_components = 0;
  int triangles_discarded = 0;
  std::vector<std::string> warnings;

  bool ok = false;
  std::string failed_stage;  // empty on success
  std::optional<ErrorCode> error;
  std::string error_message;

  nlohmann::json to_json() const;
};

// Full per-scene pipeline: PnP from the grid corners, extrinsics inversion,
// DLT rectifier, object pose, unit-scale render, area ratio, cubic volume,
// energy. Stage failures are recorded on the result (failed_stage/error)
// rather than thrown. `rendered_out`, when given, receives the rendered
// silhouette for debug output.
EstimateRecord run_pipeline(const SceneInput& scene, const TriangleMesh& canonical_mesh,
                            double rho_kcal_per_ml, const CameraIntrinsics& intrinsics,
                            const PipelineConfig& config,
                            Silhouette* rendered_out = nullptr);

}  // namespace foodvol
