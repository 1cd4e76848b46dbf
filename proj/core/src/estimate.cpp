#include "foodvol/estimate.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "foodvol/homography.hpp"

namespace foodvol {

double EnergyDensityTable::lookup(const std::string& label) const {
  const auto it = kcal_per_ml.find(label);
  if (it == kcal_per_ml.end()) {
    throw Error(ErrorCode::MissingDensity, "no energy density for label '" + label + "'");
  }
  return it->second;
}

EnergyDensityTable load_density_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open density table " + path.string());
  }
  EnergyDensityTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ls(line);
    std::string label, value_str;
    if (!std::getline(ls, label, ',') || !std::getline(ls, value_str, ',')) {
      throw Error(ErrorCode::ParseError,
                  "bad density row at " + path.string() + ":" + std::to_string(line_no));
    }
    double rho = 0.0;
    try {
      rho = std::stod(value_str);
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header row
      throw Error(ErrorCode::ParseError,
                  "bad density value at " + path.string() + ":" + std::to_string(line_no));
    }
    if (!(rho > 0.0)) {
      throw Error(ErrorCode::ValidationError,
                  "energy density must be positive for '" + label + "'");
    }
    if (!table.kcal_per_ml.emplace(label, rho).second) {
      throw Error(ErrorCode::ValidationError, "duplicate density label '" + label + "'");
    }
  }
  return table;
}

std::int64_t mask_area(const Silhouette& mask) { return mask.area(); }

double scale_factor(double area_input_px, double area_rendered_px) {
  if (!(area_input_px > 0.0)) {
    throw Error(ErrorCode::EmptyMask, "input mask area is zero");
  }
  if (!(area_rendered_px > 0.0)) {
    throw Error(ErrorCode::EmptyRender, "rendered mask area is zero");
  }
  return std::sqrt(area_input_px / area_rendered_px);
}

double estimate_volume(double scale, double model_volume_ml) {
  if (!(scale > 0.0) || !(model_volume_ml > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "scale and model volume must be positive");
  }
  return scale * scale * scale * model_volume_ml;
}

double estimate_energy(double rho_kcal_per_ml, double volume_ml) {
  if (!(rho_kcal_per_ml > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "energy density must be positive");
  }
  if (volume_ml < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "volume must be non-negative");
  }
  return rho_kcal_per_ml * volume_ml;
}

nlohmann::json EstimateRecord::to_json() const {
  nlohmann::json j;
  j["id"] = id;
  j["label"] = label;
  j["ok"] = ok;
  j["ablation"] = {{"zero_tx", ablation.zero_tx},
                   {"zero_ty", ablation.zero_ty},
                   {"zero_theta_z", ablation.zero_theta_z}};
  j["area_input_px"] = area_input_px;
  j["area_rendered_px"] = area_rendered_px;
  j["scale"] = scale;
  j["volume_ml"] = volume_ml;
  j["energy_kcal"] = energy_kcal;
  j["model_volume_ml"] = model_volume_ml;
  j["pnp_residual_px"] = pnp_residual_px;
  j["homography_transfer_error_px"] = homography_transfer_error_px;
  j["object_pose"] = {{"tx_cm", object_pose.tx_cm},
                      {"ty_cm", object_pose.ty_cm},
                      {"theta_z_rad", object_pose.theta_z_rad}};
  j["camera_position_cm"] = {camera_pose.translation.x(), camera_pose.translation.y(),
                             camera_pose.translation.z()};
  j["mask_components"] = mask_components;
  j["triangles_discarded"] = triangles_discarded;
  j["warnings"] = warnings;
  if (!ok) {
    j["failed_stage"] = failed_stage;
    j["error"] = error ? to_string(*error) : "unknown";
    j["error_message"] = error_message;
  }
  return j;
}

EstimateRecord run_pipeline(const SceneInput& scene, const TriangleMesh& canonical_mesh,
                            double rho_kcal_per_ml, const CameraIntrinsics& intrinsics,
                            const PipelineConfig& config, Silhouette* rendered_out) {
  EstimateRecord rec;
  rec.id = scene.id;
  rec.label = scene.label;
  rec.ablation = config.ablation;

  std::string stage = "setup";
  try {
    const std::vector<Vec3> grid = checkerboard_world_grid(
        config.grid.cols, config.grid.rows, config.grid.spacing_cm);
    if (scene.corners.size() != grid.size()) {
      throw Error(ErrorCode::ValidationError,
                  "scene has " + std::to_string(scene.corners.size()) +
                      " corners, grid expects " + std::to_string(grid.size()));
    }

    stage = "mask";
    const ComponentSplit split = largest_component(scene.mask);
    rec.mask_components = split.component_count;
    if (split.component_count == 0) {
      throw Error(ErrorCode::EmptyMask, "segmentation mask is empty");
    }
    if (split.component_count > 1) {
      rec.warnings.push_back("mask has " + std::to_string(split.component_count) +
                             " components; kept the largest");
    }
    const Silhouette& mask = split.largest;

    stage = "solve_pnp";
    std::vector<Correspondence> correspondences(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      correspondences[i] = {scene.corners[i], grid[i]};
    }
    const PnpResult pnp = solve_pnp(correspondences, intrinsics);
    rec.pnp_residual_px = pnp.mean_reprojection_error_px;

    stage = "invert_extrinsics";
    rec.camera_pose = invert_extrinsics(pnp.extrinsics);

    stage = "fit_homography";
    std::vector<Vec2> corner_px(grid.size()), board_cm(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      corner_px[i] = scene.corners[i];
      board_cm[i] = {grid[i].x(), grid[i].y()};
    }
    const HomographyFit rectifier = fit_homography(corner_px, board_cm);
    rec.homography_transfer_error_px = rectifier.symmetric_transfer_error_px;

    stage = "estimate_object_pose";
    rec.object_pose = estimate_object_pose(mask, rectifier.h, Vec2::Zero(),
                                           config.ablation);

    stage = "apply_object_pose";
    const TriangleMesh posed = apply_object_pose(canonical_mesh, rec.object_pose, 1.0);
    rec.model_volume_ml = mesh_volume(canonical_mesh);

    stage = "render_silhouette";
    RenderStats stats;
    const Mat34 p = projection_matrix(intrinsics, pnp.extrinsics);
    Silhouette rendered =
        render_silhouette(posed, p, scene.mask.width, scene.mask.height, &stats);
    rec.triangles_discarded = stats.triangles_discarded;
    if (stats.foreground_pixels == 0) {
      rec.warnings.push_back("rendered mesh fell entirely off-screen");
    }
    if (rendered_out != nullptr) *rendered_out = rendered;

    stage = "scale_factor";
    rec.area_input_px = static_cast<double>(mask_area(mask));
    rec.area_rendered_px = static_cast<double>(stats.foreground_pixels);
    rec.scale = scale_factor(rec.area_input_px, rec.area_rendered_px);

    stage = "estimate_volume";
    rec.volume_ml = estimate_volume(rec.scale, rec.model_volume_ml);

    stage = "estimate_energy";
    rec.energy_kcal = estimate_energy(rho_kcal_per_ml, rec.volume_ml);

    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.failed_stage = stage;
    rec.error = e.code();
    rec.error_message = e.what();
  }
  return rec;
}

}  // namespace foodvol
