#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "foodvol/estimate.hpp"

namespace foodvol {

struct SceneEntry {
  std::string id;
  std::string label;
  std::filesystem::path image_path;  // optional, empty when absent
  std::filesystem::path mask_path;
  std::vector<Vec2> corners;  // row-major from the top-right grid corner
  double volume_ml = 0.0;
  double weight_g = 0.0;
  double energy_kcal = 0.0;
  std::string split;  // "", "train" or "test"
};

struct DatasetManifest {
  GridSpec grid;
  std::filesystem::path base_dir;    // directory containing the manifest
  std::filesystem::path mesh_db;     // optional
  std::filesystem::path density;     // optional
  std::filesystem::path intrinsics;  // optional
  double mesh_unit_scale = 1.0;      // vertex multiplier applied on load
  std::map<std::string, double> mesh_units;  // per-label override
  std::vector<SceneEntry> scenes;
};

// JSON manifest with validated entries: corner count, positive ground
// truths, mask file existence, and labels present in the declared mesh
// database when one is given. Relative paths resolve against the manifest
// directory. Validation failures name the offending entry.
DatasetManifest load_manifest(const std::filesystem::path& path);

struct Metrics {
  double mae = 0.0;
  double mape_percent = 0.0;
};

// pairs are (ground truth, estimate); MAE = mean |e - t|,
// MAPE = 100/N sum |e_i - t_i| / t_i. Empty input or a zero truth throws.
Metrics compute_metrics(std::span<const std::pair<double, double>> pairs);

enum class TruthField { Volume, Energy };

// Mean-predictor baseline: every entry receives the dataset mean of the
// chosen ground-truth field.
std::vector<double> baseline_predictor(std::span<const SceneEntry> entries,
                                       TruthField field);

struct SplitResult {
  std::vector<SceneEntry> train;
  std::vector<SceneEntry> test;
};

// Stratified per-label split, deterministic for a fixed seed. Each label
// keeps at least one entry on both sides; labels with fewer than 2 entries
// are a stratification error.
SplitResult split_dataset(const std::vector<SceneEntry>& entries, double test_fraction,
                          std::uint64_t seed);

struct FoodMetrics {
  double vmae = 0.0, vmape = 0.0, emae = 0.0, emape = 0.0;
  int n = 0;
};

struct MetricsReport {
  double vmae = 0.0, vmape = 0.0, emae = 0.0, emape = 0.0;
  int n = 0;
  int n_failed = 0;
  std::map<std::string, FoodMetrics> per_food;
  // Mean-predictor reference on the same entries.
  double baseline_vmae = 0.0, baseline_vmape = 0.0;
  double baseline_emae = 0.0, baseline_emape = 0.0;

  nlohmann::json to_json() const;
};

struct EvalContext {
  CameraIntrinsics intrinsics;
  int image_width = 0;   // expected mask size; 0 disables the check
  int image_height = 0;
  std::map<std::string, TriangleMesh> meshes;  // canonical, by label
  EnergyDensityTable density;
  GridSpec grid;
};

struct SceneResult {
  EstimateRecord record;
  double truth_volume_ml = 0.0;
  double truth_energy_kcal = 0.0;
};

struct EvaluationResult {
  MetricsReport report;
  std::vector<SceneResult> scenes;  // manifest order
};

// Loads masks (entry paths are taken as-is; load_manifest resolves them)
// and runs the pipeline for every entry, optionally across `jobs` threads
// (0 = hardware concurrency). Failed scenes are excluded from the metrics
// and counted; if every scene fails the evaluation throws.
EvaluationResult evaluate(const std::vector<SceneEntry>& entries, const EvalContext& ctx,
                          const PipelineConfig& config, int jobs = 1);

// Per-scene CSV (stable column order, one row per scene including failures).
std::string per_scene_csv(const EvaluationResult& result);

// Plain-text summary table.
std::string human_report(const MetricsReport& report);

// Loads intrinsics, meshes and densities referenced by a manifest, with
// optional overrides for the three paths.
EvalContext build_eval_context(const DatasetManifest& manifest,
                               const std::filesystem::path& intrinsics_override = {},
                               const std::filesystem::path& mesh_db_override = {},
                               const std::filesystem::path& density_override = {});

}  // namespace foodvol
