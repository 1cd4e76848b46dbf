#include "foodvol/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include "foodvol/io.hpp"
#include "foodvol/rng.hpp"

namespace foodvol {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

[[noreturn]] void entry_error(const std::string& id, const std::string& what) {
  throw Error(ErrorCode::ValidationError, "manifest entry '" + id + "': " + what);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "bad manifest " + path.string() + ": " + e.what());
  }

  DatasetManifest manifest;
  manifest.base_dir = path.has_parent_path() ? path.parent_path() : ".";
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    manifest.grid.cols = g.value("cols", manifest.grid.cols);
    manifest.grid.rows = g.value("rows", manifest.grid.rows);
    manifest.grid.spacing_cm = g.value("spacing_cm", manifest.grid.spacing_cm);
  }
  manifest.mesh_db = j.value("mesh_db", std::string());
  manifest.density = j.value("density", std::string());
  manifest.intrinsics = j.value("intrinsics", std::string());
  manifest.mesh_unit_scale = j.value("mesh_unit_scale", 1.0);
  if (!(manifest.mesh_unit_scale > 0.0)) {
    throw Error(ErrorCode::ValidationError,
                "manifest " + path.string() + ": mesh_unit_scale must be positive");
  }
  if (j.contains("mesh_units")) {
    for (const auto& [label, factor] : j["mesh_units"].items()) {
      const double f = factor.get<double>();
      if (!(f > 0.0)) {
        throw Error(ErrorCode::ValidationError,
                    "manifest " + path.string() + ": mesh_units['" + label +
                        "'] must be positive");
      }
      manifest.mesh_units[label] = f;
    }
  }

  if (!j.contains("scenes") || !j["scenes"].is_array()) {
    throw Error(ErrorCode::ValidationError,
                "manifest " + path.string() + " has no 'scenes' array");
  }

  const std::size_t expected_corners =
      static_cast<std::size_t>(manifest.grid.cols) * manifest.grid.rows;
  const std::filesystem::path mesh_db_dir = resolve(manifest.base_dir, manifest.mesh_db);

  int index = 0;
  for (const auto& s : j["scenes"]) {
    SceneEntry entry;
    entry.id = s.value("id", "scene_" + std::to_string(index));
    ++index;
    try {
      entry.label = s.at("label").get<std::string>();
      entry.mask_path = resolve(manifest.base_dir, s.at("mask").get<std::string>());
      if (s.contains("image") && !s["image"].is_null()) {
        entry.image_path = resolve(manifest.base_dir, s["image"].get<std::string>());
      }
      for (const auto& c : s.at("corners")) {
        entry.corners.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      }
      entry.volume_ml = s.at("volume_ml").get<double>();
      entry.weight_g = s.at("weight_g").get<double>();
      entry.energy_kcal = s.at("energy_kcal").get<double>();
      entry.split = s.value("split", std::string());
    } catch (const nlohmann::json::exception& e) {
      entry_error(entry.id, std::string("bad or missing field: ") + e.what());
    }

    if (entry.label.empty()) entry_error(entry.id, "empty label");
    if (entry.corners.size() != expected_corners) {
      entry_error(entry.id, "has " + std::to_string(entry.corners.size()) +
                                " corners, expected " + std::to_string(expected_corners));
    }
    for (const Vec2& c : entry.corners) {
      if (!c.allFinite()) entry_error(entry.id, "non-finite corner coordinate");
    }
    if (!(entry.volume_ml > 0.0) || !(entry.weight_g > 0.0) ||
        !(entry.energy_kcal > 0.0)) {
      entry_error(entry.id, "ground-truth volume/weight/energy must be positive");
    }
    if (!entry.split.empty() && entry.split != "train" && entry.split != "test") {
      entry_error(entry.id, "split must be 'train' or 'test'");
    }
    if (!std::filesystem::exists(entry.mask_path)) {
      entry_error(entry.id, "mask file not found: " + entry.mask_path.string());
    }
    if (!entry.image_path.empty() && !std::filesystem::exists(entry.image_path)) {
      entry_error(entry.id, "image file not found: " + entry.image_path.string());
    }
    if (!mesh_db_dir.empty()) {
      const std::filesystem::path mesh_path = mesh_db_dir / (entry.label + ".obj");
      if (!std::filesystem::exists(mesh_path)) {
        entry_error(entry.id, "no mesh for label '" + entry.label + "' in " +
                                  mesh_db_dir.string());
      }
    }
    manifest.scenes.push_back(std::move(entry));
  }
  return manifest;
}

Metrics compute_metrics(std::span<const std::pair<double, double>> pairs) {
  if (pairs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "compute_metrics: empty input");
  }
  double abs_sum = 0.0, rel_sum = 0.0;
  for (const auto& [truth, estimate] : pairs) {
    if (!(truth > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "compute_metrics: MAPE undefined for non-positive ground truth");
    }
    const double err = std::abs(estimate - truth);
    abs_sum += err;
    rel_sum += err / truth;
  }
  const double n = static_cast<double>(pairs.size());
  return {abs_sum / n, 100.0 * rel_sum / n};
}

std::vector<double> baseline_predictor(std::span<const SceneEntry> entries,
                                       TruthField field) {
  if (entries.empty()) {
    throw Error(ErrorCode::InvalidArgument, "baseline_predictor: empty input");
  }
  double sum = 0.0;
  for (const SceneEntry& e : entries) {
    sum += field == TruthField::Volume ? e.volume_ml : e.energy_kcal;
  }
  const double mean = sum / static_cast<double>(entries.size());
  return std::vector<double>(entries.size(), mean);
}

SplitResult split_dataset(const std::vector<SceneEntry>& entries, double test_fraction,
                          std::uint64_t seed) {
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "test fraction must be in (0, 1)");
  }
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    by_label[entries[i].label].push_back(i);
  }

  Rng rng(seed);
  std::vector<bool> in_test(entries.size(), false);
  for (auto& [label, idx] : by_label) {
    if (idx.size() < 2) {
      throw Error(ErrorCode::ValidationError,
                  "label '" + label + "' has fewer than 2 entries, cannot stratify");
    }
    // Fisher-Yates with our own generator so the split is platform-stable.
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      const std::size_t k = static_cast<std::size_t>(rng.uniform() * (i + 1));
      std::swap(idx[i], idx[std::min(k, i)]);
    }
    const auto n = static_cast<long>(idx.size());
    long n_test = std::lround(test_fraction * static_cast<double>(n));
    n_test = std::clamp(n_test, 1L, n - 1L);
    for (long i = 0; i < n_test; ++i) in_test[idx[i]] = true;
  }

  SplitResult out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    SceneEntry e = entries[i];
    e.split = in_test[i] ? "test" : "train";
    (in_test[i] ? out.test : out.train).push_back(std::move(e));
  }
  return out;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j;
  j["vmae_ml"] = vmae;
  j["vmape_percent"] = vmape;
  j["emae_kcal"] = emae;
  j["emape_percent"] = emape;
  j["n"] = n;
  j["n_failed"] = n_failed;
  j["baseline"] = {{"vmae_ml", baseline_vmae},
                   {"vmape_percent", baseline_vmape},
                   {"emae_kcal", baseline_emae},
                   {"emape_percent", baseline_emape}};
  nlohmann::json foods = nlohmann::json::object();
  for (const auto& [label, m] : per_food) {
    foods[label] = {{"vmae_ml", m.vmae},
                    {"vmape_percent", m.vmape},
                    {"emae_kcal", m.emae},
                    {"emape_percent", m.emape},
                    {"n", m.n}};
  }
  j["per_food"] = foods;
  return j;
}

EvalContext build_eval_context(const DatasetManifest& manifest,
                               const std::filesystem::path& intrinsics_override,
                               const std::filesystem::path& mesh_db_override,
                               const std::filesystem::path& density_override) {
  const auto pick = [&](const std::filesystem::path& override_path,
                        const std::filesystem::path& declared,
                        const char* what) -> std::filesystem::path {
    if (!override_path.empty()) return override_path;
    if (!declared.empty()) return resolve(manifest.base_dir, declared);
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " not given and not declared by the manifest");
  };

  EvalContext ctx;
  ctx.grid = manifest.grid;
  const IntrinsicsFile intr =
      load_intrinsics_json(pick(intrinsics_override, manifest.intrinsics, "intrinsics"));
  ctx.intrinsics = intr.k;
  ctx.image_width = intr.image_width;
  ctx.image_height = intr.image_height;
  ctx.density = load_density_csv(pick(density_override, manifest.density, "density table"));

  const std::filesystem::path db = pick(mesh_db_override, manifest.mesh_db, "mesh db");
  for (const SceneEntry& e : manifest.scenes) {
    if (ctx.meshes.contains(e.label)) continue;
    const auto unit_it = manifest.mesh_units.find(e.label);
    const double unit =
        unit_it != manifest.mesh_units.end() ? unit_it->second : manifest.mesh_unit_scale;
    ctx.meshes.emplace(e.label, canonicalize(load_mesh(db / (e.label + ".obj"), unit)));
    ctx.density.lookup(e.label);  // fail early on missing densities
  }
  return ctx;
}

EvaluationResult evaluate(const std::vector<SceneEntry>& entries, const EvalContext& ctx,
                          const PipelineConfig& config, int jobs) {
  if (entries.empty()) {
    throw Error(ErrorCode::EvaluationFailed, "no scenes to evaluate");
  }
  PipelineConfig cfg = config;
  cfg.grid = ctx.grid;

  EvaluationResult result;
  result.scenes.resize(entries.size());

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int n_threads = jobs > 0 ? jobs : static_cast<int>(hw);

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= entries.size()) return;
      const SceneEntry& entry = entries[i];
      SceneResult& slot = result.scenes[i];
      slot.truth_volume_ml = entry.volume_ml;
      slot.truth_energy_kcal = entry.energy_kcal;

      SceneInput scene;
      scene.id = entry.id;
      scene.label = entry.label;
      scene.corners = entry.corners;
      try {
        scene.mask = load_mask_png(entry.mask_path);
        if (ctx.image_width > 0 && (scene.mask.width != ctx.image_width ||
                                    scene.mask.height != ctx.image_height)) {
          throw Error(ErrorCode::ValidationError,
                      "mask size " + std::to_string(scene.mask.width) + "x" +
                          std::to_string(scene.mask.height) +
                          " does not match intrinsics " +
                          std::to_string(ctx.image_width) + "x" +
                          std::to_string(ctx.image_height));
        }
        const auto mesh_it = ctx.meshes.find(entry.label);
        if (mesh_it == ctx.meshes.end()) {
          throw Error(ErrorCode::ValidationError,
                      "no mesh loaded for label '" + entry.label + "'");
        }
        slot.record = run_pipeline(scene, mesh_it->second,
                                   ctx.density.lookup(entry.label), ctx.intrinsics, cfg);
      } catch (const Error& e) {
        slot.record.id = entry.id;
        slot.record.label = entry.label;
        slot.record.ablation = cfg.ablation;
        slot.record.ok = false;
        slot.record.failed_stage = "load";
        slot.record.error = e.code();
        slot.record.error_message = e.what();
      }
    }
  };

  if (n_threads <= 1 || entries.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int spawn = std::min<int>(n_threads, static_cast<int>(entries.size()));
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Aggregation runs in manifest order so reports are thread-count invariant.
  std::vector<std::pair<double, double>> vol_pairs, energy_pairs;
  std::map<std::string, std::vector<std::pair<double, double>>> vol_by_food, energy_by_food;
  std::vector<SceneEntry> ok_entries;
  MetricsReport& report = result.report;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const SceneResult& r = result.scenes[i];
    if (!r.record.ok) {
      ++report.n_failed;
      continue;
    }
    vol_pairs.emplace_back(r.truth_volume_ml, r.record.volume_ml);
    energy_pairs.emplace_back(r.truth_energy_kcal, r.record.energy_kcal);
    vol_by_food[entries[i].label].emplace_back(r.truth_volume_ml, r.record.volume_ml);
    energy_by_food[entries[i].label].emplace_back(r.truth_energy_kcal,
                                                  r.record.energy_kcal);
    ok_entries.push_back(entries[i]);
  }
  if (vol_pairs.empty()) {
    throw Error(ErrorCode::EvaluationFailed, "every scene failed to evaluate");
  }

  const Metrics vol = compute_metrics(vol_pairs);
  const Metrics energy = compute_metrics(energy_pairs);
  report.vmae = vol.mae;
  report.vmape = vol.mape_percent;
  report.emae = energy.mae;
  report.emape = energy.mape_percent;
  report.n = static_cast<int>(vol_pairs.size());
  for (const auto& [label, pairs] : vol_by_food) {
    const Metrics v = compute_metrics(pairs);
    const Metrics e = compute_metrics(energy_by_food[label]);
    report.per_food[label] =
        FoodMetrics{v.mae, v.mape_percent, e.mae, e.mape_percent,
                    static_cast<int>(pairs.size())};
  }

  const std::vector<double> base_vol = baseline_predictor(ok_entries, TruthField::Volume);
  const std::vector<double> base_energy =
      baseline_predictor(ok_entries, TruthField::Energy);
  std::vector<std::pair<double, double>> base_vol_pairs, base_energy_pairs;
  for (std::size_t i = 0; i < ok_entries.size(); ++i) {
    base_vol_pairs.emplace_back(ok_entries[i].volume_ml, base_vol[i]);
    base_energy_pairs.emplace_back(ok_entries[i].energy_kcal, base_energy[i]);
  }
  const Metrics bv = compute_metrics(base_vol_pairs);
  const Metrics be = compute_metrics(base_energy_pairs);
  report.baseline_vmae = bv.mae;
  report.baseline_vmape = bv.mape_percent;
  report.baseline_emae = be.mae;
  report.baseline_emape = be.mape_percent;

  return result;
}

std::string per_scene_csv(const EvaluationResult& result) {
  std::string csv =
      "id,label,ok,area_input_px,area_rendered_px,scale,volume_ml,energy_kcal,"
      "truth_volume_ml,truth_energy_kcal,volume_abs_error_ml,energy_abs_error_kcal,"
      "pnp_residual_px,failed_stage,error\n";
  for (const SceneResult& r : result.scenes) {
    const EstimateRecord& rec = r.record;
    csv += rec.id + ',' + rec.label + ',' + (rec.ok ? "1" : "0") + ',';
    if (rec.ok) {
      csv += format_double(rec.area_input_px) + ',' +
             format_double(rec.area_rendered_px) + ',' + format_double(rec.scale) + ',' +
             format_double(rec.volume_ml) + ',' + format_double(rec.energy_kcal) + ',' +
             format_double(r.truth_volume_ml) + ',' + format_double(r.truth_energy_kcal) +
             ',' + format_double(std::abs(rec.volume_ml - r.truth_volume_ml)) + ',' +
             format_double(std::abs(rec.energy_kcal - r.truth_energy_kcal)) + ',' +
             format_double(rec.pnp_residual_px) + ",,\n";
    } else {
      csv += ",,,,," + format_double(r.truth_volume_ml) + ',' +
             format_double(r.truth_energy_kcal) + ",,,," + rec.failed_stage + ',' +
             (rec.error ? to_string(*rec.error) : "unknown") + "\n";
    }
  }
  return csv;
}

std::string human_report(const MetricsReport& report) {
  std::ostringstream out;
  char line[160];
  out << "          VMAE (mL)  VMAPE (%)  EMAE (kCal)  EMAPE (%)     N\n";
  std::snprintf(line, sizeof(line), "%-8s %10.2f %10.2f %12.2f %10.2f %5d\n", "pipeline",
                report.vmae, report.vmape, report.emae, report.emape, report.n);
  out << line;
  std::snprintf(line, sizeof(line), "%-8s %10.2f %10.2f %12.2f %10.2f %5d\n", "baseline",
                report.baseline_vmae, report.baseline_vmape, report.baseline_emae,
                report.baseline_emape, report.n);
  out << line;
  if (report.n_failed > 0) {
    out << "failed scenes excluded from metrics: " << report.n_failed << "\n";
  }
  for (const auto& [label, m] : report.per_food) {
    std::snprintf(line, sizeof(line), "  %-16s %8.2f %8.2f %10.2f %8.2f %5d\n",
                  label.c_str(), m.vmae, m.vmape, m.emae, m.emape, m.n);
    out << line;
  }
  return out.str();
}

}  // namespace foodvol
