#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "foodvol/geometry.hpp"
#include "foodvol/silhouette.hpp"

namespace foodvol {

// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

// Any PNG is accepted and reduced to 8-bit grayscale; values > 127 are
// foreground.
Silhouette load_mask_png(const std::filesystem::path& path);

// 8-bit single-channel PNG, foreground written as 255.
void save_mask_png(const Silhouette& mask, const std::filesystem::path& path);

RgbImage load_rgb_png(const std::filesystem::path& path);
void save_rgb_png(const RgbImage& image, const std::filesystem::path& path);

// Copy of `base` with the mask's boundary pixels painted red.
RgbImage overlay_boundary(const RgbImage& base, const Silhouette& mask);

struct IntrinsicsFile {
  CameraIntrinsics k;
  int image_width = 0;
  int image_height = 0;
};

// JSON with fx, fy, cx, cy, optional skew, image_width, image_height.
// Distortion fields are accepted only when all coefficients are zero.
IntrinsicsFile load_intrinsics_json(const std::filesystem::path& path);

void save_intrinsics_json(const IntrinsicsFile& intrinsics,
                          const std::filesystem::path& path);

// Writes to a sibling temp file and renames into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace foodvol
