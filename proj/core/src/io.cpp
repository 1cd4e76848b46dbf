#include "foodvol/io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace foodvol {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail_png(const std::filesystem::path& path, const char* what) {
  throw Error(ErrorCode::IoError, std::string(what) + ": " + path.string());
}

// Reads any PNG as 8-bit gray (RGB is converted, alpha stripped, 16-bit
// scaled down, palettes expanded).
std::vector<std::uint8_t> read_png_gray(const std::filesystem::path& path, int& width,
                                        int& height) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) fail_png(path, "cannot open PNG");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail_png(path, "libpng init failed");
  }
  std::vector<std::uint8_t> data;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail_png(path, "failed to decode PNG");
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  const int color_type = png_get_color_type(png, info);
  if ((color_type & PNG_COLOR_MASK_COLOR) != 0) {
    png_set_rgb_to_gray(png, 1, -1.0, -1.0);
  }
  png_read_update_info(png, info);

  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  data.resize(static_cast<std::size_t>(width) * height);
  rows.resize(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = data.data() + static_cast<std::size_t>(y) * width;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return data;
}

void write_png(const std::filesystem::path& path, int width, int height, int color_type,
               int bytes_per_pixel, const std::uint8_t* pixels) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    FilePtr file(std::fopen(tmp.string().c_str(), "wb"));
    if (!file) fail_png(path, "cannot create PNG");

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
      png_destroy_write_struct(&png, &info);
      fail_png(path, "libpng init failed");
    }
    std::vector<png_const_bytep> rows(height);
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      fail_png(path, "failed to encode PNG");
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y) {
      rows[y] = pixels + static_cast<std::size_t>(y) * width * bytes_per_pixel;
    }
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

Silhouette load_mask_png(const std::filesystem::path& path) {
  int width = 0, height = 0;
  const std::vector<std::uint8_t> gray = read_png_gray(path, width, height);
  Silhouette mask = Silhouette::blank(width, height);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    mask.bits[i] = gray[i] > 127 ? 1 : 0;
  }
  return mask;
}

void save_mask_png(const Silhouette& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> gray(mask.bits.size());
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    gray[i] = mask.bits[i] != 0 ? 255 : 0;
  }
  write_png(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, 1, gray.data());
}

RgbImage load_rgb_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) fail_png(path, "cannot open PNG");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail_png(path, "libpng init failed");
  }
  RgbImage image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail_png(path, "failed to decode PNG");
  }

  png_init_io(png, file.get());
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  if ((png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR) == 0) {
    png_set_gray_to_rgb(png);
  }
  png_read_update_info(png, info);

  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height * 3);
  rows.resize(image.height);
  for (int y = 0; y < image.height; ++y) {
    rows[y] = image.pixels.data() + static_cast<std::size_t>(y) * image.width * 3;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void save_rgb_png(const RgbImage& image, const std::filesystem::path& path) {
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_RGB, 3, image.pixels.data());
}

RgbImage overlay_boundary(const RgbImage& base, const Silhouette& mask) {
  if (base.width != mask.width || base.height != mask.height) {
    throw Error(ErrorCode::InvalidArgument, "overlay: image and mask sizes differ");
  }
  RgbImage out = base;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const bool boundary = x == 0 || y == 0 || x == mask.width - 1 ||
                            y == mask.height - 1 || !mask.at(x - 1, y) ||
                            !mask.at(x + 1, y) || !mask.at(x, y - 1) || !mask.at(x, y + 1);
      if (boundary) {
        const std::size_t i = (static_cast<std::size_t>(y) * mask.width + x) * 3;
        out.pixels[i] = 255;
        out.pixels[i + 1] = 0;
        out.pixels[i + 2] = 0;
      }
    }
  }
  return out;
}

IntrinsicsFile load_intrinsics_json(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError,
                "bad intrinsics JSON " + path.string() + ": " + e.what());
  }

  IntrinsicsFile out;
  try {
    out.k.fx = j.at("fx").get<double>();
    out.k.fy = j.at("fy").get<double>();
    out.k.cx = j.at("cx").get<double>();
    out.k.cy = j.at("cy").get<double>();
    out.k.skew = j.value("skew", 0.0);
    out.image_width = j.at("image_width").get<int>();
    out.image_height = j.at("image_height").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ValidationError,
                "intrinsics " + path.string() + " missing field: " + e.what());
  }
  out.k.validate();
  if (out.image_width <= 0 || out.image_height <= 0) {
    throw Error(ErrorCode::ValidationError,
                "intrinsics " + path.string() + ": image size must be positive");
  }

  // Lens distortion is not modeled; coefficients may only be present as zeros.
  auto reject_nonzero = [&](const nlohmann::json& value, const std::string& name) {
    if (value.is_number() && value.get<double>() != 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "intrinsics " + path.string() + ": nonzero distortion field '" + name +
                      "' is not supported");
    }
  };
  if (j.contains("distortion") && j["distortion"].is_array()) {
    for (const auto& c : j["distortion"]) reject_nonzero(c, "distortion");
  }
  for (const char* name : {"k1", "k2", "k3", "p1", "p2"}) {
    if (j.contains(name)) reject_nonzero(j[name], name);
  }
  return out;
}

void save_intrinsics_json(const IntrinsicsFile& intrinsics,
                          const std::filesystem::path& path) {
  nlohmann::json j;
  j["fx"] = intrinsics.k.fx;
  j["fy"] = intrinsics.k.fy;
  j["cx"] = intrinsics.k.cx;
  j["cy"] = intrinsics.k.cy;
  j["skew"] = intrinsics.k.skew;
  j["image_width"] = intrinsics.image_width;
  j["image_height"] = intrinsics.image_height;
  write_file_atomic(path, j.dump(2) + "\n");
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) {
      throw Error(ErrorCode::IoError, "cannot create " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw Error(ErrorCode::IoError, "failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace foodvol
