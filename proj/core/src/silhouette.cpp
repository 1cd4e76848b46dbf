#include "foodvol/silhouette.hpp"

#include <algorithm>

namespace foodvol {

Silhouette Silhouette::blank(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "silhouette dimensions must be positive");
  }
  Silhouette s;
  s.width = width;
  s.height = height;
  s.bits.assign(static_cast<std::size_t>(width) * height, 0);
  return s;
}

std::int64_t Silhouette::area() const {
  std::int64_t n = 0;
  for (std::uint8_t b : bits) n += b != 0;
  return n;
}

Vec2 Silhouette::centroid() const {
  double sx = 0.0, sy = 0.0;
  std::int64_t n = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (at(x, y)) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  if (n == 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground pixels");
  return {sx / n, sy / n};
}

ComponentSplit largest_component(const Silhouette& mask) {
  std::vector<std::int32_t> label(mask.bits.size(), 0);
  std::vector<std::size_t> stack;
  std::int32_t next_label = 0;
  std::int64_t best_size = 0;
  std::int32_t best_label = 0;

  for (std::size_t start = 0; start < mask.bits.size(); ++start) {
    if (mask.bits[start] == 0 || label[start] != 0) continue;
    ++next_label;
    std::int64_t size = 0;
    stack.push_back(start);
    label[start] = next_label;
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      ++size;
      const int x = static_cast<int>(idx % mask.width);
      const int y = static_cast<int>(idx / mask.width);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * mask.width + nx;
          if (mask.bits[nidx] != 0 && label[nidx] == 0) {
            label[nidx] = next_label;
            stack.push_back(nidx);
          }
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_label = next_label;
    }
  }

  ComponentSplit out;
  out.component_count = next_label;
  out.largest = Silhouette::blank(mask.width, mask.height);
  if (next_label == 1) {
    out.largest = mask;
  } else if (next_label > 1) {
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
      out.largest.bits[i] = label[i] == best_label ? 1 : 0;
    }
  }
  return out;
}

}  // namespace foodvol
