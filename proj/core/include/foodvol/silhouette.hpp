#pragma once

#include <cstdint>
#include <vector>

#include "foodvol/geometry.hpp"

namespace foodvol {

// Binary raster mask, row-major, 1 = foreground.
struct Silhouette {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  static Silhouette blank(int width, int height);

  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool fg) {
    bits[static_cast<std::size_t>(y) * width + x] = fg ? 1 : 0;
  }

  std::int64_t area() const;

  // Mean of foreground pixel centers. Throws EmptyMask.
  Vec2 centroid() const;

  bool operator==(const Silhouette&) const = default;
};

struct ComponentSplit {
  Silhouette largest;
  int component_count = 0;
};

// 8-connected foreground components; ties broken by first-found order.
ComponentSplit largest_component(const Silhouette& mask);

}  // namespace foodvol
