#include "foodvol/render.hpp"

#include <algorithm>
#include <cmath>

namespace foodvol {
namespace {

inline double edge_cross(const Vec2& a, const Vec2& b, const Vec2& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

// Top-left rule. With interior-positive winding in a y-down frame a left
// edge (interior to its right) points up and a top edge (interior below)
// points toward +x; those own their boundary pixels, the opposite
// directions exclude them, so neighbors share each boundary pixel exactly
// once.
inline bool top_left(const Vec2& a, const Vec2& b) {
  const double dy = b.y() - a.y();
  return dy < 0.0 || (dy == 0.0 && b.x() - a.x() > 0.0);
}

void rasterize_triangle(Silhouette& mask, const Vec2& v0, const Vec2& v1, const Vec2& v2) {
  Vec2 a = v0, b = v1, c = v2;
  const double area2 = edge_cross(a, b, c);
  if (area2 == 0.0) return;       // degenerate sliver
  if (area2 < 0.0) std::swap(b, c);  // normalize to interior-positive

  const double min_x = std::min({a.x(), b.x(), c.x()});
  const double max_x = std::max({a.x(), b.x(), c.x()});
  const double min_y = std::min({a.y(), b.y(), c.y()});
  const double max_y = std::max({a.y(), b.y(), c.y()});

  const int x0 = std::max(0, static_cast<int>(std::ceil(min_x)));
  const int x1 = std::min(mask.width - 1, static_cast<int>(std::floor(max_x)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(min_y)));
  const int y1 = std::min(mask.height - 1, static_cast<int>(std::floor(max_y)));

  const bool tl0 = top_left(a, b);
  const bool tl1 = top_left(b, c);
  const bool tl2 = top_left(c, a);

  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 p(static_cast<double>(x), static_cast<double>(y));
      const double w0 = edge_cross(a, b, p);
      const double w1 = edge_cross(b, c, p);
      const double w2 = edge_cross(c, a, p);
      const bool in0 = w0 > 0.0 || (w0 == 0.0 && tl0);
      const bool in1 = w1 > 0.0 || (w1 == 0.0 && tl1);
      const bool in2 = w2 > 0.0 || (w2 == 0.0 && tl2);
      if (in0 && in1 && in2) mask.set(x, y, true);
    }
  }
}

}  // namespace

Mat34 projection_matrix(const CameraIntrinsics& k, const RigidTransform& world_to_camera) {
  Mat34 rt;
  rt.block<3, 3>(0, 0) = world_to_camera.rotation;
  rt.col(3) = world_to_camera.translation;
  return k.matrix() * rt;
}

Silhouette render_silhouette(const TriangleMesh& mesh, const Mat34& p, int width,
                             int height, RenderStats* stats) {
  Silhouette mask = Silhouette::blank(width, height);

  // Project all vertices once; depth is the homogeneous w (third row of
  // [R|t] X since K keeps the bottom row (0,0,1)).
  std::vector<Vec2> projected(mesh.vertices.size());
  std::vector<double> depth(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3 hom = p * mesh.vertices[i].homogeneous();
    depth[i] = hom.z();
    projected[i] = depth[i] != 0.0 ? Vec2(hom.x() / hom.z(), hom.y() / hom.z())
                                   : Vec2(0.0, 0.0);
  }

  RenderStats local;
  local.triangles_total = static_cast<int>(mesh.triangles.size());
  for (const auto& tri : mesh.triangles) {
    if (depth[tri[0]] <= 0.0 || depth[tri[1]] <= 0.0 || depth[tri[2]] <= 0.0) {
      ++local.triangles_discarded;
      continue;
    }
    rasterize_triangle(mask, projected[tri[0]], projected[tri[1]], projected[tri[2]]);
  }

  if (local.triangles_discarded == local.triangles_total) {
    throw Error(ErrorCode::EmptyRender, "mesh is entirely behind the camera");
  }
  local.foreground_pixels = mask.area();
  if (stats != nullptr) *stats = local;
  return mask;
}

}  // namespace foodvol
