#include "foodvol/fixtures.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace foodvol {
namespace {

TriangleMesh finish(TriangleMesh mesh, std::string label) {
  mesh.label = std::move(label);
  check_mesh(mesh);
  return canonicalize(mesh);
}

int midpoint_on_sphere(std::map<std::pair<int, int>, int>& cache,
                       std::vector<Vec3>& verts, double radius, int a, int b) {
  const auto key = std::minmax(a, b);
  const auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const Vec3 mid = ((verts[a] + verts[b]) * 0.5).normalized() * radius;
  verts.push_back(mid);
  const int idx = static_cast<int>(verts.size()) - 1;
  cache.emplace(key, idx);
  return idx;
}

}  // namespace

TriangleMesh make_box(double sx_cm, double sy_cm, double sz_cm) {
  if (!(sx_cm > 0.0) || !(sy_cm > 0.0) || !(sz_cm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "box dimensions must be positive");
  }
  const double hx = sx_cm / 2.0, hy = sy_cm / 2.0, z = sz_cm;
  TriangleMesh mesh;
  mesh.vertices = {
      {-hx, -hy, 0.0}, {hx, -hy, 0.0}, {hx, hy, 0.0}, {-hx, hy, 0.0},
      {-hx, -hy, z},   {hx, -hy, z},   {hx, hy, z},   {-hx, hy, z},
  };
  mesh.triangles = {
      {0, 2, 1}, {0, 3, 2},  // bottom
      {4, 5, 6}, {4, 6, 7},  // top
      {0, 1, 5}, {0, 5, 4},  // -y
      {1, 2, 6}, {1, 6, 5},  // +x
      {2, 3, 7}, {2, 7, 6},  // +y
      {3, 0, 4}, {3, 4, 7},  // -x
  };
  return finish(std::move(mesh), "box");
}

TriangleMesh make_cube(double edge_cm) {
  TriangleMesh mesh = make_box(edge_cm, edge_cm, edge_cm);
  mesh.label = "cube";
  return mesh;
}

TriangleMesh make_icosphere(double radius_cm, int subdivisions) {
  if (!(radius_cm > 0.0) || subdivisions < 0 || subdivisions > 7) {
    throw Error(ErrorCode::InvalidArgument, "bad icosphere parameters");
  }
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;

  TriangleMesh mesh;
  mesh.vertices = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
  };
  for (Vec3& v : mesh.vertices) v = v.normalized() * radius_cm;
  mesh.triangles = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> cache;
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& tri : mesh.triangles) {
      const int a = midpoint_on_sphere(cache, mesh.vertices, radius_cm, tri[0], tri[1]);
      const int b = midpoint_on_sphere(cache, mesh.vertices, radius_cm, tri[1], tri[2]);
      const int c = midpoint_on_sphere(cache, mesh.vertices, radius_cm, tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    mesh.triangles = std::move(next);
  }
  return finish(std::move(mesh), "icosphere");
}

TriangleMesh make_torus(double major_radius_cm, double minor_radius_cm,
                        int major_segments, int minor_segments) {
  if (!(major_radius_cm > minor_radius_cm) || !(minor_radius_cm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "torus needs major > minor > 0");
  }
  if (major_segments < 3 || minor_segments < 3) {
    throw Error(ErrorCode::InvalidArgument, "torus needs at least 3 segments each way");
  }
  const double two_pi = 2.0 * std::numbers::pi;

  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(major_segments) * minor_segments);
  for (int i = 0; i < major_segments; ++i) {
    const double u = two_pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = two_pi * j / minor_segments;
      const double ring = major_radius_cm + minor_radius_cm * std::cos(v);
      mesh.vertices.emplace_back(ring * std::cos(u), ring * std::sin(u),
                                 minor_radius_cm * std::sin(v));
    }
  }
  auto vid = [&](int i, int j) {
    return (i % major_segments) * minor_segments + (j % minor_segments);
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
  return finish(std::move(mesh), "torus");
}

TriangleMesh make_fixture(const std::string& name) {
  if (name == "cube") return make_cube(1.5);
  if (name == "box") return make_box(3.0, 1.0, 0.8);
  if (name == "icosphere") return make_icosphere(0.8, 3);
  if (name == "torus") return make_torus(1.2, 0.4);
  throw Error(ErrorCode::InvalidArgument, "unknown fixture: " + name);
}

}  // namespace foodvol
