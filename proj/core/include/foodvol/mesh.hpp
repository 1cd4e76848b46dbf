#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "foodvol/geometry.hpp"
#include "foodvol/object_pose.hpp"

namespace foodvol {

// Indexed triangle list, vertex positions in cm. Volume queries require a
// watertight, consistently oriented mesh; the flags are computed on load
// and after structural edits.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::string label;

  bool watertight = false;            // every undirected edge on exactly 2 faces
  bool consistently_oriented = false;  // each directed edge appears exactly once
};

// Validates indices and recomputes the manifold flags.
void check_mesh(TriangleMesh& mesh);

// OBJ with v/f records; polygonal faces are fan-triangulated, indices may be
// negative (relative). `unit_scale` multiplies vertex positions on load
// (e.g. 0.1 for a millimeter export).
TriangleMesh load_mesh(const std::filesystem::path& path, double unit_scale = 1.0);

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

// Signed-volume sum |sum v0 . (v1 x v2)| / 6, cm^3 = mL. Throws NonWatertight
// unless the mesh is closed and consistently oriented.
double mesh_volume(const TriangleMesh& mesh);

// Translates so the vertex centroid has x = y = 0 and min z = 0 (object
// rests on the board plane). Idempotent.
TriangleMesh canonicalize(const TriangleMesh& mesh);

// Scales about the origin, rotates by theta_z about +Z, then translates by
// (tx, ty, 0). Expects a canonical mesh so scaling keeps the ground contact.
TriangleMesh apply_object_pose(const TriangleMesh& mesh, const ObjectPose& pose,
                               double scale);

}  // namespace foodvol
