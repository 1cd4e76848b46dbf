#pragma once

#include "foodvol/mesh.hpp"
#include "foodvol/silhouette.hpp"

namespace foodvol {

// P = K [R|t]; dehomogenizing P (X,1)' gives the pixel of any world point
// with positive camera-frame depth.
Mat34 projection_matrix(const CameraIntrinsics& k, const RigidTransform& world_to_camera);

struct RenderStats {
  int triangles_total = 0;
  int triangles_discarded = 0;  // any vertex at non-positive depth
  std::int64_t foreground_pixels = 0;
};

// Binary silhouette of the mesh through P. A pixel is foreground iff its
// center (integer coordinates) lies inside the projection of at least one
// kept triangle; shared edges follow a top-left fill rule so adjacent
// triangles never double-count or leave seams. No depth buffer.
//
// Throws EmptyRender when every triangle is discarded (mesh behind the
// camera). A mesh that projects entirely off-screen yields an empty mask,
// visible through stats->foreground_pixels == 0.
Silhouette render_silhouette(const TriangleMesh& mesh, const Mat34& p, int width,
                             int height, RenderStats* stats = nullptr);

}  // namespace foodvol
