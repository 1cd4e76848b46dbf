#include "foodvol/geometry.hpp"

#include <cmath>

namespace foodvol {

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  k << fx, skew, cx,
       0.0, fy, cy,
       0.0, 0.0, 1.0;
  return k;
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "intrinsics: fx and fy must be positive");
  }
  if (!std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(cx) ||
      !std::isfinite(cy) || !std::isfinite(skew)) {
    throw Error(ErrorCode::InvalidArgument, "intrinsics: non-finite field");
  }
}

RigidTransform RigidTransform::compose(const RigidTransform& inner) const {
  RigidTransform out;
  out.rotation = rotation * inner.rotation;
  out.translation = rotation * inner.translation + translation;
  return out;
}

bool RigidTransform::is_valid(double tol) const {
  if (!translation.allFinite() || !rotation.allFinite()) return false;
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() >= tol) return false;
  return std::abs(rotation.determinant() - 1.0) < tol;
}

std::vector<Vec3> checkerboard_world_grid(int cols, int rows, double spacing_cm) {
  if (cols < 2 || rows < 2) {
    throw Error(ErrorCode::InvalidArgument, "checkerboard grid needs at least 2x2 corners");
  }
  if (!(spacing_cm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "checkerboard spacing must be positive");
  }
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(cols) * rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      pts.emplace_back(c * spacing_cm, r * spacing_cm, 0.0);
    }
  }
  return pts;
}

Vec2 project_point(const CameraIntrinsics& k, const RigidTransform& extrinsics,
                   const Vec3& world_point) {
  const Vec3 cam = extrinsics.apply(world_point);
  if (!(cam.z() > 0.0)) {
    throw Error(ErrorCode::BehindCamera, "point has non-positive camera-frame depth");
  }
  const double u = (k.fx * cam.x() + k.skew * cam.y()) / cam.z() + k.cx;
  const double v = k.fy * cam.y() / cam.z() + k.cy;
  return {u, v};
}

RigidTransform invert_extrinsics(const RigidTransform& extrinsics) {
  RigidTransform pose;
  pose.rotation = extrinsics.rotation.transpose();
  pose.translation = -(pose.rotation * extrinsics.translation);
  return pose;
}

}  // namespace foodvol
