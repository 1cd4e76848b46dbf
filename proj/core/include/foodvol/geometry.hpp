#pragma once

#include <Eigen/Dense>
#include <vector>

#include "foodvol/error.hpp"

namespace foodvol {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

// Pinhole parameters, pixels. Pixel coordinates are measured at pixel
// centers, u rightward, v downward, origin at the top-left pixel center.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;

  Mat3 matrix() const;
  void validate() const;  // fx, fy > 0 and all fields finite
};

// Rotation + translation, translation in cm. Used both as world->camera
// extrinsics and as the camera pose in world coordinates.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  // this ∘ inner: apply inner first.
  RigidTransform compose(const RigidTransform& inner) const;

  // ||R'R - I||inf < tol and det(R) within tol of +1.
  bool is_valid(double tol = 1e-9) const;
};

struct Correspondence {
  Vec2 pixel;
  Vec3 world;  // cm
};

// Reference grid of checkerboard inner corners on the Z=0 plane, row-major
// starting at the origin corner. X increases along a corner row, Y from row
// to row, all spaced `spacing_cm`. The origin corner is the top-right one as
// annotated; manifest corner order must match this enumeration.
std::vector<Vec3> checkerboard_world_grid(int cols, int rows, double spacing_cm);

// Homogeneous pinhole projection K [R|t] (X,1)'. Throws BehindCamera when
// the camera-frame depth is not positive.
Vec2 project_point(const CameraIntrinsics& k, const RigidTransform& extrinsics,
                   const Vec3& world_point);

// Camera pose in world coordinates: R' and -R' t.
RigidTransform invert_extrinsics(const RigidTransform& extrinsics);

}  // namespace foodvol
