#pragma once

#include <string>

#include "foodvol/homography.hpp"
#include "foodvol/silhouette.hpp"

namespace foodvol {

// Planar translation (cm) plus rotation about the world up axis, radians in
// [-pi/2, pi/2). The axis is undirected so half a turn covers it.
struct ObjectPose {
  double tx_cm = 0.0;
  double ty_cm = 0.0;
  double theta_z_rad = 0.0;
};

struct AblationFlags {
  bool zero_tx = false;
  bool zero_ty = false;
  bool zero_theta_z = false;

  bool any() const { return zero_tx || zero_ty || zero_theta_z; }
  bool all() const { return zero_tx && zero_ty && zero_theta_z; }

  // Comma-separated "zero_tx,zero_ty,zero_theta_z" (empty string allowed).
  static AblationFlags parse(const std::string& csv);
  std::string to_string() const;
};

// Maps any angle into [-pi/2, pi/2) modulo pi.
double wrap_half_pi(double angle);

// Orientation of the covariance eigenvector with the larger eigenvalue,
// measured against the image horizontal axis (v down). Returns 0 when the
// eigenvalue gap is below 1e-6 of the trace. Throws EmptyMask /
// DegenerateMask for 0- or 1-pixel masks.
double principal_axis_angle(const Silhouette& mask);

// Foreground centroid pushed through the pixel->board-plane rectifier, minus
// the reference corner, cm.
Vec2 planar_translation(const Silhouette& mask, const Homography& rectifier,
                        const Vec2& reference_corner_cm);

// Full pose vector. The image v axis points down, so the image-plane angle
// maps to a rotation of -angle about the world up axis. Masks with several
// 8-connected components are reduced to the largest one first. Components
// whose ablation flag is set are forced to zero and not computed.
ObjectPose estimate_object_pose(const Silhouette& mask, const Homography& rectifier,
                                const Vec2& reference_corner_cm,
                                const AblationFlags& ablation = {});

}  // namespace foodvol
