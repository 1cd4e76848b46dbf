#pragma once

#include <span>

#include "foodvol/geometry.hpp"

namespace foodvol {

struct PnpResult {
  RigidTransform extrinsics;  // world -> camera
  double mean_reprojection_error_px = 0.0;
  int iterations = 0;
};

// Thrown when refinement stalls; carries the best pose found so far.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& message, PnpResult best)
      : Error(ErrorCode::NoConvergence, message), best_so_far(std::move(best)) {}

  PnpResult best_so_far;
};

// Pose from coplanar (Z = 0) correspondences. The plane-to-image homography
// is decomposed into [r1 r2 t] columns, the rotation is completed and
// projected onto SO(3), then Levenberg-Marquardt minimizes the summed squared
// reprojection error. Damping starts at 1e-3, x10 on a rejected step, x0.1 on
// an accepted one; stops when the step norm drops below 1e-10 or after 100
// iterations. Ten consecutive rejected steps raise NoConvergenceError.
PnpResult solve_pnp(std::span<const Correspondence> correspondences,
                    const CameraIntrinsics& k);

}  // namespace foodvol
