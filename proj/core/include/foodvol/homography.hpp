#pragma once

#include <span>

#include "foodvol/geometry.hpp"

namespace foodvol {

// 3x3 projective map, stored normalized so that m(2,2) == 1 whenever the
// bottom-right entry is nonzero. Must be invertible.
struct Homography {
  Mat3 m = Mat3::Identity();

  // Normalizes and checks invertibility (|det| > 1e-12 after normalization).
  static Homography from_matrix(const Mat3& raw);

  // Applies the map and dehomogenizes. Throws RectificationFailure when the
  // image of the point is at infinity (|w| < 1e-12).
  Vec2 apply(const Vec2& p) const;

  Homography inverse() const;
};

struct HomographyFit {
  Homography h;
  // Mean over pairs of the average forward/backward transfer distance, px.
  double symmetric_transfer_error_px = 0.0;
};

// Normalized DLT: both point sets are isotropically normalized (centroid to
// origin, mean distance sqrt(2)), the stacked 2Nx9 system is solved by the
// smallest right singular vector, and the result is denormalized.
HomographyFit fit_homography(std::span<const Vec2> src, std::span<const Vec2> dst);

}  // namespace foodvol
