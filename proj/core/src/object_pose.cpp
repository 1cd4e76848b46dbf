#include "foodvol/object_pose.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace foodvol {

AblationFlags AblationFlags::parse(const std::string& csv) {
  AblationFlags flags;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    if (token == "zero_tx") {
      flags.zero_tx = true;
    } else if (token == "zero_ty") {
      flags.zero_ty = true;
    } else if (token == "zero_theta_z" || token == "zero_theta") {
      flags.zero_theta_z = true;
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown ablation flag: " + token);
    }
  }
  return flags;
}

std::string AblationFlags::to_string() const {
  std::string out;
  auto append = [&out](const char* name) {
    if (!out.empty()) out += ',';
    out += name;
  };
  if (zero_tx) append("zero_tx");
  if (zero_ty) append("zero_ty");
  if (zero_theta_z) append("zero_theta_z");
  return out;
}

double wrap_half_pi(double angle) {
  const double pi = std::numbers::pi;
  double wrapped = angle - pi * std::floor(angle / pi + 0.5);
  if (wrapped >= pi / 2.0) wrapped -= pi;  // floor rounding edge
  return wrapped;
}

double principal_axis_angle(const Silhouette& mask) {
  double sx = 0.0, sy = 0.0;
  std::int64_t n = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  if (n == 0) throw Error(ErrorCode::EmptyMask, "principal axis of an empty mask");
  if (n == 1) {
    throw Error(ErrorCode::DegenerateMask, "principal axis of a single-pixel mask");
  }
  const double mx = sx / n, my = sy / n;

  double cxx = 0.0, cxy = 0.0, cyy = 0.0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        const double dx = x - mx, dy = y - my;
        cxx += dx * dx;
        cxy += dx * dy;
        cyy += dy * dy;
      }
    }
  }
  cxx /= n;
  cxy /= n;
  cyy /= n;

  const double trace = cxx + cyy;
  const double gap = std::hypot(cxx - cyy, 2.0 * cxy);  // lambda1 - lambda2
  if (trace <= 0.0) {
    throw Error(ErrorCode::DegenerateMask, "mask pixels share one coordinate");
  }
  if (gap < 1e-6 * trace) return 0.0;  // isotropic, tie-break

  return wrap_half_pi(0.5 * std::atan2(2.0 * cxy, cxx - cyy));
}

Vec2 planar_translation(const Silhouette& mask, const Homography& rectifier,
                        const Vec2& reference_corner_cm) {
  return rectifier.apply(mask.centroid()) - reference_corner_cm;
}

ObjectPose estimate_object_pose(const Silhouette& mask, const Homography& rectifier,
                                const Vec2& reference_corner_cm,
                                const AblationFlags& ablation) {
  ObjectPose pose;
  if (ablation.all()) return pose;

  const ComponentSplit split = largest_component(mask);
  const Silhouette& body = split.component_count > 1 ? split.largest : mask;

  if (!ablation.zero_tx || !ablation.zero_ty) {
    const Vec2 t = planar_translation(body, rectifier, reference_corner_cm);
    if (!ablation.zero_tx) pose.tx_cm = t.x();
    if (!ablation.zero_ty) pose.ty_cm = t.y();
  }
  if (!ablation.zero_theta_z) {
    pose.theta_z_rad = wrap_half_pi(-principal_axis_angle(body));
  }
  return pose;
}

}  // namespace foodvol
