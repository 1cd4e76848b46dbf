#include "foodvol/pnp.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <vector>

#include "foodvol/homography.hpp"

namespace foodvol {
namespace {

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

Mat3 axis_angle_rotation(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-14) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

// Smallest/largest singular value ratio of the centered 2D spread.
void check_planar_spread(const Eigen::MatrixX2d& pts, const char* what) {
  Eigen::MatrixX2d centered = pts.rowwise() - pts.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixX2d> svd(centered);
  const auto& sv = svd.singularValues();
  if (sv(1) < 1e-9 * sv(0)) {
    throw Error(ErrorCode::DegenerateConfiguration,
                std::string("solve_pnp: collinear ") + what + " points");
  }
}

// Sum of squared residuals; +inf when any point loses positive depth.
double reprojection_cost(std::span<const Correspondence> cs, const CameraIntrinsics& k,
                         const RigidTransform& pose) {
  double cost = 0.0;
  for (const Correspondence& c : cs) {
    const Vec3 cam = pose.apply(c.world);
    if (!(cam.z() > 0.0)) return std::numeric_limits<double>::infinity();
    const double u = (k.fx * cam.x() + k.skew * cam.y()) / cam.z() + k.cx;
    const double v = k.fy * cam.y() / cam.z() + k.cy;
    cost += (Vec2(u, v) - c.pixel).squaredNorm();
  }
  return cost;
}

double mean_pixel_error(std::span<const Correspondence> cs, const CameraIntrinsics& k,
                        const RigidTransform& pose) {
  double err = 0.0;
  for (const Correspondence& c : cs) {
    const Vec3 cam = pose.apply(c.world);
    const double u = (k.fx * cam.x() + k.skew * cam.y()) / cam.z() + k.cx;
    const double v = k.fy * cam.y() / cam.z() + k.cy;
    err += (Vec2(u, v) - c.pixel).norm();
  }
  return err / static_cast<double>(cs.size());
}

RigidTransform initial_pose_from_plane(std::span<const Correspondence> cs,
                                       const CameraIntrinsics& k) {
  std::vector<Vec2> plane, pixels;
  plane.reserve(cs.size());
  pixels.reserve(cs.size());
  for (const Correspondence& c : cs) {
    plane.emplace_back(c.world.x(), c.world.y());
    pixels.push_back(c.pixel);
  }
  const Homography h = fit_homography(plane, pixels).h;

  Mat3 m = k.matrix().inverse() * h.m;
  const double scale = 2.0 / (m.col(0).norm() + m.col(1).norm());
  m *= scale;
  if (m(2, 2) < 0.0) m = -m;  // plane must sit in front of the camera

  Mat3 rot_cols;
  rot_cols.col(0) = m.col(0);
  rot_cols.col(1) = m.col(1);
  rot_cols.col(2) = m.col(0).cross(m.col(1));

  RigidTransform pose;
  pose.rotation = nearest_rotation(rot_cols);
  pose.translation = m.col(2);
  return pose;
}

}  // namespace

PnpResult solve_pnp(std::span<const Correspondence> cs, const CameraIntrinsics& k) {
  k.validate();
  if (cs.size() < 4) {
    throw Error(ErrorCode::InsufficientData, "solve_pnp: need at least 4 correspondences");
  }

  const std::size_t n = cs.size();
  Eigen::MatrixX2d world_xy(n, 2), pixel_uv(n, 2);
  double max_abs_z = 0.0, spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    world_xy.row(i) << cs[i].world.x(), cs[i].world.y();
    pixel_uv.row(i) << cs[i].pixel.x(), cs[i].pixel.y();
    max_abs_z = std::max(max_abs_z, std::abs(cs[i].world.z()));
    spread = std::max(spread, cs[i].world.head<2>().norm());
  }
  if (max_abs_z > 1e-9 * std::max(spread, 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "solve_pnp: world points must lie on the Z=0 plane");
  }
  check_planar_spread(world_xy, "world");
  check_planar_spread(pixel_uv, "pixel");

  RigidTransform pose = initial_pose_from_plane(cs, k);
  double cost = reprojection_cost(cs, k, pose);
  if (!std::isfinite(cost)) {
    throw Error(ErrorCode::DegenerateConfiguration,
                "solve_pnp: initialization places points behind the camera");
  }

  // Levenberg-Marquardt over [axis-angle increment | translation increment].
  double lambda = 1e-3;
  int iterations = 0;
  int consecutive_rejects = 0;

  for (int iter = 0; iter < 100; ++iter) {
    iterations = iter + 1;

    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (const Correspondence& c : cs) {
      const Vec3 cam = pose.apply(c.world);
      const double iz = 1.0 / cam.z();
      const double u = (k.fx * cam.x() + k.skew * cam.y()) * iz + k.cx;
      const double v = k.fy * cam.y() * iz + k.cy;
      const Vec2 residual(u - c.pixel.x(), v - c.pixel.y());

      Eigen::Matrix<double, 2, 3> dpix;
      dpix << k.fx * iz, k.skew * iz, -(k.fx * cam.x() + k.skew * cam.y()) * iz * iz,
              0.0, k.fy * iz, -k.fy * cam.y() * iz * iz;

      Eigen::Matrix<double, 3, 6> dcam;
      Mat3 skew_rx;
      const Vec3 rx = pose.rotation * c.world;
      skew_rx << 0.0, -rx.z(), rx.y(),
                 rx.z(), 0.0, -rx.x(),
                 -rx.y(), rx.x(), 0.0;
      dcam.block<3, 3>(0, 0) = -skew_rx;  // left perturbation exp(w) R
      dcam.block<3, 3>(0, 3) = Mat3::Identity();

      const Eigen::Matrix<double, 2, 6> jac = dpix * dcam;
      jtj += jac.transpose() * jac;
      jtr += jac.transpose() * residual;
    }

    bool accepted = false;
    bool stalled = false;
    double step_norm = 0.0;
    double best_trial = std::numeric_limits<double>::infinity();
    while (true) {
      Eigen::Matrix<double, 6, 6> damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal();
      const Eigen::Matrix<double, 6, 1> delta = damped.ldlt().solve(-jtr);
      step_norm = delta.norm();

      RigidTransform trial;
      trial.rotation = axis_angle_rotation(delta.head<3>()) * pose.rotation;
      trial.translation = pose.translation + delta.tail<3>();
      const double trial_cost = reprojection_cost(cs, k, trial);

      if (trial_cost < cost) {
        pose = trial;
        cost = trial_cost;
        lambda = std::max(lambda * 0.1, 1e-12);
        consecutive_rejects = 0;
        accepted = true;
        break;
      }

      lambda *= 10.0;
      ++consecutive_rejects;
      best_trial = std::min(best_trial, trial_cost);
      if (consecutive_rejects >= 10) {
        // Rejections at a minimum only fail by rounding margins; that is a
        // stall, not divergence. Real divergence leaves every damped trial
        // measurably above the current cost.
        if (best_trial > cost * (1.0 + 1e-6) + 1e-18) {
          PnpResult best{pose, mean_pixel_error(cs, k, pose), iterations};
          throw NoConvergenceError("solve_pnp: refinement failed to decrease the error",
                                   std::move(best));
        }
        stalled = true;
        break;
      }
    }

    if (!accepted || stalled || step_norm < 1e-10) break;
  }

  pose.rotation = nearest_rotation(pose.rotation);  // re-orthonormalize drift
  return PnpResult{pose, mean_pixel_error(cs, k, pose), iterations};
}

}  // namespace foodvol
