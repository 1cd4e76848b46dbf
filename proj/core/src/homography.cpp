#include "foodvol/homography.hpp"

#include <cmath>

namespace foodvol {
namespace {

Mat3 normalizing_similarity(std::span<const Vec2> pts) {
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());

  double mean_dist = 0.0;
  for (const Vec2& p : pts) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<double>(pts.size());

  const double s = mean_dist > 1e-300 ? std::sqrt(2.0) / mean_dist : 1.0;
  Mat3 t;
  t << s, 0.0, -s * centroid.x(),
       0.0, s, -s * centroid.y(),
       0.0, 0.0, 1.0;
  return t;
}

}  // namespace

Homography Homography::from_matrix(const Mat3& raw) {
  Mat3 m = raw;
  if (std::abs(m(2, 2)) > 1e-12 * m.cwiseAbs().maxCoeff()) {
    m /= m(2, 2);
  }
  if (std::abs(m.determinant()) <= 1e-12) {
    throw Error(ErrorCode::DegenerateConfiguration, "homography is not invertible");
  }
  return Homography{m};
}

Vec2 Homography::apply(const Vec2& p) const {
  const Eigen::Vector3d q = m * Eigen::Vector3d(p.x(), p.y(), 1.0);
  if (std::abs(q.z()) < 1e-12) {
    throw Error(ErrorCode::RectificationFailure, "point maps to the plane at infinity");
  }
  return {q.x() / q.z(), q.y() / q.z()};
}

Homography Homography::inverse() const {
  return Homography::from_matrix(m.inverse());
}

HomographyFit fit_homography(std::span<const Vec2> src, std::span<const Vec2> dst) {
  if (src.size() != dst.size()) {
    throw Error(ErrorCode::InvalidArgument, "fit_homography: point count mismatch");
  }
  const std::size_t n = src.size();
  if (n < 4) {
    throw Error(ErrorCode::InsufficientData, "fit_homography: need at least 4 point pairs");
  }

  const Mat3 t_src = normalizing_similarity(src);
  const Mat3 t_dst = normalizing_similarity(dst);

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d p = t_src * Eigen::Vector3d(src[i].x(), src[i].y(), 1.0);
    const Eigen::Vector3d q = t_dst * Eigen::Vector3d(dst[i].x(), dst[i].y(), 1.0);
    const double x = p.x(), y = p.y();
    const double xp = q.x(), yp = q.y();
    a.row(2 * i) << -x, -y, -1.0, 0.0, 0.0, 0.0, xp * x, xp * y, xp;
    a.row(2 * i + 1) << 0.0, 0.0, 0.0, -x, -y, -1.0, yp * x, yp * y, yp;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A 2Nx9 system always has a one-dimensional null space candidate; the
  // configuration is degenerate when a second one opens up (index 7 of the
  // nine-entry spectrum, equivalently the last computed value for N = 4).
  const Eigen::Index second_smallest = std::min<Eigen::Index>(7, sv.size() - 1);
  if (sv(second_smallest) < 1e-9 * sv(0)) {
    throw Error(ErrorCode::DegenerateConfiguration,
                "fit_homography: degenerate point configuration");
  }

  Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2),
        h(3), h(4), h(5),
        h(6), h(7), h(8);

  HomographyFit fit;
  fit.h = Homography::from_matrix(t_dst.inverse() * hn * t_src);

  const Homography inv = fit.h.inverse();
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    err += 0.5 * ((fit.h.apply(src[i]) - dst[i]).norm() +
                  (inv.apply(dst[i]) - src[i]).norm());
  }
  fit.symmetric_transfer_error_px = err / static_cast<double>(n);
  return fit;
}

}  // namespace foodvol
