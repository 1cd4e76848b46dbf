#include <doctest.h>

#include <cmath>

#include "foodvol/fixtures.hpp"
#include "foodvol/render.hpp"
#include "foodvol/synth.hpp"

using namespace foodvol;

namespace {

TriangleMesh shifted(const TriangleMesh& mesh, const Vec3& offset) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v += offset;
  return out;
}

Silhouette raster_one(const Vec2& a, const Vec2& b, const Vec2& c, int w, int h) {
  TriangleMesh tri;
  tri.vertices = {Vec3(a.x(), a.y(), 1.0), Vec3(b.x(), b.y(), 1.0),
                  Vec3(c.x(), c.y(), 1.0)};
  tri.triangles = {{0, 1, 2}};
  Mat34 p = Mat34::Zero();  // identity projection: pixel = (x/z, y/z)
  p(0, 0) = p(1, 1) = p(2, 2) = 1.0;
  return render_silhouette(tri, p, w, h);
}

}  // namespace

TEST_SUITE_BEGIN("render");

TEST_CASE("projection matrix of the identity camera") {
  CameraIntrinsics k{1.0, 1.0, 0.0, 0.0, 0.0};
  const Mat34 p = projection_matrix(k, {});
  Mat34 expected = Mat34::Zero();
  expected(0, 0) = expected(1, 1) = expected(2, 2) = 1.0;
  CHECK((p - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projection matrix sends the camera center to infinity") {
  SynthCamera cam;
  cam.distance_cm = 80.0;
  cam.elevation_deg = 50.0;
  cam.azimuth_deg = 15.0;
  const RigidTransform ext = camera_from_params(cam);
  const CameraIntrinsics k{3000.0, 3000.0, 1023.5, 767.5, 0.0};
  const Mat34 p = projection_matrix(k, ext);

  const Vec3 center = invert_extrinsics(ext).translation;
  const Vec3 image = p * center.homogeneous();
  CHECK(std::abs(image.z()) < 1e-9);
}

TEST_CASE("projection matrix matches point projection on the grid corners") {
  SynthCamera cam;
  cam.distance_cm = 70.0;
  cam.elevation_deg = 45.0;
  const RigidTransform ext = camera_from_params(cam);
  const CameraIntrinsics k{3000.0, 3000.0, 1023.5, 767.5, 0.0};
  const Mat34 p = projection_matrix(k, ext);
  for (const Vec3& w : checkerboard_world_grid(4, 3, 1.2)) {
    const Vec3 hom = p * w.homogeneous();
    const Vec2 via_matrix(hom.x() / hom.z(), hom.y() / hom.z());
    CHECK((via_matrix - project_point(k, ext, w)).norm() < 1e-9);
  }
}

TEST_CASE("face-on box area matches the analytic footprint") {
  // 10 cm box spanning depth 45..55, camera at the origin looking +Z
  const TriangleMesh box = shifted(make_box(10.0, 10.0, 10.0), Vec3(0, 0, 45));
  const CameraIntrinsics k{1000.0, 1000.0, 640.0, 360.0, 0.0};
  const Mat34 p = projection_matrix(k, {});

  RenderStats stats;
  const Silhouette mask = render_silhouette(box, p, 1280, 720, &stats);
  CHECK(stats.triangles_discarded == 0);
  CHECK(mask.area() > 0);

  const double side = 2.0 * 1000.0 * 5.0 / 45.0;  // nearest face dominates
  const double analytic = side * side;
  CHECK(std::abs(static_cast<double>(mask.area()) - analytic) / analytic < 0.02);
}

TEST_CASE("mesh behind the camera raises empty-render") {
  const TriangleMesh box = shifted(make_box(2, 2, 2), Vec3(0, 0, -50));
  const CameraIntrinsics k{1000.0, 1000.0, 640.0, 360.0, 0.0};
  try {
    render_silhouette(box, projection_matrix(k, {}), 1280, 720);
    FAIL("expected empty-render");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyRender);
  }
}

TEST_CASE("off-screen mesh yields an empty mask, not an error") {
  const TriangleMesh box = shifted(make_box(2, 2, 2), Vec3(500, 0, 50));
  const CameraIntrinsics k{1000.0, 1000.0, 640.0, 360.0, 0.0};
  RenderStats stats;
  const Silhouette mask = render_silhouette(box, projection_matrix(k, {}), 1280, 720, &stats);
  CHECK(stats.foreground_pixels == 0);
  CHECK(mask.area() == 0);
}

TEST_CASE("scaling about the ground contact follows the square law") {
  // small object far away: the depth shift of the growing centroid stays
  // negligible and the area ratio approaches s^2
  SynthCamera cam;
  cam.distance_cm = 80.0;
  cam.elevation_deg = 60.0;
  const RigidTransform ext = camera_from_params(cam);
  const CameraIntrinsics k{3000.0, 3000.0, 639.5, 479.5, 0.0};
  const Mat34 p = projection_matrix(k, ext);

  const TriangleMesh cube = make_cube(1.2);
  const double a1 = static_cast<double>(
      render_silhouette(apply_object_pose(cube, {}, 1.0), p, 1280, 960).area());
  const double a2 = static_cast<double>(
      render_silhouette(apply_object_pose(cube, {}, 1.5), p, 1280, 960).area());
  CHECK(std::abs(a2 / a1 - 2.25) / 2.25 < 0.02);
}

TEST_CASE("rendering is deterministic and monotone in scale") {
  SynthCamera cam;
  cam.distance_cm = 70.0;
  cam.elevation_deg = 55.0;
  cam.azimuth_deg = 20.0;
  const RigidTransform ext = camera_from_params(cam);
  const CameraIntrinsics k{3000.0, 3000.0, 1023.5, 767.5, 0.0};
  const Mat34 p = projection_matrix(k, ext);
  const TriangleMesh sphere = make_icosphere(1.0, 3);

  const Silhouette once = render_silhouette(sphere, p, 2048, 1536);
  const Silhouette twice = render_silhouette(sphere, p, 2048, 1536);
  CHECK(once == twice);

  std::int64_t prev = 0;
  for (double s : {0.6, 0.9, 1.2, 1.5}) {
    const std::int64_t area =
        render_silhouette(apply_object_pose(sphere, {}, s), p, 2048, 1536).area();
    CHECK(area >= prev);
    prev = area;
  }
}

TEST_CASE("doubling the resolution quadruples the area within half a percent") {
  SynthCamera cam;
  cam.distance_cm = 65.0;
  cam.elevation_deg = 50.0;
  cam.azimuth_deg = -10.0;
  const RigidTransform ext = camera_from_params(cam);
  const TriangleMesh sphere = make_icosphere(1.2, 3);

  const CameraIntrinsics k1{2200.0, 2200.0, 511.5, 383.5, 0.0};
  const double a1 =
      static_cast<double>(render_silhouette(sphere, projection_matrix(k1, ext), 1024, 768).area());

  // fine pixel centers sit at 2u + 0.5
  const CameraIntrinsics k2{4400.0, 4400.0, 2 * 511.5 + 0.5, 2 * 383.5 + 0.5, 0.0};
  const double a2 =
      static_cast<double>(render_silhouette(sphere, projection_matrix(k2, ext), 2048, 1536).area());

  CHECK(std::abs(a2 - 4.0 * a1) / (4.0 * a1) < 0.005);
}

TEST_CASE("shared triangle edges never double-fill or leave seams") {
  // axis-aligned rectangle split along the diagonal
  const Vec2 a(10, 5), b(20, 5), c(20, 9), d(10, 9);
  const Silhouette t1 = raster_one(a, b, c, 32, 16);
  const Silhouette t2 = raster_one(a, c, d, 32, 16);

  std::int64_t overlap = 0;
  for (std::size_t i = 0; i < t1.bits.size(); ++i) {
    overlap += (t1.bits[i] & t2.bits[i]);
  }
  CHECK(overlap == 0);
  // the fill rule keeps top/left edges and drops bottom/right ones
  CHECK(t1.area() + t2.area() == 10 * 4);

  // a skewed quad: still exactly one owner per pixel
  const Vec2 e(3.3, 2.7), f(27.8, 5.1), g(24.2, 13.6), h(6.9, 11.2);
  const Silhouette s1 = raster_one(e, f, g, 32, 20);
  const Silhouette s2 = raster_one(e, g, h, 32, 20);
  std::int64_t overlap2 = 0, union2 = 0;
  for (std::size_t i = 0; i < s1.bits.size(); ++i) {
    overlap2 += (s1.bits[i] & s2.bits[i]);
    union2 += (s1.bits[i] | s2.bits[i]);
  }
  CHECK(overlap2 == 0);
  CHECK(union2 == s1.area() + s2.area());
}

TEST_CASE("silhouette stays below the horizon of the board plane") {
  SynthCamera cam;
  cam.distance_cm = 80.0;
  cam.elevation_deg = 35.0;
  cam.azimuth_deg = 10.0;
  const RigidTransform ext = camera_from_params(cam);
  const CameraIntrinsics k{1500.0, 1500.0, 1023.5, 767.5, 0.0};
  const Mat34 p = projection_matrix(k, ext);

  const TriangleMesh cube = apply_object_pose(make_cube(3.0), {1.0, 2.0, 0.3}, 1.0);
  const Silhouette mask = render_silhouette(cube, p, 2048, 1536);
  REQUIRE(mask.area() > 0);

  // vanishing line of Z=0 through the images of its two infinite directions
  const Vec3 horizon = Vec3(p.col(0)).cross(Vec3(p.col(1)));
  const Vec3 board_origin = p * Vec3(0, 0, 0).homogeneous();
  const double ref_side = horizon.dot(board_origin / board_origin.z());

  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const double side = horizon.dot(Vec3(x, y, 1.0));
      CHECK(side * ref_side > 0.0);
    }
  }
}

TEST_SUITE_END();
