#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "surfelgrad/error.hpp"
#include "surfelgrad/rng.hpp"
#include "surfelgrad/scene.hpp"
#include "surfelgrad/surfel.hpp"

using namespace surfelgrad;

namespace {

bool interior(const Mask& hit, int r, int c, int margin = 1) {
  if (r < margin || c < margin || r + margin >= hit.rows() || c + margin >= hit.cols()) return false;
  for (int dr = -margin; dr <= margin; ++dr)
    for (int dc = -margin; dc <= margin; ++dc)
      if (!hit(r + dr, c + dc)) return false;
  return true;
}

struct SphereView {
  Camera camera;
  TraceResult traced;
  Vec3 center;
};

SphereView sphere_view(int size) {
  const Primitive sphere{PrimitiveKind::Sphere, {0.3, -0.2, 0.1}, {1, 1, 1}, {}};
  const Camera cam = Camera::make({2.1, 1.4, 2.6}, sphere.center, {0, 1, 0}, 35.0, 24.0, {size, size});
  const std::vector<Primitive> objects{sphere};
  return {cam, trace(objects, nullptr, cam), sphere.center};
}

}  // namespace

TEST_CASE("constant depth: on-axis center pixel and a fronto-parallel plane") {
  const Camera cam = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20, 24, {5, 7});
  const PositionGrid p = backproject(DepthMap(cam.resolution(), 2.0), cam);
  CHECK(p(2, 3) == Vec3{0, 0, -2});
  for (const Vec3& q : p.values()) CHECK(q.z == -2.0);
  const NormalEstimate n = estimate_normals(p);
  for (std::size_t i = 0; i < n.normals.size(); ++i) {
    CHECK(n.normals[i] == Vec3{0, 0, 1});
    CHECK(n.degenerate[i] == 0);
  }
}

TEST_CASE("random depth maps round-trip through back-projection") {
  const Camera cam = Camera::make({1, 2, 3}, {0, 0, 0}, {0, 1, 0}, 18, 24, {16, 24});
  Rng rng(3);
  DepthMap d(cam.resolution());
  for (double& v : d.values()) v = rng.uniform(0.1, 50.0);
  const PositionGrid p = backproject(d, cam);
  for (int r = 0; r < d.rows(); ++r)
    for (int c = 0; c < d.cols(); ++c) {
      CHECK(std::abs(-p(r, c).z - d(r, c)) < 1e-12);
      // On the pixel ray: no component orthogonal to it.
      const Vec3 dir = cam.camera_ray_direction(r, c);
      CHECK(norm(cross(p(r, c), dir)) < 1e-9);
      CHECK(dot(p(r, c), dir) > 0.0);
    }
}

TEST_CASE("back-projection is strictly monotone in depth along the ray") {
  const Camera cam = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20, 24, {3, 3});
  const Vec3 dir = cam.camera_ray_direction(0, 0);
  double previous = 0.0;
  for (double depth = 0.5; depth < 10.0; depth += 0.5) {
    const double t = dot(backproject(DepthMap(cam.resolution(), depth), cam)(0, 0), dir);
    CHECK(t > previous);
    previous = t;
  }
}

TEST_CASE("back-projection errors") {
  const Camera cam = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20, 24, {4, 4});
  DepthMap bad(cam.resolution(), 1.0);
  bad(1, 2) = 0.0;
  CHECK_THROWS_AS(backproject(bad, cam), Error);
  try {
    backproject(bad, cam);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveDepth);
  }
  try {
    backproject(DepthMap({4, 5}, 1.0), cam);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResolutionMismatch);
  }
}

TEST_CASE("slanted planes: both estimators recover the analytic normal") {
  const Camera cam = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20, 24, {32, 40});
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    // Plane through a point in front of the camera, shallow enough that every
    // pixel ray hits it in front.
    Vec3 n = normalize(rng.uniform_vec({-0.3, -0.3, 0.8}, {0.3, 0.3, 1.0}));
    const Vec3 anchor{0, 0, -rng.uniform(2.0, 6.0)};
    const DepthMap d = oracle::plane_depth(cam, n, dot(n, anchor));
    const PositionGrid p = backproject(d, cam);
    const NormalEstimate cross_n = estimate_normals(p);
    const NormalEstimate lsq_n = estimate_normals_lsq_oracle(p);
    for (int r = 1; r + 1 < d.rows(); ++r)
      for (int c = 1; c + 1 < d.cols(); ++c) {
        CHECK(norm(cross_n.normals(r, c) - n) < 1e-9);
        CHECK(norm(lsq_n.normals(r, c) - n) < 1e-9);
      }
    // One-sided differences are exact on planes too.
    CHECK(norm(cross_n.normals(0, 0) - n) < 1e-9);
  }
}

TEST_CASE("normals are unit length with positive z everywhere") {
  const Camera cam = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20, 24, {20, 20});
  Rng rng(8);
  DepthMap d(cam.resolution());
  for (double& v : d.values()) v = rng.uniform(1.0, 3.0);
  const NormalEstimate n = estimate_normals(backproject(d, cam));
  for (std::size_t i = 0; i < n.normals.size(); ++i) {
    if (n.degenerate[i]) continue;
    CHECK(std::abs(norm(n.normals[i]) - 1.0) < 1e-9);
    CHECK(n.normals[i].z > 0.0);
  }
}

TEST_CASE("sphere traced at 128x128: normals track the analytic sphere") {
  const SphereView view = sphere_view(128);
  const PositionGrid p = backproject(
      [&] {
        DepthMap d = view.traced.depth;
        for (std::size_t i = 0; i < d.size(); ++i)
          if (!view.traced.hit[i]) d[i] = 1.0;
        return d;
      }(),
      view.camera);
  const NormalEstimate cross_n = estimate_normals(p);
  const NormalEstimate lsq_n = estimate_normals_lsq_oracle(p);
  const Vec3 center_cam = view.camera.world_to_camera(view.center);
  double sum = 0.0;
  double worst_pair = 0.0;
  int count = 0;
  for (int r = 0; r < p.rows(); ++r)
    for (int c = 0; c < p.cols(); ++c) {
      if (!interior(view.traced.hit, r, c)) continue;
      const Vec3 analytic = normalize(p(r, c) - center_cam);
      sum += oracle::angle_deg(cross_n.normals(r, c), analytic);
      ++count;
      // The two estimators weigh grazing neighbours differently; compare them
      // where the whole 5x5 window lies on the sphere.
      if (interior(view.traced.hit, r, c, 2))
        worst_pair = std::max(worst_pair, oracle::angle_deg(cross_n.normals(r, c), lsq_n.normals(r, c)));
    }
  REQUIRE(count > 1000);
  CHECK(sum / count < 2.0);
  CHECK(worst_pair < 1.0);
}

TEST_CASE("collinear neighborhoods are flagged degenerate") {
  PositionGrid p({4, 4});
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) p(r, c) = {double(c - r), 0.0, -2.0};
  const NormalEstimate a = estimate_normals(p);
  const NormalEstimate b = estimate_normals_lsq_oracle(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(a.degenerate[i] == 1);
    CHECK(a.normals[i] == Vec3{0, 0, 1});
    CHECK(b.degenerate[i] == 1);
  }
}

TEST_CASE("normals facing away are flipped into the n_z > 0 half space") {
  // Mirror the x axis of a plane grid so the raw cross product points to -z.
  PositionGrid p({3, 3});
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p(r, c) = {-double(c), -double(r), -2.0};
  const NormalEstimate n = estimate_normals(p);
  CHECK(n.flipped(1, 1) == 1);
  CHECK(n.normals(1, 1) == Vec3{0, 0, 1});
}

TEST_CASE("reprojection onto the same camera is the identity") {
  const Camera cam = Camera::make({1, 1, 4}, {0, 0, 0}, {0, 1, 0}, 20, 24, {24, 32});
  Rng rng(2);
  DepthMap d(cam.resolution());
  for (double& v : d.values()) v = rng.uniform(2.0, 6.0);
  const Reprojection out = reproject(backproject(d, cam), cam, cam);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(out.hit[i] == 1);
    CHECK(std::abs(out.depth[i] - d[i]) < 1e-12);
  }
}

TEST_CASE("reprojection culls surfels outside the destination frustum") {
  const Camera src = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20, 24, {1, 1});
  const Camera dst = Camera::make({100, 0, 0}, {100, 0, -1}, {0, 1, 0}, 20, 24, {1, 1});
  const Reprojection out = reproject(backproject(DepthMap({1, 1}, 3.0), src), src, dst);
  CHECK(out.hit[0] == 0);
  CHECK(out.depth[0] == 0.0);
}

TEST_CASE("z-buffer keeps the nearest surfel") {
  const Camera cam = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20, 24, {1, 2});
  // Both surfels sit on the ray of pixel (0,0) at different depths.
  const Vec3 dir = cam.camera_ray_direction(0, 0);
  PositionGrid p({1, 2});
  p(0, 0) = (5.0 / -dir.z) * dir;
  p(0, 1) = (2.0 / -dir.z) * dir;
  const Reprojection out = reproject(p, cam, cam);
  CHECK(out.hit(0, 0) == 1);
  CHECK(std::abs(out.depth(0, 0) - 2.0) < 1e-12);
  CHECK(out.hit(0, 1) == 0);
}
