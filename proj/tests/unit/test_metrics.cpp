#include <doctest.h>

#include <cmath>
#include <functional>

#include "oracles.hpp"
#include "surfelgrad/error.hpp"
#include "surfelgrad/metrics.hpp"
#include "surfelgrad/rng.hpp"

using namespace surfelgrad;

namespace {

PointSet random_set(Rng& rng, int n, double spread) {
  PointSet out(static_cast<std::size_t>(n));
  for (Vec3& p : out) p = rng.uniform_vec({-spread, -spread, -spread}, {spread, spread, spread});
  return out;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InternalError;
}

}  // namespace

TEST_CASE("hand-evaluated chamfer and hausdorff") {
  const PointSet a{{0, 0, 0}};
  const PointSet b{{1, 0, 0}};
  CHECK(chamfer(a, b) == 2.0);
  CHECK(chamfer(a, a) == 0.0);
  const PointSet c{{1, 0, 0}, {0, 0, 0}};
  CHECK(hausdorff(a, c) == 1.0);
  CHECK(hausdorff(c, c) == 0.0);
  CHECK(hausdorff_directed(a, c) == 0.0);
  CHECK(hausdorff_directed(c, a) == 1.0);
}

TEST_CASE("accelerated metrics equal brute force") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 400));
    const int m = static_cast<int>(rng.uniform_int(1, 400));
    const PointSet a = random_set(rng, n, rng.uniform(0.01, 20.0));
    const PointSet b = random_set(rng, m, rng.uniform(0.01, 20.0));
    CHECK(std::abs(chamfer(a, b) - oracle::brute_chamfer(a, b)) <= 1e-12);
    CHECK(std::abs(hausdorff(a, b) - oracle::brute_hausdorff(a, b)) <= 1e-12);
  }
}

TEST_CASE("clustered, duplicated and far-flung points") {
  Rng rng(5);
  PointSet a = random_set(rng, 300, 1e-3);
  PointSet b = random_set(rng, 50, 1e-3);
  a.push_back({1e4, -1e4, 3});
  a.push_back(a[0]);
  a.push_back(a[0]);
  b.push_back({-500, 0, 0});
  CHECK(std::abs(chamfer(a, b) - oracle::brute_chamfer(a, b)) <= 1e-12);
  CHECK(std::abs(hausdorff(a, b) - oracle::brute_hausdorff(a, b)) <= 1e-12);
  // Points on a plane and on a line: degenerate extents.
  PointSet line, plane;
  for (int i = 0; i < 200; ++i) line.push_back({i * 0.01, 0, 0});
  for (int i = 0; i < 200; ++i) plane.push_back({rng.uniform(0, 2), rng.uniform(0, 2), 0});
  CHECK(std::abs(chamfer(line, plane) - oracle::brute_chamfer(line, plane)) <= 1e-12);
}

TEST_CASE("symmetry and translation invariance") {
  Rng rng(12);
  const PointSet a = random_set(rng, 120, 2.0);
  const PointSet b = random_set(rng, 80, 2.0);
  CHECK(chamfer(a, b) == chamfer(b, a));
  CHECK(hausdorff(a, b) == hausdorff(b, a));
  const Vec3 t{3.5, -1.25, 7.0};
  PointSet at = a, bt = b;
  for (Vec3& p : at) p += t;
  for (Vec3& p : bt) p += t;
  CHECK(std::abs(chamfer(at, bt) - chamfer(a, b)) < 1e-12);
  CHECK(std::abs(hausdorff(at, bt) - hausdorff(a, b)) < 1e-12);
  CHECK(chamfer(a, b) > 0.0);
}

TEST_CASE("depth MSE") {
  Rng rng(3);
  DepthMap a({7, 9});
  for (double& v : a.values()) v = rng.uniform(1, 5);
  CHECK(mse_depth(a, a) == 0.0);
  DepthMap b = a;
  for (double& v : b.values()) v += 0.5;
  CHECK(std::abs(mse_depth(a, b) - 0.25) < 1e-12);
  for (double& v : b.values()) v = rng.uniform(1, 5);
  double naive = 0.0;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) naive += (a(r, c) - b(r, c)) * (a(r, c) - b(r, c));
  naive /= a.size();
  CHECK(std::abs(mse_depth(a, b) - naive) < 1e-12);

  Mask mask(a.resolution(), 0);
  mask(2, 3) = 1;
  const double d = a(2, 3) - b(2, 3);
  CHECK(mse_depth(a, b, &mask) == doctest::Approx(d * d));
  const Mask empty(a.resolution(), 0);
  CHECK(code_of([&] { mse_depth(a, b, &empty); }) == ErrorCode::EmptyMask);
  CHECK(code_of([&] { mse_depth(a, DepthMap({7, 8}, 1.0)); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("surfels to point sets") {
  const Camera cam = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20, 24, {6, 5});
  const PositionGrid p = backproject(DepthMap(cam.resolution(), 3.0), cam);
  const PointSet all = surfels_to_pointset(p);
  CHECK(all.size() == 30);
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(all[i] == p[i]);
    CHECK(all[i].z == -3.0);
  }
  Mask mask(cam.resolution(), 0);
  mask(1, 1) = mask(4, 2) = 1;
  const PointSet some = surfels_to_pointset(p, &mask);
  CHECK(some.size() == 2);
  CHECK(some[1] == p(4, 2));
  const Mask none(cam.resolution(), 0);
  CHECK(code_of([&] { surfels_to_pointset(p, &none); }) == ErrorCode::EmptyMask);
}

TEST_CASE("empty sets are rejected") {
  const PointSet empty;
  const PointSet one{{0, 0, 0}};
  CHECK(code_of([&] { chamfer(empty, one); }) == ErrorCode::EmptySet);
  CHECK(code_of([&] { hausdorff(one, empty); }) == ErrorCode::EmptySet);
}
