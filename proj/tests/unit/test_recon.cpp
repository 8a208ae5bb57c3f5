#include <doctest.h>

#include <cmath>

#include "surfelgrad/error.hpp"
#include "surfelgrad/recon.hpp"
#include "surfelgrad/scene.hpp"

using namespace surfelgrad;

namespace {

struct Setup {
  Camera camera;
  Material material;
  LightingRig rig;
};

Setup small_setup(int size) {
  Setup s;
  s.camera = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20, 24, {size, size});
  s.material.albedo = {0.8, 0.8, 0.8};
  s.rig.ambient = {0.05, 0.05, 0.05};
  s.rig.lights.push_back({{1.0, 1.5, 0.5}, {1, 1, 1}, 0.0, 0.2});
  return s;
}

DepthMap tilted_plane(const Camera& cam) {
  const PositionGrid k = ray_scales(cam);
  const Vec3 n = normalize(Vec3{0.3, 0.2, 1.0});
  DepthMap d(cam.resolution());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = dot(n, Vec3{0, 0, -2.0}) / dot(n, k[i]);
  return d;
}

}  // namespace

TEST_CASE("total variation of constant maps and step edges") {
  const TotalVariation flat = total_variation(DepthMap({5, 5}, 2.0));
  CHECK(flat.value == 0.0);
  for (double g : flat.grad.values()) CHECK(g == 0.0);

  // Vertical step of height 0.75 across 6 rows.
  DepthMap step({6, 8}, 1.0);
  for (int r = 0; r < 6; ++r)
    for (int c = 4; c < 8; ++c) step(r, c) = 1.75;
  CHECK(total_variation(step).value == doctest::Approx(0.75 * 6));
}

TEST_CASE("total variation gradient matches finite differences away from ties") {
  Rng rng(4);
  DepthMap d({6, 7});
  for (double& v : d.values()) v = rng.uniform(1, 3);
  const TotalVariation tv = total_variation(d);
  const GradMap fd = finite_diff_grad([](const DepthMap& x) { return total_variation(x).value; }, d, 1e-7);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(fd[i] - tv.grad[i]) < 1e-6);
}

TEST_CASE("a target rendered from the initial depth is a fixed point") {
  const Setup s = small_setup(12);
  ReconConfig cfg;
  cfg.init_depth = 2.0;
  const Image target = render(DepthMap(s.camera.resolution(), 2.0), s.camera, s.material, s.rig);
  const ReconReport report = reconstruct_depth(target, s.camera, s.material, s.rig, cfg);
  REQUIRE(report.trace.size() == 1);
  CHECK(report.trace[0].data < 1e-12);
  CHECK(report.best_iteration == 0);
}

TEST_CASE("ambient-only targets carry no signal") {
  Setup s = small_setup(10);
  s.rig.lights.clear();
  ReconConfig cfg;
  cfg.smoothness_weight = 0.0;
  cfg.max_iters = 20;
  cfg.init_depth = 1.5;
  Image target(s.camera.resolution(), Rgb{0.5, 0.5, 0.5});
  const ReconReport report = reconstruct_depth(target, s.camera, s.material, s.rig, cfg);
  for (double v : report.depth.values()) CHECK(v == 1.5);
}

TEST_CASE("the true depth is stationary for the pure image loss") {
  const Setup s = small_setup(12);
  const DepthMap truth = tilted_plane(s.camera);
  const Image target = render(truth, s.camera, s.material, s.rig);
  const LossAndGrad lg = image_loss_and_grad(render(truth, s.camera, s.material, s.rig), target);
  const GradMap g = render_backward(truth, s.camera, s.material, s.rig, lg.grad);
  for (double v : g.values()) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("descent lowers the loss and respects the depth box") {
  const Setup s = small_setup(16);
  const DepthMap truth = tilted_plane(s.camera);
  const Image target = render(truth, s.camera, s.material, s.rig);
  for (OptimizerKind kind : {OptimizerKind::PlainDescent, OptimizerKind::Momentum, OptimizerKind::Adaptive}) {
    ReconConfig cfg;
    cfg.optimizer = kind;
    cfg.max_iters = 60;
    cfg.init_depth = 2.5;
    cfg.step_size = kind == OptimizerKind::Adaptive ? 1e-2 : 1.0;
    cfg.depth_min = 1.0;
    cfg.depth_max = 4.0;
    const ReconReport r = reconstruct_depth(target, s.camera, s.material, s.rig, cfg, &truth);
    CHECK(r.trace.size() <= 60);
    CHECK(r.trace[static_cast<std::size_t>(r.best_iteration)].total() <= r.trace.front().total());
    for (double v : r.depth.values()) {
      CHECK(v >= 1.0);
      CHECK(v <= 4.0);
    }
    REQUIRE(r.metrics.has_value());
    REQUIRE(r.baseline.has_value());
  }
}

TEST_CASE("best-iterate loss never increases with more iterations") {
  const Setup s = small_setup(12);
  const Image target = render(tilted_plane(s.camera), s.camera, s.material, s.rig);
  double previous = 1e300;
  for (int iters : {1, 5, 20, 40}) {
    ReconConfig cfg;
    cfg.max_iters = iters;
    cfg.init_depth = 2.5;
    const ReconReport r = reconstruct_depth(target, s.camera, s.material, s.rig, cfg);
    const double best = r.trace[static_cast<std::size_t>(r.best_iteration)].total();
    CHECK(best <= previous);
    previous = best;
  }
}

TEST_CASE("coarse-to-fine runs are prefixes of longer runs") {
  const Setup s = small_setup(12);
  const Image target = render(tilted_plane(s.camera), s.camera, s.material, s.rig);
  ReconConfig cfg;
  cfg.levels = 3;
  cfg.level_iters = 5;
  cfg.init_depth = 2.5;
  cfg.max_iters = 30;
  const ReconReport full = reconstruct_depth(target, s.camera, s.material, s.rig, cfg);
  CHECK(full.trace.size() == 30);
  for (int iters : {3, 7, 12}) {
    cfg.max_iters = iters;
    const ReconReport part = reconstruct_depth(target, s.camera, s.material, s.rig, cfg);
    REQUIRE(part.trace.size() == static_cast<std::size_t>(iters));
    for (int i = 0; i < iters; ++i) {
      CHECK(part.trace[static_cast<std::size_t>(i)].data == full.trace[static_cast<std::size_t>(i)].data);
      CHECK(part.trace[static_cast<std::size_t>(i)].smoothness == full.trace[static_cast<std::size_t>(i)].smoothness);
    }
  }
}

TEST_CASE("a single level is plain per-pixel descent") {
  // With one level the first step moves each pixel independently, so a
  // one-pixel change in the target only moves depths near that pixel.
  const Setup s = small_setup(12);
  const DepthMap flat(s.camera.resolution(), 2.0);
  Image target = render(flat, s.camera, s.material, s.rig);
  target(6, 6) = target(6, 6) + Rgb{0.1, 0.1, 0.1};
  ReconConfig cfg;
  cfg.levels = 1;
  cfg.max_iters = 2;
  cfg.init_depth = 2.0;
  cfg.smoothness_weight = 0.0;
  cfg.convergence_tol = 0.0;
  const ReconReport r = reconstruct_depth(target, s.camera, s.material, s.rig, cfg);
  REQUIRE(r.best_iteration == 1);
  for (int row = 0; row < 12; ++row)
    for (int col = 0; col < 12; ++col)
      if (std::abs(row - 6) > 2 || std::abs(col - 6) > 2) CHECK(r.depth(row, col) == 2.0);
}

TEST_CASE("configuration errors") {
  ReconConfig cfg;
  cfg.step_size = 0.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = {};
  cfg.depth_min = 5.0;
  cfg.depth_max = 1.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = {};
  cfg.levels = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = {};
  cfg.level_iters = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  CHECK(optimizer_from_string("momentum") == OptimizerKind::Momentum);
  CHECK_THROWS_AS(optimizer_from_string("sgd"), Error);
}
