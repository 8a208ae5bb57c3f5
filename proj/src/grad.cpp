#include "surfelgrad/grad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shading_kernel.hpp"
#include "surfelgrad/error.hpp"
#include "surfelgrad/parallel.hpp"
#include "surfelgrad/rng.hpp"

namespace surfelgrad {

namespace {

// Per-surfel partials of the weighted radiance sum dot(g, I) with respect to
// the camera-space position and the unit normal.
struct SurfelGrad {
  Vec3 position;
  Vec3 normal;
};

SurfelGrad shade_surfel_backward(const Vec3& p, const Vec3& n, const Rgb& albedo, const Rgb& g,
                                 std::span<const detail::CameraLight> lights, const Specular* specular,
                                 std::size_t pixel, int cols) {
  SurfelGrad out;
  for (const detail::CameraLight& l : lights) {
    const Vec3 d = l.position - p;
    const double dist = norm(d);
    if (dist < kMinLightDistance) detail::throw_light_at_surfel(pixel, cols);
    const Vec3 u = d / dist;
    const double cosine = dot(n, u);
    if (!(cosine > 0.0)) continue;
    const double atten = detail::attenuation(l, dist);
    const double atten_prime = -(l.k_linear + 2.0 * l.k_quadratic * dist) * atten * atten;

    // Diffuse: f = atten(|d|) * (n . d) / |d|.
    const double weight = dot(g, hadamard(albedo, l.color));
    Vec3 grad_d = weight * (atten_prime * cosine * u + (atten / dist) * (n - cosine * u));
    out.normal += (weight * atten) * u;

    if (specular != nullptr) {
      const double p_len = norm(p);
      const Vec3 view = -p / p_len;
      const Vec3 reflected = 2.0 * cosine * n - u;
      const double rv = dot(reflected, view);
      if (rv > 0.0) {
        const double alpha = specular->shininess;
        const double lobe = std::pow(rv, alpha);
        const double lobe_prime = alpha * std::pow(rv, alpha - 1.0);
        const double spec_weight = dot(g, hadamard(specular->k_s, l.color));
        const Vec3 drv_du = 2.0 * dot(n, view) * n - view;
        const Vec3 drv_dd = (drv_du - dot(u, drv_du) * u) / dist;
        const Vec3 drv_dn = 2.0 * (cosine * view + dot(n, view) * u);
        const Vec3 drv_dp_view = -(reflected - dot(view, reflected) * view) / p_len;
        grad_d += spec_weight * (atten_prime * lobe * u + atten * lobe_prime * drv_dd);
        out.normal += (spec_weight * atten * lobe_prime) * drv_dn;
        out.position += (spec_weight * atten * lobe_prime) * drv_dp_view;
      }
    }
    // d = light - p
    out.position -= grad_d;
  }
  return out;
}

}  // namespace

GradMap render_backward(const DepthMap& depth, const Camera& camera, const Material& material,
                        const LightingRig& rig, const Image& upstream) {
  if (upstream.resolution() != depth.resolution())
    throw Error(ErrorCode::ShapeMismatch, "upstream gradient and depth map differ in size");
  validate(rig);
  const SurfelField field = make_surfel_field(depth, camera, material);
  const PositionGrid scales = ray_scales(camera);
  const auto lights = detail::lights_in_camera(camera, rig);
  const Specular* specular = material.specular ? &*material.specular : nullptr;
  const Resolution res = depth.resolution();

  // Pass 1: per-surfel partials, then through the normalization and cross
  // product to the two tangents.
  Grid<Vec3> grad_position(res);
  Grid<Vec3> grad_tx(res);
  Grid<Vec3> grad_ty(res);
  parallel_for(res.rows, [&](int begin, int end) {
    for (int r = begin; r < end; ++r)
      for (int c = 0; c < res.cols; ++c) {
        const std::size_t i = depth.index(r, c);
        const SurfelGrad g = shade_surfel_backward(field.positions[i], field.normals[i], field.albedo[i], upstream[i],
                                                   lights, specular, i, res.cols);
        grad_position[i] = g.position;
        if (field.degenerate[i]) continue;
        const TangentStencil s = tangent_stencil(r, c, res);
        const Vec3 tx = field.positions[s.x_plus] - field.positions[s.x_minus];
        const Vec3 ty = field.positions[s.y_plus] - field.positions[s.y_minus];
        const Vec3 raw = cross(tx, ty);
        const double len = norm(raw);
        // N = sign * raw / |raw|; the projection is sign-independent.
        const Vec3& unit = field.normals[i];
        const double sign = unit.z * raw.z < 0.0 ? -1.0 : 1.0;
        const Vec3 grad_raw = sign * (g.normal - dot(unit, g.normal) * unit) / len;
        grad_tx[i] = cross(ty, grad_raw);
        grad_ty[i] = cross(grad_raw, tx);
      }
  });

  // Pass 2: gather tangent gradients onto the positions that formed them,
  // in a fixed neighbor order, then onto depth along each ray.
  GradMap out(res, 0.0);
  parallel_for(res.rows, [&](int begin, int end) {
    for (int r = begin; r < end; ++r)
      for (int c = 0; c < res.cols; ++c) {
        const int j = static_cast<int>(depth.index(r, c));
        if (field.degenerate[j]) continue;
        Vec3 total = grad_position[j];
        for (int rr = std::max(r - 1, 0); rr <= std::min(r + 1, res.rows - 1); ++rr)
          for (int cc = std::max(c - 1, 0); cc <= std::min(c + 1, res.cols - 1); ++cc) {
            const std::size_t i = depth.index(rr, cc);
            if (field.degenerate[i]) continue;
            const TangentStencil s = tangent_stencil(rr, cc, res);
            if (s.x_plus == j) total += grad_tx[i];
            if (s.x_minus == j) total -= grad_tx[i];
            if (s.y_plus == j) total += grad_ty[i];
            if (s.y_minus == j) total -= grad_ty[i];
          }
        out[j] = dot(total, scales[j]);
      }
  });
  for (const double v : out.values())
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteOutput, "non-finite depth gradient");
  return out;
}

GradMap finite_diff_grad(const ScalarLoss& loss, const DepthMap& depth, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidParam, "epsilon must be positive");
  GradMap out(depth.resolution(), 0.0);
  DepthMap probe = depth;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    probe[i] = depth[i] + epsilon;
    const double up = loss(probe);
    probe[i] = depth[i] - epsilon;
    const double down = loss(probe);
    probe[i] = depth[i];
    out[i] = (up - down) / ((depth[i] + epsilon) - (depth[i] - epsilon));
  }
  return out;
}

GradMap finite_diff_grad_relative(const ScalarLoss& loss, const DepthMap& depth, double relative_step) {
  if (!(relative_step > 0.0)) throw Error(ErrorCode::InvalidParam, "relative step must be positive");
  GradMap out(depth.resolution(), 0.0);
  DepthMap probe = depth;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double eps = relative_step * std::max(depth[i], 1.0);
    probe[i] = depth[i] + eps;
    const double up = loss(probe);
    probe[i] = depth[i] - eps;
    const double down = loss(probe);
    probe[i] = depth[i];
    // The realized step can differ from eps by rounding; divide by it.
    out[i] = (up - down) / ((depth[i] + eps) - (depth[i] - eps));
  }
  return out;
}

LossAndGrad image_loss_and_grad(const Image& rendered, const Image& target) {
  if (rendered.resolution() != target.resolution())
    throw Error(ErrorCode::ShapeMismatch, "rendered and target images differ in size");
  const double count = 3.0 * static_cast<double>(rendered.size());
  LossAndGrad out{0.0, Image(rendered.resolution())};
  for (std::size_t i = 0; i < rendered.size(); ++i) {
    const Vec3 diff = rendered[i] - target[i];
    out.loss += dot(diff, diff);
    out.grad[i] = (2.0 / count) * diff;
  }
  out.loss /= count;
  return out;
}

double weighted_image_sum(const Image& image, const Image& weights) {
  if (image.resolution() != weights.resolution())
    throw Error(ErrorCode::ShapeMismatch, "image and weights differ in size");
  long double sum = 0.0L;
  for (std::size_t i = 0; i < image.size(); ++i)
    for (int ch = 0; ch < 3; ++ch)
      sum += static_cast<long double>(image[i][ch]) * static_cast<long double>(weights[i][ch]);
  return static_cast<double>(sum);
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

namespace {

// Smallest distance of any clamp argument (Lambertian cosine, Phong lobe,
// n_z) in a pixel window from its kink, plus a fingerprint of the branch
// taken at each. Two evaluations with different fingerprints straddle a kink.
struct BranchProbe {
  double margin = std::numeric_limits<double>::infinity();
  std::uint64_t fingerprint = 0;
};

BranchProbe probe_branches(const PositionGrid& positions, int row, int col,
                           std::span<const detail::CameraLight> lights, const Specular* specular) {
  BranchProbe out;
  const Resolution res = positions.resolution();
  auto record = [&](bool taken) { out.fingerprint = out.fingerprint * 0x100000001B3ull + (taken ? 2 : 1); };
  for (int r = std::max(row - 1, 0); r <= std::min(row + 1, res.rows - 1); ++r)
    for (int c = std::max(col - 1, 0); c <= std::min(col + 1, res.cols - 1); ++c) {
      const PixelNormal pn = normal_at(positions, r, c);
      record(pn.degenerate);
      record(pn.flipped);
      if (pn.degenerate) {
        out.margin = 0.0;
        continue;
      }
      const TangentStencil s = tangent_stencil(r, c, res);
      const Vec3 raw = cross(positions[s.x_plus] - positions[s.x_minus], positions[s.y_plus] - positions[s.y_minus]);
      out.margin = std::min(out.margin, std::abs(raw.z) / norm(raw));
      const Vec3& p = positions(r, c);
      const Vec3& n = pn.normal;
      for (const detail::CameraLight& l : lights) {
        const Vec3 u = normalize(l.position - p);
        const double cosine = dot(n, u);
        out.margin = std::min(out.margin, std::abs(cosine));
        record(cosine > 0.0);
        if (specular != nullptr && cosine > 0.0) {
          const double rv = dot(2.0 * cosine * n - u, -p / norm(p));
          out.margin = std::min(out.margin, std::abs(rv));
          record(rv > 0.0);
        }
      }
    }
  return out;
}

struct TrialSetup {
  DepthMap depth;
  Camera camera;
  Material material;
  LightingRig rig;
  Image upstream;
};

TrialSetup make_trial(Rng& rng, int size, bool specular) {
  const Camera camera = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20.0, 24.0, {size, size});
  DepthMap depth({size, size});
  for (double& d : depth.values()) d = rng.uniform(1.0, 3.0);
  Material material;
  material.albedo = rng.uniform_vec({0.2, 0.2, 0.2}, {1.0, 1.0, 1.0});
  if (specular) material.specular = Specular{rng.uniform_vec({0.2, 0.2, 0.2}, {1.0, 1.0, 1.0}), rng.uniform(2.0, 32.0)};
  LightingRig rig;
  rig.ambient = rng.uniform_vec({0.0, 0.0, 0.0}, {0.2, 0.2, 0.2});
  PointLight light;
  light.position = rng.uniform_vec({-2.0, -2.0, -0.5}, {2.0, 2.0, 0.5});
  light.color = rng.uniform_vec({0.5, 0.5, 0.5}, {1.0, 1.0, 1.0});
  light.k_linear = rng.uniform(0.0, 0.5);
  light.k_quadratic = rng.uniform(0.5, 1.0);
  rig.lights.push_back(light);
  Image upstream({size, size});
  for (Rgb& g : upstream.values()) g = rng.uniform_vec({-1, -1, -1}, {1, 1, 1});
  return {std::move(depth), camera, std::move(material), std::move(rig), std::move(upstream)};
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckConfig& config) {
  if (config.trials < 1 || config.min_size < 2 || config.max_size < config.min_size)
    throw Error(ErrorCode::InvalidParam, "gradcheck needs trials >= 1 and 2 <= min_size <= max_size");
  GradcheckReport report;
  report.config = config;
  double err_sum = 0.0;
  for (int t = 0; t < config.trials; ++t) {
    GradcheckTrial trial;
    trial.seed = child_seed(config.seed, static_cast<std::uint64_t>(t));
    Rng rng(trial.seed);
    trial.size = static_cast<int>(rng.uniform_int(config.min_size, config.max_size));
    const TrialSetup setup = make_trial(rng, trial.size, config.specular);

    const GradMap analytic = render_backward(setup.depth, setup.camera, setup.material, setup.rig, setup.upstream);
    const ScalarLoss loss = [&](const DepthMap& d) {
      return weighted_image_sum(render(d, setup.camera, setup.material, setup.rig), setup.upstream);
    };
    const GradMap numeric = finite_diff_grad_relative(loss, setup.depth, config.relative_step);

    const PositionGrid scales = ray_scales(setup.camera);
    const auto lights = detail::lights_in_camera(setup.camera, setup.rig);
    const Specular* specular = setup.material.specular ? &*setup.material.specular : nullptr;
    PositionGrid positions = backproject(setup.depth, setup.camera);
    for (int r = 0; r < trial.size; ++r)
      for (int c = 0; c < trial.size; ++c) {
        const std::size_t i = setup.depth.index(r, c);
        const BranchProbe base = probe_branches(positions, r, c, lights, specular);
        bool kink = base.margin < config.kink_margin;
        if (!kink) {
          const double eps = config.relative_step * std::max(setup.depth[i], 1.0);
          for (const double step : {eps, -eps}) {
            positions[i] = (setup.depth[i] + step) * scales[i];
            if (probe_branches(positions, r, c, lights, specular).fingerprint != base.fingerprint) kink = true;
          }
          positions[i] = setup.depth[i] * scales[i];
        }
        if (kink) {
          ++trial.kink_excluded;
          continue;
        }
        const double err = relative_error(analytic[i], numeric[i]);
        trial.max_rel_err = std::max(trial.max_rel_err, err);
        err_sum += err;
        ++report.compared_count;
      }
    report.max_rel_err = std::max(report.max_rel_err, trial.max_rel_err);
    report.kink_excluded_count += trial.kink_excluded;
    report.trials.push_back(trial);
  }
  report.mean_rel_err = report.compared_count > 0 ? err_sum / report.compared_count : 0.0;
  report.pass = report.compared_count > 0 && report.max_rel_err <= config.tolerance;
  return report;
}

}  // namespace surfelgrad
