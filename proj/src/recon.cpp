#include "surfelgrad/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "surfelgrad/error.hpp"
#include "surfelgrad/metrics.hpp"

namespace surfelgrad {

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::PlainDescent: return "plain";
    case OptimizerKind::Momentum: return "momentum";
    case OptimizerKind::Adaptive: return "adaptive";
  }
  return "unknown";
}

OptimizerKind optimizer_from_string(std::string_view name) {
  if (name == "plain") return OptimizerKind::PlainDescent;
  if (name == "momentum") return OptimizerKind::Momentum;
  if (name == "adaptive") return OptimizerKind::Adaptive;
  throw Error(ErrorCode::InvalidParam, "unknown optimizer '" + std::string(name) + "'");
}

void validate(const ReconConfig& config) {
  if (config.max_iters < 1) throw Error(ErrorCode::InvalidParam, "max_iters must be positive");
  if (!(config.step_size > 0.0)) throw Error(ErrorCode::InvalidParam, "step_size must be positive");
  if (!(config.smoothness_weight >= 0.0)) throw Error(ErrorCode::InvalidParam, "smoothness_weight must be >= 0");
  if (!(config.init_depth > 0.0)) throw Error(ErrorCode::InvalidParam, "init_depth must be positive");
  if (!(config.depth_min > 0.0) || !(config.depth_max > config.depth_min))
    throw Error(ErrorCode::InvalidParam, "depth box must satisfy 0 < depth_min < depth_max");
  if (!(config.convergence_tol >= 0.0)) throw Error(ErrorCode::InvalidParam, "convergence_tol must be >= 0");
  if (!(config.momentum >= 0.0 && config.momentum < 1.0) || !(config.beta2 >= 0.0 && config.beta2 < 1.0))
    throw Error(ErrorCode::InvalidParam, "momentum coefficients must lie in [0, 1)");
  if (config.levels < 1 || config.levels > 16) throw Error(ErrorCode::InvalidParam, "levels must lie in [1, 16]");
  if (config.level_iters < 1) throw Error(ErrorCode::InvalidParam, "level_iters must be positive");
}

TotalVariation total_variation(const DepthMap& depth) {
  TotalVariation out{0.0, GradMap(depth.resolution(), 0.0)};
  auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  for (int r = 0; r < depth.rows(); ++r)
    for (int c = 0; c < depth.cols(); ++c) {
      if (c + 1 < depth.cols()) {
        const double diff = depth(r, c + 1) - depth(r, c);
        out.value += std::abs(diff);
        out.grad(r, c + 1) += sign(diff);
        out.grad(r, c) -= sign(diff);
      }
      if (r + 1 < depth.rows()) {
        const double diff = depth(r + 1, c) - depth(r, c);
        out.value += std::abs(diff);
        out.grad(r + 1, c) += sign(diff);
        out.grad(r, c) -= sign(diff);
      }
    }
  return out;
}

ReconMetrics compare_depths(const DepthMap& estimate, const DepthMap& truth, const Camera& camera) {
  const PointSet a = surfels_to_pointset(backproject(estimate, camera));
  const PointSet b = surfels_to_pointset(backproject(truth, camera));
  return {mse_depth(estimate, truth), chamfer(a, b), hausdorff(a, b)};
}

namespace {

// One-dimensional bilinear taps from a fine axis onto a coarse one, with
// pixel centers aligned and clamped at the borders.
struct Tap {
  int i0 = 0;
  int i1 = 0;
  double w0 = 1.0;
  double w1 = 0.0;
};

std::vector<Tap> axis_taps(int fine, int coarse) {
  std::vector<Tap> taps(static_cast<std::size_t>(fine));
  for (int i = 0; i < fine; ++i) {
    const double y = std::clamp((i + 0.5) * coarse / fine - 0.5, 0.0, static_cast<double>(coarse - 1));
    const int i0 = static_cast<int>(std::floor(y));
    const int i1 = std::min(i0 + 1, coarse - 1);
    taps[static_cast<std::size_t>(i)] = {i0, i1, 1.0 - (y - i0), y - i0};
  }
  return taps;
}

DepthMap upsample(const DepthMap& coarse, Resolution fine) {
  if (coarse.resolution() == fine) return coarse;
  const auto tr = axis_taps(fine.rows, coarse.rows());
  const auto tc = axis_taps(fine.cols, coarse.cols());
  DepthMap out(fine);
  for (int r = 0; r < fine.rows; ++r)
    for (int c = 0; c < fine.cols; ++c) {
      const Tap& a = tr[static_cast<std::size_t>(r)];
      const Tap& b = tc[static_cast<std::size_t>(c)];
      out(r, c) = a.w0 * (b.w0 * coarse(a.i0, b.i0) + b.w1 * coarse(a.i0, b.i1)) +
                  a.w1 * (b.w0 * coarse(a.i1, b.i0) + b.w1 * coarse(a.i1, b.i1));
    }
  return out;
}

// Transpose of upsample: pulls a fine gradient back onto the coarse grid.
GradMap upsample_transpose(const GradMap& fine, Resolution coarse) {
  if (fine.resolution() == coarse) return fine;
  const auto tr = axis_taps(fine.rows(), coarse.rows);
  const auto tc = axis_taps(fine.cols(), coarse.cols);
  GradMap out(coarse, 0.0);
  for (int r = 0; r < fine.rows(); ++r)
    for (int c = 0; c < fine.cols(); ++c) {
      const Tap& a = tr[static_cast<std::size_t>(r)];
      const Tap& b = tc[static_cast<std::size_t>(c)];
      const double g = fine(r, c);
      out(a.i0, b.i0) += a.w0 * b.w0 * g;
      out(a.i0, b.i1) += a.w0 * b.w1 * g;
      out(a.i1, b.i0) += a.w1 * b.w0 * g;
      out(a.i1, b.i1) += a.w1 * b.w1 * g;
    }
  return out;
}

Resolution level_resolution(Resolution full, int level) {
  const int f = 1 << level;
  return {std::max(1, (full.rows + f - 1) / f), std::max(1, (full.cols + f - 1) / f)};
}

}  // namespace

ReconReport reconstruct_depth(const Image& target, const Camera& camera, const Material& material,
                              const LightingRig& rig, const ReconConfig& config, const DepthMap* ground_truth) {
  validate(config);
  if (target.resolution() != camera.resolution())
    throw Error(ErrorCode::ResolutionMismatch, "target image and camera resolutions differ");
  const Resolution res = camera.resolution();
  const double pixel_count = static_cast<double>(res.count());
  const double smooth_scale = config.smoothness_weight / pixel_count;
  const double init = std::clamp(config.init_depth, config.depth_min, config.depth_max);

  ReconReport report;
  report.depth = DepthMap(res, init);
  double best_total = std::numeric_limits<double>::infinity();

  // Coarse levels run a fixed number of iterations each and the full
  // resolution takes the rest, so a shorter run is a prefix of a longer one.
  DepthMap params(level_resolution(res, config.levels - 1), init);
  int it = 0;
  bool converged = false;
  for (int level = config.levels - 1; level >= 0 && it < config.max_iters && !converged; --level) {
    params = upsample(params, level_resolution(res, level));
    const int level_end = level == 0 ? config.max_iters : std::min(config.max_iters, it + config.level_iters);

    std::vector<double> first(params.size(), 0.0);
    std::vector<double> second(params.size(), 0.0);
    double beta1_power = 1.0;
    double beta2_power = 1.0;

    for (; it < level_end; ++it) {
      const DepthMap depth = upsample(params, res);
      const Image rendered = render(depth, camera, material, rig);
      const LossAndGrad data = image_loss_and_grad(rendered, target);
      const TotalVariation tv = total_variation(depth);
      const LossTerms terms{data.loss, smooth_scale * tv.value};
      if (!std::isfinite(terms.total()))
        throw Error(ErrorCode::Diverged, "loss became non-finite at iteration " + std::to_string(it));
      report.trace.push_back(terms);
      if (terms.total() < best_total) {
        best_total = terms.total();
        report.depth = depth;
        report.best_iteration = it;
      }
      if (terms.data <= config.convergence_tol) {
        converged = true;
        break;
      }

      GradMap fine = render_backward(depth, camera, material, rig, data.grad);
      for (std::size_t i = 0; i < fine.size(); ++i) fine[i] += smooth_scale * tv.grad[i];
      const GradMap grad = upsample_transpose(fine, params.resolution());

      beta1_power *= config.momentum;
      beta2_power *= config.beta2;
      for (std::size_t i = 0; i < params.size(); ++i) {
        double step = 0.0;
        switch (config.optimizer) {
          case OptimizerKind::PlainDescent:
            step = config.step_size * grad[i];
            break;
          case OptimizerKind::Momentum:
            first[i] = config.momentum * first[i] + grad[i];
            step = config.step_size * first[i];
            break;
          case OptimizerKind::Adaptive: {
            first[i] = config.momentum * first[i] + (1.0 - config.momentum) * grad[i];
            second[i] = config.beta2 * second[i] + (1.0 - config.beta2) * grad[i] * grad[i];
            const double m_hat = first[i] / (1.0 - beta1_power);
            const double v_hat = second[i] / (1.0 - beta2_power);
            step = config.step_size * m_hat / (std::sqrt(v_hat) + 1e-30);
            break;
          }
        }
        // Bilinear weights are convex, so clamping the parameters keeps every
        // upsampled depth inside the box too.
        params[i] = std::clamp(params[i] - step, config.depth_min, config.depth_max);
      }
    }
  }

  if (ground_truth != nullptr) {
    report.metrics = compare_depths(report.depth, *ground_truth, camera);
    report.baseline = compare_depths(DepthMap(res, init), *ground_truth, camera);
  }
  return report;
}

}  // namespace surfelgrad
