#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "surfelgrad/shading.hpp"
#include "surfelgrad/surfel.hpp"

namespace surfelgrad {

// dLoss/dDepth per pixel.
using GradMap = Grid<double>;

/// Vector-Jacobian product of render() at `depth`: maps dLoss/dImage to
/// dLoss/dDepth through shading, cross-product normals and back-projection.
///
/// Conventions: d max(0, x)/dx = 0 at x = 0; normal sign flips are held
/// fixed; pixels with a degenerate normal neighborhood keep a constant
/// normal and receive zero gradient.
GradMap render_backward(const DepthMap& depth, const Camera& camera, const Material& material,
                        const LightingRig& rig, const Image& upstream);

using ScalarLoss = std::function<double(const DepthMap&)>;

/// Central differences with one step size for every pixel.
GradMap finite_diff_grad(const ScalarLoss& loss, const DepthMap& depth, double epsilon);

/// Central differences with step relative_step * max(depth, 1) per pixel.
GradMap finite_diff_grad_relative(const ScalarLoss& loss, const DepthMap& depth, double relative_step);

struct LossAndGrad {
  double loss = 0.0;
  Image grad;
};

/// Mean over pixels and channels of (rendered - target)^2 and its gradient.
LossAndGrad image_loss_and_grad(const Image& rendered, const Image& target);

/// Sum over pixels and channels of weights * image, accumulated in extended
/// precision. The scalar loss that render_backward(..., weights) differentiates.
double weighted_image_sum(const Image& image, const Image& weights);

// Randomized comparison of render_backward against finite differences.
struct GradcheckConfig {
  std::uint64_t seed = 0;
  int trials = 100;
  int min_size = 8;
  int max_size = 32;
  double tolerance = 1e-4;
  double relative_step = 1e-5;
  double kink_margin = 1e-6;
  bool specular = false;
};

struct GradcheckTrial {
  std::uint64_t seed = 0;
  int size = 0;
  double max_rel_err = 0.0;
  int kink_excluded = 0;
};

struct GradcheckReport {
  GradcheckConfig config;
  std::vector<GradcheckTrial> trials;
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  int kink_excluded_count = 0;
  int compared_count = 0;
  bool pass = false;
};

/// Relative error with denominator max(|a|, |b|, 1e-8).
double relative_error(double a, double b);

GradcheckReport run_gradcheck(const GradcheckConfig& config);

}  // namespace surfelgrad
