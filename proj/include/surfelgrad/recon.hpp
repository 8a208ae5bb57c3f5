#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "surfelgrad/grad.hpp"
#include "surfelgrad/shading.hpp"
#include "surfelgrad/surfel.hpp"

namespace surfelgrad {

enum class OptimizerKind { PlainDescent, Momentum, Adaptive };

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(std::string_view name);

struct ReconConfig {
  int max_iters = 2000;
  double step_size = 3e-2;
  // Weight of the per-pixel mean total variation relative to the image term.
  double smoothness_weight = 1e-3;
  double init_depth = 1.0;
  OptimizerKind optimizer = OptimizerKind::Adaptive;
  // Stop once the image term falls to this value.
  double convergence_tol = 1e-12;
  double depth_min = 0.1;
  double depth_max = 100.0;
  double momentum = 0.9;
  double beta2 = 0.999;
  // Coarse-to-fine schedule: depth is parameterized by a grid 2^k times
  // coarser and bilinearly upsampled, for k = levels-1 down to 0. Each
  // coarse level runs level_iters iterations; full resolution runs the rest.
  int levels = 4;
  int level_iters = 500;
};

void validate(const ReconConfig& config);

struct LossTerms {
  double data = 0.0;
  double smoothness = 0.0;
  double total() const { return data + smoothness; }
};

struct ReconMetrics {
  double mse_depth = 0.0;
  double chamfer = 0.0;
  double hausdorff = 0.0;
};

struct ReconReport {
  DepthMap depth;  // best iterate by total loss
  int best_iteration = 0;
  std::vector<LossTerms> trace;
  std::optional<ReconMetrics> metrics;
  std::optional<ReconMetrics> baseline;  // the constant initialization
};

struct TotalVariation {
  double value = 0.0;
  GradMap grad;
};

/// Anisotropic total variation: sum of |horizontal| and |vertical| neighbor
/// differences, with subgradient sign(0) = 0.
TotalVariation total_variation(const DepthMap& depth);

/// Projected first-order descent on the depth map so that render() matches
/// `target`. When ground truth is supplied, the report carries metrics for
/// both the result and the constant initialization.
ReconReport reconstruct_depth(const Image& target, const Camera& camera, const Material& material,
                              const LightingRig& rig, const ReconConfig& config,
                              const DepthMap* ground_truth = nullptr);

ReconMetrics compare_depths(const DepthMap& estimate, const DepthMap& truth, const Camera& camera);

}  // namespace surfelgrad
