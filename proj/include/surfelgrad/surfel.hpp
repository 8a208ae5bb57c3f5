#pragma once

#include <array>

#include "surfelgrad/camera.hpp"
#include "surfelgrad/grid.hpp"
#include "surfelgrad/vec.hpp"

namespace surfelgrad {

// Camera-space z-depth per pixel: a surfel at depth d sits at P.z = -d.
using DepthMap = Grid<double>;
using PositionGrid = Grid<Vec3>;
using NormalGrid = Grid<Vec3>;

void validate_depth(const DepthMap& depth);

/// Per-pixel factor k with P = depth * k; k lies on the pixel ray and has
/// k.z = -1.
PositionGrid ray_scales(const Camera& camera);

/// Lifts each pixel's z-depth along its camera ray. Throws NonPositiveDepth
/// or ResolutionMismatch.
PositionGrid backproject(const DepthMap& depth, const Camera& camera);

// Flat indices of the tangent stencil at one pixel. The x tangent is
// P[x_plus] - P[x_minus], the y tangent is P[y_plus] - P[y_minus]
// (y_plus is the upper neighbor since image rows grow downward).
struct TangentStencil {
  int x_plus = -1;
  int x_minus = -1;
  int y_plus = -1;
  int y_minus = -1;

  bool valid() const { return x_plus >= 0 && x_minus >= 0 && y_plus >= 0 && y_minus >= 0; }
};

/// Central differences in the interior, one-sided at borders. With a
/// validity mask, neighbors outside the mask are skipped the same way.
TangentStencil tangent_stencil(int row, int col, Resolution res, const Mask* valid = nullptr);

struct NormalEstimate {
  NormalGrid normals;
  Mask degenerate;  // 1 where the neighborhood could not define a normal
  Mask flipped;     // 1 where the raw cross product had n_z < 0
};

// Threshold on |n_z| below which a normal is flagged degenerate.
inline constexpr double kMinNormalZ = 1e-12;

struct PixelNormal {
  Vec3 normal{0, 0, 1};
  bool degenerate = false;
  bool flipped = false;
};

/// Cross-product normal at one pixel; see estimate_normals.
PixelNormal normal_at(const PositionGrid& positions, int row, int col, const Mask* valid = nullptr);

/// Unit normals from the normalized cross product of the stencil tangents,
/// sign-flipped into the n_z > 0 half space. Degenerate pixels get (0,0,1).
NormalEstimate estimate_normals(const PositionGrid& positions, const Mask* valid = nullptr);

/// Least-squares normal over all 8 neighbor tangents: the smallest
/// eigenvector of their scatter matrix. Verification only.
NormalEstimate estimate_normals_lsq_oracle(const PositionGrid& positions);

struct SurfelField {
  PositionGrid positions;
  NormalGrid normals;
  Grid<Vec3> albedo;
  Mask degenerate;
};

struct Reprojection {
  DepthMap depth;  // zero where no surfel landed
  Mask hit;
};

/// Moves each surfel into dst_camera's frame and z-buffers it into the pixel
/// it projects to. Ties keep the earlier surfel in row-major order.
Reprojection reproject(const PositionGrid& positions, const Camera& src_camera, const Camera& dst_camera);
inline Reprojection reproject(const SurfelField& field, const Camera& src_camera, const Camera& dst_camera) {
  return reproject(field.positions, src_camera, dst_camera);
}

}  // namespace surfelgrad
