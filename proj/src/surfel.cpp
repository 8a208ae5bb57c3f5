#include "surfelgrad/surfel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "surfelgrad/error.hpp"
#include "surfelgrad/parallel.hpp"

namespace surfelgrad {

void validate_depth(const DepthMap& depth) {
  for (int r = 0; r < depth.rows(); ++r)
    for (int c = 0; c < depth.cols(); ++c) {
      const double d = depth(r, c);
      if (!(d > 0.0) || !std::isfinite(d))
        throw Error(ErrorCode::NonPositiveDepth, "depth " + std::to_string(d) + " at pixel (" +
                                                     std::to_string(r) + ", " + std::to_string(c) + ")");
    }
}

PositionGrid ray_scales(const Camera& camera) {
  PositionGrid scales(camera.resolution());
  for (int r = 0; r < scales.rows(); ++r)
    for (int c = 0; c < scales.cols(); ++c) {
      const Vec3 dir = camera.camera_ray_direction(r, c);
      scales(r, c) = dir / std::abs(dir.z);
    }
  return scales;
}

PositionGrid backproject(const DepthMap& depth, const Camera& camera) {
  if (depth.resolution() != camera.resolution())
    throw Error(ErrorCode::ResolutionMismatch, "depth map and camera resolutions differ");
  validate_depth(depth);
  const PositionGrid scales = ray_scales(camera);
  PositionGrid out(depth.resolution());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = depth[i] * scales[i];
  return out;
}

namespace {

// Picks (plus, minus) along one axis. `forward` is the neighbor index in the
// positive tangent direction.
void pick_pair(int center, int forward, int backward, bool forward_ok, bool backward_ok, int& plus, int& minus) {
  if (forward_ok && backward_ok) {
    plus = forward;
    minus = backward;
  } else if (forward_ok) {
    plus = forward;
    minus = center;
  } else if (backward_ok) {
    plus = center;
    minus = backward;
  }
}

}  // namespace

TangentStencil tangent_stencil(int row, int col, Resolution res, const Mask* valid) {
  auto flat = [&](int r, int c) { return r * res.cols + c; };
  auto ok = [&](int r, int c) {
    if (r < 0 || r >= res.rows || c < 0 || c >= res.cols) return false;
    return valid == nullptr || (*valid)(r, c) != 0;
  };
  TangentStencil s;
  if (!ok(row, col)) return s;
  const int center = flat(row, col);
  pick_pair(center, flat(row, col + 1), flat(row, col - 1), ok(row, col + 1), ok(row, col - 1), s.x_plus,
            s.x_minus);
  pick_pair(center, flat(row - 1, col), flat(row + 1, col), ok(row - 1, col), ok(row + 1, col), s.y_plus,
            s.y_minus);
  return s;
}

PixelNormal normal_at(const PositionGrid& positions, int row, int col, const Mask* valid) {
  PixelNormal out;
  const TangentStencil s = tangent_stencil(row, col, positions.resolution(), valid);
  if (!s.valid()) {
    out.degenerate = true;
    return out;
  }
  const Vec3 tx = positions[s.x_plus] - positions[s.x_minus];
  const Vec3 ty = positions[s.y_plus] - positions[s.y_minus];
  const Vec3 n = cross(tx, ty);
  const double len = norm(n);
  if (!(len > 1e-12 * norm(tx) * norm(ty)) || !std::isfinite(len)) {
    out.degenerate = true;
    return out;
  }
  const Vec3 unit = n / len;
  if (std::abs(unit.z) < kMinNormalZ) {
    out.degenerate = true;
    return out;
  }
  out.flipped = unit.z < 0.0;
  out.normal = out.flipped ? -unit : unit;
  return out;
}

NormalEstimate estimate_normals(const PositionGrid& positions, const Mask* valid) {
  const Resolution res = positions.resolution();
  if (res.rows < 2 || res.cols < 2) throw Error(ErrorCode::InvalidParam, "normal estimation needs at least 2x2");
  NormalEstimate out{NormalGrid(res, Vec3{0, 0, 1}), Mask(res, 0), Mask(res, 0)};
  parallel_for(res.rows, [&](int begin, int end) {
    for (int r = begin; r < end; ++r)
      for (int c = 0; c < res.cols; ++c) {
        const std::size_t i = positions.index(r, c);
        const PixelNormal n = normal_at(positions, r, c, valid);
        out.normals[i] = n.normal;
        out.degenerate[i] = n.degenerate ? 1 : 0;
        out.flipped[i] = n.flipped ? 1 : 0;
      }
  });
  return out;
}

NormalEstimate estimate_normals_lsq_oracle(const PositionGrid& positions) {
  const Resolution res = positions.resolution();
  if (res.rows < 2 || res.cols < 2) throw Error(ErrorCode::InvalidParam, "normal estimation needs at least 2x2");
  NormalEstimate out{NormalGrid(res, Vec3{0, 0, 1}), Mask(res, 0), Mask(res, 0)};
  for (int r = 0; r < res.rows; ++r)
    for (int c = 0; c < res.cols; ++c) {
      const Vec3 center = positions(r, c);
      Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= res.rows || cc < 0 || cc >= res.cols) continue;
          const Vec3 t = positions(rr, cc) - center;
          const Eigen::Vector3d v(t.x, t.y, t.z);
          scatter += v * v.transpose();
        }
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
      const Eigen::Vector3d values = solver.eigenvalues();  // ascending
      const std::size_t i = positions.index(r, c);
      if (!(values(1) > 1e-12 * values(2))) {
        out.degenerate[i] = 1;
        continue;
      }
      const Eigen::Vector3d v = solver.eigenvectors().col(0).normalized();
      Vec3 n{v(0), v(1), v(2)};
      if (std::abs(n.z) < kMinNormalZ) {
        out.degenerate[i] = 1;
        continue;
      }
      if (n.z < 0.0) {
        n = -n;
        out.flipped[i] = 1;
      }
      out.normals[i] = n;
    }
  return out;
}

Reprojection reproject(const PositionGrid& positions, const Camera& src_camera, const Camera& dst_camera) {
  const Resolution res = dst_camera.resolution();
  Reprojection out{DepthMap(res, 0.0), Mask(res, 0)};
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Vec3 q = dst_camera.world_to_camera(src_camera.camera_to_world(positions[i]));
    const auto pixel = dst_camera.project(q);
    if (!pixel) continue;
    const double row = std::floor(pixel->row);
    const double col = std::floor(pixel->col);
    if (!(row >= 0.0 && row < res.rows && col >= 0.0 && col < res.cols)) continue;
    const int r = static_cast<int>(row);
    const int c = static_cast<int>(col);
    const double depth = -q.z;
    if (!out.hit(r, c) || depth < out.depth(r, c)) {
      out.depth(r, c) = depth;
      out.hit(r, c) = 1;
    }
  }
  return out;
}

}  // namespace surfelgrad
