#pragma once

#include <memory>
#include <span>
#include <vector>

#include "surfelgrad/surfel.hpp"
#include "surfelgrad/vec.hpp"

namespace surfelgrad {

using PointSet = std::vector<Vec3>;

/// Exact nearest-neighbor queries against a fixed point set, backed by a
/// bulk-loaded R-tree.
class NearestNeighborIndex {
 public:
  explicit NearestNeighborIndex(std::span<const Vec3> points);
  ~NearestNeighborIndex();
  NearestNeighborIndex(NearestNeighborIndex&&) noexcept;
  NearestNeighborIndex& operator=(NearestNeighborIndex&&) noexcept;

  double nearest_distance(const Vec3& query) const;

 private:
  struct Tree;
  std::vector<Vec3> points_;
  std::unique_ptr<Tree> tree_;
};

/// Distance from every point of `from` to its nearest point in `to`.
std::vector<double> directed_distances(std::span<const Vec3> from, std::span<const Vec3> to);

/// Sum of the two directed mean nearest-neighbor distances.
double chamfer(std::span<const Vec3> a, std::span<const Vec3> b);

/// max over a of the distance to the nearest b.
double hausdorff_directed(std::span<const Vec3> a, std::span<const Vec3> b);

/// Symmetric Hausdorff distance: the larger directed distance.
double hausdorff(std::span<const Vec3> a, std::span<const Vec3> b);

/// Mean squared depth difference over the pixels where `mask` is nonzero
/// (all pixels when no mask is given).
double mse_depth(const DepthMap& a, const DepthMap& b, const Mask* mask = nullptr);

PointSet surfels_to_pointset(const PositionGrid& positions, const Mask* mask = nullptr);

}  // namespace surfelgrad
