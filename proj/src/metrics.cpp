#include "surfelgrad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "surfelgrad/error.hpp"
#include "surfelgrad/parallel.hpp"

namespace surfelgrad {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

using BoostPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using Entry = std::pair<BoostPoint, std::size_t>;

void require_points(std::span<const Vec3> points, const char* what) {
  if (points.empty()) throw Error(ErrorCode::EmptySet, std::string(what) + " point set is empty");
  for (const Vec3& p : points)
    if (!p.finite()) throw Error(ErrorCode::InvalidParam, std::string(what) + " point set has non-finite points");
}

}  // namespace

struct NearestNeighborIndex::Tree {
  bgi::rtree<Entry, bgi::rstar<16>> rtree;
};

NearestNeighborIndex::NearestNeighborIndex(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  require_points(points, "index");
  std::vector<Entry> entries;
  entries.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i)
    entries.emplace_back(BoostPoint(points_[i].x, points_[i].y, points_[i].z), i);
  // The range constructor bulk-loads (packs) the tree.
  tree_ = std::make_unique<Tree>(Tree{bgi::rtree<Entry, bgi::rstar<16>>(entries)});
}

NearestNeighborIndex::~NearestNeighborIndex() = default;
NearestNeighborIndex::NearestNeighborIndex(NearestNeighborIndex&&) noexcept = default;
NearestNeighborIndex& NearestNeighborIndex::operator=(NearestNeighborIndex&&) noexcept = default;

double NearestNeighborIndex::nearest_distance(const Vec3& query) const {
  Entry found;
  const std::size_t n = tree_->rtree.query(bgi::nearest(BoostPoint(query.x, query.y, query.z), 1), &found);
  if (n != 1) throw Error(ErrorCode::InternalError, "nearest-neighbor query returned no point");
  return norm(query - points_[found.second]);
}

std::vector<double> directed_distances(std::span<const Vec3> from, std::span<const Vec3> to) {
  require_points(from, "query");
  const NearestNeighborIndex index(to);
  std::vector<double> out(from.size());
  parallel_for(static_cast<int>(from.size()), [&](int begin, int end) {
    for (int i = begin; i < end; ++i) out[i] = index.nearest_distance(from[i]);
  });
  return out;
}

double chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  double sum_ab = 0.0;
  for (const double d : directed_distances(a, b)) sum_ab += d;
  double sum_ba = 0.0;
  for (const double d : directed_distances(b, a)) sum_ba += d;
  return sum_ab / static_cast<double>(a.size()) + sum_ba / static_cast<double>(b.size());
}

double hausdorff_directed(std::span<const Vec3> a, std::span<const Vec3> b) {
  double worst = 0.0;
  for (const double d : directed_distances(a, b)) worst = std::max(worst, d);
  return worst;
}

double hausdorff(std::span<const Vec3> a, std::span<const Vec3> b) {
  return std::max(hausdorff_directed(a, b), hausdorff_directed(b, a));
}

double mse_depth(const DepthMap& a, const DepthMap& b, const Mask* mask) {
  if (a.resolution() != b.resolution()) throw Error(ErrorCode::ShapeMismatch, "depth maps differ in size");
  if (mask != nullptr && mask->resolution() != a.resolution())
    throw Error(ErrorCode::ShapeMismatch, "mask and depth maps differ in size");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mask != nullptr && (*mask)[i] == 0) continue;
    const double diff = a[i] - b[i];
    sum += diff * diff;
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::EmptyMask, "no unmasked pixels");
  return sum / static_cast<double>(count);
}

PointSet surfels_to_pointset(const PositionGrid& positions, const Mask* mask) {
  if (mask != nullptr && mask->resolution() != positions.resolution())
    throw Error(ErrorCode::ShapeMismatch, "mask and surfel grid differ in size");
  PointSet out;
  out.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i)
    if (mask == nullptr || (*mask)[i] != 0) out.push_back(positions[i]);
  if (out.empty()) throw Error(ErrorCode::EmptyMask, "no unmasked surfels");
  return out;
}

}  // namespace surfelgrad
