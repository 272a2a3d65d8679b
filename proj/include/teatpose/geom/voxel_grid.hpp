#pragma once

#include "teatpose/geom/point_cloud.hpp"

namespace teatpose::geom {

/// Uniform cubic grid. A coordinate c falls into cell floor((c - origin) / leaf),
/// so points on a cell boundary belong to the higher-index cell.
class VoxelGrid {
 public:
  explicit VoxelGrid(double leaf_size_mm = 5.0, const Vec3& origin = Vec3::Zero());

  double leaf_size() const { return leaf_; }
  const Vec3& origin() const { return origin_; }

  Eigen::Vector3i cell_of(const Vec3& p) const;

 private:
  double leaf_;
  Vec3 origin_;
};

/// One centroid per occupied voxel, emitted in ascending (ix, iy, iz) order.
/// Colors, when present, are averaged and rounded.
PointCloud voxel_downsample(const PointCloud& cloud, const VoxelGrid& grid);

}  // namespace teatpose::geom
