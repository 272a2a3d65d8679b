#pragma once

#include "teatpose/geom/camera.hpp"
#include "teatpose/geom/point_cloud.hpp"
#include "teatpose/geom/teat_mask.hpp"

namespace teatpose::geom {

/// Points of a camera-frame cloud whose pinhole projection falls inside the
/// mask contour subsampled at `stride` (even-odd rule). This is the frustum
/// carve: a point is kept iff it lies in the cone swept by rays through the
/// contour. Points with z <= 0 are never kept.
///
/// Throws frame_mismatch for world clouds, invalid_parameter for stride < 1
/// and empty_mask when the subsampled contour has zero area.
PointCloud extract_masked_points(const PointCloud& cloud, const TeatMask& mask,
                                 const CameraModel& camera, int stride = 1);

/// Lattice coordinates of a camera-frame point's projection, the space the
/// mask contour lives in.
inline Vec2 lattice_coordinates(const CameraModel& camera, const Vec3& p_cam) {
  return camera.project(p_cam) + Vec2(0.5, 0.5);
}

}  // namespace teatpose::geom
