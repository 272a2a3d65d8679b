#pragma once

#include "teatpose/geom/camera.hpp"
#include "teatpose/geom/point_cloud.hpp"
#include "teatpose/synth/scene.hpp"

#include <cstdint>

namespace teatpose::synth {

/// Flat target facing the camera, centered on the optical axis.
struct PlaneTarget {
  double distance_mm = 1000.0;
  double width_mm = 100.0;
  double height_mm = 150.0;
};

/// Camera-frame cloud of the target alone; intrinsics only are used.
geom::PointCloud render_plane_target(const geom::CameraModel& camera, const PlaneTarget& target,
                                     const NoiseModel& noise, std::uint64_t seed);

/// Region of the target surface to average, centered on the optical axis.
struct TargetRegion {
  double width_mm = 100.0;
  double height_mm = 150.0;
};

/// Mean z of the points inside the region. Throws insufficient_points
/// below `min_points`.
double plane_target_measure(const geom::PointCloud& cloud, const TargetRegion& region = {},
                            std::size_t min_points = 100);

/// Root-mean-square deviation of the in-region depths from `true_distance_mm`.
double plane_target_rms_error(const geom::PointCloud& cloud, double true_distance_mm,
                              const TargetRegion& region = {});

}  // namespace teatpose::synth
