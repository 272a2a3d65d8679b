#pragma once

#include "teatpose/errors.hpp"
#include "teatpose/geom/camera.hpp"
#include "teatpose/geom/point_cloud.hpp"
#include "teatpose/geom/teat_mask.hpp"
#include "teatpose/pose/pose_estimator.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace teatpose::pipeline {

struct GeometryParams {
  int contour_stride = 1;
  double voxel_leaf_mm = 5.0;
  pose::PoseParams pose;
};

struct TeatOutcome {
  std::string teat_id;
  std::optional<pose::TeatPose> pose;
  std::optional<ErrorCode> error;
  std::string message;
  std::size_t extracted_points = 0;
};

/// Wall-clock milliseconds spent per stage, summed over teats.
struct StageTimings {
  double extract_ms = 0.0;
  double voxel_ms = 0.0;
  double pose_ms = 0.0;
  double total_ms() const { return extract_ms + voxel_ms + pose_ms; }
};

struct FrameEstimate {
  std::vector<TeatOutcome> teats;  // mask order
  StageTimings timings;
};

/// Per mask: frustum extraction -> voxel downsampling -> pose. Per-teat
/// failures are recorded in the outcome, never thrown. Throws invalid_input
/// when a mask stamp differs from `stamp_us`.
FrameEstimate estimate_frame(const geom::PointCloud& cloud, std::span<const geom::TeatMask> masks,
                             const geom::CameraModel& camera, const GeometryParams& params, std::int64_t stamp_us);

}  // namespace teatpose::pipeline
