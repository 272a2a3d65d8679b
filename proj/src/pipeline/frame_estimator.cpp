#include "teatpose/pipeline/frame_estimator.hpp"

#include "teatpose/geom/mask_extraction.hpp"
#include "teatpose/geom/voxel_grid.hpp"

#include <chrono>

namespace teatpose::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

FrameEstimate estimate_frame(const geom::PointCloud& cloud, std::span<const geom::TeatMask> masks,
                             const geom::CameraModel& camera, const GeometryParams& params, std::int64_t stamp_us) {
  for (const auto& mask : masks) {
    if (mask.stamp_us() != stamp_us) {
      throw Error(ErrorCode::invalid_input, "mask '" + mask.teat_id() + "' stamped " + std::to_string(mask.stamp_us()) +
                                                " does not match cloud stamp " + std::to_string(stamp_us));
    }
  }
  const geom::VoxelGrid grid(params.voxel_leaf_mm);

  FrameEstimate estimate;
  for (const auto& mask : masks) {
    TeatOutcome outcome;
    outcome.teat_id = mask.teat_id();
    try {
      auto t0 = Clock::now();
      const geom::PointCloud teat = geom::extract_masked_points(cloud, mask, camera, params.contour_stride);
      estimate.timings.extract_ms += elapsed_ms(t0);
      outcome.extracted_points = teat.size();

      t0 = Clock::now();
      const geom::PointCloud reduced = geom::voxel_downsample(teat, grid);
      estimate.timings.voxel_ms += elapsed_ms(t0);

      t0 = Clock::now();
      outcome.pose = pose::estimate_teat_pose(reduced, camera, params.pose, mask.teat_id(), stamp_us);
      estimate.timings.pose_ms += elapsed_ms(t0);
    } catch (const Error& e) {
      outcome.error = e.code();
      outcome.message = e.what();
    }
    estimate.teats.push_back(std::move(outcome));
  }
  return estimate;
}

}  // namespace teatpose::pipeline
