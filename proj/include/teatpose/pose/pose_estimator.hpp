#pragma once

#include "teatpose/geom/camera.hpp"
#include "teatpose/geom/clustering.hpp"
#include "teatpose/geom/point_cloud.hpp"
#include "teatpose/pose/axis_estimation.hpp"
#include "teatpose/pose/capsule_fit.hpp"
#include "teatpose/pose/teat_pose.hpp"
#include "teatpose/pose/tip.hpp"

namespace teatpose::pose {

struct PoseParams {
  AxisMethod method = AxisMethod::pca;
  std::size_t min_points = 30;
  geom::ClusterParams cluster{10.0, 1};
  std::size_t normals_k = 12;
  double min_eigen_ratio = kMinAxisEigenRatio;
  TipParams tip;
  /// Refine axis and tip with a capsule fit; the unrefined estimate is kept
  /// when the fit fails.
  bool refine_capsule = true;
  CapsuleFitParams capsule;
  Vec3 world_up = Vec3::UnitZ();
};

/// Largest cluster -> axis (PCA or normals) -> orientation -> tip, then the
/// optional capsule refinement.
/// Camera-frame input is moved to the world frame first; the returned pose
/// is always world-frame.
/// Throws insufficient_points (input or largest cluster below min_points)
/// or ambiguous_axis.
TeatPose estimate_teat_pose(const geom::PointCloud& points, const geom::CameraModel& camera,
                            const PoseParams& params = {}, std::string teat_id = {},
                            std::int64_t stamp_us = 0);

}  // namespace teatpose::pose
