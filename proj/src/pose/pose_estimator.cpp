#include "teatpose/pose/pose_estimator.hpp"

#include "teatpose/errors.hpp"
#include "teatpose/pose/direction.hpp"

namespace teatpose::pose {

TeatPose estimate_teat_pose(const geom::PointCloud& points, const geom::CameraModel& camera,
                            const PoseParams& params, std::string teat_id, std::int64_t stamp_us) {
  auto require_count = [&](std::size_t n, const char* what) {
    if (n < params.min_points) {
      throw Error(ErrorCode::insufficient_points, std::string(what) + " has " + std::to_string(n) +
                                                      " points, need " + std::to_string(params.min_points));
    }
  };
  require_count(points.size(), "teat cloud");

  const geom::PointCloud world = geom::to_world(points, camera);
  const auto clusters = geom::euclidean_cluster_indices(world, params.cluster);
  if (clusters.empty()) throw Error(ErrorCode::insufficient_points, "teat cloud has no cluster");
  const geom::PointCloud teat = world.subset(clusters.front());
  require_count(teat.size(), "largest cluster");

  Vec3 axis;
  if (params.method == AxisMethod::pca) {
    axis = pca_axis(teat, params.min_eigen_ratio);
  } else {
    const auto field = estimate_normals(teat, std::min(params.normals_k, teat.size()), camera.origin_world());
    axis = normals_axis(field, params.min_eigen_ratio);
  }
  axis = disambiguate_direction(axis, teat, camera, params.world_up);

  TeatPose pose;
  pose.teat_id = std::move(teat_id);
  pose.stamp_us = stamp_us;
  pose.tip_mm = locate_tip(teat, axis, params.tip);
  pose.axis = axis;
  if (params.refine_capsule) {
    if (const auto capsule = fit_capsule(teat, pose.tip_mm, axis, params.capsule)) {
      pose.tip_mm = capsule->tip();
      pose.axis = capsule->axis;
    }
  }
  pose.method = params.method;
  pose.n_points = teat.size();
  return pose;
}

}  // namespace teatpose::pose
