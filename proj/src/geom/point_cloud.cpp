#include "teatpose/geom/point_cloud.hpp"

#include "teatpose/errors.hpp"

#include <string>

namespace teatpose::geom {

std::string_view to_string(Frame frame) noexcept {
  return frame == Frame::camera ? "camera" : "world";
}

PointCloud::PointCloud(Frame frame, std::vector<Vec3> points, std::vector<Rgb> colors)
    : frame_(frame), points_(std::move(points)), colors_(std::move(colors)) {
  if (!colors_.empty() && colors_.size() != points_.size()) {
    throw Error(ErrorCode::invalid_input, "color count does not match point count");
  }
  for (const auto& p : points_) {
    if (!p.allFinite()) throw Error(ErrorCode::invalid_input, "point cloud contains a non-finite point");
  }
}

Vec3 PointCloud::centroid() const {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points_) sum += p;
  return points_.empty() ? sum : Vec3(sum / static_cast<double>(points_.size()));
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  std::vector<Vec3> pts;
  std::vector<Rgb> cols;
  pts.reserve(indices.size());
  for (auto i : indices) {
    pts.push_back(points_.at(i));
    if (has_colors()) cols.push_back(colors_[i]);
  }
  return PointCloud(frame_, std::move(pts), std::move(cols));
}

PointCloud PointCloud::transformed(const RigidTransform& transform, Frame target) const {
  std::vector<Vec3> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.push_back(transform.apply(p));
  return PointCloud(target, std::move(pts), colors_);
}

void require_frame(const PointCloud& cloud, Frame expected, std::string_view operation) {
  if (cloud.frame() != expected) {
    throw Error(ErrorCode::frame_mismatch, std::string(operation) + ": expected a " +
                                               std::string(to_string(expected)) + "-frame cloud, got " +
                                               std::string(to_string(cloud.frame())));
  }
}

PointCloud to_world(const PointCloud& cloud, const CameraModel& camera) {
  if (cloud.frame() == Frame::world) return cloud;
  return cloud.transformed(camera.extrinsic(), Frame::world);
}

}  // namespace teatpose::geom
