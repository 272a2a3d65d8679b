#pragma once

#include "teatpose/geom/camera.hpp"
#include "teatpose/geom/types.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace teatpose::geom {

enum class Frame { camera, world };

std::string_view to_string(Frame frame) noexcept;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Immutable set of points (mm) tagged with the frame they are expressed in.
class PointCloud {
 public:
  PointCloud() = default;
  /// Throws invalid_input on non-finite coordinates or a color count that
  /// is neither zero nor the point count.
  explicit PointCloud(Frame frame, std::vector<Vec3> points = {}, std::vector<Rgb> colors = {});

  Frame frame() const { return frame_; }
  const std::vector<Vec3>& points() const { return points_; }
  const std::vector<Rgb>& colors() const { return colors_; }
  bool has_colors() const { return !colors_.empty(); }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }

  Vec3 centroid() const;
  PointCloud subset(std::span<const std::size_t> indices) const;
  PointCloud transformed(const RigidTransform& transform, Frame target) const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  Frame frame_ = Frame::camera;
  std::vector<Vec3> points_;
  std::vector<Rgb> colors_;
};

/// Throws frame_mismatch when `cloud` is not in `expected`.
void require_frame(const PointCloud& cloud, Frame expected, std::string_view operation);

/// World-frame copy of `cloud`; camera-frame clouds go through the extrinsic.
PointCloud to_world(const PointCloud& cloud, const CameraModel& camera);

}  // namespace teatpose::geom
