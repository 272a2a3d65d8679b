#include "teatpose/pose/direction.hpp"

#include "teatpose/errors.hpp"

#include <cmath>

namespace teatpose::pose {

Vec3 disambiguate_direction(const Vec3& axis, const geom::PointCloud& points, const geom::CameraModel& camera,
                            const Vec3& world_up) {
  if (!(axis.norm() > 0.0)) throw Error(ErrorCode::invalid_input, "disambiguate_direction: zero axis");
  const Vec3 a = axis.normalized();

  const bool camera_frame = points.frame() == geom::Frame::camera;
  const Vec3 up = camera_frame ? Vec3(camera.extrinsic().rotation().transpose() * world_up) : world_up;
  const double d = a.dot(up.normalized());
  if (std::abs(d) >= kHorizontalDotThreshold || points.empty()) return d >= 0.0 ? a : Vec3(-a);

  const Vec3 eye = camera_frame ? Vec3::Zero() : camera.origin_world();
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].dot(a) < points[lo].dot(a)) lo = i;
    if (points[i].dot(a) > points[hi].dot(a)) hi = i;
  }
  // The camera-nearest extreme is the tip; the axis leaves it.
  return (points[lo] - eye).norm() <= (points[hi] - eye).norm() ? a : Vec3(-a);
}

}  // namespace teatpose::pose
