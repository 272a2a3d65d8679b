#pragma once

#include "teatpose/geom/camera.hpp"
#include "teatpose/geom/point_cloud.hpp"

namespace teatpose::pose {

/// Below this |dot(axis, up)| a teat counts as horizontal and the camera
/// distance rule decides the sign.
inline constexpr double kHorizontalDotThreshold = 0.1;

/// Orients a sign-ambiguous teat axis to point from the tip toward the
/// udder. Primary rule: positive dot product with `world_up`. Near-horizontal
/// axes instead point away from whichever axial extreme of the points is
/// closer to the camera, that extreme being the tip.
///
/// `axis` is expressed in the same frame as `points`; `world_up` is always
/// a world-frame vector.
Vec3 disambiguate_direction(const Vec3& axis, const geom::PointCloud& points, const geom::CameraModel& camera,
                            const Vec3& world_up = Vec3::UnitZ());

}  // namespace teatpose::pose
