#pragma once

#include "teatpose/geom/json_io.hpp"
#include "teatpose/geom/types.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace teatpose::pose {

enum class AxisMethod { pca, normals };

std::string_view to_string(AxisMethod method) noexcept;
AxisMethod parse_axis_method(std::string_view name);

/// Estimated teat tip pose in the world frame. `axis` is a unit vector
/// pointing from the tip toward the udder; the cup approaches along -axis.
struct TeatPose {
  std::string teat_id;
  std::int64_t stamp_us = 0;
  Vec3 tip_mm = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  AxisMethod method = AxisMethod::pca;
  std::size_t n_points = 0;

  /// Orthonormal frame with z = axis. Roll about the axis carries no
  /// information for a symmetric cup, so x is fixed by projecting the world
  /// basis vector least aligned with the axis.
  Mat3 frame() const;
};

/// {"teat_id","stamp_us","tip_mm":[3],"axis":[3],"method","n_points"}
geom::Json pose_to_json(const TeatPose& pose);
TeatPose pose_from_json(const geom::Json& j);

/// Angle between two directions in degrees, ignoring sign (0..90).
double axis_angle_deg(const Vec3& a, const Vec3& b);

}  // namespace teatpose::pose
