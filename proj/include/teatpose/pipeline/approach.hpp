#pragma once

#include "teatpose/pose/teat_pose.hpp"

#include <array>

namespace teatpose::pipeline {

/// Straight-line cup approach: a standoff point below the tip along the
/// teat axis, then the tip itself.
inline std::array<Vec3, 2> approach_plan(const pose::TeatPose& pose, double standoff_mm) {
  return {Vec3(pose.tip_mm - standoff_mm * pose.axis), pose.tip_mm};
}

}  // namespace teatpose::pipeline
