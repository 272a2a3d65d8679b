#include "teatpose/pipeline/gate.hpp"

#include "teatpose/errors.hpp"

#include <cmath>
#include <numbers>

namespace teatpose::pipeline {

std::string_view to_string(GateDecision decision) noexcept {
  switch (decision) {
    case GateDecision::pending: return "pending";
    case GateDecision::consistent: return "consistent";
    case GateDecision::reset: return "reset";
  }
  return "unknown";
}

void GateParams::validate() const {
  if (window < 2) throw Error(ErrorCode::invalid_parameter, "gate window must be >= 2");
  if (!(pos_tol_mm > 0.0) || !(axis_tol_deg > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "gate tolerances must be > 0");
  }
}

bool poses_agree(const pose::TeatPose& a, const pose::TeatPose& b, const GateParams& params) {
  if ((a.tip_mm - b.tip_mm).norm() > params.pos_tol_mm) return false;
  const Vec3 ua = a.axis.normalized(), ub = b.axis.normalized();
  const double angle = std::atan2(ua.cross(ub).norm(), ua.dot(ub)) * 180.0 / std::numbers::pi;
  return angle <= params.axis_tol_deg;
}

ConsistencyGate::ConsistencyGate(const GateParams& params) : params_(params) { params_.validate(); }

GateDecision ConsistencyGate::update(const pose::TeatPose& pose) {
  // The oldest pose leaves before the newcomer is compared, so only the
  // poses that will share the window with it are checked.
  while (window_.size() >= params_.window) window_.pop_front();
  for (const auto& held : window_) {
    if (!poses_agree(held, pose, params_)) {
      window_.clear();
      window_.push_back(pose);
      return GateDecision::reset;
    }
  }
  window_.push_back(pose);
  return window_.size() == params_.window ? GateDecision::consistent : GateDecision::pending;
}

}  // namespace teatpose::pipeline
