#pragma once

#include "teatpose/pose/teat_pose.hpp"

#include <cstddef>
#include <deque>
#include <string_view>

namespace teatpose::pipeline {

enum class GateDecision { pending, consistent, reset };

std::string_view to_string(GateDecision decision) noexcept;

struct GateParams {
  std::size_t window = 5;
  double pos_tol_mm = 3.0;
  double axis_tol_deg = 5.0;

  /// Throws invalid_parameter unless window >= 2 and both tolerances > 0.
  void validate() const;
};

/// Tip distance within pos_tol and oriented axis angle within axis_tol.
bool poses_agree(const pose::TeatPose& a, const pose::TeatPose& b, const GateParams& params);

/// Per-teat consistency window. The window is pairwise consistent at all
/// times; a disagreeing pose replaces it.
class ConsistencyGate {
 public:
  explicit ConsistencyGate(const GateParams& params = {});

  GateDecision update(const pose::TeatPose& pose);

  const std::deque<pose::TeatPose>& window() const { return window_; }
  const GateParams& params() const { return params_; }

 private:
  GateParams params_;
  std::deque<pose::TeatPose> window_;
};

/// consistent iff the last `window` poses are pairwise in agreement; any
/// disagreement clears the window down to the newest pose (reset).
inline GateDecision gate_update(ConsistencyGate& gate, const pose::TeatPose& pose) { return gate.update(pose); }

}  // namespace teatpose::pipeline
