#include "teatpose/errors.hpp"

namespace teatpose {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::empty_mask: return "empty-mask";
    case ErrorCode::insufficient_points: return "insufficient-points";
    case ErrorCode::ambiguous_axis: return "ambiguous-axis";
    case ErrorCode::frame_mismatch: return "frame-mismatch";
    case ErrorCode::invalid_scene: return "invalid-scene";
    case ErrorCode::fit_error: return "fit-error";
    case ErrorCode::parse_error: return "parse-error";
  }
  return "unknown";
}

}  // namespace teatpose
