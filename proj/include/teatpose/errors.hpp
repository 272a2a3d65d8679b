#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace teatpose {

enum class ErrorCode {
  invalid_input,
  invalid_parameter,
  empty_mask,
  insufficient_points,
  ambiguous_axis,
  frame_mismatch,
  invalid_scene,
  fit_error,
  parse_error,
};

/// Stable kebab-case name, used in event logs and reports.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace teatpose
