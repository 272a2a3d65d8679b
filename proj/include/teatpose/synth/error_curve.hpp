#pragma once

#include <span>

namespace teatpose::synth {

struct ErrorSample {
  double distance_mm = 0.0;
  double error_mm = 0.0;
};

/// error(d) ~= a + b * (d / 1000)^2, b in mm per squared meter.
struct ErrorCurve {
  double a_mm = 0.0;
  double b_mm_per_m2 = 0.0;
  /// max |a + b d^2| over d in [0, 1 m].
  double max_error_1m_mm = 0.0;

  double at(double distance_mm) const {
    const double d = distance_mm / 1000.0;
    return a_mm + b_mm_per_m2 * d * d;
  }
};

/// Least-squares fit of |error| against (1, d^2). Throws fit_error with
/// fewer than 3 distinct distances or a rank-deficient design.
ErrorCurve fit_error_curve(std::span<const ErrorSample> samples);

}  // namespace teatpose::synth
