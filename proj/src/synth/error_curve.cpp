#include "teatpose/synth/error_curve.hpp"

#include "teatpose/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace teatpose::synth {

ErrorCurve fit_error_curve(std::span<const ErrorSample> samples) {
  std::set<double> distances;
  for (const auto& s : samples) distances.insert(s.distance_mm);
  if (distances.size() < 3) {
    throw Error(ErrorCode::fit_error, "error curve needs >= 3 distinct distances, got " + std::to_string(distances.size()));
  }
  Eigen::MatrixX2d design(samples.size(), 2);
  Eigen::VectorXd rhs(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = samples[i].distance_mm / 1000.0;
    design.row(static_cast<Eigen::Index>(i)) << 1.0, d * d;
    rhs[static_cast<Eigen::Index>(i)] = std::abs(samples[i].error_mm);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixX2d> qr(design);
  if (qr.rank() < 2) throw Error(ErrorCode::fit_error, "error curve design is rank deficient");
  const Eigen::Vector2d coef = qr.solve(rhs);
  if (!coef.allFinite()) throw Error(ErrorCode::fit_error, "error curve fit diverged");

  ErrorCurve curve{coef[0], coef[1], 0.0};
  // a + b d^2 is monotone in d^2, so the extreme on [0, 1 m] is at an end.
  curve.max_error_1m_mm = std::max(std::abs(curve.a_mm), std::abs(curve.a_mm + curve.b_mm_per_m2));
  return curve;
}

}  // namespace teatpose::synth
