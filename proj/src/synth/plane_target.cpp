#include "teatpose/synth/plane_target.hpp"

#include "teatpose/errors.hpp"
#include "teatpose/synth/rng.hpp"

#include <cmath>

namespace teatpose::synth {

namespace {

bool in_region(const Vec3& p, double half_w, double half_h) {
  return std::abs(p.x()) <= half_w && std::abs(p.y()) <= half_h;
}

}  // namespace

geom::PointCloud render_plane_target(const geom::CameraModel& camera, const PlaneTarget& target,
                                     const NoiseModel& noise, std::uint64_t seed) {
  if (!(target.distance_mm > 0.0)) throw Error(ErrorCode::invalid_parameter, "target distance must be > 0");
  noise.validate();
  const CounterRng rng(seed);
  const double half_w = 0.5 * target.width_mm, half_h = 0.5 * target.height_mm;
  const double sigma = noise.sigma_at(target.distance_mm);
  std::vector<Vec3> points;
  for (int v = 0; v < camera.height(); ++v) {
    for (int u = 0; u < camera.width(); ++u) {
      const Vec3 p = camera.backproject(Vec2(u, v), target.distance_mm);
      if (!in_region(p, half_w, half_h)) continue;
      const auto idx = static_cast<std::uint64_t>(v) * static_cast<std::uint64_t>(camera.width()) +
                       static_cast<std::uint64_t>(u);
      if (noise.dropout_rate > 0.0 && rng.uniform(1, idx) < noise.dropout_rate) continue;
      const double z = sigma > 0.0 ? p.z() + sigma * rng.gaussian(2, idx) : p.z();
      if (!(z > 0.0)) continue;
      points.push_back(sigma > 0.0 ? Vec3(p * (z / p.z())) : p);
    }
  }
  return geom::PointCloud(geom::Frame::camera, std::move(points));
}

double plane_target_measure(const geom::PointCloud& cloud, const TargetRegion& region, std::size_t min_points) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : cloud.points()) {
    if (in_region(p, 0.5 * region.width_mm, 0.5 * region.height_mm)) {
      sum += p.z();
      ++count;
    }
  }
  if (count < min_points || count == 0) {
    throw Error(ErrorCode::insufficient_points, "plane target: " + std::to_string(count) + " points on the target, need " +
                                                    std::to_string(min_points));
  }
  return sum / static_cast<double>(count);
}

double plane_target_rms_error(const geom::PointCloud& cloud, double true_distance_mm, const TargetRegion& region) {
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (const auto& p : cloud.points()) {
    if (in_region(p, 0.5 * region.width_mm, 0.5 * region.height_mm)) {
      sum_sq += (p.z() - true_distance_mm) * (p.z() - true_distance_mm);
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::insufficient_points, "plane target: no points on the target");
  return std::sqrt(sum_sq / static_cast<double>(count));
}

}  // namespace teatpose::synth
