#include "teatpose/pose/tip.hpp"

#include "teatpose/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace teatpose::pose {

namespace {

constexpr std::size_t kMinShaftPoints = 6;
constexpr double kMaxCapRadiusFraction = 0.9;

struct AxialFrame {
  Vec3 origin;  // cluster centroid
  Vec3 axis;
  Vec3 e1, e2;  // span the cross-section plane

  AxialFrame(const Vec3& centroid, const Vec3& a) : origin(centroid), axis(a) {
    int least = 0;
    a.cwiseAbs().minCoeff(&least);
    const Vec3 ref = Vec3::Unit(least);
    e1 = (ref - ref.dot(a) * a).normalized();
    e2 = a.cross(e1);
  }
  double axial(const Vec3& p) const { return axis.dot(p - origin); }
  Vec2 lateral(const Vec3& p) const {
    const Vec3 d = p - origin;
    return {e1.dot(d), e2.dot(d)};
  }
  Vec3 point(const Vec2& lat, double s) const { return origin + e1 * lat.x() + e2 * lat.y() + axis * s; }
};

Vec3 slab_centroid_tip(const geom::PointCloud& points, const AxialFrame& frame, const std::vector<double>& s,
                       double s_lo, double slab) {
  Vec3 sum = Vec3::Zero();
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs(s[i] - s_lo) <= slab) {
      sum += points[i];
      ++count;
    }
  }
  const Vec3 slab_centroid = count ? Vec3(sum / static_cast<double>(count)) : frame.origin;
  return frame.origin + frame.axis * frame.axial(slab_centroid);
}

std::optional<Circle> fit_shaft(const std::vector<Vec2>& lat, const std::vector<double>& s, double min_s) {
  std::vector<Vec2> shaft;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    if (s[i] >= min_s) shaft.push_back(lat[i]);
  }
  if (shaft.size() < kMinShaftPoints) return std::nullopt;
  return fit_circle(shaft);
}

}  // namespace

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::insufficient_points, "quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::optional<Circle> fit_circle(std::span<const Vec2> points) {
  if (points.size() < 3) return std::nullopt;
  // Kasa: x^2 + y^2 + D x + E y + F = 0, centered for conditioning.
  Vec2 mean = Vec2::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::MatrixX3d design(points.size(), 3);
  Eigen::VectorXd rhs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec2 d = points[i] - mean;
    design.row(static_cast<Eigen::Index>(i)) << d.x(), d.y(), 1.0;
    rhs[static_cast<Eigen::Index>(i)] = -d.squaredNorm();
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixX3d> qr(design);
  if (qr.rank() < 3) return std::nullopt;
  const Eigen::Vector3d sol = qr.solve(rhs);
  Vec2 center(-0.5 * sol[0], -0.5 * sol[1]);
  const double r2 = center.squaredNorm() - sol[2];
  if (!(r2 > 0.0)) return std::nullopt;
  double radius = std::sqrt(r2);

  for (int iter = 0; iter < 30; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (const auto& p : points) {
      const Vec2 d = (p - mean) - center;
      const double dist = d.norm();
      if (dist == 0.0) continue;
      const Eigen::Vector3d jac(-d.x() / dist, -d.y() / dist, -1.0);
      const double res = dist - radius;
      jtj.noalias() += jac * jac.transpose();
      jtr.noalias() += jac * res;
    }
    const Eigen::Vector3d step = jtj.ldlt().solve(-jtr);
    if (!step.allFinite()) break;
    center += step.head<2>();
    radius += step[2];
    if (step.norm() < 1e-10) break;
  }
  if (!(radius > 0.0) || !center.allFinite()) return std::nullopt;
  return Circle{center + mean, radius};
}

Vec3 locate_tip(const geom::PointCloud& points, const Vec3& axis, const TipParams& params) {
  if (points.empty()) throw Error(ErrorCode::insufficient_points, "locate_tip: empty cloud");
  const AxialFrame frame(points.centroid(), axis.normalized());

  std::vector<double> s(points.size());
  std::vector<Vec2> lat(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    s[i] = frame.axial(points[i]);
    lat[i] = frame.lateral(points[i]);
  }
  const double s_lo = quantile(s, params.percentile);
  if (params.model == TipModel::slab_centroid) return slab_centroid_tip(points, frame, s, s_lo, params.slab_mm);

  // Shaft cross-section: first clear of the slab, then clear of a full cap
  // radius once the radius is known.
  auto shaft = fit_shaft(lat, s, s_lo + params.slab_mm);
  if (!shaft) return slab_centroid_tip(points, frame, s, s_lo, params.slab_mm);
  if (auto refined = fit_shaft(lat, s, s_lo + shaft->radius)) shaft = refined;
  const double radius = shaft->radius;

  double apex_sum = 0.0;
  std::size_t apex_count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs(s[i] - s_lo) > params.slab_mm) continue;
    const double r = (lat[i] - shaft->center).norm();
    if (r >= kMaxCapRadiusFraction * radius) continue;
    apex_sum += s[i] - (radius - std::sqrt(radius * radius - r * r));
    ++apex_count;
  }
  const double apex = apex_count ? apex_sum / static_cast<double>(apex_count) : s_lo;
  return frame.point(shaft->center, apex);
}

}  // namespace teatpose::pose
