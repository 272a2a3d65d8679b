#include "teatpose/pose/capsule_fit.hpp"

#include "teatpose/pose/tip.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace teatpose::pose {

double Capsule::surface_distance(const Vec3& p) const {
  const Vec3 d = p - cap_center;
  const double s = d.dot(axis);
  const double dist = s > 0.0 ? (d - s * axis).norm() : d.norm();
  return dist - radius;
}

namespace {

using Params = Eigen::Matrix<double, 6, 1>;  // cap center (3), axis tilt (2), radius

constexpr std::size_t kMinPoints = 10;
constexpr double kShaftClearanceMm = 10.0;

struct Basis {
  Vec3 e1, e2;
  explicit Basis(const Vec3& a) {
    int least = 0;
    a.cwiseAbs().minCoeff(&least);
    const Vec3 ref = Vec3::Unit(least);
    e1 = (ref - ref.dot(a) * a).normalized();
    e2 = a.cross(e1);
  }
};

Capsule unpack(const Params& x, const Vec3& axis0, const Basis& b) {
  return {x.head<3>(), (axis0 + x[3] * b.e1 + x[4] * b.e2).normalized(), x[5]};
}

double cost(const geom::PointCloud& points, const Capsule& c, Eigen::VectorXd* residuals = nullptr) {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = c.surface_distance(points[i]);
    if (residuals) (*residuals)[static_cast<Eigen::Index>(i)] = r;
    sum += r * r;
  }
  return sum;
}

std::optional<double> initial_radius(const geom::PointCloud& points, const Vec3& tip, const Vec3& axis) {
  const Basis b(axis);
  std::vector<Vec2> shaft;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 d = points[i] - tip;
    if (d.dot(axis) >= kShaftClearanceMm) shaft.emplace_back(d.dot(b.e1), d.dot(b.e2));
  }
  const auto circle = fit_circle(shaft);
  if (!circle) return std::nullopt;
  return circle->radius;
}

}  // namespace

std::optional<Capsule> fit_capsule(const geom::PointCloud& points, const Vec3& tip, const Vec3& axis,
                                   const CapsuleFitParams& params) {
  if (points.size() < kMinPoints) return std::nullopt;
  const Vec3 axis0 = axis.normalized();
  const auto r0 = initial_radius(points, tip, axis0);
  if (!r0 || !(*r0 > 0.0)) return std::nullopt;

  // Re-linearize the axis tilt around the current estimate every step so
  // the two tilt parameters stay small.
  Vec3 center = tip + *r0 * axis0;
  Vec3 dir = axis0;
  double radius = *r0;
  double lambda = 1e-3;
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd res(n), res_h(n);
  Eigen::Matrix<double, Eigen::Dynamic, 6> jac(n, 6);

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    const Basis basis(dir);
    Params x;
    x << center, 0.0, 0.0, radius;
    const double f = cost(points, unpack(x, dir, basis), &res);

    for (int k = 0; k < 6; ++k) {
      constexpr double h = 1e-6;
      Params xh = x;
      xh[k] += h;
      cost(points, unpack(xh, dir, basis), &res_h);
      jac.col(k) = (res_h - res) / h;
    }
    const Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
    const Params jtr = jac.transpose() * res;

    bool improved = false;
    for (int tries = 0; tries < 10 && !improved; ++tries) {
      Eigen::Matrix<double, 6, 6> a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-9);
      const Params step = a.ldlt().solve(-jtr);
      if (!step.allFinite()) return std::nullopt;
      const Capsule trial = unpack(x + step, dir, basis);
      if (trial.radius > 0.0 && cost(points, trial) < f) {
        center = trial.cap_center;
        dir = trial.axis;
        radius = trial.radius;
        lambda = std::max(lambda * 0.3, 1e-9);
        improved = true;
        if (step.norm() < 1e-9) iter = params.max_iterations;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }

  const double turn_deg = std::acos(std::clamp(dir.dot(axis0), -1.0, 1.0)) * 180.0 / std::numbers::pi;
  if (!(turn_deg <= params.max_axis_change_deg)) return std::nullopt;
  if (!(radius >= params.min_radius_ratio * *r0 && radius <= params.max_radius_ratio * *r0)) return std::nullopt;
  return Capsule{center, dir, radius};
}

}  // namespace teatpose::pose
