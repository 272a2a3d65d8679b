#include "teatpose/synth/raycast.hpp"

#include <algorithm>
#include <cmath>

namespace teatpose::synth {

namespace {

constexpr double kMinT = 1e-9;

std::optional<double> smallest_positive_root(double a, double b, double c) {
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0 || a == 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  // Numerically stable pair.
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double t0 = q / a, t1 = q != 0.0 ? c / q : t0;
  if (t0 > t1) std::swap(t0, t1);
  if (t0 > kMinT) return t0;
  if (t1 > kMinT) return t1;
  return std::nullopt;
}

std::optional<double> intersect_sphere(const Ray& ray, const Vec3& center, double radius) {
  const Vec3 oc = ray.origin - center;
  return smallest_positive_root(1.0, 2.0 * oc.dot(ray.direction), oc.squaredNorm() - radius * radius);
}

}  // namespace

std::optional<double> intersect(const Ray& ray, const Ellipsoid& e) {
  const Vec3 o = (ray.origin - e.center).cwiseQuotient(e.semi_axes);
  const Vec3 d = ray.direction.cwiseQuotient(e.semi_axes);
  return smallest_positive_root(d.squaredNorm(), 2.0 * o.dot(d), o.squaredNorm() - 1.0);
}

std::optional<double> intersect(const Ray& ray, const TeatSpec& teat) {
  // Capsule = shaft between base and cap center, spheres at both ends.
  const Vec3 a = teat.base_mm;
  const Vec3 axis = teat.axis;
  const double len = teat.length_mm - teat.radius_mm;
  const double r = teat.radius_mm;

  std::optional<double> best;
  auto take = [&](std::optional<double> t) {
    if (t && (!best || *t < *best)) best = t;
  };

  // Infinite cylinder, clipped to the shaft.
  const Vec3 oc = ray.origin - a;
  const Vec3 d_perp = ray.direction - ray.direction.dot(axis) * axis;
  const Vec3 o_perp = oc - oc.dot(axis) * axis;
  const double qa = d_perp.squaredNorm();
  if (qa > 1e-15) {
    const double qb = 2.0 * o_perp.dot(d_perp);
    const double qc = o_perp.squaredNorm() - r * r;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)}) {
        if (t <= kMinT) continue;
        const double s = (oc + t * ray.direction).dot(axis);
        if (s >= 0.0 && s <= len) {
          take(t);
          break;
        }
      }
    }
  }
  take(intersect_sphere(ray, a, r));
  take(intersect_sphere(ray, teat.cap_center(), r));
  return best;
}

bool contains(const Ellipsoid& e, const Vec3& p) {
  return (p - e.center).cwiseQuotient(e.semi_axes).squaredNorm() < 1.0;
}

namespace {
double distance_to_segment(const TeatSpec& teat, const Vec3& p) {
  const double len = teat.length_mm - teat.radius_mm;
  const double s = std::clamp((p - teat.base_mm).dot(teat.axis), 0.0, len);
  return (p - (teat.base_mm + s * teat.axis)).norm();
}
}  // namespace

bool contains(const TeatSpec& teat, const Vec3& p) { return distance_to_segment(teat, p) < teat.radius_mm; }

double surface_distance(const TeatSpec& teat, const Vec3& p) {
  return std::abs(distance_to_segment(teat, p) - teat.radius_mm);
}

}  // namespace teatpose::synth
