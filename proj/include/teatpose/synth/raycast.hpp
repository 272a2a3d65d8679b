#pragma once

#include "teatpose/geom/types.hpp"
#include "teatpose/synth/scene.hpp"

#include <optional>

namespace teatpose::synth {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit
};

/// Smallest t > 0 with origin + t * direction on the surface.
std::optional<double> intersect(const Ray& ray, const Ellipsoid& ellipsoid);
std::optional<double> intersect(const Ray& ray, const TeatSpec& teat);

bool contains(const Ellipsoid& ellipsoid, const Vec3& p);
bool contains(const TeatSpec& teat, const Vec3& p);

/// Unsigned distance from p to the teat's capsule surface.
double surface_distance(const TeatSpec& teat, const Vec3& p);

}  // namespace teatpose::synth
