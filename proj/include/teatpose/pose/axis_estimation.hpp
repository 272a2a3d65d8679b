#pragma once

#include "teatpose/geom/point_cloud.hpp"

#include <cstddef>
#include <vector>

namespace teatpose::pose {

/// Largest-to-smallest eigenvalue ratio below which a cluster is too
/// round to have a usable axis.
inline constexpr double kMinAxisEigenRatio = 1.05;

struct SurfaceNormalField {
  std::vector<Vec3> normals;  // unit, camera-facing
  std::size_t k = 0;
};

/// Principal direction (largest covariance eigenvector) of the points.
/// Sign is arbitrary.
/// Throws insufficient_points below 3 points and ambiguous_axis when
/// lambda1 / lambda2 < min_eigen_ratio.
Vec3 pca_axis(const geom::PointCloud& points, double min_eigen_ratio = kMinAxisEigenRatio);

/// Per-point normal from the covariance of its k nearest neighbors (the
/// point itself included), flipped so dot(n, camera_origin - p) >= 0.
/// camera_origin is expressed in the cloud's frame.
SurfaceNormalField estimate_normals(const geom::PointCloud& points, std::size_t k, const Vec3& camera_origin);

/// Direction minimizing sum_i (n_i . a)^2 over unit a: the smallest
/// eigenvector of sum_i n_i n_i^T. Sign is arbitrary.
Vec3 normals_axis(const SurfaceNormalField& field, double min_eigen_ratio = kMinAxisEigenRatio);

}  // namespace teatpose::pose
