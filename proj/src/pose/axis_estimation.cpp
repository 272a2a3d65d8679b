#include "teatpose/pose/axis_estimation.hpp"

#include "teatpose/errors.hpp"
#include "teatpose/geom/kdtree.hpp"

#include <Eigen/Eigenvalues>

namespace teatpose::pose {

namespace {

Mat3 covariance(const std::vector<Vec3>& pts, const std::vector<std::size_t>* subset = nullptr) {
  const std::size_t n = subset ? subset->size() : pts.size();
  auto at = [&](std::size_t i) -> const Vec3& { return subset ? pts[(*subset)[i]] : pts[i]; };
  Vec3 mean = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) mean += at(i);
  mean /= static_cast<double>(n);
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 d = at(i) - mean;
    cov.noalias() += d * d.transpose();
  }
  return cov / static_cast<double>(n);
}

}  // namespace

Vec3 pca_axis(const geom::PointCloud& points, double min_eigen_ratio) {
  if (points.size() < 3) {
    throw Error(ErrorCode::insufficient_points, "pca_axis needs at least 3 points, got " + std::to_string(points.size()));
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(covariance(points.points()));
  const Vec3& ev = eig.eigenvalues();  // ascending
  if (!(ev[2] > 0.0)) throw Error(ErrorCode::ambiguous_axis, "pca_axis: points coincide");
  if (ev[1] > 0.0 && ev[2] / ev[1] < min_eigen_ratio) {
    throw Error(ErrorCode::ambiguous_axis, "pca_axis: cluster is not elongated (lambda1/lambda2 = " +
                                               std::to_string(ev[2] / ev[1]) + ")");
  }
  return eig.eigenvectors().col(2).normalized();
}

SurfaceNormalField estimate_normals(const geom::PointCloud& points, std::size_t k, const Vec3& camera_origin) {
  if (k < 3) throw Error(ErrorCode::invalid_parameter, "estimate_normals: k must be >= 3");
  if (k > points.size()) {
    throw Error(ErrorCode::invalid_parameter, "estimate_normals: k = " + std::to_string(k) + " exceeds " +
                                                  std::to_string(points.size()) + " points");
  }
  const auto& pts = points.points();
  const geom::KdTree tree(pts);
  SurfaceNormalField field;
  field.k = k;
  field.normals.reserve(pts.size());
  std::vector<std::size_t> nbrs;
  for (const auto& p : pts) {
    tree.knn(p, k, nbrs);
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(covariance(pts, &nbrs));
    Vec3 n = eig.eigenvectors().col(0).normalized();
    if (n.dot(camera_origin - p) < 0.0) n = -n;
    field.normals.push_back(n);
  }
  return field;
}

Vec3 normals_axis(const SurfaceNormalField& field, double min_eigen_ratio) {
  if (field.normals.size() < 2) throw Error(ErrorCode::insufficient_points, "normals_axis needs at least 2 normals");
  Mat3 scatter = Mat3::Zero();
  for (const auto& n : field.normals) scatter.noalias() += n * n.transpose();
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  const Vec3& ev = eig.eigenvalues();
  if (ev[1] <= 1e-12 * ev[2]) throw Error(ErrorCode::ambiguous_axis, "normals_axis: all normals are parallel");
  if (ev[1] < min_eigen_ratio * ev[0]) {
    throw Error(ErrorCode::ambiguous_axis, "normals_axis: no dominant direction orthogonal to the normals");
  }
  return eig.eigenvectors().col(0).normalized();
}

}  // namespace teatpose::pose
