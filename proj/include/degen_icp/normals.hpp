#ifndef DEGEN_ICP_NORMALS_HPP
#define DEGEN_ICP_NORMALS_HPP

// Local plane fitting and normal uncertainty.
//
// A normal is the smallest-eigenvalue eigenvector of the neighbors' empirical
// covariance C (1/(N-1) normalization). Its uncertainty is expressed as the
// covariance of a small rotation eta acting on it, n_hat ~ n + skew(n) eta,
// which is the form consumed by the degeneracy analysis.

#include <degen_icp/geometry.hpp>
#include <degen_icp/linalg.hpp>
#include <degen_icp/types.hpp>

#include <cmath>
#include <optional>
#include <span>

namespace degen_icp {

struct PlaneFit {
  Vec3 normal = Vec3::UnitZ();
  Vec3 centroid = Vec3::Zero();
  Vec3 eigenvalues = Vec3::Zero();  // lambda1 >= lambda2 >= lambda3 >= 0
  Mat3 rotation = Mat3::Identity();  // columns: e1, e2, normal; det +1
  Mat3 covariance = Mat3::Zero();    // empirical, 1/(N-1)
  std::size_t count = 0;

  /// Signed plane offset d with normal . x = d on the plane.
  double offset() const { return normal.dot(centroid); }
};

struct NormalCovariance {
  Mat3 cov = Mat3::Zero();  // tangent-space, cov * normal == 0
  double worst_case_std = 0.0;
};

/// Fits a plane to `neighbors`. When `viewpoint` is given the normal points
/// toward it, otherwise its first nonzero component is positive.
inline PlaneFit fit_plane(std::span<const Vec3> neighbors, const std::optional<Vec3>& viewpoint = std::nullopt) {
  const std::size_t n = neighbors.size();
  if (n < 3) throw Error(Errc::TooFewPoints, "plane fit needs at least 3 points, got " + std::to_string(n));

  Vec3 centroid = Vec3::Zero();
  for (const auto& q : neighbors) centroid += q;
  centroid /= static_cast<double>(n);

  Mat3 c = Mat3::Zero();
  for (const auto& q : neighbors) {
    const Vec3 d = q - centroid;
    c.noalias() += d * d.transpose();
  }
  c /= static_cast<double>(n - 1);

  const auto eig = symmetric_eigen<3>(c, EigenSign::LeadingPositive);
  const double l1 = std::max(eig.values(0), 0.0);
  const double l2 = std::max(eig.values(1), 0.0);
  const double l3 = std::max(eig.values(2), 0.0);
  if (!(l2 > 1e-12 * l1)) throw Error(Errc::DegenerateNeighborhood, "neighbors are collinear or coincident");

  PlaneFit fit;
  fit.centroid = centroid;
  fit.covariance = c;
  fit.count = n;
  fit.eigenvalues = Vec3(l1, l2, l3);

  Vec3 normal = eig.vectors.col(2);
  if (viewpoint) {
    if (normal.dot(*viewpoint - centroid) < 0.0) normal = -normal;
  } else {
    Eigen::Matrix<double, 3, 1> v = normal;
    detail::normalize_sign<3>(v, EigenSign::LeadingPositive);
    normal = v;
  }
  normal.normalize();
  Vec3 e1 = eig.vectors.col(0);
  const Vec3 e2 = eig.vectors.col(1);
  if (e1.cross(e2).dot(normal) < 0.0) e1 = -e1;
  fit.normal = normal;
  fit.rotation.col(0) = e1;
  fit.rotation.col(1) = e2;
  fit.rotation.col(2) = normal;
  return fit;
}

/// cov = R (sigma_i^2 / N) diag(1/l2, 1/l1, 0) R^T; worst-case std sqrt((sigma_i^2/N)/l2).
inline NormalCovariance normal_covariance(const PlaneFit& fit, double sigma_i, std::size_t n_points) {
  if (n_points < 3) throw Error(Errc::InvalidArgument, "normal covariance needs n_points >= 3");
  if (!(sigma_i >= 0.0)) throw Error(Errc::InvalidArgument, "sigma_i must be nonnegative");
  const double l1 = fit.eigenvalues(0);
  const double l2 = fit.eigenvalues(1);
  if (!(l2 > 0.0)) throw Error(Errc::DegenerateNeighborhood, "second eigenvalue is zero");

  const double scale = sigma_i * sigma_i / static_cast<double>(n_points);
  const Vec3 diag(scale / l2, scale / l1, 0.0);
  NormalCovariance out;
  out.cov = fit.rotation * diag.asDiagonal() * fit.rotation.transpose();
  out.cov = (0.5 * (out.cov + out.cov.transpose())).eval();
  out.worst_case_std = std::sqrt(scale / l2);
  return out;
}

/// Strict: worst_case_std^2 > sigma_n_max^2.
inline bool is_outlier(const NormalCovariance& nc, double sigma_n_max) {
  if (!(sigma_n_max > 0.0)) throw Error(Errc::InvalidArgument, "sigma_n_max must be positive");
  return nc.worst_case_std * nc.worst_case_std > sigma_n_max * sigma_n_max;
}

}  // namespace degen_icp

#endif  // DEGEN_ICP_NORMALS_HPP
