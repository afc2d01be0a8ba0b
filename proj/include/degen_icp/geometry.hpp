#ifndef DEGEN_ICP_GEOMETRY_HPP
#define DEGEN_ICP_GEOMETRY_HPP

#include <degen_icp/types.hpp>

#include <Eigen/Geometry>

#include <cmath>

namespace degen_icp {

/// Cross-product matrix: skew(a) * b == a.cross(b).
inline Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

/// Small perturbation of a pose. Six-vector layout is [rot; trans] everywhere
/// in this library, matching the point-to-plane Jacobian w * [(p x n)^T, n^T].
struct Twist {
  Vec3 rot = Vec3::Zero();
  Vec3 trans = Vec3::Zero();

  Vec6 vector() const {
    Vec6 x;
    x << rot, trans;
    return x;
  }

  static Twist from_vector(const Vec6& x) { return {x.head<3>(), x.tail<3>()}; }

  bool is_finite() const { return rot.allFinite() && trans.allFinite(); }
};

struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  static Pose from_matrix(const Mat4& m) { return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()}; }

  /// Orthonormal rotation with det +1, within tol.
  bool is_valid(double tol = 1e-12) const {
    const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
    return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol && translation.allFinite();
  }
};

/// SO(3) exponential (Rodrigues). Second-order Taylor series below 1e-9 rad.
inline Mat3 exp_so3(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = skew(w);
  if (theta < 1e-9) return Mat3::Identity() + k + 0.5 * k * k;
  const double a = std::sin(theta) / theta;
  const double half = std::sin(0.5 * theta) / theta;
  const double b = 2.0 * half * half;  // (1 - cos) / theta^2 without cancellation
  return Mat3::Identity() + a * k + b * k * k;
}

/// SE(3) exponential of a [rot; trans] twist: rotation Exp(rot), translation V(rot) * trans.
inline Pose exp_se3(const Twist& x) {
  const double theta = x.rot.norm();
  const Mat3 k = skew(x.rot);
  Mat3 v;
  if (theta < 1e-9) {
    v = Mat3::Identity() + 0.5 * k + (1.0 / 6.0) * k * k;
  } else {
    const double t2 = theta * theta;
    const double half = std::sin(0.5 * theta) / theta;
    const double c = theta < 1e-2 ? 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 : (theta - std::sin(theta)) / (t2 * theta);
    v = Mat3::Identity() + (2.0 * half * half) * k + c * k * k;
  }
  return {exp_so3(x.rot), v * x.trans};
}

/// a * b, i.e. apply b first.
inline Pose compose(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

inline Pose inverse(const Pose& a) {
  const Mat3 rt = a.rotation.transpose();
  return {rt, -rt * a.translation};
}

/// M = [[R, skew(t) R], [0, R]]. Maps feature vectors [p x n; n] (and hence
/// Hessians / information matrices, as M H M^T) from the pose's local frame
/// into the frame the pose is expressed in.
inline Mat6 frame_change_matrix(const Pose& pose) {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = pose.rotation;
  m.topRightCorner<3, 3>() = skew(pose.translation) * pose.rotation;
  m.bottomRightCorner<3, 3>() = pose.rotation;
  return m;
}

/// Adjoint for twists, Ad = M^{-T} = [[R, 0], [skew(t) R, R]]:
/// pose * Exp(x) == Exp(Ad * x) * pose.
inline Mat6 twist_adjoint(const Pose& pose) {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = pose.rotation;
  m.bottomLeftCorner<3, 3>() = skew(pose.translation) * pose.rotation;
  m.bottomRightCorner<3, 3>() = pose.rotation;
  return m;
}

/// Rotation angle of R in radians.
inline double rotation_angle(const Mat3& r) {
  return Eigen::AngleAxisd(r).angle();
}

inline Pose pose_from_yaw(double yaw, const Vec3& translation) {
  return {Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix(), translation};
}

}  // namespace degen_icp

#endif  // DEGEN_ICP_GEOMETRY_HPP
