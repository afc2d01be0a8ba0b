#ifndef DEGEN_ICP_TESTS_SUPPORT_HPP
#define DEGEN_ICP_TESTS_SUPPORT_HPP

#include <degen_icp/degen_icp.hpp>

#include <gtest/gtest.h>

namespace test {

using namespace degen_icp;

inline Vec3 random_vec3(Rng& rng, double scale = 1.0) {
  return Vec3(rng.uniform(-scale, scale), rng.uniform(-scale, scale), rng.uniform(-scale, scale));
}

inline Vec3 random_unit3(Rng& rng) {
  Vec3 v;
  do {
    v = Vec3(rng.normal(), rng.normal(), rng.normal());
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline Pose random_pose(Rng& rng, double angle = 3.0, double offset = 5.0) {
  return exp_se3(Twist{random_unit3(rng) * rng.uniform(0.0, angle), random_vec3(rng, offset)});
}

/// Random symmetric positive definite matrix with eigenvalues in [lo, hi].
inline Mat6 random_spd(Rng& rng, double lo = 0.5, double hi = 50.0) {
  Mat6 a;
  for (int i = 0; i < 36; ++i) a(i) = rng.normal();
  const Eigen::HouseholderQR<Mat6> qr(a);
  const Mat6 q = qr.householderQ();
  Vec6 d;
  for (int k = 0; k < 6; ++k) d(k) = rng.uniform(lo, hi);
  return q * d.asDiagonal() * q.transpose();
}

template <typename A, typename B>
double rel_diff(const A& a, const B& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

}  // namespace test

#endif  // DEGEN_ICP_TESTS_SUPPORT_HPP
