#ifndef DEGEN_ICP_DEGENERACY_HPP
#define DEGEN_ICP_DEGENERACY_HPP

// Probabilistic degeneracy detection for point-to-plane Hessians.
//
// Each feature contributes v = w [p x n; n] to H = sum v v^T. Point noise eps
// and normal-rotation noise eta perturb v to first order through B:
//
//   v_hat = v + B [eps; eta],   B = w [[-skew(n), skew(p) skew(n)], [0, skew(n)]]
//
// so E[H_hat] = H + Sigma with Sigma = sum B blockdiag(Sigma_p, Sigma_n) B^T.
// Along a unit direction u the noise xi_u = u^T H_hat u - u^T H u is modelled
// as N(mu_u, sigma_u^2), with
//
//   mu_u      = u^T Sigma u
//   sigma_u^2 = sum_i 2 (u^T Sigma_i u)^2 + 4 (u^T Sigma_i u)(u^T v_i)^2
//
// and p_u = P(a_hat_u >= (s + 1) xi_u) is the probability that the signal is
// at least s times the noise. Noisy quantities stand in for the true ones.

#include <degen_icp/geometry.hpp>
#include <degen_icp/linalg.hpp>
#include <degen_icp/types.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace degen_icp {

/// Point/plane correspondence in the local sensor frame.
/// `normal` is unit length except for features drawn with the small-angle
/// noise model, where n_hat = n + skew(n) eta is used verbatim.
struct PlaneFeature {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  double weight = 1.0;
  Mat3 point_cov = Mat3::Zero();
  Mat3 normal_cov = Mat3::Zero();
};

struct FeatureNoise {
  Vec6 v = Vec6::Zero();
  Mat6 sigma = Mat6::Zero();
};

struct HessianBundle {
  Mat6 hessian = Mat6::Zero();
  Vec6 rhs = Vec6::Zero();
  Mat6 sigma_total = Mat6::Zero();
  std::vector<FeatureNoise> features;
};

struct DirectionStats {
  double mu = 0.0;
  double sigma2 = 0.0;
};

struct DirectionReport {
  Vec6 direction = Vec6::Zero();
  double signal = 0.0;
  double noise_mean = 0.0;
  double noise_std = 0.0;
  double probability = 0.0;
  double snr_target = 10.0;
};

using Eigenbasis = SymmetricEigen<6>;

struct DegeneracyAnalysis {
  Eigenbasis basis;
  std::array<DirectionReport, 6> reports;
  std::size_t feature_count = 0;

  /// Fewer than six features cannot constrain all directions.
  bool underdetermined() const { return feature_count < 6; }

  Vec6 probabilities() const {
    Vec6 p;
    for (int k = 0; k < 6; ++k) p(k) = reports[k].probability;
    return p;
  }
};

/// Eigenvalues at or below this fraction of the largest count as exact zeros.
inline constexpr double kNumericalNullFraction = 1e-12;

inline Vec6 feature_vector(const PlaneFeature& f) {
  Vec6 v;
  v << f.weight * f.point.cross(f.normal), f.weight * f.normal;
  return v;
}

/// Point-to-plane residual target b = -w (n^T p - d).
inline double feature_residual(const PlaneFeature& f) {
  return -f.weight * (f.normal.dot(f.point) - f.offset);
}

inline Mat6 noise_jacobian(const PlaneFeature& f) {
  const Mat3 sn = skew(f.normal);
  Mat6 b = Mat6::Zero();
  b.topLeftCorner<3, 3>() = -f.weight * sn;
  b.topRightCorner<3, 3>() = f.weight * skew(f.point) * sn;
  b.bottomRightCorner<3, 3>() = f.weight * sn;
  return b;
}

inline FeatureNoise feature_covariance(const PlaneFeature& f) {
  const Mat6 b = noise_jacobian(f);
  Mat6 block = Mat6::Zero();
  block.topLeftCorner<3, 3>() = f.point_cov;
  block.bottomRightCorner<3, 3>() = f.normal_cov;
  FeatureNoise out;
  out.v = feature_vector(f);
  out.sigma = b * block * b.transpose();
  out.sigma = (0.5 * (out.sigma + out.sigma.transpose())).eval();
  return out;
}

inline HessianBundle accumulate(std::span<const PlaneFeature> features) {
  if (features.empty()) throw Error(Errc::EmptyFeatureSet, "no features to accumulate");
  HessianBundle bundle;
  bundle.features.reserve(features.size());
  for (const auto& f : features) {
    FeatureNoise fn = feature_covariance(f);
    bundle.hessian.noalias() += fn.v * fn.v.transpose();
    bundle.rhs.noalias() += fn.v * feature_residual(f);
    bundle.sigma_total += fn.sigma;
    bundle.features.push_back(std::move(fn));
  }
  return bundle;
}

inline DirectionStats direction_stats(const HessianBundle& bundle, const Vec6& u) {
  if (std::abs(u.norm() - 1.0) > 1e-9) throw Error(Errc::NotUnitLength, "direction must be a unit vector");
  DirectionStats out;
  out.mu = std::max(u.dot(bundle.sigma_total * u), 0.0);
  double sigma2 = 0.0;
  for (const auto& fn : bundle.features) {
    const double q = std::max(u.dot(fn.sigma * u), 0.0);
    const double proj = u.dot(fn.v);
    sigma2 += 2.0 * q * q + 4.0 * q * proj * proj;
  }
  out.sigma2 = sigma2;
  return out;
}

/// Standard normal CDF via erfc; exactly 0.5 at 0 and 1 for x >= 9.
inline double gaussian_cdf(double x) {
  if (std::isnan(x)) return x;
  if (x >= 9.0) return 1.0;
  if (x <= -40.0) return 0.0;
  return std::clamp(0.5 * std::erfc(-x / std::sqrt(2.0)), 0.0, 1.0);
}

/// P(signal >= (s + 1) xi) for xi ~ N(mu, sigma^2). With sigma == 0 the
/// answer is 1 for any positive signal and 0 otherwise.
inline double degeneracy_probability(double signal, double mu, double sigma, double s) {
  if (!(s > 0.0)) throw Error(Errc::InvalidArgument, "snr target s must be positive");
  if (sigma < 0.0 || mu < 0.0 || signal < 0.0) {
    throw Error(Errc::InvalidArgument, "signal, mu and sigma must be nonnegative");
  }
  if (sigma == 0.0) return signal > 0.0 ? 1.0 : 0.0;
  return gaussian_cdf((signal / (s + 1.0) - mu) / sigma);
}

inline Eigenbasis eigenbasis(const Mat6& hessian) {
  return symmetric_eigen<6>(hessian, EigenSign::LargestPositive);
}

/// Per-eigenvector signal, noise statistics and probability. O(N) per direction.
inline DegeneracyAnalysis analyze(const HessianBundle& bundle, double s) {
  if (bundle.features.empty()) throw Error(Errc::EmptyFeatureSet, "no features to analyze");
  DegeneracyAnalysis out;
  out.feature_count = bundle.features.size();
  out.basis = eigenbasis(bundle.hessian);
  const double floor = kNumericalNullFraction * std::max(out.basis.values(0), 0.0);
  for (int k = 0; k < 6; ++k) {
    const Vec6 u = out.basis.vectors.col(k);
    const double lambda = out.basis.values(k);
    const DirectionStats st = direction_stats(bundle, u);
    DirectionReport& r = out.reports[k];
    r.direction = u;
    r.signal = lambda > floor ? lambda : 0.0;
    r.noise_mean = st.mu;
    r.noise_std = std::sqrt(st.sigma2);
    r.snr_target = s;
    r.probability = degeneracy_probability(r.signal, r.noise_mean, r.noise_std, s);
  }
  return out;
}

}  // namespace degen_icp

#endif  // DEGEN_ICP_DEGENERACY_HPP
