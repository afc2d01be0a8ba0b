#ifndef DEGEN_ICP_REGISTRATION_HPP
#define DEGEN_ICP_REGISTRATION_HPP

// Point-to-plane ICP with pluggable update rules.
//
// Every update solves the linearized system H x = g built from local-frame
// features. The rules differ only in how they invert H in its eigenbasis
// H = U diag(lambda) U^T:
//
//   Standard         x = (H + ridge I)^{-1} g
//   Probabilistic    x = U P diag(1/lambda) U^T g,   P = diag(p_k)
//   EigenTruncate    x = U diag(I_k / lambda_k) U^T g,   I_k = [lambda_k > lambda_min]
//   SolutionRemap    x = U diag(I_k) U^T H^{-1} g
//   ConditionNumber  as EigenTruncate with I_k = [lambda_1 / lambda_k <= kappa_max]

#include <degen_icp/degeneracy.hpp>
#include <degen_icp/geometry.hpp>
#include <degen_icp/kdtree.hpp>
#include <degen_icp/normals.hpp>
#include <degen_icp/parallel.hpp>
#include <degen_icp/types.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace degen_icp {

enum class RobustKind { L2, GemanMcClure };

struct RobustCost {
  RobustKind kind = RobustKind::GemanMcClure;
  double scale = 0.03;
};

/// w_rho with w_rho^2 = rho'(u) / u; Geman-McClure is evaluated at u / scale.
inline double robust_weight(const RobustCost& cost, double u) {
  if (cost.kind == RobustKind::L2) return 1.0;
  if (!(cost.scale > 0.0)) throw Error(Errc::InvalidArgument, "robust kernel scale must be positive");
  const double z = u / cost.scale;
  return 1.0 / (1.0 + z * z);
}

namespace method {
struct Standard {
  double ridge = 0.0;
};
struct Probabilistic {
  double s = 10.0;
};
struct EigenTruncate {
  double lambda_min = 0.0;
};
struct SolutionRemap {
  double lambda_min = 0.0;
};
struct ConditionNumber {
  double kappa_max = 1e3;
};
}  // namespace method

using SolverMethod = std::variant<method::Standard, method::Probabilistic, method::EigenTruncate,
                                  method::SolutionRemap, method::ConditionNumber>;

inline std::string method_name(const SolverMethod& m) {
  struct Visitor {
    std::string operator()(const method::Standard&) const { return "standard"; }
    std::string operator()(const method::Probabilistic&) const { return "probabilistic"; }
    std::string operator()(const method::EigenTruncate&) const { return "eigen-truncate"; }
    std::string operator()(const method::SolutionRemap&) const { return "solution-remap"; }
    std::string operator()(const method::ConditionNumber&) const { return "cond-number"; }
  };
  return std::visit(Visitor{}, m);
}

inline void validate(const SolverMethod& m) {
  if (const auto* p = std::get_if<method::Standard>(&m); p && !(p->ridge >= 0.0))
    throw Error(Errc::InvalidArgument, "ridge must be nonnegative");
  if (const auto* p = std::get_if<method::Probabilistic>(&m); p && !(p->s > 0.0))
    throw Error(Errc::InvalidArgument, "s must be positive");
  if (const auto* p = std::get_if<method::EigenTruncate>(&m); p && !(p->lambda_min >= 0.0))
    throw Error(Errc::InvalidArgument, "lambda_min must be nonnegative");
  if (const auto* p = std::get_if<method::SolutionRemap>(&m); p && !(p->lambda_min >= 0.0))
    throw Error(Errc::InvalidArgument, "lambda_min must be nonnegative");
  if (const auto* p = std::get_if<method::ConditionNumber>(&m); p && !(p->kappa_max > 0.0))
    throw Error(Errc::InvalidArgument, "kappa_max must be positive");
}

struct UpdateSolution {
  Twist twist;
  Vec6 probabilities = Vec6::Ones();  // soft or hard per-eigenvector weights
  DegeneracyAnalysis analysis;        // eigenbasis + DirectionReports
  Mat6 information = Mat6::Zero();
};

/// Linearized point-to-plane system for local-frame features.
inline HessianBundle linearize(std::span<const PlaneFeature> features) { return accumulate(features); }

/// x = U diag(p_k / lambda_k) U^T g, with zero-or-negative eigenvalues dropped.
inline Vec6 attenuated_update(const Eigenbasis& basis, const Vec6& p, const Vec6& g) {
  Vec6 coeff = basis.vectors.transpose() * g;
  for (int k = 0; k < 6; ++k) coeff(k) = basis.values(k) > 0.0 ? p(k) * coeff(k) / basis.values(k) : 0.0;
  return basis.vectors * coeff;
}

/// (1 / sigma_r^2) U P Lambda U^T.
inline Mat6 information_matrix(const Vec6& p, const Eigenbasis& basis, double sigma_r) {
  if (!(sigma_r > 0.0)) throw Error(Errc::InvalidArgument, "sigma_r must be positive");
  Vec6 d;
  for (int k = 0; k < 6; ++k) d(k) = p(k) * std::max(basis.values(k), 0.0);
  Mat6 info = basis.vectors * d.asDiagonal() * basis.vectors.transpose() / (sigma_r * sigma_r);
  return 0.5 * (info + info.transpose());
}

inline Mat6 information_matrix(const DegeneracyAnalysis& analysis, double sigma_r) {
  return information_matrix(analysis.probabilities(), analysis.basis, sigma_r);
}

namespace detail {

inline Vec6 full_solve(const HessianBundle& bundle, const Eigenbasis& basis, double ridge) {
  if (ridge == 0.0 && !(basis.values(5) > 1e-12)) {
    throw Error(Errc::SingularHessian, "smallest Hessian eigenvalue " + std::to_string(basis.values(5)));
  }
  const Mat6 h = bundle.hessian + ridge * Mat6::Identity();
  return h.ldlt().solve(bundle.rhs);
}

}  // namespace detail

inline UpdateSolution solve_update(const HessianBundle& bundle, const SolverMethod& m, double sigma_r = 0.015) {
  validate(m);
  if (bundle.features.empty()) throw Error(Errc::EmptyFeatureSet, "no features in bundle");
  const auto* prob = std::get_if<method::Probabilistic>(&m);
  UpdateSolution out;
  out.analysis = analyze(bundle, prob ? prob->s : 10.0);
  const Eigenbasis& basis = out.analysis.basis;
  const Vec6& lambda = basis.values;

  Vec6 x;
  Vec6 indicator = Vec6::Ones();
  if (const auto* st = std::get_if<method::Standard>(&m)) {
    x = detail::full_solve(bundle, basis, st->ridge);
  } else if (prob) {
    indicator = out.analysis.probabilities();
    x = attenuated_update(basis, indicator, bundle.rhs);
  } else if (const auto* et = std::get_if<method::EigenTruncate>(&m)) {
    for (int k = 0; k < 6; ++k) indicator(k) = lambda(k) > et->lambda_min ? 1.0 : 0.0;
    x = attenuated_update(basis, indicator, bundle.rhs);
  } else if (const auto* sr = std::get_if<method::SolutionRemap>(&m)) {
    for (int k = 0; k < 6; ++k) indicator(k) = lambda(k) > sr->lambda_min ? 1.0 : 0.0;
    // Least-norm full solution when H is numerically singular.
    const Vec6 x_full = lambda(5) > 1e-12 ? detail::full_solve(bundle, basis, 0.0)
                                          : attenuated_update(basis, Vec6::Ones(), bundle.rhs);
    x = basis.vectors * indicator.asDiagonal() * basis.vectors.transpose() * x_full;
  } else {
    const auto& cn = std::get<method::ConditionNumber>(m);
    for (int k = 0; k < 6; ++k) indicator(k) = lambda(k) > 0.0 && lambda(0) / lambda(k) <= cn.kappa_max ? 1.0 : 0.0;
    x = attenuated_update(basis, indicator, bundle.rhs);
  }
  out.twist = Twist::from_vector(x);
  out.probabilities = indicator;
  out.information = information_matrix(indicator, basis, sigma_r);
  return out;
}

// ---------------------------------------------------------------------------
// ICP

struct IcpConfig {
  SolverMethod method = method::Probabilistic{};
  double sigma_p = 0.01;      // point noise std (m)
  double sigma_i = 0.01;      // per-point noise used for normal covariance (m)
  double sigma_n_max = 0.10;  // normal outlier threshold
  double sigma_r = 0.015;     // residual std for the information matrix (m)
  double residual_weight = 1.0;
  RobustCost robust{RobustKind::GemanMcClure, 0.03};
  std::size_t k_neighbors = 5;
  std::size_t max_iterations = 30;
  double rot_tolerance = 1e-4;    // rad
  double trans_tolerance = 1e-4;  // m
  double max_correspondence_distance = 1.0;
  // Neighborhoods with a point farther than this from their fitted plane are
  // not planar and are dropped.
  double max_plane_distance = 0.2;
  std::optional<Vec3> target_viewpoint;

  void validate() const {
    degen_icp::validate(method);
    if (!(sigma_p >= 0.0) || !(sigma_i >= 0.0)) throw Error(Errc::InvalidArgument, "noise stds must be nonnegative");
    if (!(sigma_n_max > 0.0)) throw Error(Errc::InvalidArgument, "sigma_n_max must be positive");
    if (!(sigma_r > 0.0)) throw Error(Errc::InvalidArgument, "sigma_r must be positive");
    if (!(residual_weight >= 0.0)) throw Error(Errc::InvalidArgument, "residual weight must be nonnegative");
    if (robust.kind == RobustKind::GemanMcClure && !(robust.scale > 0.0))
      throw Error(Errc::InvalidArgument, "robust scale must be positive");
    if (k_neighbors < 3) throw Error(Errc::InvalidArgument, "k_neighbors must be at least 3");
    if (max_iterations < 1) throw Error(Errc::InvalidArgument, "max_iterations must be at least 1");
    if (!(rot_tolerance > 0.0) || !(trans_tolerance > 0.0))
      throw Error(Errc::InvalidArgument, "tolerances must be positive");
    if (!(max_correspondence_distance > 0.0) || !(max_plane_distance > 0.0))
      throw Error(Errc::InvalidArgument, "distance thresholds must be positive");
  }
};

struct CorrespondenceStats {
  std::size_t candidates = 0;
  std::size_t too_far = 0;
  std::size_t fit_failed = 0;
  std::size_t non_planar = 0;
  std::size_t outliers = 0;
  std::size_t accepted = 0;
};

struct FeatureSet {
  std::vector<PlaneFeature> features;
  CorrespondenceStats stats;
};

/// Associates each source point (sensor frame) with a plane fitted to its
/// nearest target neighbors at `pose`, and expresses the result in the sensor
/// frame. Per-point failures are counted, never thrown.
inline FeatureSet build_features(std::span<const Vec3> source, const KdTree& target, const Pose& pose,
                                 const IcpConfig& cfg) {
  enum class Outcome : unsigned char { Accepted, TooFar, FitFailed, NonPlanar, Outlier };
  const std::size_t n = source.size();
  std::vector<PlaneFeature> slots(n);
  std::vector<Outcome> outcome(n, Outcome::TooFar);
  const Mat3 rt = pose.rotation.transpose();
  const Mat3 point_cov = cfg.sigma_p * cfg.sigma_p * Mat3::Identity();
  const double max_d2 = cfg.max_correspondence_distance * cfg.max_correspondence_distance;

  parallel_chunks(n, 256, [&](std::size_t begin, std::size_t end) {
    std::vector<Vec3> neighborhood;
    for (std::size_t i = begin; i < end; ++i) {
      const Vec3 pw = pose * source[i];
      const auto nn = target.knn(pw, cfg.k_neighbors);
      if (nn.size() < 3 || nn.front().squared_distance > max_d2) {
        outcome[i] = Outcome::TooFar;
        continue;
      }
      neighborhood.clear();
      for (const auto& nb : nn) neighborhood.push_back(target.point(nb.index));
      PlaneFit fit;
      try {
        fit = fit_plane(neighborhood, cfg.target_viewpoint);
      } catch (const Error&) {
        outcome[i] = Outcome::FitFailed;
        continue;
      }
      double worst = 0.0;
      for (const auto& q : neighborhood) worst = std::max(worst, std::abs(fit.normal.dot(q - fit.centroid)));
      if (worst > cfg.max_plane_distance) {
        outcome[i] = Outcome::NonPlanar;
        continue;
      }
      const NormalCovariance nc = normal_covariance(fit, cfg.sigma_i, neighborhood.size());
      if (is_outlier(nc, cfg.sigma_n_max)) {
        outcome[i] = Outcome::Outlier;
        continue;
      }
      PlaneFeature f;
      f.point = source[i];
      f.normal = rt * fit.normal;
      f.offset = fit.offset() - fit.normal.dot(pose.translation);
      f.point_cov = point_cov;
      f.normal_cov = rt * nc.cov * pose.rotation;
      const double r = f.normal.dot(f.point) - f.offset;
      f.weight = cfg.residual_weight * robust_weight(cfg.robust, std::abs(cfg.residual_weight * r));
      slots[i] = f;
      outcome[i] = Outcome::Accepted;
    }
  });

  FeatureSet out;
  out.stats.candidates = n;
  out.features.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (outcome[i]) {
      case Outcome::Accepted:
        out.features.push_back(slots[i]);
        ++out.stats.accepted;
        break;
      case Outcome::TooFar: ++out.stats.too_far; break;
      case Outcome::FitFailed: ++out.stats.fit_failed; break;
      case Outcome::NonPlanar: ++out.stats.non_planar; break;
      case Outcome::Outlier: ++out.stats.outliers; break;
    }
  }
  return out;
}

enum class Termination { Converged, MaxIterations };

inline const char* to_string(Termination t) {
  return t == Termination::Converged ? "converged" : "max_iterations";
}

struct IterationRecord {
  std::size_t index = 0;
  Pose pose_before;
  UpdateSolution update;  // local frame
  Vec6 world_twist = Vec6::Zero();
  CorrespondenceStats stats;
};

struct RegistrationResult {
  Pose pose;
  Mat6 information = Mat6::Zero();  // world frame
  std::vector<IterationRecord> iterations;
  bool converged = false;
  Termination termination = Termination::MaxIterations;
};

/// One linearize/solve step at `pose`; returns the local update and the
/// correspondence statistics.
inline IterationRecord icp_step(std::span<const Vec3> source, const KdTree& target, const Pose& pose,
                                const IcpConfig& cfg) {
  FeatureSet fs = build_features(source, target, pose, cfg);
  if (fs.features.empty()) throw Error(Errc::NoCorrespondences, "no valid point-to-plane correspondences");
  IterationRecord rec;
  rec.pose_before = pose;
  rec.stats = fs.stats;
  rec.update = solve_update(linearize(fs.features), cfg.method, cfg.sigma_r);
  rec.world_twist = twist_adjoint(pose) * rec.update.twist.vector();
  return rec;
}

/// Registers `source` (sensor frame) to `target` (world frame) starting at `init`.
/// Updates are solved in the sensor frame and applied as
/// pose <- Exp(Ad(pose) x) * pose.
inline RegistrationResult icp(std::span<const Vec3> source, std::span<const Vec3> target, const Pose& init,
                              const IcpConfig& cfg) {
  cfg.validate();
  if (source.empty() || target.empty()) throw Error(Errc::NoCorrespondences, "source and target must be nonempty");
  const KdTree index(target);
  RegistrationResult result;
  result.pose = init;
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    IterationRecord rec = icp_step(source, index, result.pose, cfg);
    rec.index = it;
    const Twist xw = Twist::from_vector(rec.world_twist);
    const Mat6 m = frame_change_matrix(result.pose);
    result.information = m * rec.update.information * m.transpose();
    result.pose = compose(exp_se3(xw), result.pose);
    result.iterations.push_back(std::move(rec));
    if (xw.rot.norm() < cfg.rot_tolerance && xw.trans.norm() < cfg.trans_tolerance) {
      result.converged = true;
      result.termination = Termination::Converged;
      break;
    }
  }
  return result;
}

}  // namespace degen_icp

#endif  // DEGEN_ICP_REGISTRATION_HPP
