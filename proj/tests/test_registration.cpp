#include "support.hpp"

#include <numbers>

using namespace degen_icp;
using test::random_unit3;
using test::random_vec3;

namespace {

std::vector<PlaneFeature> random_system(Rng& rng, std::size_t n, double noise = 0.0) {
  std::vector<PlaneFeature> fs;
  for (std::size_t i = 0; i < n; ++i) {
    PlaneFeature f;
    f.point = random_vec3(rng, 3);
    f.normal = random_unit3(rng);
    f.offset = f.normal.dot(f.point) + rng.uniform(-0.05, 0.05);
    f.weight = rng.uniform(0.5, 1.5);
    f.point_cov = noise * noise * Mat3::Identity();
    f.normal_cov = noise * noise * (Mat3::Identity() - f.normal * f.normal.transpose());
    fs.push_back(f);
  }
  return fs;
}

// Minimizer of |W^1/2 (J x - b)|^2 + |(I-P)^1/2 L^1/2 U^T x|^2 with
// W^1/2 = V diag(P^1/2, I) V^T from the SVD J = V S U^T, solved by QR.
Vec6 regularized_least_squares(std::span<const PlaneFeature> fs, const Vec6& p) {
  const auto n = static_cast<Eigen::Index>(fs.size());
  Eigen::MatrixXd j(n, 6);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    j.row(i) = feature_vector(fs[i]).transpose();
    b(i) = feature_residual(fs[i]);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd& v = svd.matrixU();  // left singular vectors (N x N)
  const Eigen::MatrixXd& u = svd.matrixV();  // right singular vectors (6 x 6)
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::VectorXd wdiag = Eigen::VectorXd::Ones(n);
  for (int k = 0; k < 6; ++k) wdiag(k) = std::sqrt(p(k));
  const Eigen::MatrixXd w_half = v * wdiag.asDiagonal() * v.transpose();

  Eigen::MatrixXd a(n + 6, 6);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 6);
  a.topRows(n) = w_half * j;
  rhs.head(n) = w_half * b;
  Eigen::VectorXd reg(6);
  for (int k = 0; k < 6; ++k) reg(k) = std::sqrt(1.0 - p(k)) * s(k);
  a.bottomRows(6) = reg.asDiagonal() * u.transpose();
  return a.colPivHouseholderQr().solve(rhs);
}

IcpConfig tight_config(SolverMethod m) {
  IcpConfig cfg;
  cfg.method = m;
  cfg.robust = {RobustKind::L2, 1.0};
  cfg.max_plane_distance = 1e-6;
  return cfg;
}

}  // namespace

TEST(RobustWeight, Examples) {
  EXPECT_EQ(robust_weight({RobustKind::L2, 1.0}, 0.0), 1.0);
  EXPECT_EQ(robust_weight({RobustKind::L2, 1.0}, 123.0), 1.0);
  EXPECT_EQ(robust_weight({RobustKind::GemanMcClure, 0.03}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(robust_weight({RobustKind::GemanMcClure, 0.03}, 0.03), 0.5);
  const double w = robust_weight({RobustKind::GemanMcClure, 0.03}, 0.03);
  EXPECT_DOUBLE_EQ(w * w, 0.25);
}

TEST(Linearize, Examples) {
  PlaneFeature f;
  f.normal = Vec3::UnitZ();
  f.offset = 0.0;
  EXPECT_EQ(linearize(std::vector<PlaneFeature>{f}).rhs, Vec6::Zero());
  f.offset = 0.1;
  const HessianBundle b = linearize(std::vector<PlaneFeature>{f});
  EXPECT_DOUBLE_EQ(b.rhs(5), 0.1);
  // Solving pushes +z toward the plane.
  EXPECT_GT(b.rhs(5) / b.hessian(5, 5), 0.0);
}

TEST(Linearize, DoublingWeightsDoublesJacobianAndResidual) {
  Rng rng(1);
  auto fs = random_system(rng, 5);
  for (auto f : fs) {
    const Vec6 v = feature_vector(f);
    const double r = feature_residual(f);
    f.weight *= 2.0;
    EXPECT_EQ(feature_vector(f), 2.0 * v);
    EXPECT_EQ(feature_residual(f), 2.0 * r);
  }
}

TEST(SolveUpdate, ProbabilisticEqualsStandardWithoutNoise) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto fs = random_system(rng, 30);
    const HessianBundle b = linearize(fs);
    const UpdateSolution std_sol = solve_update(b, method::Standard{});
    const UpdateSolution prob = solve_update(b, method::Probabilistic{10.0});
    EXPECT_EQ(prob.probabilities, Vec6::Ones());
    EXPECT_LT(test::rel_diff(prob.twist.vector(), std_sol.twist.vector()), 1e-10);
  }
}

TEST(SolveUpdate, ZeroProbabilityDirectionGetsNoUpdate) {
  const SceneSample corridor = generate_scene(SceneSpec::make(SceneKind::Corridor, 600, 4));
  auto fs = exact_features(corridor);
  Rng rng(3);
  for (auto& f : fs) f.offset += rng.uniform(-0.01, 0.01);
  const UpdateSolution sol = solve_update(linearize(fs), method::Probabilistic{10.0});
  const auto& rep = sol.analysis.reports;
  EXPECT_EQ(rep[5].probability, 0.0);
  EXPECT_LT(std::abs(rep[5].direction.dot(sol.twist.vector())), 1e-12);
}

TEST(SolveUpdate, MatchesRegularizedLeastSquaresOracle) {
  Rng rng(4);
  for (int t = 0; t < 30; ++t) {
    const auto fs = random_system(rng, 25);
    const HessianBundle b = linearize(fs);
    const Eigenbasis basis = eigenbasis(b.hessian);
    Vec6 p;
    for (int k = 0; k < 6; ++k) p(k) = rng.uniform(0.01, 0.99);
    const Vec6 x = attenuated_update(basis, p, b.rhs);
    EXPECT_LT(test::rel_diff(x, regularized_least_squares(fs, p)), 1e-9);
  }
}

TEST(SolveUpdate, ProbabilisticUsesAnalysisProbabilities) {
  Rng rng(5);
  const auto fs = random_system(rng, 12, 0.05);
  const HessianBundle b = linearize(fs);
  const UpdateSolution sol = solve_update(b, method::Probabilistic{3.0});
  EXPECT_EQ(sol.probabilities, sol.analysis.probabilities());
  EXPECT_EQ(sol.analysis.reports[0].snr_target, 3.0);
  EXPECT_EQ(sol.twist.vector(), attenuated_update(sol.analysis.basis, sol.probabilities, b.rhs));
  EXPECT_LT(test::rel_diff(sol.twist.vector(), regularized_least_squares(fs, sol.probabilities)), 1e-9);
}

TEST(SolveUpdate, AttenuationIsComponentwise) {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto fs = random_system(rng, 10, 0.08);
    const HessianBundle b = linearize(fs);
    const UpdateSolution prob = solve_update(b, method::Probabilistic{10.0});
    const UpdateSolution std_sol = solve_update(b, method::Standard{});
    for (int k = 0; k < 6; ++k) {
      const Vec6 u = prob.analysis.basis.vectors.col(k);
      const double lhs = std::abs(u.dot(prob.twist.vector()));
      const double rhs = prob.probabilities(k) * std::abs(u.dot(std_sol.twist.vector()));
      EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std_sol.twist.vector().norm()));
    }
    EXPECT_LE(prob.twist.vector().norm(), std_sol.twist.vector().norm() + 1e-12);
  }
}

TEST(SolveUpdate, EigenTruncateWithZeroThresholdIsStandard) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const HessianBundle b = linearize(random_system(rng, 15));
    const Vec6 a = solve_update(b, method::EigenTruncate{0.0}).twist.vector();
    const Vec6 s = solve_update(b, method::Standard{}).twist.vector();
    EXPECT_LT(test::rel_diff(a, s), 1e-10);
  }
}

TEST(SolveUpdate, ThresholdBaselinesZeroTruncatedDirections) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const HessianBundle b = linearize(random_system(rng, 15));
    const Eigenbasis basis = eigenbasis(b.hessian);
    const double lambda_min = 0.5 * (basis.values(3) + basis.values(4));
    for (const SolverMethod m : {SolverMethod{method::EigenTruncate{lambda_min}},
                                 SolverMethod{method::SolutionRemap{lambda_min}}}) {
      const UpdateSolution sol = solve_update(b, m);
      EXPECT_EQ(sol.probabilities, (Vec6() << 1, 1, 1, 1, 0, 0).finished());
      for (int k : {4, 5}) EXPECT_LT(std::abs(basis.vectors.col(k).dot(sol.twist.vector())), 1e-12);
    }
    // Remap projects the full solution.
    const Vec6 full = solve_update(b, method::Standard{}).twist.vector();
    const Vec6 remap = solve_update(b, method::SolutionRemap{lambda_min}).twist.vector();
    for (int k = 0; k < 4; ++k) {
      const Vec6 u = basis.vectors.col(k);
      EXPECT_NEAR(u.dot(remap), u.dot(full), 1e-10 * std::max(1.0, full.norm()));
    }
  }
}

TEST(SolveUpdate, ConditionNumberGate) {
  Rng rng(9);
  const HessianBundle b = linearize(random_system(rng, 15));
  const Eigenbasis basis = eigenbasis(b.hessian);
  const double kappa = basis.values(0) / basis.values(2) * 1.0001;
  const UpdateSolution sol = solve_update(b, method::ConditionNumber{kappa});
  EXPECT_EQ(sol.probabilities, (Vec6() << 1, 1, 1, 0, 0, 0).finished());
  EXPECT_EQ(sol.twist.vector(), attenuated_update(basis, sol.probabilities, b.rhs));
}

TEST(SolveUpdate, StandardOnSingularHessianFails) {
  const SceneSample plane = generate_scene(SceneSpec::make(SceneKind::InfinitePlane, 200, 5));
  const HessianBundle b = linearize(exact_features(plane));
  try {
    solve_update(b, method::Standard{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SingularHessian);
  }
  EXPECT_TRUE(solve_update(b, method::Standard{1e-9}).twist.is_finite());
  EXPECT_TRUE(solve_update(b, method::SolutionRemap{1.0}).twist.is_finite());
}

TEST(SolveUpdate, InvariantUnderFeatureReordering) {
  Rng rng(10);
  auto fs = random_system(rng, 40, 0.02);
  const Vec6 a = solve_update(linearize(fs), method::Probabilistic{10.0}).twist.vector();
  std::reverse(fs.begin(), fs.end());
  std::swap(fs[3], fs[17]);
  const Vec6 b = solve_update(linearize(fs), method::Probabilistic{10.0}).twist.vector();
  EXPECT_LT(test::rel_diff(a, b), 1e-10);
}

TEST(SolveUpdate, RejectsInvalidMethods) {
  const HessianBundle b = linearize(std::vector<PlaneFeature>{PlaneFeature{}});
  EXPECT_THROW(solve_update(b, method::Probabilistic{0.0}), Error);
  EXPECT_THROW(solve_update(b, method::EigenTruncate{-1.0}), Error);
  EXPECT_THROW(solve_update(b, method::ConditionNumber{0.0}), Error);
  EXPECT_THROW(solve_update(HessianBundle{}, method::Probabilistic{}), Error);
  EXPECT_EQ(method_name(method::Standard{}), "standard");
  EXPECT_EQ(method_name(method::Probabilistic{}), "probabilistic");
  EXPECT_EQ(method_name(method::EigenTruncate{}), "eigen-truncate");
  EXPECT_EQ(method_name(method::SolutionRemap{}), "solution-remap");
  EXPECT_EQ(method_name(method::ConditionNumber{}), "cond-number");
}

TEST(InformationMatrix, Examples) {
  Rng rng(11);
  const Mat6 h = test::random_spd(rng);
  const Eigenbasis basis = eigenbasis(h);
  const double sr = 0.015;
  EXPECT_LT(test::rel_diff(information_matrix(Vec6::Ones(), basis, sr), h / (sr * sr)), 1e-12);
  Vec6 p = Vec6::Ones();
  p(2) = 0.0;
  const Mat6 info = information_matrix(p, basis, sr);
  const Vec6 u = basis.vectors.col(2);
  EXPECT_LT(std::abs(u.dot(info * u)), 1e-9);
  const Mat6 unit = information_matrix(Vec6::Ones(), eigenbasis(Mat6::Identity()), 0.015);
  EXPECT_LT((unit - Mat6::Identity() / (0.015 * 0.015)).norm(), 1e-9);
  EXPECT_THROW(information_matrix(p, basis, 0.0), Error);
}

TEST(InformationMatrix, SymmetricPsd) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const Eigenbasis basis = eigenbasis(test::random_spd(rng));
    Vec6 p;
    for (int k = 0; k < 6; ++k) p(k) = rng.uniform();
    const Mat6 info = information_matrix(p, basis, 0.02);
    EXPECT_EQ(info, info.transpose());
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat6>(info).eigenvalues().minCoeff(), -1e-9 * info.norm());
  }
}

TEST(BuildFeatures, LocalFrameAndCounters) {
  const ScanPair pair = simulate_scan_pair(SceneSpec::make(SceneKind::Room, 1500, 6), 0.0);
  IcpConfig cfg = tight_config(method::Probabilistic{});
  cfg.sigma_p = 0.0;
  const KdTree index(pair.target);
  const Pose pose = pose_from_yaw(0.01, Vec3(0.02, -0.01, 0.0));
  const FeatureSet fs = build_features(pair.source, index, pose, cfg);
  const auto& st = fs.stats;
  EXPECT_EQ(st.candidates, pair.source.size());
  EXPECT_EQ(st.accepted, fs.features.size());
  EXPECT_EQ(st.candidates, st.too_far + st.fit_failed + st.non_planar + st.outliers + st.accepted);
  EXPECT_GT(st.accepted, 500u);
  for (const auto& f : fs.features) {
    EXPECT_NEAR(f.normal.norm(), 1.0, 1e-12);
    EXPECT_LT(std::abs(f.normal.dot(f.point) - f.offset), 0.05);
    EXPECT_LT((f.normal_cov * f.normal).norm(), 1e-10);
    EXPECT_EQ(f.weight, 1.0);
  }
}

TEST(BuildFeatures, FarPointsAreRejected) {
  const std::vector<Vec3> target{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 0}};
  const std::vector<Vec3> source{{0.5, 0.5, 5.0}};
  const KdTree index(target);
  IcpConfig cfg;
  const FeatureSet fs = build_features(source, index, Pose::identity(), cfg);
  EXPECT_EQ(fs.stats.too_far, 1u);
  EXPECT_TRUE(fs.features.empty());
  try {
    icp(source, target, Pose::identity(), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoCorrespondences);
  }
}

TEST(Icp, SelfRegistrationIsIdentity) {
  const SceneSample room = generate_scene(SceneSpec::make(SceneKind::Room, 2000, 7));
  IcpConfig cfg = tight_config(method::Probabilistic{});
  cfg.sigma_p = 0.0;
  cfg.sigma_i = 0.0;
  const RegistrationResult r = icp(room.points, room.points, Pose::identity(), cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations.size(), 2u);
  EXPECT_LT((r.pose.matrix() - Mat4::Identity()).norm(), 1e-9);
}

TEST(Icp, RoomOffsetIsRecovered) {
  const ScanPair pair = simulate_scan_pair(SceneSpec::make(SceneKind::Room, 2000, 8), 0.01);
  const Pose init = pose_from_yaw(2.0 * std::numbers::pi / 180.0, Vec3(0.1, 0.1, 0.05));
  for (const SolverMethod m : {SolverMethod{method::Standard{}}, SolverMethod{method::Probabilistic{}}}) {
    IcpConfig cfg;
    cfg.method = m;
    const RegistrationResult r = icp(pair.source, pair.target, init, cfg);
    const Pose err = compose(inverse(pair.truth), r.pose);
    EXPECT_LT(err.translation.norm(), 5e-3) << method_name(m);
    EXPECT_LT(rotation_angle(err.rotation) * 180.0 / std::numbers::pi, 0.1) << method_name(m);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations.size(), 30u);
    EXPECT_TRUE(r.pose.is_valid(1e-9));
  }
}

TEST(Icp, CorridorKeepsLongitudinalInitialError) {
  const ScanPair pair = simulate_scan_pair(SceneSpec::make(SceneKind::Corridor, 2000, 9), 0.01);
  const Pose init{Mat3::Identity(), Vec3(0.2, 0.03, -0.02)};
  IcpConfig cfg;
  const RegistrationResult r = icp(pair.source, pair.target, init, cfg);
  EXPECT_LT(std::abs(r.pose.translation.x() - 0.2), 1e-3);
  EXPECT_LT(std::abs(r.pose.translation.y()), 5e-3);
  EXPECT_LT(std::abs(r.pose.translation.z()), 5e-3);
  // The world information matrix carries (almost) nothing along x.
  const Mat6 info = r.information;
  EXPECT_LT(info(3, 3), 1e-3 * info.diagonal().maxCoeff());
}

TEST(Icp, InformationIsConjugatedToWorldFrame) {
  const ScanPair pair = simulate_scan_pair(SceneSpec::make(SceneKind::Room, 1000, 10), 0.01);
  const Pose init = pose_from_yaw(0.05, Vec3(0.3, -0.2, 0.1));
  IcpConfig cfg;
  cfg.max_iterations = 3;
  const RegistrationResult r = icp(pair.source, pair.target, init, cfg);
  const IterationRecord& last = r.iterations.back();
  const Mat6 m = frame_change_matrix(last.pose_before);
  EXPECT_LT(test::rel_diff(r.information, m * last.update.information * m.transpose()), 1e-12);
  EXPECT_LT(test::rel_diff(last.world_twist, twist_adjoint(last.pose_before) * last.update.twist.vector()), 1e-12);
  EXPECT_EQ(r.termination, r.converged ? Termination::Converged : Termination::MaxIterations);
}

TEST(Icp, IsDeterministic) {
  const ScanPair pair = simulate_scan_pair(SceneSpec::make(SceneKind::Cylinder, 1500, 11), 0.01);
  const Pose init = pose_from_yaw(0.02, Vec3(0.05, 0.05, 0.0));
  IcpConfig cfg;
  const RegistrationResult a = icp(pair.source, pair.target, init, cfg);
  const RegistrationResult b = icp(pair.source, pair.target, init, cfg);
  EXPECT_EQ(a.pose.matrix(), b.pose.matrix());
  EXPECT_EQ(a.information, b.information);
  EXPECT_EQ(a.iterations.size(), b.iterations.size());
}

TEST(IcpConfigTest, Validation) {
  IcpConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.k_neighbors = 2;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = IcpConfig{};
  cfg.sigma_r = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = IcpConfig{};
  cfg.max_iterations = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = IcpConfig{};
  cfg.robust = {RobustKind::GemanMcClure, 0.0};
  EXPECT_THROW(cfg.validate(), Error);
}
