#include "support.hpp"

#include <cstdlib>

using namespace degen_icp;

namespace {

const SceneKind kAllKinds[] = {SceneKind::InfinitePlane, SceneKind::Corridor, SceneKind::Cylinder,
                               SceneKind::CylinderWithFloor, SceneKind::Room};

std::size_t expected_null_dimension(SceneKind k) {
  switch (k) {
    case SceneKind::InfinitePlane: return 3;
    case SceneKind::Corridor: return 1;
    case SceneKind::Cylinder: return 2;
    case SceneKind::CylinderWithFloor: return 1;
    case SceneKind::Room: return 0;
  }
  return 99;
}

}  // namespace

TEST(Rng, DeterministicStreams) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  Rng s1 = Rng::stream(7, 3), s2 = Rng::stream(7, 3), s3 = Rng::stream(7, 4);
  EXPECT_EQ(s1.next(), s2.next());
  EXPECT_NE(Rng::stream(7, 3).next(), s3.next());
}

TEST(Rng, NormalMoments) {
  Rng rng(5);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n, var = sum2 / n - mean * mean;
  EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(n));
  EXPECT_LT(std::abs(var - 1.0), 4.0 * std::sqrt(2.0 / n));
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(ParallelChunks, CoversRangeOnceAndPropagatesErrors) {
  std::vector<int> hits(1000, 0);
  parallel_chunks(hits.size(), 37, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) ++hits[i];
  });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_chunks(100, 10,
                               [](std::size_t b, std::size_t) {
                                 if (b == 50) throw std::runtime_error("boom");
                               }),
               std::runtime_error);
  parallel_chunks(0, 10, [](std::size_t, std::size_t) { FAIL(); });
}

TEST(ParallelChunks, WorkerCapFromEnvironment) {
  ::setenv("DEGEN_ICP_THREADS", "1", 1);
  EXPECT_EQ(worker_count(), 1u);
  ::unsetenv("DEGEN_ICP_THREADS");
  EXPECT_GE(worker_count(), 1u);
}

TEST(GenerateScene, NullBasisMatchesNoiseFreeHessian) {
  for (SceneKind k : kAllKinds) {
    const SceneSample s = generate_scene(SceneSpec::make(k, 1500, 3));
    EXPECT_EQ(s.null_basis.size(), expected_null_dimension(k)) << to_string(k);
    const Mat6 h = accumulate(exact_features(s)).hessian;
    for (const Vec6& u : s.null_basis) {
      EXPECT_NEAR(u.norm(), 1.0, 1e-12);
      EXPECT_LE((h * u).norm(), 1e-9 * h.norm()) << to_string(k);
    }
    // The remaining directions are constrained.
    const Eigenbasis e = eigenbasis(h);
    const auto rank = 6 - s.null_basis.size();
    EXPECT_GT(e.values(static_cast<int>(rank) - 1), 1e-6 * e.values(0)) << to_string(k);
  }
}

TEST(GenerateScene, PointsLieOnUnitNormalPlanes) {
  for (SceneKind k : kAllKinds) {
    const SceneSample s = generate_scene(SceneSpec::make(k, 1000, 4));
    ASSERT_EQ(s.points.size(), 1000u);
    ASSERT_EQ(s.normals.size(), 1000u);
    ASSERT_EQ(s.offsets.size(), 1000u);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      EXPECT_NEAR(s.normals[i].norm(), 1.0, 1e-12);
      EXPECT_LE(std::abs(s.normals[i].dot(s.points[i]) - s.offsets[i]), 1e-12);
    }
  }
}

TEST(GenerateScene, RoomIsFullyConstrained) {
  const SceneSample s = generate_scene(SceneSpec::make(SceneKind::Room, 2000, 5));
  EXPECT_TRUE(s.null_basis.empty());
  EXPECT_GT(eigenbasis(accumulate(exact_features(s)).hessian).values(5), 0.0);
}

TEST(GenerateScene, PlaneNullSpace) {
  const SceneSample s = generate_scene(SceneSpec::make(SceneKind::InfinitePlane, 500, 6));
  const Mat6 h = accumulate(exact_features(s)).hessian;
  for (int j : {2, 3, 4}) EXPECT_LE((h * Vec6::Unit(j)).norm(), 1e-9 * h.norm());
}

TEST(GenerateScene, PaperTankCylinder) {
  const SceneSpec spec = SceneSpec::make(SceneKind::Cylinder, 2000, 7);
  EXPECT_EQ(spec.dimensions, (std::vector<double>{8.0, 16.0}));
  const SceneSample s = generate_scene(spec);
  ASSERT_EQ(s.null_basis.size(), 2u);
  const Mat6 h = accumulate(exact_features(s)).hessian;
  for (int j : {2, 5}) EXPECT_LE((h * Vec6::Unit(j)).norm(), 1e-9 * h.norm());
}

TEST(GenerateScene, InvalidDimensions) {
  SceneSpec spec = SceneSpec::make(SceneKind::Room);
  spec.dimensions = {4.0, -3.0, 2.5};
  try {
    generate_scene(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidDimensions);
  }
  spec = SceneSpec::make(SceneKind::Room);
  spec.dimensions = {4.0};
  EXPECT_THROW(generate_scene(spec), Error);
  spec = SceneSpec::make(SceneKind::Room, 3);
  EXPECT_THROW(generate_scene(spec), Error);
}

TEST(GenerateScene, DeterministicGivenSeed) {
  const SceneSample a = generate_scene(SceneSpec::make(SceneKind::Corridor, 500, 9));
  const SceneSample b = generate_scene(SceneSpec::make(SceneKind::Corridor, 500, 9));
  const SceneSample c = generate_scene(SceneSpec::make(SceneKind::Corridor, 500, 10));
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.points, c.points);
}

TEST(SceneKindNames, RoundTrip) {
  for (SceneKind k : kAllKinds) EXPECT_EQ(parse_scene_kind(to_string(k)), k);
  EXPECT_THROW(parse_scene_kind("torus"), Error);
}

TEST(ApplyNoise, ZeroNoiseReproducesSample) {
  const SceneSample s = generate_scene(SceneSpec::make(SceneKind::Room, 300, 11));
  const auto fs = apply_noise(s, NoiseSpec{0.0, 0.0, 1});
  for (std::size_t i = 0; i < fs.size(); ++i) {
    EXPECT_EQ(fs[i].point, s.points[i]);
    EXPECT_EQ(fs[i].normal, s.normals[i]);
    EXPECT_EQ(fs[i].offset, s.offsets[i]);
    EXPECT_EQ(fs[i].point_cov, Mat3::Zero());
  }
}

TEST(ApplyNoise, PointNoiseStatistics) {
  const SceneSample s = generate_scene(SceneSpec::make(SceneKind::Room, 5000, 12));
  const double sigma = 0.01;
  const auto fs = apply_noise(s, NoiseSpec{sigma, 0.0, 2});
  double sum2 = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) sum2 += (fs[i].point - s.points[i]).squaredNorm();
  const double n = 3.0 * static_cast<double>(fs.size());
  const double std_est = std::sqrt(sum2 / n);
  EXPECT_LT(std::abs(std_est - sigma), 3.0 * sigma / std::sqrt(2.0 * n) + 3.0 * sigma / std::sqrt(n));
  for (const auto& f : fs) EXPECT_EQ(f.point_cov, sigma * sigma * Mat3::Identity());
}

TEST(ApplyNoise, NormalNoiseIsTangentAndCovarianceRestricted) {
  const SceneSample s = generate_scene(SceneSpec::make(SceneKind::InfinitePlane, 2000, 13));
  const double sn = 0.01;
  const auto fs = apply_noise(s, NoiseSpec{0.0, sn, 3});
  double sum2 = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    EXPECT_NEAR(fs[i].normal.norm(), 1.0, 1e-12);
    EXPECT_LT((fs[i].normal_cov * fs[i].normal).norm(), 1e-15);
    EXPECT_NEAR(fs[i].normal_cov.trace(), 2.0 * sn * sn, 1e-15);
    sum2 += (fs[i].normal - s.normals[i]).squaredNorm();
  }
  // Tangent angle std per axis ~ sn: E|n_hat - n|^2 ~ 2 sn^2.
  EXPECT_NEAR(sum2 / fs.size(), 2.0 * sn * sn, 0.15 * 2.0 * sn * sn);
}

TEST(ApplyNoise, DeterministicGivenSeed) {
  const SceneSample s = generate_scene(SceneSpec::make(SceneKind::Cylinder, 400, 14));
  const auto a = apply_noise(s, NoiseSpec{0.01, 0.01, 77});
  const auto b = apply_noise(s, NoiseSpec{0.01, 0.01, 77});
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].point, b[i].point);
    EXPECT_EQ(a[i].normal, b[i].normal);
  }
  EXPECT_THROW(apply_noise(s, NoiseSpec{-1.0, 0.0, 1}), Error);
}

TEST(McHessianStats, ZeroNoiseIsExact) {
  const auto fs = random_features(30, 1);
  Rng rng(2);
  const Vec6 u = random_direction(rng);
  const MomentEstimate m = mc_hessian_stats(fs, NoiseSpec{0.0, 0.0, 3}, u, 1000);
  const double exact = u.dot(accumulate(fs).hessian * u);
  EXPECT_NEAR(m.mean, exact, 1e-12 * exact);
  EXPECT_LT(m.variance, 1e-20 * exact * exact);
  EXPECT_EQ(m.trials, 1000u);
}

TEST(McHessianStats, SingleFeatureTranslationDirection) {
  PlaneFeature f;
  f.normal = Vec3::UnitZ();
  const double sn = 0.01;
  const std::vector<PlaneFeature> fs{f};
  const MomentEstimate m =
      mc_hessian_stats(fs, NoiseSpec{0.0, sn, 4, NormalNoiseModel::SmallAngle}, Vec6::Unit(3), 100000);
  EXPECT_NEAR(m.mean, sn * sn, 3.0 * m.standard_error());
  // (sn g)^2 with g standard normal: central fourth moment 60 sn^8, so the
  // sample variance has standard error sqrt((60 - 4) / n) sn^4.
  EXPECT_NEAR(m.variance, 2.0 * std::pow(sn, 4), 4.0 * std::sqrt(56.0 / 100000.0) * std::pow(sn, 4));
}

TEST(McHessianStats, AgreesWithAnalyticMoments) {
  auto fs = random_features(100, 5);
  set_isotropic_covariances(fs, 0.01, 0.01);
  Rng rng(6);
  std::vector<Vec6> dirs;
  for (int i = 0; i < 4; ++i) dirs.push_back(random_direction(rng));
  const auto mc = mc_hessian_stats(fs, NoiseSpec{0.01, 0.01, 7, NormalNoiseModel::SmallAngle}, dirs, 20000);
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const MomentEstimate a = analytic_moments(fs, dirs[d]);
    EXPECT_LT(std::abs(mc[d].mean - a.mean), 4.0 * mc[d].standard_error());
    EXPECT_LT(std::abs(mc[d].variance - a.variance), 0.10 * a.variance);
  }
}

TEST(McHessianStats, MeanErrorShrinksWithTrials) {
  auto fs = random_features(50, 8);
  set_isotropic_covariances(fs, 0.01, 0.01);
  Rng rng(9);
  std::vector<Vec6> dirs;
  for (int i = 0; i < 8; ++i) dirs.push_back(random_direction(rng));
  const NoiseSpec noise{0.01, 0.01, 10, NormalNoiseModel::SmallAngle};
  const auto small = mc_hessian_stats(fs, noise, dirs, 1000);
  const auto large = mc_hessian_stats(fs, noise, dirs, 100000);
  double err_small = 0.0, err_large = 0.0;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const double a = analytic_moments(fs, dirs[d]).mean;
    err_small += std::abs(small[d].mean - a) / a;
    err_large += std::abs(large[d].mean - a) / a;
  }
  EXPECT_LT(err_large, err_small);
}

TEST(McHessianStats, IndependentOfWorkerCount) {
  auto fs = random_features(20, 11);
  set_isotropic_covariances(fs, 0.01, 0.02);
  Rng rng(12);
  const Vec6 u = random_direction(rng);
  const NoiseSpec noise{0.01, 0.02, 13, NormalNoiseModel::SmallAngle};
  ::setenv("DEGEN_ICP_THREADS", "1", 1);
  const MomentEstimate a = mc_hessian_stats(fs, noise, u, 3000);
  ::unsetenv("DEGEN_ICP_THREADS");
  const MomentEstimate b = mc_hessian_stats(fs, noise, u, 3000);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
}

TEST(SpuriousInfo, ZeroNoiseHasNoBias) {
  const SceneSample s = generate_scene(SceneSpec::make(SceneKind::InfinitePlane, 300, 14));
  SpuriousInfoOptions opt;
  opt.trials = 50;
  opt.solve_trials = 10;
  const SpuriousInfoReport r = spurious_info_demo(s, 0.0, opt);
  EXPECT_EQ(r.noise_information, Mat6::Zero());
  EXPECT_LT((r.mean_hessian - r.hessian).norm(), 1e-12 * r.hessian.norm());
  for (const auto& nd : r.null_directions) {
    EXPECT_LT(nd.standard_mean_abs, 1e-9);
    EXPECT_EQ(nd.probabilistic_mean_abs, 0.0);
  }
}

TEST(SpuriousInfo, RequiresDegenerateScene) {
  const SceneSample s = generate_scene(SceneSpec::make(SceneKind::Room, 300, 15));
  try {
    spurious_info_demo(s, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RequiresDegenerateScene);
  }
}

TEST(SpuriousInfo, ProbabilisticSuppressesNullDirectionBias) {
  const SceneSample s = generate_scene(SceneSpec::make(SceneKind::InfinitePlane, 1000, 16));
  SpuriousInfoOptions opt;
  opt.trials = 2000;
  opt.solve_trials = 100;
  opt.seed = 17;
  const SpuriousInfoReport r = spurious_info_demo(s, 0.01, opt);
  ASSERT_EQ(r.null_directions.size(), 3u);
  for (const auto& nd : r.null_directions) EXPECT_LE(10.0 * nd.probabilistic_mean_abs, nd.standard_mean_abs);
  // H_N is the sum of sigma_n^2 F (I - n n^T) F^T; a tangent-noise expectation.
  EXPECT_GT(r.noise_information.norm(), 0.0);
  EXPECT_LT(r.relative_error, 0.25);
}

TEST(ScanPair, SensorFrameSourceMatchesTruth) {
  const Pose truth = pose_from_yaw(0.1, Vec3(0.5, -0.2, 0.1));
  const ScanPair pair = simulate_scan_pair(SceneSpec::make(SceneKind::Room, 500, 18), 0.0, truth);
  ASSERT_EQ(pair.source.size(), 500u);
  // Noise-free scan points in the world frame lie on one of the room planes.
  std::vector<std::pair<Vec3, double>> planes;
  for (std::size_t i = 0; i < pair.scene.points.size(); ++i) planes.emplace_back(pair.scene.normals[i], pair.scene.offsets[i]);
  for (const auto& p : pair.source) {
    const Vec3 w = truth * p;
    double best = 1e9;
    for (const auto& [n, d] : planes) best = std::min(best, std::abs(n.dot(w) - d));
    EXPECT_LT(best, 1e-9);
  }
}
