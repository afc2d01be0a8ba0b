#ifndef DEGEN_ICP_SIMULATION_HPP
#define DEGEN_ICP_SIMULATION_HPP

// Synthetic scenes with analytically known null spaces, noise injection, and
// Monte Carlo oracles for the closed-form Hessian noise statistics.
//
// All scenes are expressed in the sensor frame with the sensor at the origin.
// Axis conventions:
//   InfinitePlane      square plane z = -h, normal +z          null {r_z, t_x, t_y}
//   Corridor           along x; walls y = +-W/2 and floor z = -h   null {t_x}
//   Cylinder           wall only, axis z, z in [-H/2, H/2]     null {r_z, t_z}
//   CylinderWithFloor  as Cylinder plus floor disk at z = -H/2 null {r_z}
//   Room               closed box centered at the origin       null {}
// Normals point toward the sensor.

#include <degen_icp/degeneracy.hpp>
#include <degen_icp/geometry.hpp>
#include <degen_icp/kdtree.hpp>
#include <degen_icp/parallel.hpp>
#include <degen_icp/random.hpp>
#include <degen_icp/registration.hpp>
#include <degen_icp/types.hpp>

#include <Eigen/Cholesky>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace degen_icp {

enum class SceneKind { InfinitePlane, Corridor, Cylinder, CylinderWithFloor, Room };

inline const char* to_string(SceneKind k) {
  switch (k) {
    case SceneKind::InfinitePlane: return "plane";
    case SceneKind::Corridor: return "corridor";
    case SceneKind::Cylinder: return "cylinder";
    case SceneKind::CylinderWithFloor: return "cylinder-floor";
    case SceneKind::Room: return "room";
  }
  return "unknown";
}

inline SceneKind parse_scene_kind(const std::string& s) {
  if (s == "plane" || s == "infinite-plane") return SceneKind::InfinitePlane;
  if (s == "corridor") return SceneKind::Corridor;
  if (s == "cylinder") return SceneKind::Cylinder;
  if (s == "cylinder-floor" || s == "cylinder-with-floor") return SceneKind::CylinderWithFloor;
  if (s == "room") return SceneKind::Room;
  throw Error(Errc::InvalidArgument, "unknown scene kind '" + s + "'");
}

/// Kind-specific dimensions (m):
///   InfinitePlane      {size_x, size_y, sensor_height}
///   Corridor           {length, width, wall_height, sensor_height}
///   Cylinder(+Floor)   {radius, height}
///   Room               {size_x, size_y, size_z}
inline std::vector<double> default_dimensions(SceneKind k) {
  switch (k) {
    case SceneKind::InfinitePlane: return {20.0, 20.0, 1.5};
    case SceneKind::Corridor: return {20.0, 3.0, 2.5, 1.2};
    case SceneKind::Cylinder:
    case SceneKind::CylinderWithFloor: return {8.0, 16.0};
    case SceneKind::Room: return {4.0, 3.0, 2.5};
  }
  return {};
}

struct SceneSpec {
  SceneKind kind = SceneKind::Room;
  std::vector<double> dimensions = default_dimensions(SceneKind::Room);
  std::size_t point_count = 2000;
  std::uint64_t seed = 0;

  static SceneSpec make(SceneKind kind, std::size_t points = 2000, std::uint64_t seed = 0) {
    return {kind, default_dimensions(kind), points, seed};
  }
};

struct SceneSample {
  SceneKind kind = SceneKind::Room;
  std::vector<Vec3> points;
  std::vector<Vec3> normals;     // true plane normal per point
  std::vector<double> offsets;   // true plane offset per point, normal . x = offset
  std::vector<int> surface_ids;  // which generating surface
  std::vector<Vec6> null_basis;  // noise-free Hessian null space, sensor frame
  Vec3 sensor_origin = Vec3::Zero();
};

enum class NormalNoiseModel {
  Rotation,    // n_hat = Exp(eta)^T n, unit length
  SmallAngle,  // n_hat = n + skew(n) eta, first order
};

struct NoiseSpec {
  double sigma_p = 0.0;
  double sigma_n = 0.0;
  std::uint64_t seed = 0;
  NormalNoiseModel model = NormalNoiseModel::Rotation;
};

inline Vec6 unit6(int k) { return Vec6::Unit(k); }

namespace detail {

inline void validate_scene(const SceneSpec& spec) {
  const auto expected = default_dimensions(spec.kind).size();
  if (spec.dimensions.size() != expected) {
    throw Error(Errc::InvalidDimensions, std::string(to_string(spec.kind)) + " expects " + std::to_string(expected) +
                                             " dimensions, got " + std::to_string(spec.dimensions.size()));
  }
  for (double d : spec.dimensions) {
    if (!(d > 0.0) || !std::isfinite(d)) throw Error(Errc::InvalidDimensions, "dimensions must be positive");
  }
  if (spec.point_count < 6) throw Error(Errc::InvalidDimensions, "point_count must be at least 6");
}

struct Surface {
  double area;
  // Maps two uniforms to (point, normal, offset).
  std::function<void(double, double, Vec3&, Vec3&, double&)> sample;
};

inline Surface rectangle(const Vec3& origin, const Vec3& edge_a, const Vec3& edge_b, const Vec3& normal) {
  const double d = normal.dot(origin);
  return {edge_a.norm() * edge_b.norm(), [=](double u, double v, Vec3& p, Vec3& n, double& off) {
            p = origin + u * edge_a + v * edge_b;
            n = normal;
            off = d;
          }};
}

/// Orthonormal tangent pair (t1, t2) with t1 x t2 = n.
inline std::pair<Vec3, Vec3> tangent_basis(const Vec3& n) {
  const Vec3 a = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 t1 = n.cross(a).normalized();
  const Vec3 t2 = n.cross(t1);
  return {t1, t2};
}

}  // namespace detail

inline SceneSample generate_scene(const SceneSpec& spec) {
  detail::validate_scene(spec);
  const auto& dim = spec.dimensions;
  std::vector<detail::Surface> surfaces;
  SceneSample out;
  out.kind = spec.kind;

  switch (spec.kind) {
    case SceneKind::InfinitePlane: {
      const double a = dim[0], b = dim[1], h = dim[2];
      surfaces.push_back(detail::rectangle({-a / 2, -b / 2, -h}, {a, 0, 0}, {0, b, 0}, Vec3::UnitZ()));
      out.null_basis = {unit6(2), unit6(3), unit6(4)};
      break;
    }
    case SceneKind::Corridor: {
      const double len = dim[0], w = dim[1], wall = dim[2], h = dim[3];
      surfaces.push_back(detail::rectangle({-len / 2, -w / 2, -h}, {len, 0, 0}, {0, w, 0}, Vec3::UnitZ()));
      surfaces.push_back(detail::rectangle({-len / 2, w / 2, -h}, {len, 0, 0}, {0, 0, wall}, -Vec3::UnitY()));
      surfaces.push_back(detail::rectangle({-len / 2, -w / 2, -h}, {len, 0, 0}, {0, 0, wall}, Vec3::UnitY()));
      out.null_basis = {unit6(3)};
      break;
    }
    case SceneKind::Cylinder:
    case SceneKind::CylinderWithFloor: {
      const double r = dim[0], height = dim[1];
      surfaces.push_back({2.0 * std::numbers::pi * r * height, [=](double u, double v, Vec3& p, Vec3& n, double& off) {
                            const double th = 2.0 * std::numbers::pi * u;
                            p = Vec3(r * std::cos(th), r * std::sin(th), -height / 2 + height * v);
                            n = Vec3(-std::cos(th), -std::sin(th), 0.0);
                            off = -r;
                          }});
      if (spec.kind == SceneKind::CylinderWithFloor) {
        surfaces.push_back({std::numbers::pi * r * r, [=](double u, double v, Vec3& p, Vec3& n, double& off) {
                              const double th = 2.0 * std::numbers::pi * u;
                              const double rad = r * std::sqrt(v);
                              p = Vec3(rad * std::cos(th), rad * std::sin(th), -height / 2);
                              n = Vec3::UnitZ();
                              off = -height / 2;
                            }});
        out.null_basis = {unit6(2)};
      } else {
        out.null_basis = {unit6(2), unit6(5)};
      }
      break;
    }
    case SceneKind::Room: {
      const double x = dim[0], y = dim[1], z = dim[2];
      const Vec3 lo(-x / 2, -y / 2, -z / 2), hi(x / 2, y / 2, z / 2);
      surfaces.push_back(detail::rectangle(lo, {x, 0, 0}, {0, y, 0}, Vec3::UnitZ()));
      surfaces.push_back(detail::rectangle({lo.x(), lo.y(), hi.z()}, {x, 0, 0}, {0, y, 0}, -Vec3::UnitZ()));
      surfaces.push_back(detail::rectangle(lo, {x, 0, 0}, {0, 0, z}, Vec3::UnitY()));
      surfaces.push_back(detail::rectangle({lo.x(), hi.y(), lo.z()}, {x, 0, 0}, {0, 0, z}, -Vec3::UnitY()));
      surfaces.push_back(detail::rectangle(lo, {0, y, 0}, {0, 0, z}, Vec3::UnitX()));
      surfaces.push_back(detail::rectangle({hi.x(), lo.y(), lo.z()}, {0, y, 0}, {0, 0, z}, -Vec3::UnitX()));
      break;
    }
  }

  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& s : surfaces) cumulative.push_back(total += s.area);

  Rng rng(spec.seed);
  out.points.reserve(spec.point_count);
  for (std::size_t i = 0; i < spec.point_count; ++i) {
    const double pick = rng.uniform() * total;
    std::size_t sid = 0;
    while (sid + 1 < surfaces.size() && pick >= cumulative[sid]) ++sid;
    const double u = rng.uniform();
    const double v = rng.uniform();
    Vec3 p, n;
    double off = 0.0;
    surfaces[sid].sample(u, v, p, n, off);
    out.points.push_back(p);
    out.normals.push_back(n);
    out.offsets.push_back(off);
    out.surface_ids.push_back(static_cast<int>(sid));
  }
  return out;
}

/// Noise-free unit-weight features of a sample, covariances zero.
inline std::vector<PlaneFeature> exact_features(const SceneSample& sample) {
  std::vector<PlaneFeature> out(sample.points.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].point = sample.points[i];
    out[i].normal = sample.normals[i];
    out[i].offset = sample.offsets[i];
  }
  return out;
}

/// Covariances sigma_p^2 I and sigma_n^2 (I - n n^T) (tangent-plane restriction).
inline void set_isotropic_covariances(std::span<PlaneFeature> features, double sigma_p, double sigma_n) {
  for (auto& f : features) {
    const Vec3 n = f.normal.normalized();
    f.point_cov = sigma_p * sigma_p * Mat3::Identity();
    f.normal_cov = sigma_n * sigma_n * (Mat3::Identity() - n * n.transpose());
  }
}

/// Draws one noisy feature per sample point. The noisy plane offset keeps the
/// plane through q = d n (foot of the perpendicular from the sensor):
/// d_hat = n_hat . q. Deterministic given noise.seed.
inline std::vector<PlaneFeature> apply_noise(const SceneSample& sample, const NoiseSpec& noise) {
  if (!(noise.sigma_p >= 0.0) || !(noise.sigma_n >= 0.0)) throw Error(Errc::InvalidArgument, "noise stds must be nonnegative");
  Rng rng(noise.seed);
  std::vector<PlaneFeature> out(sample.points.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Vec3& p = sample.points[i];
    const Vec3& n = sample.normals[i];
    const double d = sample.offsets[i];
    const Vec3 eps(noise.sigma_p * rng.normal(), noise.sigma_p * rng.normal(), noise.sigma_p * rng.normal());
    const auto [t1, t2] = detail::tangent_basis(n);
    const double g1 = rng.normal(), g2 = rng.normal();
    const Vec3 eta = noise.sigma_n * (g1 * t1 + g2 * t2);
    const Vec3 n_hat = noise.model == NormalNoiseModel::Rotation ? Vec3(exp_so3(-eta) * n) : Vec3(n + n.cross(eta));

    PlaneFeature& f = out[i];
    f.point = p + eps;
    f.normal = n_hat;
    f.offset = d + (n_hat - n).dot(d * n);
    f.weight = 1.0;
    const Vec3 nu = n_hat.normalized();
    f.point_cov = noise.sigma_p * noise.sigma_p * Mat3::Identity();
    f.normal_cov = noise.sigma_n * noise.sigma_n * (Mat3::Identity() - nu * nu.transpose());
  }
  return out;
}

/// Random noise-free features: points uniform in [-extent, extent]^3, random
/// unit normals, weights uniform in [0.5, 1.5], offsets putting each point on
/// its plane.
inline std::vector<PlaneFeature> random_features(std::size_t count, std::uint64_t seed, double extent = 5.0) {
  Rng rng(seed);
  std::vector<PlaneFeature> out(count);
  for (auto& f : out) {
    f.point = Vec3(rng.uniform(-extent, extent), rng.uniform(-extent, extent), rng.uniform(-extent, extent));
    Vec3 n;
    do {
      n = Vec3(rng.normal(), rng.normal(), rng.normal());
    } while (n.norm() < 1e-6);
    f.normal = n.normalized();
    f.offset = f.normal.dot(f.point);
    f.weight = rng.uniform(0.5, 1.5);
  }
  return out;
}

/// Unit direction with uniformly random orientation.
inline Vec6 random_direction(Rng& rng) {
  Vec6 u;
  do {
    for (int k = 0; k < 6; ++k) u(k) = rng.normal();
  } while (u.norm() < 1e-6);
  return u.normalized();
}

struct MomentEstimate {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t trials = 0;

  double standard_error() const { return trials > 0 ? std::sqrt(variance / static_cast<double>(trials)) : 0.0; }
};

/// Closed-form E[u^T H_hat u] and var(u^T H_hat u) from true features that
/// carry their noise covariances: (u^T H u + mu_u, sigma_u^2).
inline MomentEstimate analytic_moments(std::span<const PlaneFeature> true_features, const Vec6& u) {
  const HessianBundle b = accumulate(true_features);
  const DirectionStats st = direction_stats(b, u);
  return {u.dot(b.hessian * u) + st.mu, st.sigma2, 0};
}

/// Monte Carlo oracle: samples eps ~ N(0, sigma_p^2 I) and tangent
/// eta ~ N(0, sigma_n^2) per feature, forms the exact
/// v_hat = w [(p + eps) x n_hat; n_hat] with n_hat = n + skew(n) eta
/// (including the eps-eta cross term) and returns the sample mean and
/// unbiased variance of u^T H_hat u for every direction. Trial t draws from
/// Rng::stream(noise.seed, t).
inline std::vector<MomentEstimate> mc_hessian_stats(std::span<const PlaneFeature> features, const NoiseSpec& noise,
                                                    std::span<const Vec6> directions, std::size_t trials) {
  const std::size_t nd = directions.size();
  std::vector<MomentEstimate> out(nd);
  if (trials == 0 || nd == 0) return out;

  struct Prepared {
    Vec3 p, n, nt1, nt2;
    double w;
  };
  std::vector<Prepared> prep;
  prep.reserve(features.size());
  for (const auto& f : features) {
    const auto [t1, t2] = detail::tangent_basis(f.normal.normalized());
    prep.push_back({f.point, f.normal, f.normal.cross(t1), f.normal.cross(t2), f.weight});
  }
  Eigen::Matrix<double, 6, Eigen::Dynamic> dirs(6, nd);
  for (std::size_t d = 0; d < nd; ++d) dirs.col(d) = directions[d];

  std::vector<double> values(trials * nd, 0.0);
  parallel_chunks(trials, 512, [&](std::size_t begin, std::size_t end) {
    Eigen::Matrix<double, Eigen::Dynamic, 1> acc(nd);
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = Rng::stream(noise.seed, t);
      acc.setZero();
      for (const auto& f : prep) {
        const Vec3 eps(noise.sigma_p * rng.normal(), noise.sigma_p * rng.normal(), noise.sigma_p * rng.normal());
        const double g1 = noise.sigma_n * rng.normal();
        const double g2 = noise.sigma_n * rng.normal();
        const Vec3 n_hat = f.n + g1 * f.nt1 + g2 * f.nt2;
        Vec6 v;
        v << f.w * (f.p + eps).cross(n_hat), f.w * n_hat;
        acc.array() += (dirs.transpose() * v).array().square();
      }
      for (std::size_t d = 0; d < nd; ++d) values[t * nd + d] = acc(d);
    }
  });

  for (std::size_t d = 0; d < nd; ++d) {
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) sum += values[t * nd + d];
    const double mean = sum / static_cast<double>(trials);
    double ss = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double e = values[t * nd + d] - mean;
      ss += e * e;
    }
    out[d].mean = mean;
    out[d].variance = trials > 1 ? ss / static_cast<double>(trials - 1) : 0.0;
    out[d].trials = trials;
  }
  return out;
}

inline MomentEstimate mc_hessian_stats(std::span<const PlaneFeature> features, const NoiseSpec& noise, const Vec6& u,
                                       std::size_t trials) {
  const std::array<Vec6, 1> dirs{u};
  return mc_hessian_stats(features, noise, dirs, trials).front();
}

// ---------------------------------------------------------------------------
// Noise-induced spurious information

struct NullDirectionBias {
  Vec6 direction = Vec6::Zero();
  double standard_mean_abs = 0.0;       // mean |u^T x| of the ridge-regularized full solve
  double probabilistic_mean_abs = 0.0;  // mean |u^T x| of the attenuated update
};

struct SpuriousInfoReport {
  Mat6 hessian = Mat6::Zero();           // noise-free H
  Mat6 noise_information = Mat6::Zero(); // H_N
  Mat6 mean_hessian = Mat6::Zero();      // Monte Carlo mean of H_hat
  double relative_error = 0.0;           // ||mean - (H + H_N)||_F / ||H_N||_F
  std::size_t trials = 0;
  std::size_t solve_trials = 0;
  std::vector<NullDirectionBias> null_directions;
};

struct SpuriousInfoOptions {
  std::size_t trials = 10000;
  std::size_t solve_trials = 100;  // trials that also run both solvers
  std::uint64_t seed = 0;
  double s = 10.0;
  double ridge = 1e-9;
};

/// Normal-only noise (points exact, small-angle normal model) on a degenerate
/// sample. Checks E[H_hat] = H + H_N with
/// H_N = sum sigma_n^2 F_i (I - n n^T) F_i^T, F_i = w [skew(p); I], and
/// measures the bias each solver leaves along the analytic null directions.
inline SpuriousInfoReport spurious_info_demo(const SceneSample& sample, double sigma_n,
                                             const SpuriousInfoOptions& opt = {}) {
  if (sample.null_basis.empty()) throw Error(Errc::RequiresDegenerateScene, "scene has no null directions");
  if (!(sigma_n >= 0.0)) throw Error(Errc::InvalidArgument, "sigma_n must be nonnegative");
  const auto base = exact_features(sample);
  const std::size_t nf = base.size();

  SpuriousInfoReport rep;
  rep.trials = opt.trials;
  rep.solve_trials = std::min(opt.solve_trials, opt.trials);
  for (const auto& f : base) {
    const Vec6 v = feature_vector(f);
    rep.hessian.noalias() += v * v.transpose();
    Eigen::Matrix<double, 6, 3> fi;
    fi << f.weight * skew(f.point), f.weight * Mat3::Identity();
    rep.noise_information.noalias() +=
        sigma_n * sigma_n * fi * (Mat3::Identity() - f.normal * f.normal.transpose()) * fi.transpose();
  }

  std::vector<std::pair<Vec3, Vec3>> tangents(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    const auto [t1, t2] = detail::tangent_basis(base[i].normal);
    tangents[i] = {base[i].normal.cross(t1), base[i].normal.cross(t2)};
  }
  const std::size_t nnull = sample.null_basis.size();

  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (opt.trials + kChunk - 1) / kChunk;
  std::vector<Mat6> chunk_h(chunks, Mat6::Zero());
  std::vector<std::vector<std::pair<double, double>>> chunk_bias(chunks, std::vector<std::pair<double, double>>(nnull));

  parallel_chunks(opt.trials, kChunk, [&](std::size_t begin, std::size_t end) {
    const std::size_t c = begin / kChunk;
    std::vector<PlaneFeature> noisy(nf);
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = Rng::stream(opt.seed, t);
      Mat6 h = Mat6::Zero();
      for (std::size_t i = 0; i < nf; ++i) {
        const PlaneFeature& f = base[i];
        const double g1 = sigma_n * rng.normal();
        const double g2 = sigma_n * rng.normal();
        PlaneFeature& nf_i = noisy[i];
        nf_i = f;
        nf_i.normal = f.normal + g1 * tangents[i].first + g2 * tangents[i].second;
        nf_i.offset = f.offset + (nf_i.normal - f.normal).dot(f.offset * f.normal);
        const Vec6 v = feature_vector(nf_i);
        h.noalias() += v * v.transpose();
      }
      chunk_h[c] += h;
      if (t < rep.solve_trials) {
        set_isotropic_covariances(noisy, 0.0, sigma_n);
        const HessianBundle bundle = accumulate(noisy);
        const UpdateSolution std_sol = solve_update(bundle, method::Standard{opt.ridge});
        const UpdateSolution prob_sol = solve_update(bundle, method::Probabilistic{opt.s});
        for (std::size_t k = 0; k < nnull; ++k) {
          const Vec6& u = sample.null_basis[k];
          chunk_bias[c][k].first += std::abs(u.dot(std_sol.twist.vector()));
          chunk_bias[c][k].second += std::abs(u.dot(prob_sol.twist.vector()));
        }
      }
    }
  });

  for (std::size_t c = 0; c < chunks; ++c) rep.mean_hessian += chunk_h[c];
  if (opt.trials > 0) rep.mean_hessian /= static_cast<double>(opt.trials);
  const double hn = rep.noise_information.norm();
  const double err = (rep.mean_hessian - (rep.hessian + rep.noise_information)).norm();
  rep.relative_error = hn > 0.0 ? err / hn : err;

  rep.null_directions.resize(nnull);
  for (std::size_t k = 0; k < nnull; ++k) {
    rep.null_directions[k].direction = sample.null_basis[k];
    for (std::size_t c = 0; c < chunks; ++c) {
      rep.null_directions[k].standard_mean_abs += chunk_bias[c][k].first;
      rep.null_directions[k].probabilistic_mean_abs += chunk_bias[c][k].second;
    }
    if (rep.solve_trials > 0) {
      rep.null_directions[k].standard_mean_abs /= static_cast<double>(rep.solve_trials);
      rep.null_directions[k].probabilistic_mean_abs /= static_cast<double>(rep.solve_trials);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Simulated scan/map pairs

struct ScanPair {
  std::vector<Vec3> source;  // scan, sensor frame
  std::vector<Vec3> target;  // map, world frame
  Pose truth;                // sensor pose in the world
  SceneSample scene;         // noise-free map sample
};

/// Two independent samplings of the same scene with isotropic point noise:
/// the map (world frame) and the scan (sensor frame at `truth`).
inline ScanPair simulate_scan_pair(const SceneSpec& spec, double sigma_p, const Pose& truth = Pose::identity()) {
  ScanPair out;
  out.truth = truth;
  SceneSpec map_spec = spec;
  map_spec.seed = mix64(spec.seed * 2 + 1);
  SceneSpec scan_spec = spec;
  scan_spec.seed = mix64(spec.seed * 2 + 2);
  out.scene = generate_scene(map_spec);
  const SceneSample scan = generate_scene(scan_spec);

  const NoiseSpec map_noise{sigma_p, 0.0, mix64(spec.seed ^ 0x51ULL)};
  const NoiseSpec scan_noise{sigma_p, 0.0, mix64(spec.seed ^ 0xa7ULL)};
  for (const auto& f : apply_noise(out.scene, map_noise)) out.target.push_back(f.point);
  const Pose to_sensor = inverse(truth);
  for (const auto& f : apply_noise(scan, scan_noise)) out.source.push_back(to_sensor * f.point);
  return out;
}

/// Features of the scan against the map at `pose`, as the ICP would build them.
inline FeatureSet scan_features(const ScanPair& pair, const IcpConfig& cfg, const Pose& pose) {
  const KdTree index(pair.target);
  return build_features(pair.source, index, pose, cfg);
}

}  // namespace degen_icp

#endif  // DEGEN_ICP_SIMULATION_HPP
