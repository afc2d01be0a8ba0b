#include "commands.hpp"

#include <degen_icp/degen_icp.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>

namespace degen_icp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Seed domains so that independent random quantities never share a stream.
constexpr std::uint64_t kNoiseDomain = 0x6e6f697365ULL;
constexpr std::uint64_t kDirectionDomain = 0x646972ULL;
constexpr std::uint64_t kOracleDomain = 0x6f7261636c65ULL;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

fs::path prepare_out(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::ofstream open_file(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open '" + path.string() + "' for writing");
  return f;
}

template <typename Derived>
json to_array(const Eigen::MatrixBase<Derived>& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  return a;
}

json stats_json(const CorrespondenceStats& s) {
  return {{"candidates", s.candidates}, {"too_far", s.too_far},   {"fit_failed", s.fit_failed},
          {"non_planar", s.non_planar}, {"outliers", s.outliers}, {"accepted", s.accepted}};
}

Pose offset_pose(const std::vector<double>& offset) {
  if (offset.size() != 4) throw Error(Errc::InvalidArgument, "--offset takes tx ty tz yaw_deg");
  return pose_from_yaw(offset[3] * std::numbers::pi / 180.0, Vec3(offset[0], offset[1], offset[2]));
}

struct Inputs {
  std::vector<Vec3> source;
  std::vector<Vec3> target;
  Pose init;
  std::optional<SceneSample> scene;  // scene mode only
  Pose truth;
};

// Clouds from files when both are given, otherwise a simulated scan/map pair
// of the configured scene with the sensor at the origin.
Inputs load_inputs(const RunConfig& cfg, const std::vector<double>& offset) {
  Inputs in;
  if (!cfg.source.empty() || !cfg.target.empty()) {
    if (cfg.source.empty() || cfg.target.empty()) throw Error(Errc::InvalidArgument, "both --source and --target are required");
    in.source = io::read_cloud(cfg.source).points;
    in.target = io::read_cloud(cfg.target).points;
  } else {
    ScanPair pair = simulate_scan_pair(cfg.scene_spec(), cfg.sigma_p);
    in.source = std::move(pair.source);
    in.target = std::move(pair.target);
    in.truth = pair.truth;
    in.scene = std::move(pair.scene);
  }
  if (!cfg.init.empty()) {
    in.init = io::read_pose(cfg.init);
  } else if (!offset.empty()) {
    in.init = offset_pose(offset);
  }
  return in;
}

void print_report(std::ostream& out, const DegeneracyAnalysis& a) {
  out << " k    eigenvalue          mu       sigma           p  direction\n";
  for (int k = 0; k < 6; ++k) {
    const auto& r = a.reports[k];
    out << ' ' << k << fmt(" %13.6e", r.signal) << fmt(" %11.4e", r.noise_mean) << fmt(" %11.4e", r.noise_std)
        << fmt(" %11.4e", r.probability) << "  [";
    for (int j = 0; j < 6; ++j) out << (j ? " " : "") << fmt("%+.3f", r.direction(j));
    out << "]\n";
  }
}

json report_json(const DirectionReport& r, int k) {
  return {{"type", "direction"},     {"index", k},         {"eigenvalue", r.signal},
          {"mu", r.noise_mean},      {"sigma", r.noise_std}, {"p", r.probability},
          {"s", r.snr_target},       {"direction", to_array(r.direction)}};
}

}  // namespace

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  if (text.find_first_not_of(" \t") == std::string::npos) return out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::string_view rest = text;
    while (true) {
      const auto pos = rest.find(':');
      parts.push_back(io::parse_number(rest.substr(0, pos), "range"));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (parts.size() != 3) throw Error(Errc::InvalidArgument, "range must be start:stop:step");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0)) throw Error(Errc::InvalidArgument, "range step must be positive");
    // Inclusive of stop up to rounding; stop < start gives an empty range.
    for (std::size_t i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > stop + 1e-9 * step) break;
      out.push_back(v);
    }
    return out;
  }
  std::string_view rest = text;
  while (true) {
    const auto pos = rest.find(',');
    auto token = rest.substr(0, pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    out.push_back(io::parse_number(token, "values"));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return out;
}

int cmd_simulate(const RunConfig& cfg, const SimulateArgs& args, std::ostream& out) {
  if (args.format != "ply" && args.format != "csv") throw Error(Errc::InvalidArgument, "format must be ply or csv");
  const SceneSpec spec = cfg.scene_spec();
  const SceneSample sample = generate_scene(spec);
  const NoiseSpec noise{cfg.sigma_p, cfg.sigma_n, mix64(cfg.seed ^ kNoiseDomain)};
  const auto noisy = apply_noise(sample, noise);

  io::PointCloud clean{sample.points, sample.normals};
  io::PointCloud measured;
  for (const auto& f : noisy) {
    measured.points.push_back(f.point);
    measured.normals.push_back(f.normal);
  }
  const fs::path dir = prepare_out(cfg);
  const std::string clean_name = "clean." + args.format;
  const std::string noisy_name = "noisy." + args.format;
  io::write_cloud(dir / clean_name, clean);
  io::write_cloud(dir / noisy_name, measured);

  json nulls = json::array();
  for (const auto& u : sample.null_basis) nulls.push_back(to_array(u));
  const json manifest = {{"version", kConfigVersion},
                         {"scene", to_string(spec.kind)},
                         {"dimensions", spec.dimensions},
                         {"points", spec.point_count},
                         {"seed", cfg.seed},
                         {"noise", {{"sigma_p", noise.sigma_p}, {"sigma_n", noise.sigma_n}, {"seed", noise.seed}}},
                         {"sensor_origin", to_array(sample.sensor_origin)},
                         {"null_basis", nulls},
                         {"files", {{"clean", clean_name}, {"noisy", noisy_name}}}};
  open_file(dir / "manifest.json") << manifest.dump(2) << '\n';

  out << "scene " << to_string(spec.kind) << ": " << sample.points.size() << " points, null space dimension "
      << sample.null_basis.size() << "\nwrote " << (dir / clean_name).string() << ", " << (dir / noisy_name).string()
      << ", " << (dir / "manifest.json").string() << '\n';
  return kOk;
}

int cmd_detect(const RunConfig& cfg, const DetectArgs&, std::ostream& out) {
  const IcpConfig icp_cfg = cfg.icp_config();
  const Inputs in = load_inputs(cfg, {});
  const KdTree index(in.target);
  const FeatureSet fset = build_features(in.source, index, in.init, icp_cfg);
  if (fset.features.empty()) throw Error(Errc::NoCorrespondences, "no valid point-to-plane correspondences");
  const DegeneracyAnalysis analysis = analyze(accumulate(fset.features), cfg.s);

  const auto& st = fset.stats;
  out << "features: " << fset.features.size() << " accepted of " << st.candidates << " (too far " << st.too_far
      << ", fit failed " << st.fit_failed << ", non-planar " << st.non_planar << ", normal outliers " << st.outliers
      << ")\n";
  print_report(out, analysis);

  const fs::path dir = prepare_out(cfg);
  auto log = open_file(dir / "detect.jsonl");
  int degenerate = 0;
  for (int k = 0; k < 6; ++k) {
    log << report_json(analysis.reports[k], k).dump() << '\n';
    if (analysis.reports[k].probability < 0.01) ++degenerate;
  }
  const json summary = {{"type", "summary"},
                        {"features", fset.features.size()},
                        {"stats", stats_json(st)},
                        {"s", cfg.s},
                        {"degenerate_below_0.01", degenerate}};
  log << summary.dump() << '\n';
  out << "directions with p < 0.01: " << degenerate << '\n';
  return kOk;
}

int cmd_register(const RunConfig& cfg, const RegisterArgs& args, std::ostream& out) {
  const IcpConfig icp_cfg = cfg.icp_config();
  const Inputs in = load_inputs(cfg, args.offset);
  const RegistrationResult result = icp(in.source, in.target, in.init, icp_cfg);

  const fs::path dir = prepare_out(cfg);
  io::write_pose(dir / "pose.txt", result.pose);
  {
    auto f = open_file(dir / "information.txt");
    io::write_matrix(f, result.information);
  }
  {
    auto f = open_file(dir / "iterations.jsonl");
    for (const auto& rec : result.iterations) {
      const json j = {{"iteration", rec.index},
                      {"pose_before", to_array(rec.pose_before.matrix())},
                      {"twist_local", to_array(rec.update.twist.vector())},
                      {"twist_world", to_array(rec.world_twist)},
                      {"eigenvalues", to_array(rec.update.analysis.basis.values)},
                      {"probabilities", to_array(rec.update.probabilities)},
                      {"stats", stats_json(rec.stats)}};
      f << j.dump() << '\n';
    }
  }
  json status = {{"status", "ok"},
                 {"method", method_name(icp_cfg.method)},
                 {"converged", result.converged},
                 {"termination", to_string(result.termination)},
                 {"iterations", result.iterations.size()},
                 {"pose", to_array(result.pose.matrix())}};
  if (in.scene) {
    const Pose err = compose(inverse(in.truth), result.pose);
    status["translation_error"] = err.translation.norm();
    status["rotation_error_deg"] = rotation_angle(err.rotation) * 180.0 / std::numbers::pi;
  }
  open_file(dir / "status.json") << status.dump(2) << '\n';

  out << method_name(icp_cfg.method) << ": " << to_string(result.termination) << " after "
      << result.iterations.size() << " iterations\n";
  if (in.scene) {
    out << "error vs truth: " << fmt("%.6f", status["translation_error"].get<double>()) << " m, "
        << fmt("%.6f", status["rotation_error_deg"].get<double>()) << " deg\n";
  }

  if (!args.baseline.empty()) {
    IcpConfig base_cfg = icp_cfg;
    base_cfg.method = parse_method(args.baseline, cfg);
    const RegistrationResult base = icp(in.source, in.target, in.init, base_cfg);
    const auto run_json = [](const RegistrationResult& r, const SolverMethod& m) {
      return json{{"method", method_name(m)},
                  {"converged", r.converged},
                  {"iterations", r.iterations.size()},
                  {"pose", to_array(r.pose.matrix())}};
    };
    json cmp = {{"primary", run_json(result, icp_cfg.method)}, {"baseline", run_json(base, base_cfg.method)}};
    const Pose diff = compose(inverse(base.pose), result.pose);
    cmp["pose_difference"] = {{"translation", diff.translation.norm()},
                              {"rotation_deg", rotation_angle(diff.rotation) * 180.0 / std::numbers::pi}};
    // First-update component along each analytic null direction, world frame.
    json nulls = json::array();
    if (in.scene) {
      for (const auto& u : in.scene->null_basis) {
        const double p = std::abs(u.dot(result.iterations.front().world_twist));
        const double b = std::abs(u.dot(base.iterations.front().world_twist));
        json entry = {{"direction", to_array(u)}, {"primary_first_update", p}, {"baseline_first_update", b}};
        entry["attenuation_ratio"] = p > 0.0 ? json(b / p) : json(nullptr);
        nulls.push_back(entry);
        out << "null direction [";
        for (int j = 0; j < 6; ++j) out << (j ? " " : "") << u(j);
        out << "]: first update " << fmt("%.3e", p) << " vs baseline " << fmt("%.3e", b) << '\n';
      }
    }
    cmp["null_directions"] = nulls;
    open_file(dir / "comparison.json") << cmp.dump(2) << '\n';
  }
  return kOk;
}

int cmd_oracle(const RunConfig& cfg, const OracleArgs& args, std::ostream& out) {
  if (args.directions == 0 || args.trials < 2) throw Error(Errc::InvalidArgument, "need directions >= 1 and trials >= 2");
  std::vector<PlaneFeature> features;
  if (args.use_scene) {
    features = exact_features(generate_scene(cfg.scene_spec()));
  } else {
    if (args.features == 0) throw Error(Errc::InvalidArgument, "features must be positive");
    features = random_features(args.features, cfg.seed);
  }
  set_isotropic_covariances(features, cfg.sigma_p, cfg.sigma_n);

  Rng rng(mix64(cfg.seed ^ kDirectionDomain));
  std::vector<Vec6> dirs(args.directions);
  for (auto& u : dirs) u = random_direction(rng);
  const NoiseSpec noise{cfg.sigma_p, cfg.sigma_n, mix64(cfg.seed ^ kOracleDomain), NormalNoiseModel::SmallAngle};
  const auto mc = mc_hessian_stats(features, noise, dirs, args.trials);

  const fs::path dir = prepare_out(cfg);
  auto log = open_file(dir / "oracle.jsonl");
  out << " d   analytic_mean        mc_mean   |diff|/se   analytic_var         mc_var  var_rel  ok\n";
  bool all_ok = true;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const MomentEstimate a = analytic_moments(features, dirs[d]);
    const double se = mc[d].standard_error();
    const double diff = std::abs(mc[d].mean - a.mean);
    // Tiny absolute slack so the noise-free case (se = 0) compares by rounding.
    const bool mean_ok = diff <= args.mean_tolerance_se * se + 1e-12 * std::abs(a.mean);
    const double var_rel = a.variance > 0.0 ? std::abs(mc[d].variance - a.variance) / a.variance : mc[d].variance;
    const bool var_ok = var_rel <= args.variance_tolerance;
    all_ok = all_ok && mean_ok && var_ok;
    const double z = se > 0.0 ? diff / se : 0.0;
    out << ' ' << d << fmt(" %15.8e", a.mean) << fmt(" %14.8e", mc[d].mean) << fmt(" %11.3f", z)
        << fmt(" %14.6e", a.variance) << fmt(" %14.6e", mc[d].variance) << fmt(" %8.4f", var_rel)
        << (mean_ok && var_ok ? "  yes" : "  NO") << '\n';
    const json j = {{"direction_index", d},    {"direction", to_array(dirs[d])}, {"analytic_mean", a.mean},
                    {"mc_mean", mc[d].mean},   {"mc_standard_error", se},         {"mean_ok", mean_ok},
                    {"analytic_variance", a.variance}, {"mc_variance", mc[d].variance}, {"variance_relative_error", var_rel},
                    {"variance_ok", var_ok},   {"trials", args.trials}};
    log << j.dump() << '\n';
  }
  out << (all_ok ? "oracle agreement: ok\n" : "oracle agreement: FAILED\n");
  return all_ok ? kOk : kCheckFailed;
}

int cmd_sweep(const RunConfig& cfg, const SweepArgs& args, std::ostream& out) {
  const std::string& param = args.parameter;
  if (param != "s" && param != "sigma-n" && param != "sigma-p") {
    throw Error(Errc::InvalidArgument, "sweep parameter must be s, sigma-n or sigma-p");
  }
  const fs::path dir = prepare_out(cfg);
  const fs::path csv_path = dir / "sweep.csv";
  auto csv = open_file(csv_path);
  csv << "param,value,direction,eigenvalue,mu,sigma,p\n";

  std::vector<PlaneFeature> features;
  if (!args.values.empty()) features = exact_features(generate_scene(cfg.scene_spec()));

  // p per value (in the given order) per direction, for the monotonicity check.
  std::vector<std::pair<double, Vec6>> curve;
  for (const double v : args.values) {
    double s = cfg.s, sigma_p = cfg.sigma_p, sigma_n = cfg.sigma_n;
    if (param == "s") s = v;
    if (param == "sigma-n") sigma_n = v;
    if (param == "sigma-p") sigma_p = v;
    set_isotropic_covariances(features, sigma_p, sigma_n);
    const DegeneracyAnalysis a = analyze(accumulate(features), s);
    for (int k = 0; k < 6; ++k) {
      const auto& r = a.reports[k];
      csv << param << ',' << io::format_number(v) << ',' << k << ',' << io::format_number(r.signal) << ','
          << io::format_number(r.noise_mean) << ',' << io::format_number(r.noise_std) << ','
          << io::format_number(r.probability) << '\n';
    }
    curve.emplace_back(v, a.probabilities());
  }

  std::stable_sort(curve.begin(), curve.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  // Exact null directions give a p that is constant in the noise level up to
  // rounding, hence the relative slack.
  bool monotone = true;
  for (std::size_t i = 1; i < curve.size(); ++i)
    for (int k = 0; k < 6; ++k)
      monotone = monotone && curve[i].second(k) <= curve[i - 1].second(k) * (1.0 + 1e-9);

  out << "wrote " << curve.size() * 6 << " rows to " << csv_path.string() << '\n';
  if (curve.size() > 1) out << "p nonincreasing in " << param << ": " << (monotone ? "yes" : "no") << '\n';
  // Only s carries a guaranteed ordering; the noise sweeps are reported.
  return param == "s" && !monotone ? kCheckFailed : kOk;
}

namespace {

// Binds a flag to a field of a scratch config; set flags are copied onto the
// loaded config afterwards so that flags override the file.
class Overrides {
 public:
  template <typename T>
  CLI::Option* bind(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app->add_option(name, flags_.*field, help);
    bound_.emplace_back(opt, [this, field](RunConfig& c) { c.*field = flags_.*field; });
    return opt;
  }

  void apply(RunConfig& cfg) const {
    for (const auto& [opt, copy] : bound_)
      if (opt->count() > 0) copy(cfg);
  }

 private:
  RunConfig flags_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> bound_;
};

const std::vector<std::string> kMethods = {"standard", "probabilistic", "eigen-truncate", "solution-remap",
                                           "cond-number"};
const std::vector<std::string> kScenes = {"plane", "corridor", "cylinder", "cylinder-floor", "room"};

void add_common(CLI::App* sub, Overrides& ov, std::string& config_path) {
  sub->add_option("--config", config_path, "JSON config file (version 1)");
  ov.bind(sub, "--seed", &RunConfig::seed, "Random seed");
  ov.bind(sub, "--method", &RunConfig::method, "Update rule")->check(CLI::IsMember(kMethods));
  ov.bind(sub, "--s", &RunConfig::s, "Signal-to-noise target");
  ov.bind(sub, "--lambda-min", &RunConfig::lambda_min, "Eigenvalue threshold for eigen-truncate/solution-remap");
  ov.bind(sub, "--kappa-max", &RunConfig::kappa_max, "Condition number threshold for cond-number");
  ov.bind(sub, "--ridge", &RunConfig::ridge, "Tikhonov ridge for the standard solve");
  ov.bind(sub, "--sigma-p", &RunConfig::sigma_p, "Point noise std (m)");
  ov.bind(sub, "--sigma-i", &RunConfig::sigma_i, "Per-point noise for normal covariance (m)");
  ov.bind(sub, "--sigma-n-max", &RunConfig::sigma_n_max, "Normal outlier threshold");
  ov.bind(sub, "--sigma-r", &RunConfig::sigma_r, "Residual std for the information matrix (m)");
  ov.bind(sub, "--out", &RunConfig::out, "Output directory");
  ov.bind(sub, "--kind", &RunConfig::scene, "Scene kind")->check(CLI::IsMember(kScenes));
  ov.bind(sub, "--points", &RunConfig::points, "Scene point count");
  ov.bind(sub, "--dims", &RunConfig::dimensions, "Scene dimensions")->delimiter(',');
}

void add_icp(CLI::App* sub, Overrides& ov) {
  ov.bind(sub, "--source", &RunConfig::source, "Source cloud (.ply/.csv), sensor frame");
  ov.bind(sub, "--target", &RunConfig::target, "Target cloud (.ply/.csv), world frame");
  ov.bind(sub, "--init", &RunConfig::init, "Initial pose file (16 numbers, row-major)");
  ov.bind(sub, "--k-neighbors", &RunConfig::k_neighbors, "Neighbors per plane fit");
  ov.bind(sub, "--max-iterations", &RunConfig::max_iterations, "ICP iteration cap");
  ov.bind(sub, "--max-correspondence-distance", &RunConfig::max_correspondence_distance, "Nearest-neighbor gate (m)");
  ov.bind(sub, "--max-plane-distance", &RunConfig::max_plane_distance, "Planarity gate for neighborhoods (m)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Degeneracy-aware point-to-plane registration tools"};
  app.name("degen_icp");
  app.require_subcommand(1, 1);

  Overrides ov;
  std::string config_path;
  SimulateArgs sim;
  DetectArgs det;
  RegisterArgs reg;
  OracleArgs ora;
  SweepArgs swp;
  std::string values_text;

  auto* simulate = app.add_subcommand("simulate", "Generate a scene: clean and noisy clouds plus a manifest");
  add_common(simulate, ov, config_path);
  ov.bind(simulate, "--sigma-n", &RunConfig::sigma_n, "Normal noise std (rad)");
  simulate->add_option("--format", sim.format, "Cloud format")->check(CLI::IsMember({"ply", "csv"}));

  auto* detect = app.add_subcommand("detect", "Degeneracy report for a cloud pair or a simulated scene");
  add_common(detect, ov, config_path);
  add_icp(detect, ov);

  auto* registration = app.add_subcommand("register", "Run ICP and write pose, information and iteration log");
  add_common(registration, ov, config_path);
  add_icp(registration, ov);
  registration->add_option("--offset", reg.offset, "Initial offset tx,ty,tz,yaw_deg (scene mode)")
      ->delimiter(',')
      ->expected(4);
  registration->add_option("--baseline", reg.baseline, "Second method for a paired comparison")
      ->check(CLI::IsMember(kMethods));

  auto* oracle = app.add_subcommand("oracle", "Analytic vs Monte Carlo moments of u^T H u");
  add_common(oracle, ov, config_path);
  ov.bind(oracle, "--sigma-n", &RunConfig::sigma_n, "Normal noise std (rad)");
  oracle->add_option("--features", ora.features, "Random feature count");
  oracle->add_option("--directions", ora.directions, "Random directions");
  oracle->add_option("--trials", ora.trials, "Monte Carlo trials");
  oracle->add_flag("--scene-features", ora.use_scene, "Use the noise-free scene instead of random features");
  oracle->add_option("--mean-tol", ora.mean_tolerance_se, "Mean tolerance in standard errors");
  oracle->add_option("--var-tol", ora.variance_tolerance, "Relative variance tolerance");

  auto* sweep = app.add_subcommand("sweep", "Probabilities over a parameter range, as CSV");
  add_common(sweep, ov, config_path);
  ov.bind(sweep, "--sigma-n", &RunConfig::sigma_n, "Normal noise std (rad)");
  sweep->add_option("--param", swp.parameter, "Swept parameter")->check(CLI::IsMember({"s", "sigma-n", "sigma-p"}));
  sweep->add_option("--values", values_text, "Values a,b,c or range start:stop:step")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    ov.apply(cfg);
    cfg.validate();
    if (simulate->parsed()) return cmd_simulate(cfg, sim, out);
    if (detect->parsed()) return cmd_detect(cfg, det, out);
    if (registration->parsed()) return cmd_register(cfg, reg, out);
    if (oracle->parsed()) return cmd_oracle(cfg, ora, out);
    swp.values = parse_values(values_text);
    return cmd_sweep(cfg, swp, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace degen_icp::cli
