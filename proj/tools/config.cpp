#include "config.hpp"

#include <fstream>

namespace degen_icp::cli {

using nlohmann::json;

SolverMethod parse_method(const std::string& name, const RunConfig& params) {
  if (name == "standard") return method::Standard{params.ridge};
  if (name == "probabilistic") return method::Probabilistic{params.s};
  if (name == "eigen-truncate") return method::EigenTruncate{params.lambda_min};
  if (name == "solution-remap") return method::SolutionRemap{params.lambda_min};
  if (name == "cond-number") return method::ConditionNumber{params.kappa_max};
  throw Error(Errc::InvalidArgument, "unknown method '" + name + "'");
}

SolverMethod RunConfig::solver() const { return parse_method(method, *this); }

IcpConfig RunConfig::icp_config() const {
  IcpConfig c;
  c.method = solver();
  c.sigma_p = sigma_p;
  c.sigma_i = sigma_i;
  c.sigma_n_max = sigma_n_max;
  c.sigma_r = sigma_r;
  c.k_neighbors = k_neighbors;
  c.max_iterations = max_iterations;
  c.rot_tolerance = rot_tolerance;
  c.trans_tolerance = trans_tolerance;
  c.max_correspondence_distance = max_correspondence_distance;
  c.max_plane_distance = max_plane_distance;
  if (robust_kernel == "l2") {
    c.robust = {RobustKind::L2, 1.0};
  } else if (robust_kernel == "geman-mcclure") {
    const double scale = robust_scale.value_or(3.0 * sigma_p);
    // A zero default scale (noise-free sensor) degrades to plain least squares.
    c.robust = scale > 0.0 ? RobustCost{RobustKind::GemanMcClure, scale} : RobustCost{RobustKind::L2, 1.0};
  } else {
    throw Error(Errc::InvalidArgument, "unknown robust kernel '" + robust_kernel + "'");
  }
  return c;
}

SceneSpec RunConfig::scene_spec() const {
  SceneSpec spec = SceneSpec::make(parse_scene_kind(scene), points, seed);
  if (!dimensions.empty()) spec.dimensions = dimensions;
  return spec;
}

void RunConfig::validate() const {
  if (version != kConfigVersion) {
    throw Error(Errc::InvalidArgument, "unsupported config version " + std::to_string(version));
  }
  icp_config().validate();
  if (!(sigma_n >= 0.0)) throw Error(Errc::InvalidArgument, "sigma_n must be nonnegative");
  if (robust_scale && !(*robust_scale > 0.0)) throw Error(Errc::InvalidArgument, "robust_scale must be positive");
  parse_scene_kind(scene);
  if (points < 6) throw Error(Errc::InvalidArgument, "points must be at least 6");
  for (const auto* path : {&source, &target, &init}) {
    if (!path->empty() && !std::filesystem::exists(*path)) {
      throw Error(Errc::Io, "referenced file '" + *path + "' does not exist");
    }
  }
}

namespace {

template <typename T>
void read_key(const json& doc, const char* key, T& field) {
  if (auto it = doc.find(key); it != doc.end()) field = it->get<T>();
}

}  // namespace

void apply_json(RunConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw Error(Errc::Parse, "config must be a JSON object");
  static const std::vector<std::string> known = {
      "version", "method", "s", "lambda_min", "kappa_max", "ridge", "sigma_p", "sigma_i", "sigma_n",
      "sigma_n_max", "sigma_r", "k_neighbors", "max_iterations", "rot_tolerance", "trans_tolerance",
      "max_correspondence_distance", "max_plane_distance", "robust_kernel", "robust_scale", "scene",
      "dimensions", "points", "source", "target", "init", "out", "seed"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(Errc::Parse, "unknown config key '" + key + "'");
    }
  }
  try {
    read_key(doc, "version", cfg.version);
    if (cfg.version != kConfigVersion) {
      throw Error(Errc::Parse, "unsupported config version " + std::to_string(cfg.version));
    }
    read_key(doc, "method", cfg.method);
    read_key(doc, "s", cfg.s);
    read_key(doc, "lambda_min", cfg.lambda_min);
    read_key(doc, "kappa_max", cfg.kappa_max);
    read_key(doc, "ridge", cfg.ridge);
    read_key(doc, "sigma_p", cfg.sigma_p);
    read_key(doc, "sigma_i", cfg.sigma_i);
    read_key(doc, "sigma_n", cfg.sigma_n);
    read_key(doc, "sigma_n_max", cfg.sigma_n_max);
    read_key(doc, "sigma_r", cfg.sigma_r);
    read_key(doc, "k_neighbors", cfg.k_neighbors);
    read_key(doc, "max_iterations", cfg.max_iterations);
    read_key(doc, "rot_tolerance", cfg.rot_tolerance);
    read_key(doc, "trans_tolerance", cfg.trans_tolerance);
    read_key(doc, "max_correspondence_distance", cfg.max_correspondence_distance);
    read_key(doc, "max_plane_distance", cfg.max_plane_distance);
    read_key(doc, "robust_kernel", cfg.robust_kernel);
    if (auto it = doc.find("robust_scale"); it != doc.end() && !it->is_null()) cfg.robust_scale = it->get<double>();
    read_key(doc, "scene", cfg.scene);
    read_key(doc, "dimensions", cfg.dimensions);
    read_key(doc, "points", cfg.points);
    read_key(doc, "source", cfg.source);
    read_key(doc, "target", cfg.target);
    read_key(doc, "init", cfg.init);
    read_key(doc, "out", cfg.out);
    read_key(doc, "seed", cfg.seed);
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, path.string() + ": " + e.what());
  }
  RunConfig cfg;
  apply_json(cfg, doc);
  return cfg;
}

json to_json(const RunConfig& c) {
  json j = {{"version", c.version},
            {"method", c.method},
            {"s", c.s},
            {"lambda_min", c.lambda_min},
            {"kappa_max", c.kappa_max},
            {"ridge", c.ridge},
            {"sigma_p", c.sigma_p},
            {"sigma_i", c.sigma_i},
            {"sigma_n", c.sigma_n},
            {"sigma_n_max", c.sigma_n_max},
            {"sigma_r", c.sigma_r},
            {"k_neighbors", c.k_neighbors},
            {"max_iterations", c.max_iterations},
            {"rot_tolerance", c.rot_tolerance},
            {"trans_tolerance", c.trans_tolerance},
            {"max_correspondence_distance", c.max_correspondence_distance},
            {"max_plane_distance", c.max_plane_distance},
            {"robust_kernel", c.robust_kernel},
            {"scene", c.scene},
            {"dimensions", c.dimensions},
            {"points", c.points},
            {"source", c.source},
            {"target", c.target},
            {"init", c.init},
            {"out", c.out},
            {"seed", c.seed}};
  j["robust_scale"] = c.robust_scale ? json(*c.robust_scale) : json(nullptr);
  return j;
}

}  // namespace degen_icp::cli
