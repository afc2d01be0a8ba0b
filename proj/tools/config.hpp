#ifndef DEGEN_ICP_TOOLS_CONFIG_HPP
#define DEGEN_ICP_TOOLS_CONFIG_HPP

#include <degen_icp/registration.hpp>
#include <degen_icp/simulation.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace degen_icp::cli {

inline constexpr int kConfigVersion = 1;

/// Everything a command needs. Loaded from a JSON document (schema version 1,
/// keys named as the fields below), then overridden by command-line flags.
struct RunConfig {
  int version = kConfigVersion;

  // update rule
  std::string method = "probabilistic";
  double s = 10.0;
  double lambda_min = 100.0;
  double kappa_max = 1e3;
  double ridge = 0.0;

  // sensor noise
  double sigma_p = 0.01;
  double sigma_i = 0.01;
  double sigma_n = 0.01;  // direct normal noise for simulate/oracle
  double sigma_n_max = 0.10;
  double sigma_r = 0.015;

  // ICP controls
  std::size_t k_neighbors = 5;
  std::size_t max_iterations = 30;
  double rot_tolerance = 1e-4;
  double trans_tolerance = 1e-4;
  double max_correspondence_distance = 1.0;
  double max_plane_distance = 0.2;
  std::string robust_kernel = "geman-mcclure";
  std::optional<double> robust_scale;  // default 3 sigma_p

  // inputs
  std::string scene = "room";
  std::vector<double> dimensions;  // empty: scene defaults
  std::size_t points = 2000;
  std::string source;
  std::string target;
  std::string init;

  std::string out = "out";
  std::uint64_t seed = 0;

  SolverMethod solver() const;
  IcpConfig icp_config() const;
  SceneSpec scene_spec() const;
  void validate() const;
};

/// Applies the keys of `doc` onto `cfg`; unknown keys and a wrong version are errors.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

SolverMethod parse_method(const std::string& name, const RunConfig& params);

}  // namespace degen_icp::cli

#endif  // DEGEN_ICP_TOOLS_CONFIG_HPP
