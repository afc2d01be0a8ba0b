#ifndef DEGEN_ICP_TOOLS_COMMANDS_HPP
#define DEGEN_ICP_TOOLS_COMMANDS_HPP

#include "config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace degen_icp::cli {

enum ExitCode : int { kOk = 0, kError = 1, kUsage = 2, kCheckFailed = 3 };

struct SimulateArgs {
  std::string format = "ply";  // ply or csv
};

struct DetectArgs {};

struct RegisterArgs {
  std::vector<double> offset;  // tx ty tz yaw_deg, scene mode
  std::string baseline;        // second method for a paired run
};

struct OracleArgs {
  std::size_t features = 100;
  std::size_t directions = 10;
  std::size_t trials = 100000;
  bool use_scene = false;
  double mean_tolerance_se = 3.0;
  double variance_tolerance = 0.10;
};

struct SweepArgs {
  std::string parameter = "s";
  std::vector<double> values;
};

int cmd_simulate(const RunConfig& cfg, const SimulateArgs& args, std::ostream& out);
int cmd_detect(const RunConfig& cfg, const DetectArgs& args, std::ostream& out);
int cmd_register(const RunConfig& cfg, const RegisterArgs& args, std::ostream& out);
int cmd_oracle(const RunConfig& cfg, const OracleArgs& args, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, const SweepArgs& args, std::ostream& out);

/// Parses "a,b,c" (empty string: no values) or "start:stop:step".
std::vector<double> parse_values(const std::string& text);

/// Full command line entry point. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace degen_icp::cli

#endif  // DEGEN_ICP_TOOLS_COMMANDS_HPP
