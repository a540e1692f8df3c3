#pragma once

#include "gslond/scenario_config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gslond {

inline constexpr std::string_view kToolName = "gslond";
inline constexpr std::string_view kToolVersion = "1.0.0";

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Everything needed to reproduce a simulate run.
struct RunManifest {
  std::string tool = std::string(kToolName);
  std::string version = std::string(kToolVersion);
  std::string config;                      // resolved config path
  std::vector<ConfigOverride> overrides;   // command-line overrides, in order
  std::string output;                      // CSV path
  std::vector<std::string> scenarios;      // resolved scenario ids

  void write(std::ostream& os) const;
  static RunManifest read(std::istream& is);
  static RunManifest load(const std::filesystem::path& path);
};

/// A config given by path, or by the name of a bundled config ("fig2").
std::filesystem::path resolve_config_path(const std::string& name);

/// Entry point of the command-line tool; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace gslond
