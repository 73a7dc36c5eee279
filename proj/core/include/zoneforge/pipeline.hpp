#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "zoneforge/common.hpp"

namespace zoneforge::cli {

/// One configuration document drives every command; --seed and --out
/// override the corresponding keys (flag > config > default). See README for
/// the grammar.
struct RunConfig {
  std::filesystem::path config_path;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::filesystem::path out_dir;
  std::filesystem::path world_dir;
  int threads = 0;

  std::shared_ptr<nlohmann::json> doc;

  static RunConfig load(const std::filesystem::path& config_file,
                        std::optional<std::uint64_t> seed_override,
                        std::optional<std::filesystem::path> out_override);

  const nlohmann::json& section(const std::string& name) const;  // {} when absent
  std::uint64_t require_seed(const std::string& for_what) const;
};

int cmd_simulate(const RunConfig& config);
int cmd_delineate(const RunConfig& config);
int cmd_overlap(const RunConfig& config);
int cmd_build_panel(const RunConfig& config);
int cmd_estimate(const RunConfig& config);
int cmd_report(const RunConfig& config);

/// Dispatches a subcommand; maps ValidationError to exit code 1 and
/// numerical failures to 2, printing diagnostics to stderr.
int run_command(const std::string& command, const RunConfig& config);

}  // namespace zoneforge::cli
