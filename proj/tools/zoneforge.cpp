#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "zoneforge/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"zoneforge: commuting-zone delineation, overlap instruments and "
               "dynamic-panel estimation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  const char* names[] = {"simulate", "delineate", "overlap", "build-panel", "estimate", "report"};
  const char* blurbs[] = {
      "generate a synthetic world with known true effects",
      "cluster municipalities into labour markets",
      "intersect markets with agencies and apply the selection criterion",
      "aggregate person-quarter records into the market panel",
      "fit the dynamic panel model with diagnostics and bootstrap",
      "write the summary table and plot-ready effect curves"};
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("--config", config_path, "configuration file (JSON)")->required();
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", out_dir, "override the configured output directory");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    zoneforge::cli::RunConfig config = zoneforge::cli::RunConfig::load(
        config_path, seed,
        out_dir ? std::optional<std::filesystem::path>(*out_dir) : std::nullopt);
    return zoneforge::cli::run_command(app.get_subcommands().front()->get_name(), config);
  } catch (const zoneforge::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
