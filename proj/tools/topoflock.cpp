#include <CLI11.hpp>

#include <iostream>

#include "topoflock/config.hpp"
#include "topoflock/errors.hpp"
#include "topoflock/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"topological alignment experiment runner"};
  std::string config_path, preset, out_dir;
  long long seed = -1;
  bool strict = false, dump_operators = false, list_presets = false, print_config = false;
  app.add_option("--config", config_path, "INI experiment description");
  app.add_option("--preset", preset, "built-in preset (thm12-rootlog, e0-flocking, kernel-compare)");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "RNG seed (overrides run.seed)");
  app.add_flag("--strict", strict, "exit with code 3 when a runtime check fails");
  app.add_flag("--dump-operators", dump_operators, "write operator fields at t = 0");
  app.add_flag("--list-presets", list_presets, "print preset names and exit");
  app.add_flag("--print-config", print_config, "print the resolved config and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list_presets) {
    for (const auto& name : topoflock::preset_names()) std::cout << name << '\n';
    return 0;
  }
  if (config_path.empty() == preset.empty()) {
    std::cerr << "exactly one of --config or --preset is required\n";
    return 2;
  }

  topoflock::ExperimentConfig config;
  try {
    config = preset.empty() ? topoflock::parse_config(config_path) : topoflock::preset_config(preset);
  } catch (const topoflock::ConfigInvalid& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
  if (print_config) {
    std::cout << topoflock::serialize_config(config);
    return 0;
  }

  topoflock::RunControls controls;
  controls.strict = strict;
  controls.dump_operators = dump_operators;
  const topoflock::RunSummary summary = topoflock::run_experiment(config, controls);
  topoflock::write_manifest(std::cout, summary, config);
  return summary.exit_code;
}
